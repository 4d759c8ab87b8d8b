#include <algorithm>
#include <cmath>

#include "advtrl/env.hpp"
#include "advtrl/errors.hpp"

namespace advtrl {

namespace {

constexpr int kMargin = 1;

void fill_rect(Frame& f, int r0, int r1, int c0, int c1, float v) {
    r0 = std::max(r0, 0);
    c0 = std::max(c0, 0);
    r1 = std::min(r1, f.height);
    c1 = std::min(c1, f.width);
    for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) f.at(r, c) = v;
}

}  // namespace

MiniPong::MiniPong(const EnvConfig& config) : config_(config), size_(config.frame_size) {
    if (size_ < 32) throw ConfigError("frame_size must be >= 32");
    config_.game = Game::minipong;
    paddle_len_ = std::max(4, size_ / 4);
    paddle_w_ = std::max(2, size_ / 32);
    ball_size_ = std::max(2, size_ / 32);
    speed_ = size_ / 40.0;
    paddle_speed_ = 1.5 * speed_;
    opponent_speed_ = 0.55 * speed_;
}

Frame MiniPong::reset(uint64_t seed) {
    rng_ = RngStream::fork(config_.seed, seed);
    paddle_y_ = opponent_y_ = size_ / 2.0;
    agent_score_ = opponent_score_ = 0;
    steps_ = 0;
    terminal_ = false;
    serve();
    return render();
}

void MiniPong::serve() {
    ball_.x = size_ / 2.0;
    ball_.y = size_ / 2.0;
    ball_.vx = (rng_.bernoulli(0.5) ? 1.0 : -1.0) * speed_;
    ball_.vy = rng_.uniform(-0.5, 0.5) * speed_;
}

bool MiniPong::advance_ball() {
    const double half = ball_size_ / 2.0;
    const double face_agent = size_ - kMargin - paddle_w_;  // left face of agent paddle
    const double face_opp = kMargin + paddle_w_;            // right face of opponent paddle
    const double reach = (paddle_len_ + ball_size_) / 2.0;

    const double maxv = std::max(std::abs(ball_.vx), std::abs(ball_.vy));
    const int substeps = std::max(1, static_cast<int>(std::ceil(maxv / 0.5)));
    for (int i = 0; i < substeps; ++i) {
        ball_.x += ball_.vx / substeps;
        ball_.y += ball_.vy / substeps;

        if (ball_.y - half < 0.0) {
            ball_.y = 2.0 * half - ball_.y;
            ball_.vy = -ball_.vy;
        } else if (ball_.y + half > size_) {
            ball_.y = 2.0 * (size_ - half) - ball_.y;
            ball_.vy = -ball_.vy;
        }

        if (ball_.vx > 0.0 && ball_.x + half >= face_agent &&
            ball_.x - half <= face_agent + paddle_w_ && std::abs(ball_.y - paddle_y_) <= reach) {
            const double offset = std::clamp((ball_.y - paddle_y_) / (paddle_len_ / 2.0), -1.0, 1.0);
            ball_.vx = -speed_;
            ball_.vy = speed_ * offset;
            ball_.x = face_agent - half;
        } else if (ball_.vx < 0.0 && ball_.x - half <= face_opp &&
                   ball_.x + half >= kMargin && std::abs(ball_.y - opponent_y_) <= reach) {
            const double offset =
                std::clamp((ball_.y - opponent_y_) / (paddle_len_ / 2.0), -1.0, 1.0);
            ball_.vx = speed_;
            ball_.vy = speed_ * offset;
            ball_.x = face_opp + half;
        }

        if (ball_.x + half < 0.0) {
            pending_reward_ = 1;  // opponent missed
            return true;
        }
        if (ball_.x - half > size_) {
            pending_reward_ = -1;  // agent missed
            return true;
        }
    }
    return false;
}

StepResult MiniPong::step(Action action) {
    if (terminal_) throw StepAfterTerminal("step called on finished MiniPong episode");
    if (action.index < 0 || action.index >= action_count())
        throw ConfigError("invalid action index " + std::to_string(action.index));
    ++steps_;

    if (action.index == 1) paddle_y_ -= paddle_speed_;
    if (action.index == 2) paddle_y_ += paddle_speed_;
    paddle_y_ = std::clamp(paddle_y_, paddle_len_ / 2.0, size_ - paddle_len_ / 2.0);

    const double track = std::clamp(ball_.y - opponent_y_, -opponent_speed_, opponent_speed_);
    opponent_y_ = std::clamp(opponent_y_ + track, paddle_len_ / 2.0, size_ - paddle_len_ / 2.0);

    pending_reward_ = 0;
    double reward = 0.0;
    if (advance_ball()) {
        reward = pending_reward_;
        if (pending_reward_ > 0)
            ++agent_score_;
        else
            ++opponent_score_;
        if (agent_score_ < kPointsToWin && opponent_score_ < kPointsToWin) serve();
    }

    terminal_ = agent_score_ >= kPointsToWin || opponent_score_ >= kPointsToWin ||
                steps_ >= kMaxEpisodeSteps;
    return {render(), reward, terminal_};
}

Frame MiniPong::render() const {
    Frame f(size_, size_, 0.0f);

    const int opp_r0 = static_cast<int>(std::lround(opponent_y_ - paddle_len_ / 2.0));
    fill_rect(f, opp_r0, opp_r0 + paddle_len_, kMargin, kMargin + paddle_w_, 1.0f);

    const int agent_r0 = static_cast<int>(std::lround(paddle_y_ - paddle_len_ / 2.0));
    fill_rect(f, agent_r0, agent_r0 + paddle_len_, size_ - kMargin - paddle_w_, size_ - kMargin,
              1.0f);

    const int ball_r0 = static_cast<int>(std::lround(ball_.y - ball_size_ / 2.0));
    const int ball_c0 = static_cast<int>(std::lround(ball_.x - ball_size_ / 2.0));
    fill_rect(f, ball_r0, ball_r0 + ball_size_, ball_c0, ball_c0 + ball_size_, 1.0f);
    return f;
}

}  // namespace advtrl
