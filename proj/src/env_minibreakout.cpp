#include <algorithm>
#include <cmath>

#include "advtrl/env.hpp"
#include "advtrl/errors.hpp"

namespace advtrl {

namespace {

constexpr int kMargin = 1;
constexpr float kBrickValue = 0.7f;

void fill_rect(Frame& f, int r0, int r1, int c0, int c1, float v) {
    r0 = std::max(r0, 0);
    c0 = std::max(c0, 0);
    r1 = std::min(r1, f.height);
    c1 = std::min(c1, f.width);
    for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) f.at(r, c) = v;
}

}  // namespace

MiniBreakout::MiniBreakout(const EnvConfig& config) : config_(config), size_(config.frame_size) {
    if (size_ < 32) throw ConfigError("frame_size must be >= 32");
    config_.game = Game::minibreakout;
    paddle_w_ = breakout_paddle_width(config_.level, size_);
    paddle_t_ = std::max(2, size_ / 32);
    ball_size_ = std::max(2, size_ / 32);
    brick_w_ = size_ / kBrickCols;
    brick_h_ = std::max(2, size_ / 21);
    brick_top_ = size_ / 8;
    speed_ = size_ / 40.0;
    paddle_speed_ = 1.5 * speed_;
    bricks_.assign(kBrickRows * kBrickCols, false);
}

Frame MiniBreakout::reset(uint64_t seed) {
    rng_ = RngStream::fork(config_.seed, seed);
    bricks_.assign(kBrickRows * kBrickCols, true);
    paddle_x_ = size_ / 2.0;
    ball_.x = size_ / 2.0 + rng_.uniform(-size_ / 8.0, size_ / 8.0);
    ball_.y = 0.65 * size_;
    ball_.vx = rng_.uniform(-0.6, 0.6) * speed_;
    ball_.vy = -speed_;
    steps_ = 0;
    terminal_ = false;
    return render();
}

int MiniBreakout::bricks_remaining() const {
    return static_cast<int>(std::count(bricks_.begin(), bricks_.end(), true));
}

void MiniBreakout::clear_bricks_except(int row, int col) {
    bricks_.assign(kBrickRows * kBrickCols, false);
    bricks_[static_cast<size_t>(row) * kBrickCols + col] = true;
}

int MiniBreakout::advance_ball(bool& lost) {
    const double half = ball_size_ / 2.0;
    const double paddle_top = size_ - kMargin - paddle_t_;
    int destroyed = 0;

    const double maxv = std::max(std::abs(ball_.vx), std::abs(ball_.vy));
    const int substeps = std::max(1, static_cast<int>(std::ceil(maxv / 0.5)));
    for (int i = 0; i < substeps; ++i) {
        const double prev_y = ball_.y;
        ball_.x += ball_.vx / substeps;
        ball_.y += ball_.vy / substeps;

        if (ball_.x - half < 0.0) {
            ball_.x = 2.0 * half - ball_.x;
            ball_.vx = std::abs(ball_.vx);
        } else if (ball_.x + half > size_) {
            ball_.x = 2.0 * (size_ - half) - ball_.x;
            ball_.vx = -std::abs(ball_.vx);
        }
        if (ball_.y - half < 0.0) {
            ball_.y = 2.0 * half - ball_.y;
            ball_.vy = std::abs(ball_.vy);
        }

        // Brick collision: at most one brick per substep.
        for (int r = 0; r < kBrickRows; ++r) {
            const double y0 = brick_top_ + static_cast<double>(r) * brick_h_;
            const double y1 = y0 + brick_h_;
            if (ball_.y + half <= y0 || ball_.y - half >= y1) continue;
            bool hit = false;
            for (int c = 0; c < kBrickCols; ++c) {
                if (!bricks_[static_cast<size_t>(r) * kBrickCols + c]) continue;
                const double x0 = static_cast<double>(c) * brick_w_;
                const double x1 = x0 + brick_w_;
                if (ball_.x + half <= x0 || ball_.x - half >= x1) continue;
                bricks_[static_cast<size_t>(r) * kBrickCols + c] = false;
                ++destroyed;
                if (prev_y <= y0 || prev_y >= y1)
                    ball_.vy = -ball_.vy;
                else
                    ball_.vx = -ball_.vx;
                hit = true;
                break;
            }
            if (hit) break;
        }

        if (ball_.vy > 0.0 && ball_.y + half >= paddle_top && ball_.y - half <= size_ - kMargin &&
            std::abs(ball_.x - paddle_x_) <= (paddle_w_ + ball_size_) / 2.0) {
            const double offset = std::clamp((ball_.x - paddle_x_) / (paddle_w_ / 2.0), -1.0, 1.0);
            ball_.vy = -speed_;
            ball_.vx = speed_ * offset;
            ball_.y = paddle_top - half;
        }

        if (ball_.y - half > size_) {
            lost = true;
            return destroyed;
        }
    }
    return destroyed;
}

StepResult MiniBreakout::step(Action action) {
    if (terminal_) throw StepAfterTerminal("step called on finished MiniBreakout episode");
    if (action.index < 0 || action.index >= action_count())
        throw ConfigError("invalid action index " + std::to_string(action.index));
    ++steps_;

    if (action.index == 1) paddle_x_ -= paddle_speed_;
    if (action.index == 2) paddle_x_ += paddle_speed_;
    paddle_x_ = std::clamp(paddle_x_, paddle_w_ / 2.0, size_ - paddle_w_ / 2.0);

    bool lost = false;
    const int destroyed = advance_ball(lost);

    terminal_ = lost || bricks_remaining() == 0 || steps_ >= kMaxEpisodeSteps;
    return {render(), static_cast<double>(destroyed), terminal_};
}

Frame MiniBreakout::render() const {
    Frame f(size_, size_, 0.0f);

    for (int r = 0; r < kBrickRows; ++r) {
        const int y0 = brick_top_ + r * brick_h_;
        for (int c = 0; c < kBrickCols; ++c) {
            if (!bricks_[static_cast<size_t>(r) * kBrickCols + c]) continue;
            fill_rect(f, y0, y0 + brick_h_, c * brick_w_, (c + 1) * brick_w_, kBrickValue);
        }
    }

    const int paddle_c0 = static_cast<int>(std::lround(paddle_x_ - paddle_w_ / 2.0));
    fill_rect(f, size_ - kMargin - paddle_t_, size_ - kMargin, paddle_c0, paddle_c0 + paddle_w_,
              1.0f);

    const int ball_r0 = static_cast<int>(std::lround(ball_.y - ball_size_ / 2.0));
    const int ball_c0 = static_cast<int>(std::lround(ball_.x - ball_size_ / 2.0));
    fill_rect(f, ball_r0, ball_r0 + ball_size_, ball_c0, ball_c0 + ball_size_, 1.0f);
    return f;
}

}  // namespace advtrl
