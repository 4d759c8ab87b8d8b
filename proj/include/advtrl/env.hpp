#pragma once

#include <memory>
#include <optional>
#include <string>

#include "advtrl/augment.hpp"
#include "advtrl/frame.hpp"
#include "advtrl/rng.hpp"

namespace advtrl {

enum class Game { minipong, minibreakout };

std::string game_name(Game g);
Game game_from_name(const std::string& name);

enum class VariantKind { noisy, grid, invert, scale };

std::string variant_name(VariantKind k);
VariantKind variant_from_name(const std::string& name);

struct VariantSpec {
    VariantKind kind = VariantKind::invert;
    double sigma = 0.0;   // noisy: noise std-dev in normalized intensity units
    int cell = 0;         // grid: cell size in pixels
    double factor = 0.0;  // scale: downscale ratio

    void validate() const;
};

struct EnvConfig {
    Game game = Game::minipong;
    int level = 1;  // minibreakout only
    int frame_size = 64;
    uint64_t seed = 0;
    std::optional<VariantSpec> variant;

    void validate() const;
};

/// Human-readable env identity, e.g. "minipong+invert@64" or
/// "minibreakout-L2@64". Used as the `env` column in curve CSVs.
std::string env_label(const EnvConfig& config);

struct Action {
    int index = 0;
};

struct StepResult {
    Frame observation;
    double reward = 0.0;
    bool terminal = false;
};

class Env {
public:
    virtual ~Env() = default;

    /// Deterministic initial state for (config, seed); zeroes the episode
    /// step counter.
    virtual Frame reset(uint64_t seed) = 0;

    /// Advances physics one tick. Throws StepAfterTerminal once the episode
    /// has ended, until the next reset.
    virtual StepResult step(Action action) = 0;

    virtual int action_count() const = 0;
    virtual int frame_size() const = 0;
    virtual const EnvConfig& config() const = 0;
    virtual std::string label() const = 0;
};

inline constexpr int kMaxEpisodeSteps = 3000;

/// Paddle width for a MiniBreakout level, in rendered pixels. The paper's
/// widths {30,20,10,5} are in 160px-wide frame units; they scale by
/// frame_size/160 with a 2px floor.
int breakout_paddle_width(int level, int frame_size);

/// Returns a config with the level replaced; throws InvalidLevel outside 1..4.
EnvConfig set_level(EnvConfig config, int level);

/// Builds the game env and applies the variant wrapper when configured.
std::unique_ptr<Env> make_env(const EnvConfig& config);

/// Wraps an env so every emitted frame passes through the variant
/// transform. The noisy wrapper draws from its own stream derived from
/// `seed` and the reset seed; the other variants are deterministic.
std::unique_ptr<Env> wrap_variant(std::unique_ptr<Env> env, const VariantSpec& spec, uint64_t seed);

// ---------------------------------------------------------------------------
// Concrete games. Exposed (rather than factory-only) for the physics tests,
// which drive exact ball/paddle states.
// ---------------------------------------------------------------------------

struct BallState {
    double x = 0, y = 0;    // center position in pixels
    double vx = 0, vy = 0;  // velocity in pixels per tick
};

/// Two vertical paddles, one scripted opponent with capped tracking speed.
/// First side to 5 points ends the episode; reward +1 when the opponent
/// misses, -1 when the agent does.
class MiniPong final : public Env {
public:
    explicit MiniPong(const EnvConfig& config);

    Frame reset(uint64_t seed) override;
    StepResult step(Action action) override;
    int action_count() const override { return 3; }  // noop, up, down
    int frame_size() const override { return size_; }
    const EnvConfig& config() const override { return config_; }
    std::string label() const override { return env_label(config_); }

    static constexpr int kPointsToWin = 5;

    double ball_speed() const { return speed_; }
    int paddle_len() const { return paddle_len_; }
    BallState ball() const { return ball_; }
    void set_ball(const BallState& b) { ball_ = b; }
    double paddle_y() const { return paddle_y_; }
    void set_paddle_y(double y) { paddle_y_ = y; }
    double opponent_y() const { return opponent_y_; }
    int agent_score() const { return agent_score_; }
    int opponent_score() const { return opponent_score_; }

    Frame render() const;

private:
    void serve();
    bool advance_ball();  // one tick with substeps; true if a point ended

    EnvConfig config_;
    int size_;
    int paddle_len_, paddle_w_, ball_size_;
    double speed_, paddle_speed_, opponent_speed_;
    double paddle_y_ = 0, opponent_y_ = 0;  // paddle centers
    BallState ball_;
    int agent_score_ = 0, opponent_score_ = 0;
    int steps_ = 0;
    int pending_reward_ = 0;
    bool terminal_ = true;
    RngStream rng_{0};
};

/// Single paddle, brick rows, one life. Reward +1 per destroyed brick;
/// terminal on ball loss, board clear, or the step cap.
class MiniBreakout final : public Env {
public:
    explicit MiniBreakout(const EnvConfig& config);

    Frame reset(uint64_t seed) override;
    StepResult step(Action action) override;
    int action_count() const override { return 3; }  // noop, left, right
    int frame_size() const override { return size_; }
    const EnvConfig& config() const override { return config_; }
    std::string label() const override { return env_label(config_); }

    static constexpr int kBrickRows = 3;
    static constexpr int kBrickCols = 8;

    double ball_speed() const { return speed_; }
    int paddle_width() const { return paddle_w_; }
    BallState ball() const { return ball_; }
    void set_ball(const BallState& b) { ball_ = b; }
    double paddle_x() const { return paddle_x_; }
    void set_paddle_x(double x) { paddle_x_ = x; }
    int bricks_remaining() const;
    void clear_bricks_except(int row, int col);

    Frame render() const;

private:
    int advance_ball(bool& lost);  // returns bricks destroyed this tick

    EnvConfig config_;
    int size_;
    int paddle_w_, paddle_t_, ball_size_;
    int brick_h_, brick_w_, brick_top_;
    double speed_, paddle_speed_;
    double paddle_x_ = 0;  // paddle center
    BallState ball_;
    std::vector<bool> bricks_;
    int steps_ = 0;
    bool terminal_ = true;
    RngStream rng_{0};
};

}  // namespace advtrl
