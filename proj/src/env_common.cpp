#include <cmath>

#include "advtrl/env.hpp"
#include "advtrl/errors.hpp"

namespace advtrl {

std::string game_name(Game g) {
    return g == Game::minipong ? "minipong" : "minibreakout";
}

Game game_from_name(const std::string& name) {
    if (name == "minipong") return Game::minipong;
    if (name == "minibreakout") return Game::minibreakout;
    throw ConfigError("unknown game: " + name);
}

std::string variant_name(VariantKind k) {
    switch (k) {
        case VariantKind::noisy: return "noisy";
        case VariantKind::grid: return "grid";
        case VariantKind::invert: return "invert";
        case VariantKind::scale: return "scale";
    }
    return "invert";
}

VariantKind variant_from_name(const std::string& name) {
    if (name == "noisy") return VariantKind::noisy;
    if (name == "grid") return VariantKind::grid;
    if (name == "invert") return VariantKind::invert;
    if (name == "scale") return VariantKind::scale;
    throw ConfigError("unknown variant kind: " + name);
}

void VariantSpec::validate() const {
    switch (kind) {
        case VariantKind::noisy:
            if (!(sigma > 0.0)) throw NonPositiveSigma("noisy variant requires sigma > 0");
            break;
        case VariantKind::grid:
            if (cell < 2) throw InvalidCell("grid variant requires cell >= 2");
            break;
        case VariantKind::scale:
            if (!(factor > 0.0 && factor < 1.0))
                throw InvalidFactor("scale variant requires 0 < factor < 1");
            break;
        case VariantKind::invert: break;
    }
}

void EnvConfig::validate() const {
    if (frame_size < 32) throw ConfigError("frame_size must be >= 32");
    if (game == Game::minibreakout && (level < 1 || level > 4))
        throw InvalidLevel("minibreakout level must be in 1..4");
    if (variant) variant->validate();
}

std::string env_label(const EnvConfig& config) {
    std::string s = game_name(config.game);
    if (config.game == Game::minibreakout) s += "-L" + std::to_string(config.level);
    if (config.variant) {
        const VariantSpec& v = *config.variant;
        s += "+" + variant_name(v.kind);
        char buf[32];
        switch (v.kind) {
            case VariantKind::noisy:
                std::snprintf(buf, sizeof(buf), "%g", v.sigma);
                s += buf;
                break;
            case VariantKind::grid: s += std::to_string(v.cell); break;
            case VariantKind::scale:
                std::snprintf(buf, sizeof(buf), "%g", v.factor);
                s += buf;
                break;
            case VariantKind::invert: break;
        }
    }
    s += "@" + std::to_string(config.frame_size);
    return s;
}

int breakout_paddle_width(int level, int frame_size) {
    if (level < 1 || level > 4) throw InvalidLevel("level must be in 1..4");
    static constexpr int kPaperWidths[4] = {30, 20, 10, 5};
    const double scaled = kPaperWidths[level - 1] * frame_size / 160.0;
    return std::max(2, static_cast<int>(std::lround(scaled)));
}

EnvConfig set_level(EnvConfig config, int level) {
    if (level < 1 || level > 4) throw InvalidLevel("level must be in 1..4");
    config.level = level;
    return config;
}

namespace {

/// Applies a variant transform to every frame leaving the wrapped env.
class VariantEnv final : public Env {
public:
    VariantEnv(std::unique_ptr<Env> inner, const VariantSpec& spec, uint64_t seed)
        : inner_(std::move(inner)), spec_(spec), wrapper_seed_(seed), rng_(seed) {
        spec_.validate();
        config_ = inner_->config();
        config_.variant = spec_;
    }

    Frame reset(uint64_t seed) override {
        rng_ = RngStream::fork(wrapper_seed_ ^ 0xa5a5a5a5a5a5a5a5ULL, seed);
        return transform(inner_->reset(seed));
    }

    StepResult step(Action action) override {
        StepResult r = inner_->step(action);
        r.observation = transform(r.observation);
        return r;
    }

    int action_count() const override { return inner_->action_count(); }
    int frame_size() const override { return inner_->frame_size(); }
    const EnvConfig& config() const override { return config_; }
    std::string label() const override { return env_label(config_); }

private:
    Frame transform(const Frame& f) {
        switch (spec_.kind) {
            case VariantKind::invert: return invert(f);
            case VariantKind::noisy: return gauss_noise(f, spec_.sigma, rng_);
            case VariantKind::grid: return grid_overlay(f, spec_.cell);
            case VariantKind::scale: return scale_pad(f, spec_.factor);
        }
        return f;
    }

    std::unique_ptr<Env> inner_;
    VariantSpec spec_;
    uint64_t wrapper_seed_;
    RngStream rng_;
    EnvConfig config_;
};

}  // namespace

std::unique_ptr<Env> wrap_variant(std::unique_ptr<Env> env, const VariantSpec& spec, uint64_t seed) {
    return std::make_unique<VariantEnv>(std::move(env), spec, seed);
}

std::unique_ptr<Env> make_env(const EnvConfig& config) {
    config.validate();
    EnvConfig base = config;
    base.variant.reset();
    std::unique_ptr<Env> env;
    if (config.game == Game::minipong)
        env = std::make_unique<MiniPong>(base);
    else
        env = std::make_unique<MiniBreakout>(base);
    if (config.variant) env = wrap_variant(std::move(env), *config.variant, config.seed);
    return env;
}

}  // namespace advtrl
