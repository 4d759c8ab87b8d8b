#include "advtrl/augment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "advtrl/errors.hpp"

namespace advtrl {

std::string transform_name(Transform t) {
    switch (t) {
        case Transform::invert: return "invert";
        case Transform::gauss: return "gauss";
        case Transform::grid: return "grid";
        case Transform::scale: return "scale";
    }
    return "invert";
}

Transform transform_from_name(const std::string& name) {
    if (name == "invert") return Transform::invert;
    if (name == "gauss") return Transform::gauss;
    if (name == "grid") return Transform::grid;
    if (name == "scale") return Transform::scale;
    throw ConfigError("unknown transform: " + name);
}

void AugmentPolicy::validate() const {
    if (!(probability >= 0.0 && probability <= 1.0))
        throw ConfigError("augment probability must be in [0,1]");
    switch (transform) {
        case Transform::invert: break;
        case Transform::gauss:
            if (!(intensity > 0.0)) throw NonPositiveSigma("gauss intensity (sigma) must be > 0");
            break;
        case Transform::grid:
            if (intensity < 2.0) throw InvalidCell("grid intensity (cell) must be >= 2");
            break;
        case Transform::scale:
            if (!(intensity > 0.0 && intensity < 1.0))
                throw InvalidFactor("scale intensity (factor) must be in (0,1)");
            break;
    }
}

Frame invert(const Frame& frame) {
    Frame out = frame;
    for (float& p : out.pixels) p = 1.0f - p;
    return out;
}

Frame gauss_noise(const Frame& frame, double sigma, RngStream& rng) {
    if (!(sigma > 0.0)) throw NonPositiveSigma("sigma must be > 0");
    Frame out = frame;
    for (float& p : out.pixels) {
        double v = static_cast<double>(p) + sigma * rng.normal();
        p = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
    return out;
}

Frame grid_overlay(const Frame& frame, int cell, float line_value) {
    if (cell < 2) throw InvalidCell("grid cell must be >= 2");
    Frame out = frame;
    for (int r = 0; r < out.height; ++r) {
        const bool row_line = (r % cell) == 0;
        for (int c = 0; c < out.width; ++c) {
            if (row_line || (c % cell) == 0) out.at(r, c) = line_value;
        }
    }
    return out;
}

Frame scale_pad(const Frame& frame, double factor) {
    if (!(factor > 0.0 && factor < 1.0)) throw InvalidFactor("scale factor must be in (0,1)");
    const int sh = std::max(1, static_cast<int>(std::lround(frame.height * factor)));
    const int sw = std::max(1, static_cast<int>(std::lround(frame.width * factor)));
    Frame out(frame.height, frame.width, 0.0f);
    const int off_r = (frame.height - sh) / 2;
    const int off_c = (frame.width - sw) / 2;
    for (int r = 0; r < sh; ++r) {
        // Center-aligned nearest-neighbor sampling.
        int sr = static_cast<int>((r + 0.5) * frame.height / sh);
        sr = std::clamp(sr, 0, frame.height - 1);
        for (int c = 0; c < sw; ++c) {
            int sc = static_cast<int>((c + 0.5) * frame.width / sw);
            sc = std::clamp(sc, 0, frame.width - 1);
            out.at(off_r + r, off_c + c) = frame.at(sr, sc);
        }
    }
    return out;
}

Frame apply_policy(const Frame& frame, const AugmentPolicy& policy, RngStream& rng) {
    const bool apply = rng.bernoulli(policy.probability);
    if (!apply) return frame;
    switch (policy.transform) {
        case Transform::invert: return invert(frame);
        case Transform::gauss: return gauss_noise(frame, policy.intensity, rng);
        case Transform::grid: return grid_overlay(frame, static_cast<int>(policy.intensity));
        case Transform::scale: return scale_pad(frame, policy.intensity);
    }
    return frame;
}

double psnr(const Frame& a, const Frame& b) {
    if (!a.same_shape(b)) throw DimensionMismatch("psnr: frame shapes differ");
    double mse = 0.0;
    for (size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
        mse += d * d;
    }
    mse /= static_cast<double>(a.pixels.size());
    return psnr_from_mse(mse);
}

double psnr_from_mse(double mse) {
    if (mse <= 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

}  // namespace advtrl
