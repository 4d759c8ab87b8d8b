#pragma once

#include <string>

#include "advtrl/frame.hpp"
#include "advtrl/rng.hpp"

namespace advtrl {

enum class Transform { invert, gauss, grid, scale };

std::string transform_name(Transform t);
Transform transform_from_name(const std::string& name);

/// Stochastic augmentation rule: apply `transform` with probability
/// `probability`, pass the frame through unchanged otherwise.
/// `intensity` is transform-specific: sigma (gauss), cell size in pixels
/// (grid), scale factor (scale); unused for invert.
struct AugmentPolicy {
    Transform transform = Transform::invert;
    double probability = 0.0;
    double intensity = 0.0;

    void validate() const;
};

/// p -> 1 - p for every pixel.
Frame invert(const Frame& frame);

/// Adds independent N(0, sigma^2) noise per pixel, clamped back to [0,1].
/// sigma is in normalized intensity units (the paper's 0-255 sigmas map to
/// sigma/255). Throws NonPositiveSigma for sigma <= 0.
Frame gauss_noise(const Frame& frame, double sigma, RngStream& rng);

/// Paints rows/columns whose index is congruent 0 mod `cell` with
/// `line_value`. Throws InvalidCell for cell < 2.
Frame grid_overlay(const Frame& frame, int cell, float line_value = 1.0f);

/// Nearest-neighbor downscale by `factor`, centered on a black canvas of
/// the original size. Throws InvalidFactor unless 0 < factor < 1.
Frame scale_pad(const Frame& frame, double factor);

/// One bernoulli draw against policy.probability, then the transform.
Frame apply_policy(const Frame& frame, const AugmentPolicy& policy, RngStream& rng);

/// Peak signal-to-noise ratio in dB with MAX = 1.0. Identical frames
/// return +infinity. Throws DimensionMismatch on shape disagreement.
double psnr(const Frame& a, const Frame& b);

/// PSNR computed from an MSE that was accumulated over many frame pairs.
/// Returns +infinity when total MSE is zero.
double psnr_from_mse(double mse);

}  // namespace advtrl
