#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "advtrl/rng.hpp"
#include "advtrl/tensor.hpp"

namespace advtrl::nn {

struct DenseSpec {
    int in = 0, out = 0;
};
struct ConvSpec {
    int in_ch = 0, out_ch = 0, kernel = 0, stride = 1;
};
struct ReluSpec {};
struct FlattenSpec {};
struct SigmoidSpec {};

using LayerSpec = std::variant<DenseSpec, ConvSpec, ReluSpec, FlattenSpec, SigmoidSpec>;

struct NetworkSpec {
    std::vector<int> input_shape;  // {n} for dense input, {c,h,w} for conv input
    std::vector<LayerSpec> layers;

    friend bool operator==(const NetworkSpec& a, const NetworkSpec& b);
};

/// Shape produced by layer `spec` on input shape `in`. Throws ShapeMismatch
/// when the layer cannot consume the input.
std::vector<int> layer_output_shape(const LayerSpec& spec, const std::vector<int>& in);

/// Validates the whole chain and returns the network output shape.
std::vector<int> output_shape(const NetworkSpec& spec);
long output_size(const NetworkSpec& spec);

std::string layer_to_string(const LayerSpec& spec);

template <typename T>
struct ParamsT {
    struct LayerParams {
        TensorT<T> w, b;  // empty tensors for parameterless layers
    };
    std::vector<LayerParams> layers;
    uint64_t version = 0;  // bumped on every optimizer step
};

using Params = ParamsT<float>;
using ParamsD = ParamsT<double>;

/// He-uniform fan-in weight init, zero biases.
template <typename T>
ParamsT<T> init_params(const NetworkSpec& spec, RngStream& rng);

template <typename T>
ParamsT<T> zeros_like_params(const NetworkSpec& spec);

/// FNV-1a over the raw parameter bytes; used for frozen-parameter checks.
template <typename T>
uint64_t checksum(const ParamsT<T>& params);

template <typename To, typename From>
ParamsT<To> params_cast(const ParamsT<From>& p) {
    ParamsT<To> out;
    out.version = p.version;
    out.layers.reserve(p.layers.size());
    for (const auto& l : p.layers)
        out.layers.push_back({tensor_cast<To>(l.w), tensor_cast<To>(l.b)});
    return out;
}

/// Deep copy. Parameter stores have value semantics, so this is plain
/// copy construction; kept as a named operation for intent at call sites.
template <typename T>
ParamsT<T> copy_params(const ParamsT<T>& params) {
    return params;
}

template <typename T>
struct ForwardCache {
    // acts[0] is the network input; acts[i] is the output of layer i-1.
    std::vector<TensorT<T>> acts;
};

/// Runs the network. When `cache` is non-null it is filled with every
/// intermediate activation (enough for backward).
template <typename T>
TensorT<T> forward(const NetworkSpec& spec, const ParamsT<T>& params, const TensorT<T>& input,
                   ForwardCache<T>* cache = nullptr);

template <typename T>
struct GradientsT {
    std::vector<typename ParamsT<T>::LayerParams> layers;
    TensorT<T> input_grad;
};

using Gradients = GradientsT<float>;

/// Backpropagates `output_grad` through the cached forward pass; returns
/// per-parameter gradients plus the gradient w.r.t. the network input.
template <typename T>
GradientsT<T> backward(const NetworkSpec& spec, const ParamsT<T>& params,
                       const ForwardCache<T>& cache, const TensorT<T>& output_grad);

template <typename T>
GradientsT<T> zeros_like_grads(const NetworkSpec& spec);

template <typename T>
void accumulate(GradientsT<T>& into, const GradientsT<T>& g);

template <typename T>
void scale(GradientsT<T>& g, T factor);

enum class OptKind { sgd, rmsprop };

template <typename T>
struct OptimizerStateT {
    OptKind kind = OptKind::sgd;
    double learning_rate = 1e-3;
    double decay = 0.95;    // rmsprop accumulator decay
    double epsilon = 1e-6;  // rmsprop denominator constant
    std::vector<typename ParamsT<T>::LayerParams> acc;  // rmsprop second-moment accumulators
};

using OptimizerState = OptimizerStateT<float>;

template <typename T>
OptimizerStateT<T> make_optimizer(OptKind kind, double learning_rate, const NetworkSpec& spec,
                                  double decay = 0.95, double epsilon = 1e-6);

/// In-place descent step. Throws NonFiniteGradient when any gradient value
/// is not finite. Bumps params.version.
template <typename T>
void optimize_step(ParamsT<T>& params, const GradientsT<T>& grads, OptimizerStateT<T>& opt);

// ---------------------------------------------------------------------------
// Stock architectures (desk-scale encoder/predictor/discriminator split).
// ---------------------------------------------------------------------------

inline constexpr int kFeatureDim = 128;

/// conv(c->8, 8x8, s4) - relu - conv(8->16, 4x4, s2) - relu - flatten -
/// dense(->128) - relu
NetworkSpec make_encoder_spec(int channels, int height, int width);

/// dense(128 -> action_count)
NetworkSpec make_predictor_spec(int action_count, int feature_dim = kFeatureDim);

/// dense(128->64) - relu - dense(64->1) - sigmoid
NetworkSpec make_discriminator_spec(int feature_dim = kFeatureDim);

}  // namespace advtrl::nn
