#include "advtrl/nn.hpp"

#include <algorithm>
#include <cmath>

namespace advtrl::nn {

bool operator==(const NetworkSpec& a, const NetworkSpec& b) {
    if (a.input_shape != b.input_shape || a.layers.size() != b.layers.size()) return false;
    for (size_t i = 0; i < a.layers.size(); ++i) {
        if (layer_to_string(a.layers[i]) != layer_to_string(b.layers[i])) return false;
    }
    return true;
}

std::string layer_to_string(const LayerSpec& spec) {
    return std::visit(
        [](const auto& l) -> std::string {
            using L = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<L, DenseSpec>)
                return "dense(" + std::to_string(l.in) + "," + std::to_string(l.out) + ")";
            else if constexpr (std::is_same_v<L, ConvSpec>)
                return "conv(" + std::to_string(l.in_ch) + "," + std::to_string(l.out_ch) + "," +
                       std::to_string(l.kernel) + "," + std::to_string(l.stride) + ")";
            else if constexpr (std::is_same_v<L, ReluSpec>)
                return "relu";
            else if constexpr (std::is_same_v<L, FlattenSpec>)
                return "flatten";
            else
                return "sigmoid";
        },
        spec);
}

std::vector<int> layer_output_shape(const LayerSpec& spec, const std::vector<int>& in) {
    if (std::holds_alternative<DenseSpec>(spec)) {
        const auto& d = std::get<DenseSpec>(spec);
        if (in.size() != 1 || in[0] != d.in)
            throw ShapeMismatch("dense layer expects flat input of size " + std::to_string(d.in));
        return {d.out};
    }
    if (std::holds_alternative<ConvSpec>(spec)) {
        const auto& c = std::get<ConvSpec>(spec);
        if (in.size() != 3 || in[0] != c.in_ch)
            throw ShapeMismatch("conv layer expects (c,h,w) input with c=" + std::to_string(c.in_ch));
        const int ho = (in[1] - c.kernel) / c.stride + 1;
        const int wo = (in[2] - c.kernel) / c.stride + 1;
        if (c.kernel <= 0 || c.stride <= 0 || ho <= 0 || wo <= 0)
            throw ShapeMismatch("conv kernel/stride incompatible with input " + std::to_string(in[1]) +
                                "x" + std::to_string(in[2]));
        return {c.out_ch, ho, wo};
    }
    if (std::holds_alternative<FlattenSpec>(spec)) {
        long n = 1;
        for (int d : in) n *= d;
        return {static_cast<int>(n)};
    }
    return in;  // relu / sigmoid preserve shape
}

std::vector<int> output_shape(const NetworkSpec& spec) {
    if (spec.layers.empty()) throw ShapeMismatch("network needs at least one layer");
    std::vector<int> shape = spec.input_shape;
    for (const auto& layer : spec.layers) shape = layer_output_shape(layer, shape);
    return shape;
}

long output_size(const NetworkSpec& spec) {
    return TensorT<float>::shape_size(output_shape(spec));
}

template <typename T>
ParamsT<T> init_params(const NetworkSpec& spec, RngStream& rng) {
    output_shape(spec);  // validate chain
    ParamsT<T> params;
    for (const auto& layer : spec.layers) {
        typename ParamsT<T>::LayerParams lp;
        if (const auto* d = std::get_if<DenseSpec>(&layer)) {
            const double limit = std::sqrt(6.0 / d->in);
            lp.w = TensorT<T>::zeros({d->out, d->in});
            for (T& v : lp.w.data) v = static_cast<T>(rng.uniform(-limit, limit));
            lp.b = TensorT<T>::zeros({d->out});
        } else if (const auto* c = std::get_if<ConvSpec>(&layer)) {
            const double limit = std::sqrt(6.0 / (c->in_ch * c->kernel * c->kernel));
            lp.w = TensorT<T>::zeros({c->out_ch, c->in_ch, c->kernel, c->kernel});
            for (T& v : lp.w.data) v = static_cast<T>(rng.uniform(-limit, limit));
            lp.b = TensorT<T>::zeros({c->out_ch});
        }
        params.layers.push_back(std::move(lp));
    }
    return params;
}

template <typename T>
ParamsT<T> zeros_like_params(const NetworkSpec& spec) {
    ParamsT<T> params;
    for (const auto& layer : spec.layers) {
        typename ParamsT<T>::LayerParams lp;
        if (const auto* d = std::get_if<DenseSpec>(&layer)) {
            lp.w = TensorT<T>::zeros({d->out, d->in});
            lp.b = TensorT<T>::zeros({d->out});
        } else if (const auto* c = std::get_if<ConvSpec>(&layer)) {
            lp.w = TensorT<T>::zeros({c->out_ch, c->in_ch, c->kernel, c->kernel});
            lp.b = TensorT<T>::zeros({c->out_ch});
        }
        params.layers.push_back(std::move(lp));
    }
    return params;
}

template <typename T>
uint64_t checksum(const ParamsT<T>& params) {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* data, size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& l : params.layers) {
        mix(l.w.data.data(), l.w.data.size() * sizeof(T));
        mix(l.b.data.data(), l.b.data.size() * sizeof(T));
    }
    return h;
}

namespace {

template <typename T>
void dense_forward(const DenseSpec& d, const typename ParamsT<T>::LayerParams& p,
                   const TensorT<T>& in, TensorT<T>& out) {
    const T* w = p.w.data.data();
    const T* x = in.data.data();
    for (int o = 0; o < d.out; ++o) {
        T acc = p.b.data[static_cast<size_t>(o)];
        const T* row = w + static_cast<size_t>(o) * d.in;
        for (int i = 0; i < d.in; ++i) acc += row[i] * x[i];
        out.data[static_cast<size_t>(o)] = acc;
    }
}

template <typename T>
void conv_forward(const ConvSpec& c, const typename ParamsT<T>::LayerParams& p,
                  const TensorT<T>& in, TensorT<T>& out) {
    const int h = in.shape[1], w = in.shape[2];
    const int ho = out.shape[1], wo = out.shape[2];
    const int k = c.kernel, s = c.stride;
    const T* x = in.data.data();
    const T* kw = p.w.data.data();
    T* y = out.data.data();
    for (int co = 0; co < c.out_ch; ++co) {
        const T bias = p.b.data[static_cast<size_t>(co)];
        for (int i = 0; i < ho; ++i) {
            for (int j = 0; j < wo; ++j) {
                T acc = bias;
                for (int ci = 0; ci < c.in_ch; ++ci) {
                    const T* xp = x + (static_cast<size_t>(ci) * h + static_cast<size_t>(i) * s) * w +
                                  static_cast<size_t>(j) * s;
                    const T* wp = kw + ((static_cast<size_t>(co) * c.in_ch + ci) * k) * k;
                    for (int u = 0; u < k; ++u) {
                        const T* xr = xp + static_cast<size_t>(u) * w;
                        const T* wr = wp + static_cast<size_t>(u) * k;
                        for (int v = 0; v < k; ++v) acc += xr[v] * wr[v];
                    }
                }
                y[(static_cast<size_t>(co) * ho + i) * wo + j] = acc;
            }
        }
    }
}

}  // namespace

template <typename T>
TensorT<T> forward(const NetworkSpec& spec, const ParamsT<T>& params, const TensorT<T>& input,
                   ForwardCache<T>* cache) {
    if (input.shape != spec.input_shape) throw ShapeMismatch("forward: input shape mismatch");
    if (params.layers.size() != spec.layers.size())
        throw ShapeMismatch("forward: params do not match spec");
    if (cache) {
        cache->acts.clear();
        cache->acts.push_back(input);
    }
    TensorT<T> cur = input;
    for (size_t li = 0; li < spec.layers.size(); ++li) {
        const auto& layer = spec.layers[li];
        TensorT<T> next = TensorT<T>::zeros(layer_output_shape(layer, cur.shape));
        if (const auto* d = std::get_if<DenseSpec>(&layer)) {
            dense_forward<T>(*d, params.layers[li], cur, next);
        } else if (const auto* c = std::get_if<ConvSpec>(&layer)) {
            conv_forward<T>(*c, params.layers[li], cur, next);
        } else if (std::holds_alternative<ReluSpec>(layer)) {
            for (long i = 0; i < cur.size(); ++i)
                next.data[static_cast<size_t>(i)] = cur.data[static_cast<size_t>(i)] > T{0}
                                                        ? cur.data[static_cast<size_t>(i)]
                                                        : T{0};
        } else if (std::holds_alternative<FlattenSpec>(layer)) {
            next.data = cur.data;
        } else {  // sigmoid
            for (long i = 0; i < cur.size(); ++i) {
                const double z = static_cast<double>(cur.data[static_cast<size_t>(i)]);
                next.data[static_cast<size_t>(i)] = static_cast<T>(1.0 / (1.0 + std::exp(-z)));
            }
        }
        cur = std::move(next);
        if (cache) cache->acts.push_back(cur);
    }
    return cur;
}

template <typename T>
GradientsT<T> zeros_like_grads(const NetworkSpec& spec) {
    GradientsT<T> g;
    auto params = zeros_like_params<T>(spec);
    g.layers = std::move(params.layers);
    g.input_grad = TensorT<T>::zeros(spec.input_shape);
    return g;
}

template <typename T>
GradientsT<T> backward(const NetworkSpec& spec, const ParamsT<T>& params,
                       const ForwardCache<T>& cache, const TensorT<T>& output_grad) {
    if (cache.acts.size() != spec.layers.size() + 1)
        throw ShapeMismatch("backward: cache does not match spec");
    if (output_grad.shape != cache.acts.back().shape)
        throw ShapeMismatch("backward: output_grad shape mismatch");

    GradientsT<T> grads = zeros_like_grads<T>(spec);
    TensorT<T> g = output_grad;

    for (size_t li = spec.layers.size(); li-- > 0;) {
        const auto& layer = spec.layers[li];
        const TensorT<T>& in = cache.acts[li];
        TensorT<T> gin = TensorT<T>::zeros(in.shape);

        if (const auto* d = std::get_if<DenseSpec>(&layer)) {
            auto& lg = grads.layers[li];
            const T* w = params.layers[li].w.data.data();
            for (int o = 0; o < d->out; ++o) {
                const T go = g.data[static_cast<size_t>(o)];
                lg.b.data[static_cast<size_t>(o)] += go;
                T* wg = lg.w.data.data() + static_cast<size_t>(o) * d->in;
                const T* wr = w + static_cast<size_t>(o) * d->in;
                for (int i = 0; i < d->in; ++i) {
                    wg[i] += go * in.data[static_cast<size_t>(i)];
                    gin.data[static_cast<size_t>(i)] += go * wr[i];
                }
            }
        } else if (const auto* c = std::get_if<ConvSpec>(&layer)) {
            auto& lg = grads.layers[li];
            const int h = in.shape[1], w = in.shape[2];
            const int ho = g.shape[1], wo = g.shape[2];
            const int k = c->kernel, s = c->stride;
            const T* kw = params.layers[li].w.data.data();
            for (int co = 0; co < c->out_ch; ++co) {
                for (int i = 0; i < ho; ++i) {
                    for (int j = 0; j < wo; ++j) {
                        const T go = g.data[(static_cast<size_t>(co) * ho + i) * wo + j];
                        if (go == T{0}) continue;
                        lg.b.data[static_cast<size_t>(co)] += go;
                        for (int ci = 0; ci < c->in_ch; ++ci) {
                            const size_t x0 = (static_cast<size_t>(ci) * h + static_cast<size_t>(i) * s) * w +
                                              static_cast<size_t>(j) * s;
                            const size_t w0 = ((static_cast<size_t>(co) * c->in_ch + ci) * k) * k;
                            for (int u = 0; u < k; ++u) {
                                const size_t xr = x0 + static_cast<size_t>(u) * w;
                                const size_t wr = w0 + static_cast<size_t>(u) * k;
                                for (int v = 0; v < k; ++v) {
                                    lg.w.data[wr + v] += go * in.data[xr + v];
                                    gin.data[xr + v] += go * kw[wr + v];
                                }
                            }
                        }
                    }
                }
            }
        } else if (std::holds_alternative<ReluSpec>(layer)) {
            for (long i = 0; i < in.size(); ++i)
                gin.data[static_cast<size_t>(i)] =
                    in.data[static_cast<size_t>(i)] > T{0} ? g.data[static_cast<size_t>(i)] : T{0};
        } else if (std::holds_alternative<FlattenSpec>(layer)) {
            gin.data = g.data;
        } else {  // sigmoid: ds = s*(1-s)
            const TensorT<T>& out = cache.acts[li + 1];
            for (long i = 0; i < in.size(); ++i) {
                const T s = out.data[static_cast<size_t>(i)];
                gin.data[static_cast<size_t>(i)] = g.data[static_cast<size_t>(i)] * s * (T{1} - s);
            }
        }
        g = std::move(gin);
    }
    grads.input_grad = std::move(g);
    return grads;
}

template <typename T>
void accumulate(GradientsT<T>& into, const GradientsT<T>& g) {
    for (size_t li = 0; li < into.layers.size(); ++li) {
        auto& a = into.layers[li];
        const auto& b = g.layers[li];
        for (size_t i = 0; i < a.w.data.size(); ++i) a.w.data[i] += b.w.data[i];
        for (size_t i = 0; i < a.b.data.size(); ++i) a.b.data[i] += b.b.data[i];
    }
}

template <typename T>
void scale(GradientsT<T>& g, T factor) {
    for (auto& l : g.layers) {
        for (T& v : l.w.data) v *= factor;
        for (T& v : l.b.data) v *= factor;
    }
}

template <typename T>
OptimizerStateT<T> make_optimizer(OptKind kind, double learning_rate, const NetworkSpec& spec,
                                  double decay, double epsilon) {
    OptimizerStateT<T> opt;
    opt.kind = kind;
    opt.learning_rate = learning_rate;
    opt.decay = decay;
    opt.epsilon = epsilon;
    if (kind == OptKind::rmsprop) opt.acc = zeros_like_params<T>(spec).layers;
    return opt;
}

template <typename T>
void optimize_step(ParamsT<T>& params, const GradientsT<T>& grads, OptimizerStateT<T>& opt) {
    if (grads.layers.size() != params.layers.size())
        throw ShapeMismatch("optimize_step: gradient/param layer count mismatch");
    for (const auto& l : grads.layers) {
        for (T v : l.w.data)
            if (!std::isfinite(static_cast<double>(v))) throw NonFiniteGradient("non-finite weight gradient");
        for (T v : l.b.data)
            if (!std::isfinite(static_cast<double>(v))) throw NonFiniteGradient("non-finite bias gradient");
    }
    const T lr = static_cast<T>(opt.learning_rate);
    if (opt.kind == OptKind::sgd) {
        for (size_t li = 0; li < params.layers.size(); ++li) {
            auto& p = params.layers[li];
            const auto& g = grads.layers[li];
            for (size_t i = 0; i < p.w.data.size(); ++i) p.w.data[i] -= lr * g.w.data[i];
            for (size_t i = 0; i < p.b.data.size(); ++i) p.b.data[i] -= lr * g.b.data[i];
        }
    } else {
        const T decay = static_cast<T>(opt.decay);
        const T eps = static_cast<T>(opt.epsilon);
        for (size_t li = 0; li < params.layers.size(); ++li) {
            auto& p = params.layers[li];
            const auto& g = grads.layers[li];
            auto& a = opt.acc[li];
            for (size_t i = 0; i < p.w.data.size(); ++i) {
                a.w.data[i] = decay * a.w.data[i] + (T{1} - decay) * g.w.data[i] * g.w.data[i];
                p.w.data[i] -= lr * g.w.data[i] / (std::sqrt(a.w.data[i]) + eps);
            }
            for (size_t i = 0; i < p.b.data.size(); ++i) {
                a.b.data[i] = decay * a.b.data[i] + (T{1} - decay) * g.b.data[i] * g.b.data[i];
                p.b.data[i] -= lr * g.b.data[i] / (std::sqrt(a.b.data[i]) + eps);
            }
        }
    }
    ++params.version;
}

NetworkSpec make_encoder_spec(int channels, int height, int width) {
    NetworkSpec spec;
    spec.input_shape = {channels, height, width};
    spec.layers.push_back(ConvSpec{channels, 8, 8, 4});
    spec.layers.push_back(ReluSpec{});
    spec.layers.push_back(ConvSpec{8, 16, 4, 2});
    spec.layers.push_back(ReluSpec{});
    spec.layers.push_back(FlattenSpec{});
    const NetworkSpec head = spec;
    const int flat = static_cast<int>(output_size(head));
    spec.layers.push_back(DenseSpec{flat, kFeatureDim});
    spec.layers.push_back(ReluSpec{});
    return spec;
}

NetworkSpec make_predictor_spec(int action_count, int feature_dim) {
    NetworkSpec spec;
    spec.input_shape = {feature_dim};
    spec.layers.push_back(DenseSpec{feature_dim, action_count});
    return spec;
}

NetworkSpec make_discriminator_spec(int feature_dim) {
    NetworkSpec spec;
    spec.input_shape = {feature_dim};
    spec.layers.push_back(DenseSpec{feature_dim, 64});
    spec.layers.push_back(ReluSpec{});
    spec.layers.push_back(DenseSpec{64, 1});
    spec.layers.push_back(SigmoidSpec{});
    return spec;
}

#define ADVTRL_INSTANTIATE(T)                                                                     \
    template ParamsT<T> init_params<T>(const NetworkSpec&, RngStream&);                           \
    template ParamsT<T> zeros_like_params<T>(const NetworkSpec&);                                 \
    template uint64_t checksum<T>(const ParamsT<T>&);                                             \
    template TensorT<T> forward<T>(const NetworkSpec&, const ParamsT<T>&, const TensorT<T>&,      \
                                   ForwardCache<T>*);                                             \
    template GradientsT<T> backward<T>(const NetworkSpec&, const ParamsT<T>&,                     \
                                       const ForwardCache<T>&, const TensorT<T>&);                \
    template GradientsT<T> zeros_like_grads<T>(const NetworkSpec&);                               \
    template void accumulate<T>(GradientsT<T>&, const GradientsT<T>&);                            \
    template void scale<T>(GradientsT<T>&, T);                                                    \
    template OptimizerStateT<T> make_optimizer<T>(OptKind, double, const NetworkSpec&, double,    \
                                                  double);                                        \
    template void optimize_step<T>(ParamsT<T>&, const GradientsT<T>&, OptimizerStateT<T>&)

ADVTRL_INSTANTIATE(float);
ADVTRL_INSTANTIATE(double);

#undef ADVTRL_INSTANTIATE

}  // namespace advtrl::nn
