#include "advtrl/dqn.hpp"

#include <algorithm>
#include <cmath>

#include "advtrl/errors.hpp"

namespace advtrl {

// ---- QTable ----------------------------------------------------------------

std::vector<double>& QTable::row(int state) {
    auto it = table_.find(state);
    if (it == table_.end()) {
        if (!auto_insert_) throw UnknownState("state " + std::to_string(state) + " not in Q-table");
        it = table_.emplace(state, std::vector<double>(static_cast<size_t>(action_count_), 0.0)).first;
    }
    return it->second;
}

const std::vector<double>* QTable::find(int state) const {
    auto it = table_.find(state);
    return it == table_.end() ? nullptr : &it->second;
}

double QTable::value(int state, int action) const {
    const auto* r = find(state);
    return r ? (*r)[static_cast<size_t>(action)] : 0.0;
}

double QTable::max_value(int state) const {
    const auto* r = find(state);
    if (!r) return 0.0;
    return *std::max_element(r->begin(), r->end());
}

int QTable::greedy_action(int state) const {
    const auto* r = find(state);
    if (!r) return 0;
    int best = 0;
    for (int a = 1; a < action_count_; ++a)
        if ((*r)[static_cast<size_t>(a)] > (*r)[static_cast<size_t>(best)]) best = a;
    return best;
}

void QTable::update(int state, int action, double reward, int next_state, bool terminal,
                    double alpha, double gamma) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in (0,1]");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in [0,1]");
    std::vector<double>& r = row(state);
    const double bootstrap = terminal ? 0.0 : max_value(next_state);
    r[static_cast<size_t>(action)] =
        (1.0 - alpha) * r[static_cast<size_t>(action)] + alpha * (reward + gamma * bootstrap);
}

// ---- EpsilonSchedule --------------------------------------------------------

EpsilonSchedule EpsilonSchedule::linear(double start, double end, long decay_steps) {
    if (decay_steps <= 0) throw ConfigError("epsilon decay_steps must be > 0");
    if (start < 0 || start > 1 || end < 0 || end > 1)
        throw ConfigError("epsilon values must be in [0,1]");
    return {Kind::linear, start, end, decay_steps};
}

double EpsilonSchedule::at(long step) const {
    if (kind == Kind::constant) return start;
    if (step >= decay_steps) return end;
    if (step <= 0) return start;
    return start + (end - start) * static_cast<double>(step) / static_cast<double>(decay_steps);
}

// ---- StateAssembler ---------------------------------------------------------

std::string stack_mode_name(StackMode m) {
    switch (m) {
        case StackMode::single: return "single";
        case StackMode::stack2: return "stack2";
        case StackMode::diff2: return "diff2";
    }
    return "stack2";
}

StackMode stack_mode_from_name(const std::string& name) {
    if (name == "single") return StackMode::single;
    if (name == "stack2") return StackMode::stack2;
    if (name == "diff2") return StackMode::diff2;
    throw ConfigError("unknown stack mode: " + name);
}

int stack_channels(StackMode m) { return m == StackMode::single ? 1 : 2; }

StateAssembler::StateAssembler(StackMode mode, int height, int width)
    : mode_(mode), h_(height), w_(width), shape_{stack_channels(mode), height, width} {}

namespace {
std::vector<uint8_t> quantize_frame(const Frame& f) {
    std::vector<uint8_t> q(f.pixels.size());
    for (size_t i = 0; i < q.size(); ++i) q[i] = quantize_pixel(f.pixels[i]);
    return q;
}
}  // namespace

void StateAssembler::begin_episode(const Frame& first) {
    if (first.height != h_ || first.width != w_)
        throw ShapeMismatch("assembler: unexpected frame size");
    cur_ = quantize_frame(first);
    prev_ = cur_;
}

void StateAssembler::push(const Frame& frame) {
    if (frame.height != h_ || frame.width != w_)
        throw ShapeMismatch("assembler: unexpected frame size");
    prev_ = std::move(cur_);
    cur_ = quantize_frame(frame);
}

std::vector<uint8_t> StateAssembler::quantized() const {
    const size_t n = cur_.size();
    std::vector<uint8_t> out;
    switch (mode_) {
        case StackMode::single: return cur_;
        case StackMode::stack2:
            out.reserve(2 * n);
            out.insert(out.end(), prev_.begin(), prev_.end());
            out.insert(out.end(), cur_.begin(), cur_.end());
            return out;
        case StackMode::diff2:
            out.reserve(2 * n);
            out.insert(out.end(), cur_.begin(), cur_.end());
            for (size_t i = 0; i < n; ++i) {
                const int d = static_cast<int>(cur_[i]) - static_cast<int>(prev_[i]);
                out.push_back(static_cast<uint8_t>((d + 255) / 2));
            }
            return out;
    }
    return cur_;
}

Tensor StateAssembler::state() const { return decode(quantized(), shape_); }

Tensor StateAssembler::decode(const std::vector<uint8_t>& bytes, const std::vector<int>& shape) {
    if (static_cast<long>(bytes.size()) != Tensor::shape_size(shape))
        throw ShapeMismatch("state byte count does not match shape");
    Tensor t = Tensor::zeros(shape);
    for (size_t i = 0; i < bytes.size(); ++i) t.data[i] = dequantize_pixel(bytes[i]);
    return t;
}

// ---- ReplayBuffer -----------------------------------------------------------

ReplayBuffer::ReplayBuffer(size_t capacity, std::vector<int> state_shape)
    : capacity_(capacity), shape_(std::move(state_shape)) {
    if (capacity_ == 0) throw ConfigError("replay capacity must be > 0");
    state_bytes_ = static_cast<size_t>(Tensor::shape_size(shape_));
    storage_.reserve(std::min<size_t>(capacity_, 1 << 16));
}

void ReplayBuffer::insert(Transition t) {
    if (t.state.size() != state_bytes_ || t.next_state.size() != state_bytes_)
        throw ShapeMismatch("transition state size does not match buffer shape");
    if (!std::isfinite(static_cast<double>(t.reward)))
        throw ConfigError("transition reward must be finite");
    if (storage_.size() < capacity_) {
        storage_.push_back(std::move(t));
    } else {
        storage_[head_] = std::move(t);
        head_ = (head_ + 1) % capacity_;
    }
}

const Transition& ReplayBuffer::at(size_t logical_index) const {
    if (logical_index >= storage_.size()) throw ConfigError("replay index out of range");
    return storage_[(head_ + logical_index) % storage_.size()];
}

std::vector<size_t> ReplayBuffer::sample_indices(size_t batch, RngStream& rng) const {
    if (storage_.size() < batch)
        throw BufferTooSmall("replay holds " + std::to_string(storage_.size()) +
                             " transitions, need " + std::to_string(batch));
    // Floyd's sampling: uniform without replacement.
    std::vector<size_t> picked;
    picked.reserve(batch);
    const size_t n = storage_.size();
    for (size_t i = n - batch; i < n; ++i) {
        const size_t j = static_cast<size_t>(rng.uniform_int(static_cast<int>(i) + 1));
        if (std::find(picked.begin(), picked.end(), j) != picked.end())
            picked.push_back(i);
        else
            picked.push_back(j);
    }
    return picked;
}

Tensor ReplayBuffer::decode_state(const Transition& t) const {
    return StateAssembler::decode(t.state, shape_);
}

Tensor ReplayBuffer::decode_next_state(const Transition& t) const {
    return StateAssembler::decode(t.next_state, shape_);
}

// ---- DQNAgent ---------------------------------------------------------------

DQNAgent::DQNAgent(nn::NetworkSpec encoder_spec, nn::NetworkSpec predictor_spec, AgentConfig config)
    : encoder_spec_(std::move(encoder_spec)),
      predictor_spec_(std::move(predictor_spec)),
      config_(config) {
    if (config_.gamma < 0.0 || config_.gamma > 1.0) throw ConfigError("gamma must be in [0,1]");
    const auto enc_out = nn::output_shape(encoder_spec_);
    if (enc_out != predictor_spec_.input_shape)
        throw ShapeMismatch("predictor input shape does not match encoder output");
    action_count_ = static_cast<int>(nn::output_size(predictor_spec_));
}

DQNAgent::DQNAgent(nn::NetworkSpec encoder_spec, nn::NetworkSpec predictor_spec, AgentConfig config,
                   RngStream& init_rng)
    : DQNAgent(std::move(encoder_spec), std::move(predictor_spec), config) {
    encoder_ = nn::init_params<float>(encoder_spec_, init_rng);
    predictor_ = nn::init_params<float>(predictor_spec_, init_rng);
    target_encoder_ = nn::copy_params(encoder_);
    target_predictor_ = nn::copy_params(predictor_);
    encoder_opt_ = nn::make_optimizer<float>(config_.optimizer, config_.learning_rate,
                                             encoder_spec_, config_.rms_decay, config_.rms_epsilon);
    predictor_opt_ = nn::make_optimizer<float>(config_.optimizer, config_.learning_rate,
                                               predictor_spec_, config_.rms_decay,
                                               config_.rms_epsilon);
}

DQNAgent DQNAgent::from_params(nn::NetworkSpec encoder_spec, nn::Params encoder,
                               nn::NetworkSpec predictor_spec, nn::Params predictor,
                               AgentConfig config) {
    DQNAgent agent(std::move(encoder_spec), std::move(predictor_spec), config);
    agent.encoder_ = std::move(encoder);
    agent.predictor_ = std::move(predictor);
    agent.target_encoder_ = nn::copy_params(agent.encoder_);
    agent.target_predictor_ = nn::copy_params(agent.predictor_);
    agent.encoder_opt_ =
        nn::make_optimizer<float>(config.optimizer, config.learning_rate, agent.encoder_spec_,
                                  config.rms_decay, config.rms_epsilon);
    agent.predictor_opt_ =
        nn::make_optimizer<float>(config.optimizer, config.learning_rate, agent.predictor_spec_,
                                  config.rms_decay, config.rms_epsilon);
    return agent;
}

std::vector<float> DQNAgent::q_values(const Tensor& state) const {
    const Tensor features = nn::forward(encoder_spec_, encoder_, state);
    const Tensor q = nn::forward(predictor_spec_, predictor_, features);
    return q.data;
}

int DQNAgent::select_action(const Tensor& state, double epsilon, RngStream& rng) const {
    if (rng.bernoulli(epsilon)) return rng.uniform_int(action_count_);
    const std::vector<float> q = q_values(state);
    int best = 0;
    for (int a = 1; a < action_count_; ++a)
        if (q[static_cast<size_t>(a)] > q[static_cast<size_t>(best)]) best = a;
    return best;
}

std::vector<double> DQNAgent::compute_targets(const TargetBatch& batch) const {
    std::vector<double> targets(batch.rewards.size());
    for (size_t i = 0; i < batch.rewards.size(); ++i) {
        double y = batch.rewards[i];
        if (!batch.terminals[i]) {
            const Tensor f = nn::forward(encoder_spec_, target_encoder_, batch.next_states[i]);
            const Tensor q = nn::forward(predictor_spec_, target_predictor_, f);
            y += config_.gamma *
                 static_cast<double>(*std::max_element(q.data.begin(), q.data.end()));
        }
        targets[i] = y;
    }
    return targets;
}

DQNAgent::TdStep DQNAgent::compute_td_gradients(const ReplayBuffer& buffer, RngStream& rng) const {
    const size_t batch_size = static_cast<size_t>(config_.batch_size);
    const std::vector<size_t> indices = buffer.sample_indices(batch_size, rng);

    TargetBatch tb;
    tb.next_states.reserve(indices.size());
    std::vector<const Transition*> transitions;
    transitions.reserve(indices.size());
    for (size_t idx : indices) {
        const Transition& t = buffer.at(idx);
        transitions.push_back(&t);
        tb.next_states.push_back(buffer.decode_next_state(t));
        tb.rewards.push_back(t.reward);
        tb.terminals.push_back(t.terminal ? 1 : 0);
    }
    const std::vector<double> targets = compute_targets(tb);

    TdStep step;
    step.encoder_grads = nn::zeros_like_grads<float>(encoder_spec_);
    step.predictor_grads = nn::zeros_like_grads<float>(predictor_spec_);
    step.states.reserve(indices.size());

    const double delta = config_.huber_delta;
    const float inv_batch = 1.0f / static_cast<float>(indices.size());
    double loss = 0.0;
    for (size_t i = 0; i < indices.size(); ++i) {
        const Transition& t = *transitions[i];
        Tensor state = buffer.decode_state(t);

        nn::ForwardCache<float> enc_cache, pred_cache;
        const Tensor features = nn::forward(encoder_spec_, encoder_, state, &enc_cache);
        const Tensor q = nn::forward(predictor_spec_, predictor_, features, &pred_cache);

        const double err = static_cast<double>(q.data[static_cast<size_t>(t.action)]) - targets[i];
        const double abs_err = std::abs(err);
        loss += abs_err <= delta ? 0.5 * err * err : delta * (abs_err - 0.5 * delta);

        // Gradient only through the taken action's output.
        Tensor out_grad = Tensor::zeros(q.shape);
        out_grad.data[static_cast<size_t>(t.action)] =
            static_cast<float>(std::clamp(err, -delta, delta)) * inv_batch;

        nn::Gradients pred_g = nn::backward(predictor_spec_, predictor_, pred_cache, out_grad);
        nn::Gradients enc_g = nn::backward(encoder_spec_, encoder_, enc_cache, pred_g.input_grad);
        nn::accumulate(step.predictor_grads, pred_g);
        nn::accumulate(step.encoder_grads, enc_g);

        step.states.push_back(std::move(state));
    }
    step.loss = loss / static_cast<double>(indices.size());
    return step;
}

void DQNAgent::apply_gradients(const nn::Gradients& encoder_grads,
                               const nn::Gradients& predictor_grads) {
    nn::optimize_step(encoder_, encoder_grads, encoder_opt_);
    nn::optimize_step(predictor_, predictor_grads, predictor_opt_);
    ++train_steps_;
    if (config_.target_sync > 0 && train_steps_ % config_.target_sync == 0) sync_targets();
}

double DQNAgent::train_step(ReplayBuffer& buffer, RngStream& rng) {
    TdStep step = compute_td_gradients(buffer, rng);
    apply_gradients(step.encoder_grads, step.predictor_grads);
    return step.loss;
}

void DQNAgent::sync_targets() {
    target_encoder_ = nn::copy_params(encoder_);
    target_predictor_ = nn::copy_params(predictor_);
}

}  // namespace advtrl
