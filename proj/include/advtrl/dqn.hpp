#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "advtrl/frame.hpp"
#include "advtrl/nn.hpp"
#include "advtrl/rng.hpp"
#include "advtrl/tensor.hpp"

namespace advtrl {

// ---------------------------------------------------------------------------
// Tabular Q-learning. Serves as the enumerable-MDP oracle that the network
// agent is checked against.
// ---------------------------------------------------------------------------

class QTable {
public:
    explicit QTable(int action_count, bool auto_insert = true)
        : action_count_(action_count), auto_insert_(auto_insert) {}

    int action_count() const { return action_count_; }
    bool contains(int state) const { return table_.count(state) != 0; }

    double value(int state, int action) const;
    /// max_a Q(s,a); 0 for states never seen.
    double max_value(int state) const;
    /// argmax_a Q(s,a), ties broken by lowest action index.
    int greedy_action(int state) const;

    /// Q(s,a) <- (1-alpha)*Q(s,a) + alpha*(r + gamma*max_a' Q(s',a')), with
    /// bootstrap 0 for terminal s'. Throws UnknownState when `state` is
    /// missing and auto-insert is disabled.
    void update(int state, int action, double reward, int next_state, bool terminal, double alpha,
                double gamma);

private:
    std::vector<double>& row(int state);
    const std::vector<double>* find(int state) const;

    int action_count_;
    bool auto_insert_;
    std::unordered_map<int, std::vector<double>> table_;
};

// ---------------------------------------------------------------------------
// Exploration schedule.
// ---------------------------------------------------------------------------

struct EpsilonSchedule {
    enum class Kind { constant, linear };
    Kind kind = Kind::constant;
    double start = 0.1;
    double end = 0.1;
    long decay_steps = 1;

    static EpsilonSchedule constant(double eps) { return {Kind::constant, eps, eps, 1}; }
    static EpsilonSchedule linear(double start, double end, long decay_steps);

    /// Epsilon at env step `step`; linear schedules reach `end` exactly at
    /// decay_steps and stay constant after.
    double at(long step) const;
};

// ---------------------------------------------------------------------------
// Observation stacking. Frames are quantized to 8 bits at this boundary so
// replay storage and network inputs see the same discretized pixels.
// ---------------------------------------------------------------------------

enum class StackMode { single, stack2, diff2 };

std::string stack_mode_name(StackMode m);
StackMode stack_mode_from_name(const std::string& name);
int stack_channels(StackMode m);

class StateAssembler {
public:
    StateAssembler(StackMode mode, int height, int width);

    void begin_episode(const Frame& first);
    void push(const Frame& frame);

    const std::vector<int>& shape() const { return shape_; }
    /// Current assembled state as quantized bytes (replay storage form).
    std::vector<uint8_t> quantized() const;
    /// Current assembled state as a float tensor in [0,1].
    Tensor state() const;

    static Tensor decode(const std::vector<uint8_t>& bytes, const std::vector<int>& shape);

private:
    StackMode mode_;
    int h_, w_;
    std::vector<int> shape_;
    std::vector<uint8_t> prev_, cur_;
};

// ---------------------------------------------------------------------------
// Replay memory.
// ---------------------------------------------------------------------------

struct Transition {
    std::vector<uint8_t> state, next_state;  // quantized assembled states
    int action = 0;
    float reward = 0.0f;
    bool terminal = false;
};

class ReplayBuffer {
public:
    ReplayBuffer(size_t capacity, std::vector<int> state_shape);

    size_t capacity() const { return capacity_; }
    size_t size() const { return storage_.size(); }
    const std::vector<int>& state_shape() const { return shape_; }

    /// Appends a transition, evicting the oldest when full.
    void insert(Transition t);

    /// i-th oldest stored transition (0 = oldest).
    const Transition& at(size_t logical_index) const;

    /// Uniform sample of `batch` distinct logical indices.
    /// Throws BufferTooSmall when size() < batch.
    std::vector<size_t> sample_indices(size_t batch, RngStream& rng) const;

    Tensor decode_state(const Transition& t) const;
    Tensor decode_next_state(const Transition& t) const;

private:
    size_t capacity_;
    std::vector<int> shape_;
    size_t state_bytes_;
    std::vector<Transition> storage_;  // ring
    size_t head_ = 0;                  // physical index of oldest
};

// ---------------------------------------------------------------------------
// DQN agent: encoder F + predictor V with periodically synced target copies.
// ---------------------------------------------------------------------------

struct AgentConfig {
    double gamma = 0.99;
    size_t buffer_capacity = 50000;
    int batch_size = 32;
    long warmup = 1000;
    int train_every = 4;
    long target_sync = 1000;
    nn::OptKind optimizer = nn::OptKind::rmsprop;
    double learning_rate = 5e-4;
    double rms_decay = 0.95;
    double rms_epsilon = 1e-6;
    double huber_delta = 1.0;
    bool clip_rewards = false;
    StackMode stack = StackMode::stack2;
    EpsilonSchedule epsilon = EpsilonSchedule::linear(1.0, 0.1, 50000);
};

class DQNAgent {
public:
    /// Fresh He-initialized networks.
    DQNAgent(nn::NetworkSpec encoder_spec, nn::NetworkSpec predictor_spec, AgentConfig config,
             RngStream& init_rng);

    /// Warm-start from existing parameters (transfer initialization).
    static DQNAgent from_params(nn::NetworkSpec encoder_spec, nn::Params encoder,
                                nn::NetworkSpec predictor_spec, nn::Params predictor,
                                AgentConfig config);

    const AgentConfig& config() const { return config_; }
    int action_count() const { return action_count_; }
    long train_steps() const { return train_steps_; }

    std::vector<float> q_values(const Tensor& state) const;

    /// With probability epsilon a uniform action, otherwise
    /// argmax_a V(F(state)), ties broken by lowest index.
    int select_action(const Tensor& state, double epsilon, RngStream& rng) const;

    struct TargetBatch {
        std::vector<Tensor> next_states;
        std::vector<double> rewards;
        std::vector<uint8_t> terminals;
    };
    /// Y_i = r_i + gamma * max_a Qbar(s'_i, a), or r_i for terminal s'.
    std::vector<double> compute_targets(const TargetBatch& batch) const;

    struct TdStep {
        double loss = 0.0;
        nn::Gradients encoder_grads, predictor_grads;
        std::vector<Tensor> states;  // decoded batch states, for auxiliary losses
    };
    /// Samples a batch and computes Huber TD loss/gradients on the taken
    /// actions only. Does not modify the agent.
    TdStep compute_td_gradients(const ReplayBuffer& buffer, RngStream& rng) const;

    /// One optimizer step on F and V jointly; bumps the step counter and
    /// syncs targets every target_sync steps.
    void apply_gradients(const nn::Gradients& encoder_grads, const nn::Gradients& predictor_grads);

    /// compute_td_gradients + apply_gradients; returns the batch loss.
    double train_step(ReplayBuffer& buffer, RngStream& rng);

    void sync_targets();

    const nn::NetworkSpec& encoder_spec() const { return encoder_spec_; }
    const nn::NetworkSpec& predictor_spec() const { return predictor_spec_; }
    const nn::Params& encoder_params() const { return encoder_; }
    const nn::Params& predictor_params() const { return predictor_; }
    const nn::Params& target_encoder_params() const { return target_encoder_; }
    const nn::Params& target_predictor_params() const { return target_predictor_; }
    nn::Params& mutable_encoder_params() { return encoder_; }
    nn::Params& mutable_predictor_params() { return predictor_; }

private:
    DQNAgent(nn::NetworkSpec encoder_spec, nn::NetworkSpec predictor_spec, AgentConfig config);

    nn::NetworkSpec encoder_spec_, predictor_spec_;
    AgentConfig config_;
    nn::Params encoder_, predictor_;
    nn::Params target_encoder_, target_predictor_;
    nn::OptimizerState encoder_opt_, predictor_opt_;
    int action_count_ = 0;
    long train_steps_ = 0;
};

}  // namespace advtrl
