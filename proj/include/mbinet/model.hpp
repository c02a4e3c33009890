#ifndef MBINET_MODEL_HPP
#define MBINET_MODEL_HPP

#include <Eigen/Core>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "mbinet/features.hpp"
#include "mbinet/tape.hpp"

namespace mbinet {

enum class Task { Intelligibility, Haspi };

const char* task_name(Task t);
Task task_from_name(const std::string& name);

struct ModelConfig {
  int lfb_filters = 64;
  int lfb_kernel = 400;
  std::vector<int> cnn_channels = {16, 32};
  int blstm_hidden = 128;
  int attn_dim = 128;
  int ps_bins = 257;
  int emb_dim = 64;
  std::vector<Task> tasks = {Task::Intelligibility};
  std::uint64_t seed = 0;

  bool has_task(Task t) const;
  void validate() const;
};

enum class InitKind { Glorot, Zero };

struct ParamArray {
  std::string name;
  InitKind init = InitKind::Glorot;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;  // accumulated by backward(); same shape, zeroed
  Eigen::MatrixXd adam_m, adam_v;
};

// Named parameter arrays in a fixed registration order (left branch, right
// branch, then per-task merge layers). Order determines checkpoint layout.
class ParameterSet {
 public:
  ParamArray& add(const std::string& name, Eigen::Index rows,
                  Eigen::Index cols, InitKind init);
  ParamArray& at(const std::string& name);
  const ParamArray& at(const std::string& name) const;
  bool has(const std::string& name) const;
  std::size_t size() const { return order_.size(); }

  std::vector<ParamArray*>& arrays() { return order_; }
  const std::vector<ParamArray*>& arrays() const { return order_; }

  void zero_grads();

 private:
  std::deque<ParamArray> storage_;
  std::map<std::string, ParamArray*> by_name_;
  std::vector<ParamArray*> order_;
};

// Registers every array with the shapes implied by cfg, zero-filled.
ParameterSet make_param_set(const ModelConfig& cfg);

// make_param_set plus seeded initialization: weights uniform in
// +/-sqrt(6/(fan_in+fan_out)), biases zero. Each array draws from its own
// stream seeded by mix_seed(cfg.seed, hash_name(array name)), so arrays
// shared between task modes initialize identically.
ParameterSet init(const ModelConfig& cfg);

enum class Branch { Left, Right };

struct TaskPrediction {
  Eigen::VectorXd frame_left;
  Eigen::VectorXd frame_right;
  Eigen::VectorXd frame_merged;
  double utterance = 0.0;
};

using PredictionBundle = std::map<Task, TaskPrediction>;

// One branch's graph, exposed for gradient checks against the inputs.
struct BranchGraph {
  ad::Tape tape;
  ad::Node* raw = nullptr;
  ad::Node* ps = nullptr;
  ad::Node* emb = nullptr;
  std::map<Task, ad::Node*> frames;  // T x 1 per task
};

BranchGraph branch_forward_with_tape(const ModelConfig& cfg,
                                     const ParameterSet& params,
                                     const FeatureBundle& b, Branch branch);

std::map<Task, Eigen::VectorXd> branch_forward(const ModelConfig& cfg,
                                               const ParameterSet& params,
                                               const FeatureBundle& b,
                                               Branch branch);

struct TaskNodes {
  ad::Node* frame_left = nullptr;
  ad::Node* frame_right = nullptr;
  ad::Node* frame_merged = nullptr;
  ad::Node* utterance = nullptr;  // 1x1
};

struct ForwardGraph {
  ad::Tape tape;
  std::map<Task, TaskNodes> tasks;
};

// Value-only forward; safe to call concurrently on a const ParameterSet.
PredictionBundle forward(const ModelConfig& cfg, const ParameterSet& params,
                         const UtteranceFeatures& u);

// Forward pass whose parameter leaves flush gradients into params.grad on
// the reverse sweep. The graph borrows `params`; keep it alive and do not
// mutate values until backward() has run.
ForwardGraph forward_with_tape(const ModelConfig& cfg, ParameterSet& params,
                               const UtteranceFeatures& u);

PredictionBundle bundle_values(const ForwardGraph& g);

struct TaskSeeds {
  Eigen::VectorXd d_frame_left;
  Eigen::VectorXd d_frame_right;
  Eigen::VectorXd d_frame_merged;
  double d_utterance = 0.0;
};

// Injects loss-gradient seeds and runs the reverse sweep, accumulating into
// ParamArray::grad of the set the graph was built over.
void backward(ForwardGraph& g, const std::map<Task, TaskSeeds>& seeds);

struct TrainState {
  int epoch = 0;
  std::int64_t adam_step = 0;
  double best_dev_loss = 0.0;
  bool has_best = false;
  int epochs_since_best = 0;
};

struct CheckpointMeta {
  ModelConfig cfg;
  ProviderSpec provider;
  bool hl_enabled = true;
  bool hl_before_embeddings = true;
  std::uint64_t split_seed = 0;
  double split_ratio = 0.9;
  TrainState train;
  bool has_adam = false;  // when true, Adam moments follow each value block
};

// Checkpoint container:
//   "MBCK" | u32 LE version | u32 LE manifest_len | manifest JSON
//   then per array, in registration order:
//     "PAR8" | u32 LE rows | u32 LE cols | rows*cols f64 LE row-major
//   (value block, then adam_m and adam_v blocks when has_adam)
void save_checkpoint(const std::string& path, const CheckpointMeta& meta,
                     const ParameterSet& params);
CheckpointMeta load_checkpoint(const std::string& path, ParameterSet& out);

}  // namespace mbinet

#endif  // MBINET_MODEL_HPP
