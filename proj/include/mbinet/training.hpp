#ifndef MBINET_TRAINING_HPP
#define MBINET_TRAINING_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mbinet/manifest.hpp"
#include "mbinet/metrics.hpp"
#include "mbinet/model.hpp"
#include "mbinet/objectives.hpp"

namespace mbinet {

struct OptimConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int accum = 4;        // utterances per accumulation block (the U of the loss)
  int max_epochs = 100;
  int patience = 5;     // epochs without dev improvement before stopping
};

struct RunConfig {
  std::string manifest_path;
  ProviderSpec provider;
  ModelConfig model;
  LossWeights loss;
  OptimConfig optim;
  std::uint64_t split_seed = 0;
  double split_ratio = 0.9;
  bool hl_enabled = true;
  bool hl_before_embeddings = true;
  int track = 0;  // 0 = all tracks
  std::string out_dir = ".";

  void validate() const;
};

// Key=value run-config file ('#' comments, blank lines ignored). Relative
// paths resolve against the config file's directory. Documented keys:
//   manifest, out_dir, track
//   provider {mock|fixture}, provider.dim, provider.seed, provider.fixture_dir
//   model.lfb_filters, model.lfb_kernel, model.cnn_channels (comma list),
//   model.blstm_hidden, model.attn_dim, model.ps_bins, model.emb_dim,
//   model.seed, tasks (comma list)
//   loss.alpha, loss.beta, loss.{alpha,beta}_{m,l,r}
//   optim.lr, optim.beta1, optim.beta2, optim.epsilon, optim.accum,
//   optim.max_epochs, optim.patience
//   split.seed, split.ratio, hl.enabled, hl_before_embeddings
RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text,
                                const std::string& base_dir);

struct TrainResult {
  std::string best_path;
  std::string last_path;
  std::string log_path;
  int epochs_run = 0;
  double best_selection_loss = 0.0;  // dev intelligibility task loss
  bool selected_on_dev = true;       // false when the dev part is empty
};

// Adam with gradient accumulation, early stopping on the dev
// intelligibility task loss, best/last checkpoints and a JSONL epoch log
// under cfg.out_dir. `resume_from` continues from a last.ckpt written by a
// previous run of the same config.
TrainResult train(const RunConfig& cfg, const std::string& resume_from = "");

struct EvalOptions {
  int workers = 1;
  double split_ratio_override = -1.0;  // <0: use the checkpoint's ratio
};

struct EvalResult {
  MetricsReport intelligibility;
  std::optional<MetricsReport> haspi;
};

// Per-track metrics over one split part, averaged across tracks. Split
// membership is reconstructed from the seed/ratio stored in the
// checkpoint, so train/dev selections match the training run.
EvalResult evaluate(const std::string& checkpoint_path,
                    const std::string& manifest_path, SplitPart part,
                    const EvalOptions& opts);

struct PredictRecord {
  double intelligibility = 0.0;        // clamped to [0, 100]
  std::optional<double> haspi;         // present when the head exists
  std::vector<double> frame_merged;    // intelligibility branch, unclamped
};

PredictRecord predict(const std::string& checkpoint_path,
                      const std::string& wav_path, const ListenerProfile& l);

// Shared by training, evaluation and predict: resample to 16 kHz, apply
// the HL front end per options, assemble the feature bundles.
UtteranceFeatures features_for(const StereoWaveform& w,
                               const ListenerProfile& l,
                               const EmbeddingProvider& provider,
                               bool hl_enabled, bool hl_before_embeddings,
                               const std::string& utterance_id);

double clamp_score(double v);

}  // namespace mbinet

#endif  // MBINET_TRAINING_HPP
