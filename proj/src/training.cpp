#include "mbinet/training.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <mutex>
#include <thread>

#include "mbinet/dsp.hpp"
#include "mbinet/error.hpp"
#include "mbinet/log.hpp"
#include "mbinet/rng.hpp"

namespace mbinet {

namespace fs = std::filesystem;
using nlohmann::json;

double clamp_score(double v) { return std::clamp(v, 0.0, 100.0); }

void RunConfig::validate() const {
  model.validate();
  loss.validate();
  if (manifest_path.empty())
    fail(ErrorKind::ConfigError, "manifest path not set");
  if (split_ratio < 0.0 || split_ratio > 1.0)
    fail(ErrorKind::ConfigError, "split.ratio outside [0, 1]");
  if (optim.lr <= 0.0 || !std::isfinite(optim.lr))
    fail(ErrorKind::ConfigError, "optim.lr must be positive");
  if (optim.beta1 < 0.0 || optim.beta1 >= 1.0 || optim.beta2 < 0.0 ||
      optim.beta2 >= 1.0)
    fail(ErrorKind::ConfigError, "optim moment decays must lie in [0, 1)");
  if (optim.epsilon <= 0.0)
    fail(ErrorKind::ConfigError, "optim.epsilon must be positive");
  if (optim.accum < 1) fail(ErrorKind::ConfigError, "optim.accum must be >= 1");
  if (optim.max_epochs < 1)
    fail(ErrorKind::ConfigError, "optim.max_epochs must be >= 1");
  if (optim.patience < 0)
    fail(ErrorKind::ConfigError, "optim.patience must be >= 0");
  if (track < 0) fail(ErrorKind::ConfigError, "track must be >= 0");
  if (provider.dim != model.emb_dim)
    fail(ErrorKind::ConfigError,
         "provider.dim and model.emb_dim disagree");
  if (model.ps_bins != kStftNfft / 2 + 1)
    fail(ErrorKind::ConfigError,
         "model.ps_bins must match the analysis front end (" +
             std::to_string(kStftNfft / 2 + 1) + ")");
  if (model.lfb_kernel != kRawFrameWindow)
    fail(ErrorKind::ConfigError,
         "model.lfb_kernel must match the raw frame window (" +
             std::to_string(kRawFrameWindow) + ")");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(ErrorKind::ConfigError, "bad number for " + key + ": '" + v + "'");
  }
}

int to_int(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    int i = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    fail(ErrorKind::ConfigError, "bad integer for " + key + ": '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    std::uint64_t u = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return u;
  } catch (const std::exception&) {
    fail(ErrorKind::ConfigError, "bad integer for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(ErrorKind::ConfigError, "bad boolean for " + key + ": '" + v + "'");
}

std::vector<std::string> split_commas(const std::string& v) {
  std::vector<std::string> parts;
  std::size_t at = 0;
  while (at <= v.size()) {
    std::size_t comma = v.find(',', at);
    if (comma == std::string::npos) comma = v.size();
    parts.push_back(trim(v.substr(at, comma - at)));
    at = comma + 1;
  }
  return parts;
}

std::string resolve_path(const std::string& base_dir, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute() || base_dir.empty()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text,
                                const std::string& base_dir) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::ConfigError,
           "line " + std::to_string(lineno) + " is not key=value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));

    if (key == "manifest") {
      cfg.manifest_path = resolve_path(base_dir, val);
    } else if (key == "out_dir") {
      cfg.out_dir = resolve_path(base_dir, val);
    } else if (key == "track") {
      cfg.track = to_int(val, key);
    } else if (key == "provider") {
      if (val == "mock")
        cfg.provider.kind = ProviderKind::Mock;
      else if (val == "fixture")
        cfg.provider.kind = ProviderKind::Fixture;
      else
        fail(ErrorKind::ConfigError, "provider must be mock or fixture");
    } else if (key == "provider.dim") {
      cfg.provider.dim = to_int(val, key);
    } else if (key == "provider.seed") {
      cfg.provider.seed = to_u64(val, key);
    } else if (key == "provider.fixture_dir") {
      cfg.provider.fixture_dir = resolve_path(base_dir, val);
    } else if (key == "model.lfb_filters") {
      cfg.model.lfb_filters = to_int(val, key);
    } else if (key == "model.lfb_kernel") {
      cfg.model.lfb_kernel = to_int(val, key);
    } else if (key == "model.cnn_channels") {
      cfg.model.cnn_channels.clear();
      for (const std::string& p : split_commas(val))
        cfg.model.cnn_channels.push_back(to_int(p, key));
    } else if (key == "model.blstm_hidden") {
      cfg.model.blstm_hidden = to_int(val, key);
    } else if (key == "model.attn_dim") {
      cfg.model.attn_dim = to_int(val, key);
    } else if (key == "model.ps_bins") {
      cfg.model.ps_bins = to_int(val, key);
    } else if (key == "model.emb_dim") {
      cfg.model.emb_dim = to_int(val, key);
    } else if (key == "model.seed") {
      cfg.model.seed = to_u64(val, key);
    } else if (key == "tasks") {
      cfg.model.tasks.clear();
      for (const std::string& p : split_commas(val))
        cfg.model.tasks.push_back(task_from_name(p));
    } else if (key == "loss.alpha") {
      cfg.loss.alpha = to_double(val, key);
    } else if (key == "loss.beta") {
      cfg.loss.beta = to_double(val, key);
    } else if (key == "loss.alpha_m") {
      cfg.loss.alpha_m = to_double(val, key);
    } else if (key == "loss.alpha_l") {
      cfg.loss.alpha_l = to_double(val, key);
    } else if (key == "loss.alpha_r") {
      cfg.loss.alpha_r = to_double(val, key);
    } else if (key == "loss.beta_m") {
      cfg.loss.beta_m = to_double(val, key);
    } else if (key == "loss.beta_l") {
      cfg.loss.beta_l = to_double(val, key);
    } else if (key == "loss.beta_r") {
      cfg.loss.beta_r = to_double(val, key);
    } else if (key == "optim.lr") {
      cfg.optim.lr = to_double(val, key);
    } else if (key == "optim.beta1") {
      cfg.optim.beta1 = to_double(val, key);
    } else if (key == "optim.beta2") {
      cfg.optim.beta2 = to_double(val, key);
    } else if (key == "optim.epsilon") {
      cfg.optim.epsilon = to_double(val, key);
    } else if (key == "optim.accum") {
      cfg.optim.accum = to_int(val, key);
    } else if (key == "optim.max_epochs") {
      cfg.optim.max_epochs = to_int(val, key);
    } else if (key == "optim.patience") {
      cfg.optim.patience = to_int(val, key);
    } else if (key == "split.seed") {
      cfg.split_seed = to_u64(val, key);
    } else if (key == "split.ratio") {
      cfg.split_ratio = to_double(val, key);
    } else if (key == "hl.enabled") {
      cfg.hl_enabled = to_bool(val, key);
    } else if (key == "hl_before_embeddings") {
      cfg.hl_before_embeddings = to_bool(val, key);
    } else {
      fail(ErrorKind::ConfigError,
           "unknown config key '" + key + "' (line " + std::to_string(lineno) +
               ")");
    }
  }
  return cfg;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::IoError, "cannot open run config '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  std::string base = fs::path(path).parent_path().string();
  return parse_run_config_text(text, base);
}

UtteranceFeatures features_for(const StereoWaveform& w,
                               const ListenerProfile& l,
                               const EmbeddingProvider& provider,
                               bool hl_enabled, bool hl_before_embeddings,
                               const std::string& utterance_id) {
  StereoWaveform canonical = resample(w, kCanonicalRateHz);
  AssemblyOptions opts;
  opts.use_hl = hl_enabled;
  opts.hl_before_embeddings = hl_before_embeddings;
  return assemble(canonical, l, provider, opts, utterance_id);
}

namespace {

bool same_model_config(const ModelConfig& a, const ModelConfig& b) {
  auto tasks_of = [](const ModelConfig& c) {
    std::vector<int> t;
    for (Task x : c.tasks) t.push_back(static_cast<int>(x));
    std::sort(t.begin(), t.end());
    return t;
  };
  return a.lfb_filters == b.lfb_filters && a.lfb_kernel == b.lfb_kernel &&
         a.cnn_channels == b.cnn_channels &&
         a.blstm_hidden == b.blstm_hidden && a.attn_dim == b.attn_dim &&
         a.ps_bins == b.ps_bins && a.emb_dim == b.emb_dim &&
         a.seed == b.seed && tasks_of(a) == tasks_of(b);
}

// Per-track splits with a common seed; parts are unioned across tracks so
// train/dev membership is stable whether tracks are trained jointly or not.
SplitAssignment combined_split(
    const std::map<int, std::vector<ManifestEntry>>& by_track, double ratio,
    std::uint64_t seed) {
  SplitAssignment all;
  all.seed = seed;
  for (const auto& [track, entries] : by_track) {
    SplitAssignment s = split(entries, ratio, seed);
    all.train.insert(all.train.end(), s.train.begin(), s.train.end());
    all.dev.insert(all.dev.end(), s.dev.begin(), s.dev.end());
  }
  std::sort(all.train.begin(), all.train.end());
  std::sort(all.dev.begin(), all.dev.end());
  return all;
}

std::map<int, std::vector<ManifestEntry>> group_by_track(
    const std::vector<ManifestEntry>& entries, int only_track) {
  std::map<int, std::vector<ManifestEntry>> by_track;
  for (const ManifestEntry& e : entries)
    if (only_track == 0 || e.track == only_track) by_track[e.track].push_back(e);
  if (by_track.empty())
    fail(ErrorKind::TooFewEntries,
         only_track == 0 ? std::string("manifest has no entries")
                         : "no entries for track " + std::to_string(only_track));
  return by_track;
}

void adam_step(ParameterSet& params, const OptimConfig& o, TrainState& state) {
  state.adam_step++;
  const double bc1 = 1.0 - std::pow(o.beta1, static_cast<double>(state.adam_step));
  const double bc2 = 1.0 - std::pow(o.beta2, static_cast<double>(state.adam_step));
  for (ParamArray* a : params.arrays()) {
    a->adam_m = o.beta1 * a->adam_m + (1.0 - o.beta1) * a->grad;
    a->adam_v =
        (o.beta2 * a->adam_v.array() + (1.0 - o.beta2) * a->grad.array().square())
            .matrix();
    a->value.array() -= o.lr * (a->adam_m.array() / bc1) /
                        ((a->adam_v.array() / bc2).sqrt() + o.epsilon);
  }
}

}  // namespace

TrainResult train(const RunConfig& cfg, const std::string& resume_from) {
  cfg.validate();
  auto entries = parse_manifest(cfg.manifest_path);
  auto by_track = group_by_track(entries, cfg.track);
  SplitAssignment parts =
      combined_split(by_track, cfg.split_ratio, cfg.split_seed);

  std::map<std::string, const ManifestEntry*> by_id;
  for (const ManifestEntry& e : entries) by_id[e.utterance_id] = &e;

  const bool haspi_active = cfg.model.has_task(Task::Haspi);
  auto provider = make_provider(cfg.provider);
  const std::string manifest_dir =
      fs::path(cfg.manifest_path).parent_path().string();

  std::map<std::string, UtteranceFeatures> feats;
  std::map<std::string, UtteranceTargets> labels;
  auto ingest = [&](const std::vector<std::string>& ids) {
    for (const std::string& id : ids) {
      const ManifestEntry* e = by_id.at(id);
      if (haspi_active && !e->haspi)
        fail(ErrorKind::MissingTarget,
             "utterance '" + id + "' lacks a haspi label");
      StereoWaveform w = load_wav(resolve_path(manifest_dir, e->signal_path));
      feats[id] = features_for(w, e->listener, *provider, cfg.hl_enabled,
                               cfg.hl_before_embeddings, id);
      labels[id] = UtteranceTargets{e->correctness, e->haspi};
    }
  };
  ingest(parts.train);
  ingest(parts.dev);

  ParameterSet params;
  TrainState state;
  if (!resume_from.empty()) {
    CheckpointMeta prev = load_checkpoint(resume_from, params);
    if (!same_model_config(prev.cfg, cfg.model))
      fail(ErrorKind::CheckpointMismatch,
           "resume checkpoint was trained with a different model config");
    if (!prev.has_adam)
      fail(ErrorKind::CheckpointMismatch,
           "resume checkpoint lacks optimizer state");
    state = prev.train;
  } else {
    params = init(cfg.model);
  }

  CheckpointMeta meta;
  meta.cfg = cfg.model;
  meta.provider = cfg.provider;
  meta.hl_enabled = cfg.hl_enabled;
  meta.hl_before_embeddings = cfg.hl_before_embeddings;
  meta.split_seed = cfg.split_seed;
  meta.split_ratio = cfg.split_ratio;
  meta.has_adam = true;

  fs::create_directories(cfg.out_dir);
  TrainResult result;
  result.best_path = (fs::path(cfg.out_dir) / "best.ckpt").string();
  result.last_path = (fs::path(cfg.out_dir) / "last.ckpt").string();
  result.log_path = (fs::path(cfg.out_dir) / "train_log.jsonl").string();

  std::ofstream log_file(result.log_path, resume_from.empty()
                                              ? std::ios::trunc
                                              : std::ios::app);
  if (!log_file)
    fail(ErrorKind::IoError, "cannot open '" + result.log_path + "'");

  const std::uint64_t order_seed = mix_seed(cfg.split_seed, hash_name("order"));
  const bool have_dev = !parts.dev.empty();
  const std::size_t n_train = parts.train.size();
  if (n_train == 0) fail(ErrorKind::TooFewEntries, "empty training part");

  for (int epoch = state.epoch; epoch < cfg.optim.max_epochs; epoch++) {
    auto t0 = std::chrono::steady_clock::now();
    auto order = iterate(parts, SplitPart::Train, order_seed, epoch);

    double sum_total = 0.0, sum_int = 0.0, sum_haspi = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.optim.accum)) {
      std::size_t block = std::min(static_cast<std::size_t>(cfg.optim.accum),
                                   order.size() - start);
      params.zero_grads();
      for (std::size_t k = 0; k < block; k++) {
        const std::string& id = order[start + k];
        ForwardGraph fg = forward_with_tape(cfg.model, params, feats.at(id));
        PredictionBundle bundle = bundle_values(fg);
        LossBreakdown bd =
            total_loss({bundle}, {labels.at(id)}, cfg.loss, cfg.model.tasks);
        if (!std::isfinite(bd.total))
          fail(ErrorKind::NonFiniteLoss,
               "loss diverged at epoch " + std::to_string(epoch) +
                   ", utterance '" + id + "'");
        sum_total += bd.total;
        sum_int += bd.task_int;
        sum_haspi += bd.task_haspi;
        auto seeds =
            loss_seeds(bundle, labels.at(id), cfg.loss, cfg.model.tasks, block);
        backward(fg, seeds);
      }
      adam_step(params, cfg.optim, state);
    }
    double train_total = sum_total / static_cast<double>(n_train);
    double train_int = sum_int / static_cast<double>(n_train);
    double train_haspi = sum_haspi / static_cast<double>(n_train);

    double dev_total = 0.0, dev_int = 0.0, dev_haspi = 0.0;
    if (have_dev) {
      std::vector<PredictionBundle> preds;
      std::vector<UtteranceTargets> tg;
      for (const std::string& id : iterate(parts, SplitPart::Dev, 0, 0)) {
        preds.push_back(forward(cfg.model, params, feats.at(id)));
        tg.push_back(labels.at(id));
      }
      LossBreakdown bd = total_loss(preds, tg, cfg.loss, cfg.model.tasks);
      if (!std::isfinite(bd.total))
        fail(ErrorKind::NonFiniteLoss,
             "dev loss diverged at epoch " + std::to_string(epoch));
      dev_total = bd.total;
      dev_int = bd.task_int;
      dev_haspi = bd.task_haspi;
    }

    double selection = have_dev ? dev_int : train_int;
    state.epoch = epoch + 1;
    bool improved = !state.has_best || selection < state.best_dev_loss;
    if (improved) {
      state.best_dev_loss = selection;
      state.has_best = true;
      state.epochs_since_best = 0;
    } else {
      state.epochs_since_best++;
    }

    meta.train = state;
    if (improved) save_checkpoint(result.best_path, meta, params);
    save_checkpoint(result.last_path, meta, params);

    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    json rec{{"epoch", state.epoch},
             {"train_total", train_total},
             {"train_int", train_int},
             {"lr", cfg.optim.lr},
             {"elapsed_s", elapsed}};
    if (haspi_active) rec["train_haspi"] = train_haspi;
    if (have_dev) {
      rec["dev_total"] = dev_total;
      rec["dev_int"] = dev_int;
      if (haspi_active) rec["dev_haspi"] = dev_haspi;
    }
    log_file << rec.dump() << "\n";
    log_file.flush();
    MBI_LOG_INFO("epoch ", state.epoch, " train_int=", train_int,
                 have_dev ? " dev_int=" : "", have_dev ? std::to_string(dev_int) : "");

    result.epochs_run = state.epoch;
    result.best_selection_loss = state.best_dev_loss;
    result.selected_on_dev = have_dev;
    if (have_dev && state.epochs_since_best >= cfg.optim.patience) break;
  }
  if (result.epochs_run == 0) {
    result.epochs_run = state.epoch;
    result.best_selection_loss = state.best_dev_loss;
    result.selected_on_dev = have_dev;
  }
  return result;
}

namespace {

struct EvalItem {
  const ManifestEntry* entry = nullptr;
  double pred_int = 0.0;
  double pred_haspi = 0.0;
};

}  // namespace

EvalResult evaluate(const std::string& checkpoint_path,
                    const std::string& manifest_path, SplitPart part,
                    const EvalOptions& opts) {
  ParameterSet params;
  CheckpointMeta meta = load_checkpoint(checkpoint_path, params);
  auto entries = parse_manifest(manifest_path);
  auto by_track = group_by_track(entries, 0);
  auto provider = make_provider(meta.provider);
  const std::string manifest_dir =
      fs::path(manifest_path).parent_path().string();
  const bool has_haspi_head = meta.cfg.has_task(Task::Haspi);
  double ratio = opts.split_ratio_override >= 0.0 ? opts.split_ratio_override
                                                  : meta.split_ratio;

  std::map<std::string, const ManifestEntry*> by_id;
  for (const ManifestEntry& e : entries) by_id[e.utterance_id] = &e;

  std::vector<int> track_order;
  std::vector<std::vector<EvalItem>> track_items;
  for (const auto& [track, track_entries] : by_track) {
    SplitAssignment s = split(track_entries, ratio, meta.split_seed);
    std::vector<std::string> ids = iterate(s, part, 0, 0);
    if (ids.empty())
      fail(ErrorKind::EmptyInput,
           "no utterances in the requested part for track " +
               std::to_string(track));
    std::vector<EvalItem> items;
    for (const std::string& id : ids) items.push_back({by_id.at(id)});
    track_order.push_back(track);
    track_items.push_back(std::move(items));
  }

  std::vector<EvalItem*> work;
  for (auto& items : track_items)
    for (EvalItem& it : items) work.push_back(&it);

  auto run_one = [&](EvalItem& it) {
    const ManifestEntry* e = it.entry;
    StereoWaveform w = load_wav(resolve_path(manifest_dir, e->signal_path));
    UtteranceFeatures f =
        features_for(w, e->listener, *provider, meta.hl_enabled,
                     meta.hl_before_embeddings, e->utterance_id);
    PredictionBundle pred = forward(meta.cfg, params, f);
    it.pred_int = clamp_score(pred.at(Task::Intelligibility).utterance);
    if (has_haspi_head)
      it.pred_haspi = clamp_score(pred.at(Task::Haspi).utterance);
  };

  int workers = std::max(1, opts.workers);
  if (workers == 1) {
    for (EvalItem* it : work) run_one(*it);
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    auto worker = [&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= work.size()) return;
        try {
          run_one(*work[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; i++) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  EvalResult result;
  std::vector<TrackMetrics> int_rows;
  std::vector<TrackMetrics> haspi_rows;
  for (std::size_t ti = 0; ti < track_order.size(); ti++) {
    const auto& items = track_items[ti];
    std::vector<double> pred, truth;
    for (const EvalItem& it : items) {
      pred.push_back(it.pred_int);
      truth.push_back(it.entry->correctness);
    }
    TrackMetrics tm;
    tm.track = std::to_string(track_order[ti]);
    tm.n = items.size();
    tm.rmse = rmse(pred, truth);
    tm.lcc = lcc(pred, truth);
    tm.srcc = srcc(pred, truth);
    int_rows.push_back(tm);

    if (has_haspi_head) {
      std::vector<double> hp, ht;
      for (const EvalItem& it : items)
        if (it.entry->haspi) {
          hp.push_back(it.pred_haspi);
          ht.push_back(*it.entry->haspi);
        }
      if (hp.size() >= 2) {
        TrackMetrics hm;
        hm.track = tm.track;
        hm.n = hp.size();
        hm.rmse = rmse(hp, ht);
        hm.lcc = lcc(hp, ht);
        hm.srcc = srcc(hp, ht);
        haspi_rows.push_back(hm);
      }
    }
  }
  result.intelligibility = track_report(int_rows);
  if (!haspi_rows.empty()) result.haspi = track_report(haspi_rows);
  return result;
}

PredictRecord predict(const std::string& checkpoint_path,
                      const std::string& wav_path, const ListenerProfile& l) {
  ParameterSet params;
  CheckpointMeta meta = load_checkpoint(checkpoint_path, params);
  auto provider = make_provider(meta.provider);
  StereoWaveform w = load_wav(wav_path);
  std::string id = fs::path(wav_path).stem().string();
  UtteranceFeatures f = features_for(w, l, *provider, meta.hl_enabled,
                                     meta.hl_before_embeddings, id);
  PredictionBundle pred = forward(meta.cfg, params, f);

  PredictRecord rec;
  const TaskPrediction& ip = pred.at(Task::Intelligibility);
  rec.intelligibility = clamp_score(ip.utterance);
  rec.frame_merged.assign(ip.frame_merged.data(),
                          ip.frame_merged.data() + ip.frame_merged.size());
  if (meta.cfg.has_task(Task::Haspi))
    rec.haspi = clamp_score(pred.at(Task::Haspi).utterance);
  return rec;
}

}  // namespace mbinet
