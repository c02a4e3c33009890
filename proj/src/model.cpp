#include "mbinet/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <set>

#include "mbinet/error.hpp"
#include "mbinet/rng.hpp"

namespace mbinet {

namespace {

constexpr int kConvStrideF = 3;
constexpr std::uint32_t kCheckpointVersion = 1;

struct ConvStage {
  int c_in, c_out, f_in, f_out;
};

std::vector<ConvStage> conv_stages(int f0, const std::vector<int>& channels) {
  std::vector<ConvStage> stages;
  int c = 1, f = f0;
  for (int co : channels) {
    stages.push_back({c, co, f, ad::conv2d_f_out(f, kConvStrideF)});
    c = co;
    f = stages.back().f_out;
  }
  return stages;
}

std::vector<Task> sorted_tasks(const ModelConfig& cfg) {
  std::vector<Task> ts = cfg.tasks;
  std::sort(ts.begin(), ts.end(),
            [](Task a, Task b) { return static_cast<int>(a) < static_cast<int>(b); });
  return ts;
}

int concat_width(const ModelConfig& cfg) {
  auto ps = conv_stages(cfg.ps_bins, cfg.cnn_channels);
  auto emb = conv_stages(cfg.emb_dim, cfg.cnn_channels);
  return cfg.lfb_filters + ps.back().c_out * ps.back().f_out +
         emb.back().c_out * emb.back().f_out;
}

}  // namespace

const char* task_name(Task t) {
  switch (t) {
    case Task::Intelligibility: return "intelligibility";
    case Task::Haspi: return "haspi";
  }
  fail(ErrorKind::ConfigError, "unknown task value");
}

Task task_from_name(const std::string& name) {
  if (name == "intelligibility") return Task::Intelligibility;
  if (name == "haspi") return Task::Haspi;
  fail(ErrorKind::ConfigError, "unknown task '" + name + "'");
}

bool ModelConfig::has_task(Task t) const {
  return std::find(tasks.begin(), tasks.end(), t) != tasks.end();
}

void ModelConfig::validate() const {
  auto positive = [](int v, const char* what) {
    if (v <= 0)
      fail(ErrorKind::ConfigError, std::string(what) + " must be positive");
  };
  positive(lfb_filters, "lfb_filters");
  positive(lfb_kernel, "lfb_kernel");
  positive(blstm_hidden, "blstm_hidden");
  positive(attn_dim, "attn_dim");
  positive(ps_bins, "ps_bins");
  positive(emb_dim, "emb_dim");
  if (cnn_channels.empty())
    fail(ErrorKind::ConfigError, "cnn_channels must not be empty");
  for (int c : cnn_channels) positive(c, "cnn channel count");
  if (tasks.empty() || !has_task(Task::Intelligibility))
    fail(ErrorKind::ConfigError, "tasks must include intelligibility");
  std::set<int> seen;
  for (Task t : tasks)
    if (!seen.insert(static_cast<int>(t)).second)
      fail(ErrorKind::ConfigError, "duplicate task in config");
  for (int f0 : {ps_bins, emb_dim})
    for (const auto& s : conv_stages(f0, cnn_channels))
      if (s.f_in < 3)
        fail(ErrorKind::ConfigError,
             "cnn stage leaves fewer than 3 frequency bins (input width " +
                 std::to_string(f0) + ")");
}

ParamArray& ParameterSet::add(const std::string& name, Eigen::Index rows,
                              Eigen::Index cols, InitKind init) {
  if (by_name_.count(name))
    fail(ErrorKind::ConfigError, "duplicate parameter '" + name + "'");
  storage_.emplace_back();
  ParamArray& a = storage_.back();
  a.name = name;
  a.init = init;
  a.value = Eigen::MatrixXd::Zero(rows, cols);
  a.grad = Eigen::MatrixXd::Zero(rows, cols);
  a.adam_m = Eigen::MatrixXd::Zero(rows, cols);
  a.adam_v = Eigen::MatrixXd::Zero(rows, cols);
  by_name_[name] = &a;
  order_.push_back(&a);
  return a;
}

ParamArray& ParameterSet::at(const std::string& name) {
  auto it = by_name_.find(name);
  if (it == by_name_.end())
    fail(ErrorKind::ConfigError, "no parameter named '" + name + "'");
  return *it->second;
}

const ParamArray& ParameterSet::at(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end())
    fail(ErrorKind::ConfigError, "no parameter named '" + name + "'");
  return *it->second;
}

bool ParameterSet::has(const std::string& name) const {
  return by_name_.count(name) != 0;
}

void ParameterSet::zero_grads() {
  for (ParamArray* a : order_) a->grad.setZero();
}

ParameterSet make_param_set(const ModelConfig& cfg) {
  cfg.validate();
  ParameterSet p;
  const int h = cfg.blstm_hidden;
  const int width = concat_width(cfg);
  const auto tasks = sorted_tasks(cfg);

  for (const std::string prefix : {"left.", "right."}) {
    p.add(prefix + "lfb.kernel", cfg.lfb_filters, cfg.lfb_kernel,
          InitKind::Glorot);
    auto add_cnn = [&](const char* stem, int f0) {
      auto stages = conv_stages(f0, cfg.cnn_channels);
      for (std::size_t i = 0; i < stages.size(); i++) {
        std::string base = prefix + stem + std::to_string(i);
        p.add(base + ".kernel", stages[i].c_out, stages[i].c_in * 9,
              InitKind::Glorot);
        p.add(base + ".bias", 1, stages[i].c_out, InitKind::Zero);
      }
    };
    add_cnn("ps_cnn", cfg.ps_bins);
    add_cnn("emb_cnn", cfg.emb_dim);
    p.add(prefix + "pre.weight", width, 2 * h, InitKind::Glorot);
    p.add(prefix + "pre.bias", 1, 2 * h, InitKind::Zero);
    for (const std::string dir : {"f", "b"}) {
      p.add(prefix + "blstm.w_ih_" + dir, 2 * h, 4 * h, InitKind::Glorot);
      p.add(prefix + "blstm.w_hh_" + dir, h, 4 * h, InitKind::Glorot);
      p.add(prefix + "blstm.b_" + dir, 1, 4 * h, InitKind::Zero);
    }
    p.add(prefix + "attn.wq", 2 * h, cfg.attn_dim, InitKind::Glorot);
    p.add(prefix + "attn.wk", 2 * h, cfg.attn_dim, InitKind::Glorot);
    for (Task t : tasks) {
      std::string base = prefix + "head." + task_name(t);
      p.add(base + ".weight", 2 * h, 1, InitKind::Glorot);
      p.add(base + ".bias", 1, 1, InitKind::Zero);
    }
  }
  for (Task t : tasks) {
    std::string base = std::string("merge.") + task_name(t);
    p.add(base + ".weight", 1, 2, InitKind::Glorot);
    p.add(base + ".bias", 1, 1, InitKind::Zero);
  }
  return p;
}

ParameterSet init(const ModelConfig& cfg) {
  ParameterSet p = make_param_set(cfg);
  for (ParamArray* a : p.arrays()) {
    if (a->init == InitKind::Zero) continue;
    Rng rng(mix_seed(cfg.seed, hash_name(a->name)));
    double limit =
        std::sqrt(6.0 / static_cast<double>(a->value.rows() + a->value.cols()));
    for (Eigen::Index i = 0; i < a->value.rows(); i++)
      for (Eigen::Index j = 0; j < a->value.cols(); j++)
        a->value(i, j) = rng.next_uniform(-limit, limit);
  }
  return p;
}

namespace {

using LeafFn = std::function<ad::Node*(const std::string&)>;

struct BranchNodes {
  ad::Node* raw = nullptr;
  ad::Node* ps = nullptr;
  ad::Node* emb = nullptr;
  std::map<Task, ad::Node*> frames;
};

BranchNodes build_branch(ad::Tape& tape, const ModelConfig& cfg,
                         const LeafFn& param, const FeatureBundle& b,
                         const std::string& prefix) {
  if (b.t_frames < 1) fail(ErrorKind::ShapeMismatch, "empty feature bundle");
  if (b.ps.rows() != b.t_frames || b.raw_frames.rows() != b.t_frames ||
      b.emb.rows() != b.t_frames)
    fail(ErrorKind::ShapeMismatch, "feature streams disagree on frame count");
  if (b.ps.cols() != cfg.ps_bins)
    fail(ErrorKind::ShapeMismatch,
         "spectrum has " + std::to_string(b.ps.cols()) + " bins, config wants " +
             std::to_string(cfg.ps_bins));
  if (b.raw_frames.cols() != cfg.lfb_kernel)
    fail(ErrorKind::ShapeMismatch, "raw window width != lfb_kernel");
  if (b.emb.cols() != cfg.emb_dim)
    fail(ErrorKind::ShapeMismatch,
         "embedding dim " + std::to_string(b.emb.cols()) + ", config wants " +
             std::to_string(cfg.emb_dim));

  BranchNodes out;
  out.raw = ad::leaf(tape, b.raw_frames);
  out.ps = ad::leaf(tape, b.ps);
  out.emb = ad::leaf(tape, b.emb);

  ad::Node* lfb = ad::log_abs(
      tape, ad::matmul(tape, out.raw, param(prefix + "lfb.kernel"), true),
      1e-7);

  auto run_cnn = [&](ad::Node* x, const char* stem, int f0) {
    auto stages = conv_stages(f0, cfg.cnn_channels);
    for (std::size_t i = 0; i < stages.size(); i++) {
      std::string base = prefix + stem + std::to_string(i);
      x = ad::tanh_op(
          tape, ad::conv2d(tape, x, param(base + ".kernel"),
                           param(base + ".bias"), stages[i].c_in,
                           stages[i].f_in, stages[i].c_out, kConvStrideF));
    }
    return x;
  };
  ad::Node* ps_feat = run_cnn(out.ps, "ps_cnn", cfg.ps_bins);
  ad::Node* emb_feat = run_cnn(out.emb, "emb_cnn", cfg.emb_dim);

  ad::Node* cat = ad::concat_cols(tape, {lfb, ps_feat, emb_feat});
  ad::Node* pre = ad::add_rowvec(
      tape, ad::matmul(tape, cat, param(prefix + "pre.weight")),
      param(prefix + "pre.bias"));

  ad::Node* bl = ad::bilstm(
      tape, pre, param(prefix + "blstm.w_ih_f"), param(prefix + "blstm.w_hh_f"),
      param(prefix + "blstm.b_f"), param(prefix + "blstm.w_ih_b"),
      param(prefix + "blstm.w_hh_b"), param(prefix + "blstm.b_b"),
      cfg.blstm_hidden);

  ad::Node* q = ad::matmul(tape, bl, param(prefix + "attn.wq"));
  ad::Node* k = ad::matmul(tape, bl, param(prefix + "attn.wk"));
  ad::Node* scores =
      ad::scale(tape, ad::matmul(tape, q, k, true),
                1.0 / std::sqrt(static_cast<double>(cfg.attn_dim)));
  ad::Node* att = ad::matmul(tape, ad::softmax_rows(tape, scores), bl);

  for (Task t : sorted_tasks(cfg)) {
    std::string base = prefix + "head." + task_name(t);
    out.frames[t] = ad::add_rowvec(
        tape, ad::matmul(tape, att, param(base + ".weight")),
        param(base + ".bias"));
  }
  return out;
}

LeafFn plain_leaves(ad::Tape& tape, const ParameterSet& params) {
  return [&tape, &params](const std::string& name) {
    return ad::leaf(tape, params.at(name).value);
  };
}

LeafFn sink_leaves(ad::Tape& tape, ParameterSet& params) {
  return [&tape, &params](const std::string& name) {
    ParamArray& a = params.at(name);
    return ad::leaf_with_sink(tape, a.value, &a.grad);
  };
}

std::map<Task, TaskNodes> build_full(ad::Tape& tape, const ModelConfig& cfg,
                                     const LeafFn& param,
                                     const UtteranceFeatures& u) {
  BranchNodes left = build_branch(tape, cfg, param, u.left, "left.");
  BranchNodes right = build_branch(tape, cfg, param, u.right, "right.");
  if (u.left.t_frames != u.right.t_frames)
    fail(ErrorKind::ShapeMismatch, "left/right frame counts differ");

  std::map<Task, TaskNodes> out;
  for (Task t : sorted_tasks(cfg)) {
    std::string base = std::string("merge.") + task_name(t);
    TaskNodes n;
    n.frame_left = left.frames[t];
    n.frame_right = right.frames[t];
    ad::Node* lr = ad::concat_cols(tape, {n.frame_left, n.frame_right});
    n.frame_merged = ad::add_rowvec(
        tape, ad::matmul(tape, lr, param(base + ".weight"), true),
        param(base + ".bias"));
    n.utterance = ad::mean_all(tape, n.frame_merged);
    out[t] = n;
  }
  return out;
}

}  // namespace

BranchGraph branch_forward_with_tape(const ModelConfig& cfg,
                                     const ParameterSet& params,
                                     const FeatureBundle& b, Branch branch) {
  BranchGraph g;
  std::string prefix = branch == Branch::Left ? "left." : "right.";
  BranchNodes n =
      build_branch(g.tape, cfg, plain_leaves(g.tape, params), b, prefix);
  g.raw = n.raw;
  g.ps = n.ps;
  g.emb = n.emb;
  g.frames = std::move(n.frames);
  return g;
}

std::map<Task, Eigen::VectorXd> branch_forward(const ModelConfig& cfg,
                                               const ParameterSet& params,
                                               const FeatureBundle& b,
                                               Branch branch) {
  BranchGraph g = branch_forward_with_tape(cfg, params, b, branch);
  std::map<Task, Eigen::VectorXd> out;
  for (auto& [t, node] : g.frames) out[t] = node->val.col(0);
  return out;
}

PredictionBundle forward(const ModelConfig& cfg, const ParameterSet& params,
                         const UtteranceFeatures& u) {
  ad::Tape tape;
  auto nodes = build_full(tape, cfg, plain_leaves(tape, params), u);
  PredictionBundle out;
  for (auto& [t, n] : nodes) {
    TaskPrediction p;
    p.frame_left = n.frame_left->val.col(0);
    p.frame_right = n.frame_right->val.col(0);
    p.frame_merged = n.frame_merged->val.col(0);
    p.utterance = n.utterance->val(0, 0);
    out[t] = p;
  }
  return out;
}

ForwardGraph forward_with_tape(const ModelConfig& cfg, ParameterSet& params,
                               const UtteranceFeatures& u) {
  ForwardGraph g;
  g.tasks = build_full(g.tape, cfg, sink_leaves(g.tape, params), u);
  return g;
}

PredictionBundle bundle_values(const ForwardGraph& g) {
  PredictionBundle out;
  for (auto& [t, n] : g.tasks) {
    TaskPrediction p;
    p.frame_left = n.frame_left->val.col(0);
    p.frame_right = n.frame_right->val.col(0);
    p.frame_merged = n.frame_merged->val.col(0);
    p.utterance = n.utterance->val(0, 0);
    out[t] = p;
  }
  return out;
}

void backward(ForwardGraph& g, const std::map<Task, TaskSeeds>& seeds) {
  for (auto& [t, s] : seeds) {
    auto it = g.tasks.find(t);
    if (it == g.tasks.end())
      fail(ErrorKind::ShapeMismatch, "seed for task absent from graph");
    TaskNodes& n = it->second;
    if (s.d_frame_left.size() != n.frame_left->rows() ||
        s.d_frame_right.size() != n.frame_right->rows() ||
        s.d_frame_merged.size() != n.frame_merged->rows())
      fail(ErrorKind::ShapeMismatch, "seed length != frame count");
    ad::add_grad(n.frame_left, Eigen::MatrixXd(s.d_frame_left));
    ad::add_grad(n.frame_right, Eigen::MatrixXd(s.d_frame_right));
    ad::add_grad(n.frame_merged, Eigen::MatrixXd(s.d_frame_merged));
    Eigen::MatrixXd du(1, 1);
    du(0, 0) = s.d_utterance;
    ad::add_grad(n.utterance, du);
  }
  g.tape.backward();
}

namespace {

using nlohmann::json;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; i++) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  for (int i = 0; i < 8; i++)
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

struct ByteReader {
  const std::string& buf;
  std::size_t pos = 0;

  void need(std::size_t n, const char* what) {
    if (pos + n > buf.size())
      fail(ErrorKind::CheckpointMismatch,
           std::string("checkpoint truncated reading ") + what);
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; i++)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i]))
           << (8 * i);
    pos += 4;
    return v;
  }
  double f64(const char* what) {
    need(8, what);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; i++)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i]))
              << (8 * i);
    pos += 8;
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
  }
  std::string bytes(std::size_t n, const char* what) {
    need(n, what);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
  void expect_magic(const char* magic, const char* what) {
    if (bytes(4, what) != magic)
      fail(ErrorKind::CheckpointMismatch,
           std::string("bad magic for ") + what);
  }
};

json cfg_to_json(const ModelConfig& cfg) {
  json tasks = json::array();
  for (Task t : sorted_tasks(cfg)) tasks.push_back(task_name(t));
  return json{{"lfb_filters", cfg.lfb_filters},
              {"lfb_kernel", cfg.lfb_kernel},
              {"cnn_channels", cfg.cnn_channels},
              {"blstm_hidden", cfg.blstm_hidden},
              {"attn_dim", cfg.attn_dim},
              {"ps_bins", cfg.ps_bins},
              {"emb_dim", cfg.emb_dim},
              {"tasks", tasks},
              {"seed", cfg.seed}};
}

ModelConfig cfg_from_json(const json& j) {
  ModelConfig cfg;
  cfg.lfb_filters = j.at("lfb_filters").get<int>();
  cfg.lfb_kernel = j.at("lfb_kernel").get<int>();
  cfg.cnn_channels = j.at("cnn_channels").get<std::vector<int>>();
  cfg.blstm_hidden = j.at("blstm_hidden").get<int>();
  cfg.attn_dim = j.at("attn_dim").get<int>();
  cfg.ps_bins = j.at("ps_bins").get<int>();
  cfg.emb_dim = j.at("emb_dim").get<int>();
  cfg.tasks.clear();
  for (const auto& t : j.at("tasks"))
    cfg.tasks.push_back(task_from_name(t.get<std::string>()));
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

void put_array_block(std::string& out, const Eigen::MatrixXd& m) {
  out += "PAR8";
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); i++)
    for (Eigen::Index j = 0; j < m.cols(); j++) put_f64(out, m(i, j));
}

Eigen::MatrixXd read_array_block(ByteReader& r, const std::string& name,
                                 Eigen::Index rows, Eigen::Index cols) {
  r.expect_magic("PAR8", name.c_str());
  std::uint32_t fr = r.u32("rows");
  std::uint32_t fc = r.u32("cols");
  if (fr != static_cast<std::uint32_t>(rows) ||
      fc != static_cast<std::uint32_t>(cols))
    fail(ErrorKind::CheckpointMismatch,
         "array '" + name + "' has shape " + std::to_string(fr) + "x" +
             std::to_string(fc) + ", expected " + std::to_string(rows) + "x" +
             std::to_string(cols));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; i++)
    for (Eigen::Index j = 0; j < cols; j++) m(i, j) = r.f64(name.c_str());
  if (!m.allFinite())
    fail(ErrorKind::CheckpointMismatch,
         "array '" + name + "' contains non-finite entries");
  return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const CheckpointMeta& meta,
                     const ParameterSet& params) {
  json arrays = json::array();
  for (const ParamArray* a : params.arrays())
    arrays.push_back({{"name", a->name},
                      {"rows", a->value.rows()},
                      {"cols", a->value.cols()}});
  json manifest{
      {"model", cfg_to_json(meta.cfg)},
      {"provider",
       {{"kind", meta.provider.kind == ProviderKind::Mock ? "mock" : "fixture"},
        {"dim", meta.provider.dim},
        {"seed", meta.provider.seed},
        {"fixture_dir", meta.provider.fixture_dir}}},
      {"hl",
       {{"enabled", meta.hl_enabled},
        {"before_embeddings", meta.hl_before_embeddings}}},
      {"split", {{"seed", meta.split_seed}, {"ratio", meta.split_ratio}}},
      {"train",
       {{"epoch", meta.train.epoch},
        {"adam_step", meta.train.adam_step},
        {"best_dev_loss", meta.train.best_dev_loss},
        {"has_best", meta.train.has_best},
        {"epochs_since_best", meta.train.epochs_since_best}}},
      {"has_adam", meta.has_adam},
      {"arrays", arrays}};
  std::string js = manifest.dump();

  std::string out;
  out += "MBCK";
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(js.size()));
  out += js;
  for (const ParamArray* a : params.arrays()) {
    put_array_block(out, a->value);
    if (meta.has_adam) {
      put_array_block(out, a->adam_m);
      put_array_block(out, a->adam_v);
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) fail(ErrorKind::IoError, "short write to '" + path + "'");
}

CheckpointMeta load_checkpoint(const std::string& path, ParameterSet& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::IoError, "cannot open '" + path + "'");
  std::string buf((std::istreambuf_iterator<char>(f)),
                  std::istreambuf_iterator<char>());

  ByteReader r{buf};
  r.expect_magic("MBCK", "checkpoint header");
  std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion)
    fail(ErrorKind::CheckpointMismatch,
         "unsupported checkpoint version " + std::to_string(version));
  std::uint32_t js_len = r.u32("manifest length");
  std::string js = r.bytes(js_len, "manifest");

  json manifest;
  try {
    manifest = json::parse(js);
  } catch (const json::exception& e) {
    fail(ErrorKind::CheckpointMismatch,
         std::string("bad checkpoint manifest: ") + e.what());
  }

  CheckpointMeta meta;
  try {
    meta.cfg = cfg_from_json(manifest.at("model"));
    const json& prov = manifest.at("provider");
    std::string kind = prov.at("kind").get<std::string>();
    if (kind == "mock")
      meta.provider.kind = ProviderKind::Mock;
    else if (kind == "fixture")
      meta.provider.kind = ProviderKind::Fixture;
    else
      fail(ErrorKind::CheckpointMismatch, "unknown provider kind '" + kind + "'");
    meta.provider.dim = prov.at("dim").get<int>();
    meta.provider.seed = prov.at("seed").get<std::uint64_t>();
    meta.provider.fixture_dir = prov.at("fixture_dir").get<std::string>();
    meta.hl_enabled = manifest.at("hl").at("enabled").get<bool>();
    meta.hl_before_embeddings =
        manifest.at("hl").at("before_embeddings").get<bool>();
    meta.split_seed = manifest.at("split").at("seed").get<std::uint64_t>();
    meta.split_ratio = manifest.at("split").at("ratio").get<double>();
    const json& tr = manifest.at("train");
    meta.train.epoch = tr.at("epoch").get<int>();
    meta.train.adam_step = tr.at("adam_step").get<std::int64_t>();
    meta.train.best_dev_loss = tr.at("best_dev_loss").get<double>();
    meta.train.has_best = tr.at("has_best").get<bool>();
    meta.train.epochs_since_best = tr.at("epochs_since_best").get<int>();
    meta.has_adam = manifest.at("has_adam").get<bool>();
  } catch (const json::exception& e) {
    fail(ErrorKind::CheckpointMismatch,
         std::string("checkpoint manifest missing fields: ") + e.what());
  }

  out = make_param_set(meta.cfg);
  const json& arrays = manifest.at("arrays");
  if (!arrays.is_array() || arrays.size() != out.arrays().size())
    fail(ErrorKind::CheckpointMismatch,
         "checkpoint lists " + std::to_string(arrays.size()) +
             " arrays, config implies " + std::to_string(out.arrays().size()));
  for (std::size_t i = 0; i < out.arrays().size(); i++) {
    ParamArray* a = out.arrays()[i];
    const json& e = arrays.at(i);
    if (e.at("name").get<std::string>() != a->name ||
        e.at("rows").get<Eigen::Index>() != a->value.rows() ||
        e.at("cols").get<Eigen::Index>() != a->value.cols())
      fail(ErrorKind::CheckpointMismatch,
           "manifest entry " + std::to_string(i) + " does not match '" +
               a->name + "'");
  }

  for (ParamArray* a : out.arrays()) {
    a->value = read_array_block(r, a->name, a->value.rows(), a->value.cols());
    if (meta.has_adam) {
      a->adam_m =
          read_array_block(r, a->name + ".m", a->value.rows(), a->value.cols());
      a->adam_v =
          read_array_block(r, a->name + ".v", a->value.rows(), a->value.cols());
    }
  }
  if (r.pos != buf.size())
    fail(ErrorKind::CheckpointMismatch, "trailing bytes after last array");
  return meta;
}

}  // namespace mbinet
