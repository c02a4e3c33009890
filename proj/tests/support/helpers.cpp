#include "support/helpers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <random>

#include "mbinet/dsp.hpp"
#include "mbinet/error.hpp"
#include "mbinet/rng.hpp"

namespace testsup {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  for (int attempt = 0; attempt < 64; attempt++) {
    fs::path p = fs::temp_directory_path() /
                 ("mbinet_test_" + std::to_string(rd()) + "_" +
                  std::to_string(counter.fetch_add(1)));
    std::error_code ec;
    if (fs::create_directory(p, ec)) {
      path_ = p.string();
      return;
    }
  }
  throw std::runtime_error("could not create temp directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string TempDir::file(const std::string& name) const {
  return (fs::path(path_) / name).string();
}

namespace {

void put_le32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; i++) out.push_back(char((v >> (8 * i)) & 0xFF));
}

void put_le16(std::string& out, std::uint16_t v) {
  out.push_back(char(v & 0xFF));
  out.push_back(char((v >> 8) & 0xFF));
}

void write_wav(const std::string& path, const std::vector<double>& left,
               const std::vector<double>& right, int rate, bool float32) {
  if (!right.empty() && left.size() != right.size())
    throw std::runtime_error("channel length mismatch");
  const std::uint16_t channels = right.empty() ? 1 : 2;
  const std::uint16_t bits = float32 ? 32 : 16;
  const std::uint16_t block = channels * bits / 8;
  const std::uint32_t data_len =
      static_cast<std::uint32_t>(left.size()) * block;

  std::string out;
  out += "RIFF";
  put_le32(out, 36 + data_len);
  out += "WAVE";
  out += "fmt ";
  put_le32(out, 16);
  put_le16(out, float32 ? 3 : 1);
  put_le16(out, channels);
  put_le32(out, static_cast<std::uint32_t>(rate));
  put_le32(out, static_cast<std::uint32_t>(rate) * block);
  put_le16(out, block);
  put_le16(out, bits);
  out += "data";
  put_le32(out, data_len);
  auto put_sample = [&](double v) {
    if (float32) {
      float f = static_cast<float>(v);
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      put_le32(out, u);
    } else {
      double c = std::clamp(v, -1.0, 1.0);
      auto s = static_cast<std::int16_t>(std::lrint(c * 32767.0));
      put_le16(out, static_cast<std::uint16_t>(s));
    }
  };
  for (std::size_t i = 0; i < left.size(); i++) {
    put_sample(left[i]);
    if (channels == 2) put_sample(right[i]);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace

void write_wav_pcm16(const std::string& path, const std::vector<double>& left,
                     const std::vector<double>& right, int rate) {
  write_wav(path, left, right, rate, false);
}

void write_wav_float32(const std::string& path,
                       const std::vector<double>& left,
                       const std::vector<double>& right, int rate) {
  write_wav(path, left, right, rate, true);
}

std::vector<double> noise(std::size_t n, std::uint64_t seed, double amp) {
  mbinet::Rng r(seed);
  std::vector<double> v(n);
  for (double& x : v) x = r.next_uniform(-amp, amp);
  return v;
}

std::vector<double> tone(std::size_t n, double freq_hz, int rate, double amp) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; i++)
    v[i] = amp * std::sin(2.0 * M_PI * freq_hz * static_cast<double>(i) /
                          static_cast<double>(rate));
  return v;
}

std::vector<std::complex<double>> naive_dft(
    const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; k++) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t t = 0; t < n; t++) {
      double ang = -2.0 * M_PI * static_cast<double>(k) *
                   static_cast<double>(t) / static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

double oracle_frame_term(const std::vector<double>& frames, double target,
                         double weight) {
  double s = 0.0;
  for (double f : frames) s += (target - f) * (target - f);
  return weight * s / static_cast<double>(frames.size());
}

double oracle_task_loss(const std::vector<OracleUtterance>& batch, double w_m,
                        double w_l, double w_r) {
  double acc = 0.0;
  for (const OracleUtterance& u : batch) {
    double d = u.target - u.utterance;
    acc += d * d;
    acc += oracle_frame_term(u.merged, u.target, w_m);
    acc += oracle_frame_term(u.left, u.target, w_l);
    acc += oracle_frame_term(u.right, u.target, w_r);
  }
  return acc / static_cast<double>(batch.size());
}

std::vector<double> oracle_ranks(const std::vector<double>& v) {
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < v.size(); i++) {
    std::size_t below = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); j++) {
      if (v[j] < v[i]) below++;
      if (v[j] == v[i]) equal++;
    }
    // ranks of the tie group are below+1 .. below+equal; average them
    ranks[i] = static_cast<double>(below) +
               (static_cast<double>(equal) + 1.0) / 2.0;
  }
  return ranks;
}

double oracle_pearson(const std::vector<double>& a,
                      const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); i++) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); i++) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

mbinet::ModelConfig tiny_config(bool with_haspi, std::uint64_t seed) {
  mbinet::ModelConfig cfg;
  cfg.lfb_filters = 4;
  cfg.lfb_kernel = 8;
  cfg.cnn_channels = {4, 8};
  cfg.blstm_hidden = 4;
  cfg.attn_dim = 4;
  cfg.ps_bins = 12;
  cfg.emb_dim = 12;
  cfg.tasks = {mbinet::Task::Intelligibility};
  if (with_haspi) cfg.tasks.push_back(mbinet::Task::Haspi);
  cfg.seed = seed;
  return cfg;
}

mbinet::FeatureBundle synth_bundle(const mbinet::ModelConfig& cfg,
                                   int t_frames, std::uint64_t seed) {
  mbinet::Rng r(seed);
  mbinet::FeatureBundle b;
  b.t_frames = t_frames;
  b.ps.resize(t_frames, cfg.ps_bins);
  b.raw_frames.resize(t_frames, cfg.lfb_kernel);
  b.emb.resize(t_frames, cfg.emb_dim);
  for (Eigen::Index i = 0; i < b.ps.rows(); i++)
    for (Eigen::Index j = 0; j < b.ps.cols(); j++)
      b.ps(i, j) = r.next_uniform(-2.0, 2.0);
  for (Eigen::Index i = 0; i < b.raw_frames.rows(); i++)
    for (Eigen::Index j = 0; j < b.raw_frames.cols(); j++) {
      double mag = r.next_uniform(0.3, 1.0);
      b.raw_frames(i, j) = r.next_unit() < 0.5 ? -mag : mag;
    }
  for (Eigen::Index i = 0; i < b.emb.rows(); i++)
    for (Eigen::Index j = 0; j < b.emb.cols(); j++)
      b.emb(i, j) = r.next_uniform(-1.0, 1.0);
  return b;
}

mbinet::UtteranceFeatures synth_features(const mbinet::ModelConfig& cfg,
                                         int t_frames, std::uint64_t seed) {
  mbinet::UtteranceFeatures u;
  u.utterance_id = "synthetic";
  u.left = synth_bundle(cfg, t_frames, mbinet::mix_seed(seed, 1));
  u.right = synth_bundle(cfg, t_frames, mbinet::mix_seed(seed, 2));
  return u;
}

double min_lfb_margin(const mbinet::ModelConfig& cfg,
                      const mbinet::ParameterSet& params,
                      const mbinet::UtteranceFeatures& u) {
  double margin = std::numeric_limits<double>::infinity();
  for (const char* prefix : {"left.", "right."}) {
    const mbinet::FeatureBundle& b =
        std::string(prefix) == "left." ? u.left : u.right;
    const Eigen::MatrixXd& k =
        params.at(std::string(prefix) + "lfb.kernel").value;
    Eigen::MatrixXd pre = b.raw_frames * k.transpose();
    margin = std::min(margin, pre.array().abs().minCoeff());
  }
  return margin;
}

SynthCorpus write_synth_corpus(const std::string& dir, int n, int track_count,
                               std::uint64_t seed, bool with_haspi,
                               double seconds) {
  fs::create_directories(fs::path(dir) / "audio");
  mbinet::Rng r(seed);
  nlohmann::json root = nlohmann::json::array();
  SynthCorpus corpus;
  const auto len =
      static_cast<std::size_t>(seconds * mbinet::kCanonicalRateHz);
  for (int i = 0; i < n; i++) {
    char idbuf[16];
    std::snprintf(idbuf, sizeof idbuf, "u%04d", i);
    std::string id = idbuf;
    std::string rel = "audio/" + id + ".wav";
    auto left = noise(len, mbinet::mix_seed(seed, 1000 + i), 0.4);
    auto right = noise(len, mbinet::mix_seed(seed, 2000 + i), 0.4);
    write_wav_pcm16((fs::path(dir) / rel).string(), left, right,
                    mbinet::kCanonicalRateHz);

    double flat = (i % 2 == 0) ? 0.0 : 30.0;
    nlohmann::json audiogram = nlohmann::json::array();
    for (int f = 0; f < 8; f++) audiogram.push_back(flat);
    nlohmann::json entry{
        {"utterance_id", id},
        {"signal_path", rel},
        {"track", 1 + i % track_count},
        {"listener",
         {{"id", "L" + std::to_string(i % 3)},
          {"left", audiogram},
          {"right", audiogram}}},
        {"correctness", 20.0 + 75.0 * r.next_unit()}};
    if (with_haspi) entry["haspi"] = 0.2 + 0.75 * r.next_unit();
    root.push_back(entry);
    corpus.ids.push_back(id);
  }
  corpus.manifest_path = (fs::path(dir) / "manifest.json").string();
  std::ofstream f(corpus.manifest_path, std::ios::trunc);
  f << root.dump(2) << "\n";
  if (!f) throw std::runtime_error("failed writing manifest");
  return corpus;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

}  // namespace testsup
