#include "mbinet/embedding.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "mbinet/dsp.hpp"
#include "mbinet/error.hpp"
#include "mbinet/rng.hpp"

namespace mbinet {

namespace {

constexpr int kMockNfft = 512;
constexpr int kMockBins = kMockNfft / 2 + 1;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xFF));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 |
         static_cast<std::uint32_t>(p[3]) << 24;
}

std::string fixture_path(const std::string& dir,
                         const std::string& utterance_id) {
  return (std::filesystem::path(dir) / (utterance_id + ".emb")).string();
}

class MockProvider final : public EmbeddingProvider {
 public:
  explicit MockProvider(const ProviderSpec& spec) : spec_(spec) {
    if (spec_.dim <= 0)
      fail(ErrorKind::RangeError, "embedding dim must be positive");
    // Fixed seeded projection, spectrum bins -> D, drawn once.
    Rng rng(splitmix64(spec_.seed));
    projection_.resize(kMockBins, spec_.dim);
    const double scale = std::sqrt(6.0 / (kMockBins + spec_.dim));
    for (Eigen::Index r = 0; r < projection_.rows(); r++)
      for (Eigen::Index c = 0; c < projection_.cols(); c++)
        projection_(r, c) = rng.next_uniform(-scale, scale);
  }

  EmbeddingFrames embed(const std::vector<double>& mono_16k,
                        const std::string& /*utterance_id*/) const override {
    if (mono_16k.empty())
      fail(ErrorKind::EmptyInput, "cannot embed an empty signal");
    std::vector<double> x = mono_16k;
    if (x.size() < kMockWindow) x.resize(kMockWindow, 0.0);

    const std::size_t t_frames = 1 + (x.size() - kMockWindow) / kMockHop;
    EmbeddingFrames out;
    out.native_hop_s = static_cast<double>(kMockHop) / kCanonicalRateHz;
    out.values.resize(static_cast<Eigen::Index>(t_frames), spec_.dim);

    std::vector<std::complex<double>> buf(kMockNfft);
    Eigen::RowVectorXd logpow(kMockBins);
    for (std::size_t t = 0; t < t_frames; t++) {
      const std::size_t start = t * kMockHop;
      for (int i = 0; i < kMockWindow; i++)
        buf[static_cast<std::size_t>(i)] = x[start + static_cast<std::size_t>(i)];
      for (int i = kMockWindow; i < kMockNfft; i++)
        buf[static_cast<std::size_t>(i)] = 0.0;
      dft(buf);
      for (int k = 0; k < kMockBins; k++)
        logpow(k) = std::log(std::norm(buf[static_cast<std::size_t>(k)]) + kPowerFloor);
      out.values.row(static_cast<Eigen::Index>(t)) =
          (logpow * projection_).array().tanh();
    }
    return out;
  }

  int dim() const override { return spec_.dim; }
  ProviderSpec spec() const override { return spec_; }

 private:
  ProviderSpec spec_;
  Eigen::MatrixXd projection_;
};

class FixtureProvider final : public EmbeddingProvider {
 public:
  explicit FixtureProvider(const ProviderSpec& spec) : spec_(spec) {
    if (spec_.dim <= 0)
      fail(ErrorKind::RangeError, "embedding dim must be positive");
  }

  EmbeddingFrames embed(const std::vector<double>& mono_16k,
                        const std::string& utterance_id) const override {
    if (mono_16k.empty())
      fail(ErrorKind::EmptyInput, "cannot embed an empty signal");
    EmbeddingFrames f = read_fixture(spec_.fixture_dir, utterance_id);
    if (f.dim() != spec_.dim)
      fail(ErrorKind::DimensionMismatch,
           "fixture for '" + utterance_id + "' has D=" +
               std::to_string(f.dim()) + ", provider expects D=" +
               std::to_string(spec_.dim));
    return f;
  }

  int dim() const override { return spec_.dim; }
  ProviderSpec spec() const override { return spec_; }

 private:
  ProviderSpec spec_;
};

}  // namespace

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderSpec& spec) {
  if (spec.kind == ProviderKind::Mock)
    return std::make_unique<MockProvider>(spec);
  return std::make_unique<FixtureProvider>(spec);
}

std::vector<unsigned char> encode_fixture(const EmbeddingFrames& frames) {
  if (frames.frames() < 1 || frames.dim() < 1)
    fail(ErrorKind::DimensionMismatch, "fixture needs at least a 1x1 matrix");
  if (!frames.values.allFinite())
    fail(ErrorKind::DimensionMismatch,
         "fixture matrix contains non-finite entries");

  std::vector<unsigned char> out;
  out.reserve(12 + static_cast<std::size_t>(frames.values.size()) * 4);
  out.push_back('E');
  out.push_back('M');
  out.push_back('B');
  out.push_back('1');
  put_u32(out, static_cast<std::uint32_t>(frames.frames()));
  put_u32(out, static_cast<std::uint32_t>(frames.dim()));
  for (Eigen::Index r = 0; r < frames.frames(); r++)
    for (Eigen::Index c = 0; c < frames.dim(); c++) {
      float v = static_cast<float>(frames.values(r, c));
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      put_u32(out, bits);
    }
  return out;
}

EmbeddingFrames decode_fixture(const std::vector<unsigned char>& bytes,
                               const std::string& origin) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "EMB1", 4) != 0)
    fail(ErrorKind::DimensionMismatch,
         origin + ": not an EMB1 fixture file");
  std::uint32_t t = get_u32(bytes.data() + 4);
  std::uint32_t d = get_u32(bytes.data() + 8);
  if (t == 0 || d == 0)
    fail(ErrorKind::DimensionMismatch, origin + ": zero-sized fixture");
  std::size_t expected = 12 + static_cast<std::size_t>(t) * d * 4;
  if (bytes.size() != expected)
    fail(ErrorKind::DimensionMismatch,
         origin + ": size " + std::to_string(bytes.size()) +
             " does not match header (" + std::to_string(expected) + ")");

  EmbeddingFrames out;
  out.native_hop_s = static_cast<double>(kMockHop) / kCanonicalRateHz;
  out.values.resize(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(d));
  const unsigned char* p = bytes.data() + 12;
  for (std::uint32_t r = 0; r < t; r++)
    for (std::uint32_t c = 0; c < d; c++) {
      std::uint32_t bits = get_u32(p);
      p += 4;
      float v;
      std::memcpy(&v, &bits, 4);
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  return out;
}

void write_fixture(const std::string& dir, const std::string& utterance_id,
                   const EmbeddingFrames& frames) {
  std::vector<unsigned char> bytes = encode_fixture(frames);
  const std::string path = fixture_path(dir, utterance_id);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::IoError, "write failed on " + path);
}

EmbeddingFrames read_fixture(const std::string& dir,
                             const std::string& utterance_id) {
  const std::string path = fixture_path(dir, utterance_id);
  std::ifstream in(path, std::ios::binary);
  if (!in)
    fail(ErrorKind::FixtureMissing,
         "no fixture for '" + utterance_id + "' at " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return decode_fixture(bytes, path);
}

Eigen::MatrixXd align_to_grid(const EmbeddingFrames& e, Eigen::Index t_target) {
  if (t_target < 1)
    fail(ErrorKind::RangeError, "t_target must be at least 1");
  const Eigen::Index t_src = e.frames();
  if (t_src == t_target) return e.values;

  Eigen::MatrixXd out(t_target, e.dim());
  for (Eigen::Index i = 0; i < t_target; i++) {
    double p = t_target == 1
                   ? static_cast<double>(t_src - 1) / 2.0
                   : static_cast<double>(i) * static_cast<double>(t_src - 1) /
                         static_cast<double>(t_target - 1);
    Eigen::Index lo = static_cast<Eigen::Index>(std::floor(p));
    if (lo >= t_src - 1) lo = t_src - 2 >= 0 ? t_src - 2 : 0;
    if (t_src == 1) {
      out.row(i) = e.values.row(0);
      continue;
    }
    double u = p - static_cast<double>(lo);
    out.row(i) = (1.0 - u) * e.values.row(lo) + u * e.values.row(lo + 1);
  }
  return out;
}

}  // namespace mbinet
