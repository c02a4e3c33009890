#ifndef MBINET_EMBEDDING_HPP
#define MBINET_EMBEDDING_HPP

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace mbinet {

// Per-frame acoustic embedding stream, T_e x D.
struct EmbeddingFrames {
  Eigen::MatrixXd values;
  double native_hop_s = 0.0;

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index dim() const { return values.cols(); }
};

enum class ProviderKind { Fixture, Mock };

struct ProviderSpec {
  ProviderKind kind = ProviderKind::Mock;
  int dim = 64;
  std::uint64_t seed = 0;       // mock only
  std::string fixture_dir;      // fixture only
};

// Supplies the embedding stream behind the front-end interface. The mock
// backend computes a deterministic pseudo-embedding from the signal alone;
// the fixture backend loads a sidecar file keyed by utterance id alone.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual EmbeddingFrames embed(const std::vector<double>& mono_16k,
                                const std::string& utterance_id) const = 0;
  virtual int dim() const = 0;
  virtual ProviderSpec spec() const = 0;
};

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderSpec& spec);

// Fixture file format (bit-exact):
//   "EMB1" | u32 LE T_e | u32 LE D | T_e*D float32 LE row-major
void write_fixture(const std::string& dir, const std::string& utterance_id,
                   const EmbeddingFrames& frames);
EmbeddingFrames read_fixture(const std::string& dir,
                             const std::string& utterance_id);

std::vector<unsigned char> encode_fixture(const EmbeddingFrames& frames);
EmbeddingFrames decode_fixture(const std::vector<unsigned char>& bytes,
                               const std::string& origin);

// Resamples the embedding stream to t_target rows by linear interpolation,
// treating frame indices as uniformly spaced over the utterance duration.
Eigen::MatrixXd align_to_grid(const EmbeddingFrames& e, Eigen::Index t_target);

// Mock framing: 400-sample window, 320-sample hop (50 frames/s at 16 kHz).
inline constexpr int kMockWindow = 400;
inline constexpr int kMockHop = 320;

}  // namespace mbinet

#endif  // MBINET_EMBEDDING_HPP
