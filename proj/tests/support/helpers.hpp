#ifndef MBINET_TESTS_SUPPORT_HELPERS_HPP
#define MBINET_TESTS_SUPPORT_HELPERS_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "mbinet/features.hpp"
#include "mbinet/model.hpp"

namespace testsup {

// Unique directory under the system temp root; removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const;

 private:
  std::string path_;
};

void write_wav_pcm16(const std::string& path, const std::vector<double>& left,
                     const std::vector<double>& right, int rate);
void write_wav_float32(const std::string& path,
                       const std::vector<double>& left,
                       const std::vector<double>& right, int rate);

std::vector<double> noise(std::size_t n, std::uint64_t seed, double amp = 0.5);
std::vector<double> tone(std::size_t n, double freq_hz, int rate,
                         double amp = 0.5);

// Direct O(n^2) DFT, the oracle for the transform in the main library.
std::vector<std::complex<double>> naive_dft(
    const std::vector<std::complex<double>>& x);

// Brute-force objective oracle, written independently of the library:
// plain loops over plain vectors, no shared code with src/objectives.cpp.
double oracle_frame_term(const std::vector<double>& frames, double target,
                         double weight);

struct OracleUtterance {
  std::vector<double> left, right, merged;
  double utterance = 0.0;
  double target = 0.0;
};

double oracle_task_loss(const std::vector<OracleUtterance>& batch, double w_m,
                        double w_l, double w_r);

// O(n^2) average ranks (ties averaged) and textbook Pearson, independent
// of src/metrics.cpp.
std::vector<double> oracle_ranks(const std::vector<double>& v);
double oracle_pearson(const std::vector<double>& a,
                      const std::vector<double>& b);

double rel_err(double a, double b);

// Tiny model for gradient checks: every layer width <= 8, 12 input bins.
mbinet::ModelConfig tiny_config(bool with_haspi, std::uint64_t seed = 7);

// Random features matching a config; raw windows are kept away from zero
// so the filterbank's log(|x| + eps) stays locally smooth.
mbinet::FeatureBundle synth_bundle(const mbinet::ModelConfig& cfg, int t_frames,
                                   std::uint64_t seed);
mbinet::UtteranceFeatures synth_features(const mbinet::ModelConfig& cfg,
                                         int t_frames, std::uint64_t seed);

// Smallest |pre-activation| of the filterbank (before abs/log) over both
// branches; finite-difference checks need this margin to be comfortably
// larger than the probe step.
double min_lfb_margin(const mbinet::ModelConfig& cfg,
                      const mbinet::ParameterSet& params,
                      const mbinet::UtteranceFeatures& u);

// On-disk synthetic corpus: stereo noise WAVs plus a manifest.
struct SynthCorpus {
  std::string manifest_path;
  std::vector<std::string> ids;
};

SynthCorpus write_synth_corpus(const std::string& dir, int n, int track_count,
                               std::uint64_t seed, bool with_haspi,
                               double seconds = 1.0);

std::string read_file(const std::string& path);

}  // namespace testsup

#endif  // MBINET_TESTS_SUPPORT_HELPERS_HPP
