#ifndef MBINET_FEATURES_HPP
#define MBINET_FEATURES_HPP

#include <Eigen/Core>
#include <string>

#include "mbinet/embedding.hpp"
#include "mbinet/hearing_loss.hpp"
#include "mbinet/wav.hpp"

namespace mbinet {

// Raw-wave window length (25 ms at 16 kHz), placed on the STFT hop grid.
inline constexpr int kRawFrameWindow = 400;

// One channel's cross-domain features: log-power spectrum, windowed raw
// samples for the learnable filter bank, and the aligned embedding stream.
// All three share the same frame count.
struct FeatureBundle {
  Eigen::MatrixXd ps;          // T x F
  Eigen::MatrixXd raw_frames;  // T x W
  Eigen::MatrixXd emb;         // T x D
  Eigen::Index t_frames = 0;
};

struct UtteranceFeatures {
  FeatureBundle left;
  FeatureBundle right;
  std::string utterance_id;
};

struct AssemblyOptions {
  bool use_hl = true;
  // When false, embeddings are computed from the unprocessed waveform even
  // though the spectral and raw streams see the HL-filtered signal.
  bool hl_before_embeddings = true;
};

// Builds the per-channel feature bundles of one utterance. The waveform
// must be at 16 kHz and at least one STFT frame long. Channel embeddings
// are keyed as "<utterance_id>.L" / "<utterance_id>.R" for the fixture
// backend.
UtteranceFeatures assemble(const StereoWaveform& w, const ListenerProfile& p,
                           const EmbeddingProvider& provider,
                           const AssemblyOptions& opts,
                           const std::string& utterance_id);

}  // namespace mbinet

#endif  // MBINET_FEATURES_HPP
