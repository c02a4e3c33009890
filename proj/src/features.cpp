#include "mbinet/features.hpp"

#include <algorithm>

#include "mbinet/dsp.hpp"
#include "mbinet/error.hpp"

namespace mbinet {

namespace {

// Windows of kRawFrameWindow samples centered on each STFT frame start.
// Out-of-range samples are zero (only the first window reaches before 0).
Eigen::MatrixXd raw_windows(const std::vector<double>& x, Eigen::Index t_frames) {
  const long half = kRawFrameWindow / 2;
  Eigen::MatrixXd out(t_frames, kRawFrameWindow);
  for (Eigen::Index t = 0; t < t_frames; t++) {
    const long center = static_cast<long>(t) * kStftHop;
    for (long i = 0; i < kRawFrameWindow; i++) {
      long j = center - half + i;
      out(t, static_cast<Eigen::Index>(i)) =
          (j >= 0 && j < static_cast<long>(x.size())) ? x[static_cast<std::size_t>(j)] : 0.0;
    }
  }
  return out;
}

FeatureBundle channel_bundle(const std::vector<double>& feat_signal,
                             const std::vector<double>& emb_signal,
                             const EmbeddingProvider& provider,
                             const std::string& emb_key) {
  SpectralFrames ps =
      stft_power(feat_signal, kCanonicalRateHz, kStftFrameLen, kStftHop, kStftNfft);

  FeatureBundle b;
  b.ps = ps.values;
  b.raw_frames = raw_windows(feat_signal, ps.frames());

  Eigen::Index t = std::min(b.ps.rows(), b.raw_frames.rows());
  if (b.ps.rows() != t) b.ps.conservativeResize(t, Eigen::NoChange);
  if (b.raw_frames.rows() != t) b.raw_frames.conservativeResize(t, Eigen::NoChange);

  EmbeddingFrames emb = provider.embed(emb_signal, emb_key);
  b.emb = align_to_grid(emb, t);
  b.t_frames = t;
  return b;
}

}  // namespace

UtteranceFeatures assemble(const StereoWaveform& w, const ListenerProfile& p,
                           const EmbeddingProvider& provider,
                           const AssemblyOptions& opts,
                           const std::string& utterance_id) {
  if (w.sample_rate_hz != kCanonicalRateHz)
    fail(ErrorKind::RangeError,
         "assemble expects a 16 kHz waveform, got " +
             std::to_string(w.sample_rate_hz) + " Hz");
  if (static_cast<int>(w.length()) < kStftFrameLen)
    fail(ErrorKind::SignalTooShort,
         "utterance '" + utterance_id + "' has " + std::to_string(w.length()) +
             " samples, need at least " + std::to_string(kStftFrameLen));

  const StereoWaveform* feat_wave = &w;
  StereoWaveform processed;
  if (opts.use_hl) {
    processed = apply_hearing_loss(w, p);
    feat_wave = &processed;
  }
  const StereoWaveform& emb_wave =
      (opts.use_hl && opts.hl_before_embeddings) ? *feat_wave : w;

  UtteranceFeatures out;
  out.utterance_id = utterance_id;
  out.left = channel_bundle(feat_wave->left, emb_wave.left, provider,
                            utterance_id + ".L");
  out.right = channel_bundle(feat_wave->right, emb_wave.right, provider,
                             utterance_id + ".R");
  return out;
}

}  // namespace mbinet
