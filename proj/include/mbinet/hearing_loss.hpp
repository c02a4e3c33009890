#ifndef MBINET_HEARING_LOSS_HPP
#define MBINET_HEARING_LOSS_HPP

#include <array>
#include <string>
#include <vector>

#include "mbinet/wav.hpp"

namespace mbinet {

// Standard audiometric frequencies the audiogram is sampled at.
inline constexpr std::array<double, 8> kAudiogramFreqsHz = {
    250.0, 500.0, 1000.0, 2000.0, 3000.0, 4000.0, 6000.0, 8000.0};

// Per-ear hearing thresholds in dB HL, each in [0, 120].
struct Audiogram {
  std::array<double, 8> thresholds_db_hl{};

  void validate() const;
  bool is_zero() const;
};

struct ListenerProfile {
  std::string listener_id;
  Audiogram left;
  Audiogram right;
};

inline constexpr int kHlFilterLength = 129;
inline constexpr int kHlGroupDelay = (kHlFilterLength - 1) / 2;

// Linear-phase attenuation FIR (length 129) by frequency sampling. The
// target magnitude at frequency f is -threshold(f) dB; thresholds are
// interpolated linearly in log-frequency between the audiogram points and
// held constant below 250 Hz and above 8000 Hz.
std::vector<double> design_hl_filter(const Audiogram& a, int sample_rate_hz);

// Convolves each channel with its ear's filter, compensating the 64-sample
// group delay so the output stays aligned with the input. Length preserved.
StereoWaveform apply_hearing_loss(const StereoWaveform& w,
                                  const ListenerProfile& p);

// Target attenuation in dB at an arbitrary frequency (the interpolation
// rule used by the filter design); exposed for tests.
double audiogram_threshold_at(const Audiogram& a, double freq_hz);

}  // namespace mbinet

#endif  // MBINET_HEARING_LOSS_HPP
