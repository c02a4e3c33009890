#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "mbinet/error.hpp"
#include "mbinet/hearing_loss.hpp"
#include "support/helpers.hpp"

using namespace mbinet;

namespace {

Audiogram flat(double db) {
  Audiogram a;
  a.thresholds_db_hl.fill(db);
  return a;
}

// Direct DTFT magnitude of the coefficients, in dB.
double response_db(const std::vector<double>& h, double freq_hz, int rate) {
  std::complex<double> acc(0, 0);
  const double w = 2.0 * M_PI * freq_hz / rate;
  for (std::size_t n = 0; n < h.size(); n++)
    acc += h[n] * std::exp(std::complex<double>(0, -w * double(n)));
  return 20.0 * std::log10(std::abs(acc) + 1e-300);
}

double rms(const std::vector<double>& v) {
  double acc = 0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc / double(v.size()));
}

StereoWaveform noise_wave(std::size_t n, std::uint64_t seed) {
  StereoWaveform w;
  w.left = testsup::noise(n, seed, 0.5);
  w.right = testsup::noise(n, seed + 1, 0.5);
  w.sample_rate_hz = 16000;
  return w;
}

}  // namespace

TEST_CASE("audiogram validation bounds") {
  flat(0).validate();
  flat(120).validate();
  CHECK(flat(0).is_zero());
  CHECK(!flat(1).is_zero());
  CHECK_THROWS_AS(flat(-1).validate(), Error);
  CHECK_THROWS_AS(flat(121).validate(), Error);
}

TEST_CASE("threshold interpolation anchors and log-frequency midpoints") {
  Audiogram a;
  a.thresholds_db_hl = {0, 10, 20, 30, 40, 50, 60, 70};
  for (std::size_t i = 0; i < kAudiogramFreqsHz.size(); i++)
    CHECK(audiogram_threshold_at(a, kAudiogramFreqsHz[i]) ==
          doctest::Approx(a.thresholds_db_hl[i]).epsilon(1e-12));
  // geometric mean of 250 and 500 sits halfway in log-frequency
  CHECK(audiogram_threshold_at(a, std::sqrt(250.0 * 500.0)) ==
        doctest::Approx(5.0).epsilon(1e-9));
  CHECK(audiogram_threshold_at(a, 100.0) == doctest::Approx(0.0));
  CHECK(audiogram_threshold_at(a, 8000.0) == doctest::Approx(70.0));
}

TEST_CASE("zero audiogram designs a unity-gain filter") {
  std::vector<double> h = design_hl_filter(flat(0), 16000);
  REQUIRE(int(h.size()) == kHlFilterLength);
  for (double f = 250; f <= 7500; f += 36.25)
    CHECK(std::abs(response_db(h, f, 16000)) < 0.5);
}

TEST_CASE("flat 60 dB audiogram attenuates 60 dB across the band") {
  std::vector<double> h = design_hl_filter(flat(60), 16000);
  for (double f = 250; f <= 7500; f += 36.25)
    CHECK(std::abs(response_db(h, f, 16000) + 60.0) < 1.0);
}

TEST_CASE("notch audiogram hits the interpolated target on the design grid") {
  Audiogram a = flat(0);
  a.thresholds_db_hl[5] = 40.0;  // 4000 Hz
  std::vector<double> h = design_hl_filter(a, 16000);

  const double bin_hz = 16000.0 / kHlFilterLength;
  double near4k = std::round(4000.0 / bin_hz) * bin_hz;
  double near500 = std::round(500.0 / bin_hz) * bin_hz;
  double want4k = -audiogram_threshold_at(a, near4k);
  CHECK(std::abs(response_db(h, near4k, 16000) - want4k) < 0.2);
  CHECK(want4k < -38.0);
  CHECK(std::abs(response_db(h, near500, 16000)) < 1.0);
}

TEST_CASE("zero-threshold profile passes the signal through") {
  StereoWaveform w = noise_wave(4000, 10);
  ListenerProfile p{"p0", flat(0), flat(0)};
  StereoWaveform out = apply_hearing_loss(w, p);
  REQUIRE(out.length() == w.length());
  double peak = 0;
  for (double v : w.left) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < w.length(); i++) {
    CHECK(std::abs(out.left[i] - w.left[i]) < 1e-2 * peak);
    CHECK(std::abs(out.right[i] - w.right[i]) < 1e-2 * peak);
  }
}

TEST_CASE("flat 120 dB profile reduces RMS by at least five orders") {
  StereoWaveform w = noise_wave(4000, 11);
  ListenerProfile p{"p1", flat(120), flat(120)};
  StereoWaveform out = apply_hearing_loss(w, p);
  CHECK(rms(out.left) <= 1e-5 * rms(w.left));
  CHECK(rms(out.right) <= 1e-5 * rms(w.right));
}

TEST_CASE("asymmetric profile treats the ears independently") {
  StereoWaveform w = noise_wave(8000, 12);
  ListenerProfile p{"p2", flat(0), flat(60)};
  StereoWaveform out = apply_hearing_loss(w, p);
  CHECK(std::abs(rms(out.left) / rms(w.left) - 1.0) < 0.05);
  double drop_db = 20.0 * std::log10(rms(out.right) / rms(w.right));
  CHECK(std::abs(drop_db + 60.0) < 2.0);

  // swapping the ears swaps the outputs bit-for-bit
  StereoWaveform mirror;
  mirror.left = w.right;
  mirror.right = w.left;
  mirror.sample_rate_hz = w.sample_rate_hz;
  ListenerProfile q{"p2m", flat(60), flat(0)};
  StereoWaveform mout = apply_hearing_loss(mirror, q);
  CHECK(mout.left == out.right);
  CHECK(mout.right == out.left);
}

TEST_CASE("attenuation is monotone in the flat threshold") {
  StereoWaveform w = noise_wave(6000, 13);
  double prev = rms(w.left);
  for (double db : {0.0, 20.0, 40.0, 60.0, 80.0}) {
    ListenerProfile p{"m", flat(db), flat(db)};
    double cur = rms(apply_hearing_loss(w, p).left);
    if (db > 0.0) CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("application is deterministic and length-preserving") {
  StereoWaveform w = noise_wave(3333, 14);
  ListenerProfile p{"d", flat(30), flat(45)};
  StereoWaveform a = apply_hearing_loss(w, p);
  StereoWaveform b = apply_hearing_loss(w, p);
  CHECK(a.left == b.left);
  CHECK(a.right == b.right);
  CHECK(a.length() == 3333);
}

TEST_CASE("non-canonical sample rates are rejected") {
  StereoWaveform w = noise_wave(1000, 15);
  w.sample_rate_hz = 44100;
  ListenerProfile p{"r", flat(0), flat(0)};
  try {
    apply_hearing_loss(w, p);
    FAIL("expected a rate error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RangeError);
  }
  CHECK_THROWS_AS(design_hl_filter(flat(0), 8000), Error);
}
