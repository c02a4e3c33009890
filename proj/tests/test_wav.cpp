#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "mbinet/error.hpp"
#include "mbinet/wav.hpp"
#include "support/helpers.hpp"

using namespace mbinet;

namespace {

std::vector<unsigned char> file_bytes(const std::string& path) {
  std::string s = testsup::read_file(path);
  return std::vector<unsigned char>(s.begin(), s.end());
}

ErrorKind kind_of(const std::vector<unsigned char>& bytes) {
  try {
    parse_wav(bytes, "test");
  } catch (const Error& e) {
    return e.kind();
  }
  throw std::runtime_error("expected parse_wav to fail");
}

}  // namespace

TEST_CASE("stereo PCM16 round-trips sample count, rate, and values") {
  testsup::TempDir dir;
  std::vector<double> l = testsup::noise(1600, 1, 0.8);
  std::vector<double> r = testsup::noise(1600, 2, 0.8);
  std::string path = dir.file("st.wav");
  testsup::write_wav_pcm16(path, l, r, 16000);

  StereoWaveform w = load_wav(path);
  CHECK(w.length() == 1600);
  CHECK(w.sample_rate_hz == 16000);
  REQUIRE(w.right.size() == 1600);
  for (std::size_t i = 0; i < w.length(); i += 97) {
    CHECK(std::abs(w.left[i] - l[i]) < 2.0 / 32768.0);
    CHECK(std::abs(w.right[i] - r[i]) < 2.0 / 32768.0);
  }
}

TEST_CASE("mono input is duplicated onto both channels") {
  testsup::TempDir dir;
  std::vector<double> m = testsup::tone(800, 440, 16000);
  std::string path = dir.file("mono.wav");
  testsup::write_wav_pcm16(path, m, {}, 16000);

  StereoWaveform w = load_wav(path);
  CHECK(w.length() == 800);
  CHECK(w.left == w.right);
}

TEST_CASE("float32 samples load without quantization") {
  testsup::TempDir dir;
  std::vector<double> l = testsup::noise(512, 3, 0.9);
  std::vector<double> r = testsup::noise(512, 4, 0.9);
  std::string path = dir.file("f32.wav");
  testsup::write_wav_float32(path, l, r, 48000);

  StereoWaveform w = load_wav(path);
  CHECK(w.sample_rate_hz == 48000);
  for (std::size_t i = 0; i < w.length(); i += 31) {
    CHECK(std::abs(w.left[i] - l[i]) < 1e-7);
    CHECK(std::abs(w.right[i] - r[i]) < 1e-7);
  }
}

TEST_CASE("chunk size exceeding the file is malformed") {
  testsup::TempDir dir;
  std::string path = dir.file("trunc.wav");
  testsup::write_wav_pcm16(path, testsup::noise(400, 5), testsup::noise(400, 6),
                           16000);
  std::vector<unsigned char> bytes = file_bytes(path);

  std::vector<unsigned char> cut(bytes.begin(), bytes.end() - 100);
  CHECK(kind_of(cut) == ErrorKind::MalformedWav);

  std::vector<unsigned char> lying = bytes;
  std::uint32_t huge = 1u << 30;
  std::memcpy(&lying[4], &huge, 4);  // RIFF size field
  std::size_t data_pos = 0;
  for (std::size_t i = 0; i + 4 < lying.size(); i++)
    if (!std::memcmp(&lying[i], "data", 4)) data_pos = i;
  REQUIRE(data_pos != 0);
  std::memcpy(&lying[data_pos + 4], &huge, 4);
  CHECK(kind_of(lying) == ErrorKind::MalformedWav);
}

TEST_CASE("garbage and wrong-format headers are rejected") {
  std::vector<unsigned char> junk(64, 0x41);
  CHECK(kind_of(junk) == ErrorKind::MalformedWav);

  testsup::TempDir dir;
  std::string path = dir.file("rate.wav");
  testsup::write_wav_pcm16(path, testsup::noise(100, 7), {}, 8000);
  CHECK(kind_of(file_bytes(path)) == ErrorKind::UnsupportedEncoding);

  std::string p24 = dir.file("p24.wav");
  testsup::write_wav_pcm16(p24, testsup::noise(100, 8), {}, 16000);
  std::vector<unsigned char> bytes = file_bytes(p24);
  for (std::size_t i = 0; i + 4 < bytes.size(); i++)
    if (!std::memcmp(&bytes[i], "fmt ", 4)) {
      bytes[i + 8] = 7;  // mu-law format tag
      break;
    }
  CHECK(kind_of(bytes) == ErrorKind::UnsupportedEncoding);

  CHECK_THROWS_AS(load_wav(dir.file("missing.wav")), Error);
}

TEST_CASE("full-scale and clipped samples stay within range") {
  testsup::TempDir dir;
  std::vector<double> hot = {1.5, -1.5, 1.0, -1.0, 0.0};
  std::string path = dir.file("hot.wav");
  testsup::write_wav_pcm16(path, hot, hot, 16000);
  StereoWaveform w = load_wav(path);
  for (double v : w.left) {
    CHECK(v <= 1.0);
    CHECK(v >= -1.0);
  }
  CHECK(std::abs(w.left[2] - 1.0) < 2.0 / 32767.0);
  CHECK(std::abs(w.left[3] + 1.0) < 2.0 / 32767.0);
}
