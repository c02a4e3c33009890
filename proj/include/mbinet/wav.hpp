#ifndef MBINET_WAV_HPP
#define MBINET_WAV_HPP

#include <string>
#include <vector>

namespace mbinet {

// Binaural sample sequences, nominal range [-1, 1]. Mono files are
// duplicated to both channels on load.
struct StereoWaveform {
  std::vector<double> left;
  std::vector<double> right;
  int sample_rate_hz = 0;

  std::size_t length() const { return left.size(); }
};

// Reads a RIFF/WAVE file, PCM16 little-endian or IEEE float32, 1 or 2
// channels. Accepted sample rates: 16000, 32000, 44100, 48000.
StereoWaveform load_wav(const std::string& path);

// Parses WAV bytes already in memory (load_wav delegates here).
StereoWaveform parse_wav(const std::vector<unsigned char>& bytes,
                         const std::string& origin);

}  // namespace mbinet

#endif  // MBINET_WAV_HPP
