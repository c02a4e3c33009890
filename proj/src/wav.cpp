#include "mbinet/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "mbinet/error.hpp"

namespace mbinet {

namespace {

struct Cursor {
  const unsigned char* data;
  std::size_t size;
  std::size_t pos = 0;
  const std::string& origin;

  void require(std::size_t n) const {
    if (pos + n > size)
      fail(ErrorKind::MalformedWav, origin + ": truncated at byte " +
                                        std::to_string(pos) + ", need " +
                                        std::to_string(n) + " more");
  }

  std::uint32_t u32() {
    require(4);
    std::uint32_t v = static_cast<std::uint32_t>(data[pos]) |
                      static_cast<std::uint32_t>(data[pos + 1]) << 8 |
                      static_cast<std::uint32_t>(data[pos + 2]) << 16 |
                      static_cast<std::uint32_t>(data[pos + 3]) << 24;
    pos += 4;
    return v;
  }

  std::uint16_t u16() {
    require(2);
    std::uint16_t v = static_cast<std::uint16_t>(
        data[pos] | static_cast<std::uint16_t>(data[pos + 1]) << 8);
    pos += 2;
    return v;
  }

  std::string tag() {
    require(4);
    std::string t(reinterpret_cast<const char*>(data + pos), 4);
    pos += 4;
    return t;
  }
};

bool supported_rate(std::uint32_t hz) {
  return hz == 16000 || hz == 32000 || hz == 44100 || hz == 48000;
}

double pcm16_to_double(const unsigned char* p) {
  std::int16_t v = static_cast<std::int16_t>(
      static_cast<std::uint16_t>(p[0] | static_cast<std::uint16_t>(p[1]) << 8));
  return static_cast<double>(v) / 32768.0;
}

double f32_to_double(const unsigned char* p) {
  std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                       static_cast<std::uint32_t>(p[1]) << 8 |
                       static_cast<std::uint32_t>(p[2]) << 16 |
                       static_cast<std::uint32_t>(p[3]) << 24;
  float f;
  std::memcpy(&f, &bits, 4);
  return static_cast<double>(f);
}

}  // namespace

StereoWaveform parse_wav(const std::vector<unsigned char>& bytes,
                         const std::string& origin) {
  Cursor c{bytes.data(), bytes.size(), 0, origin};

  if (c.tag() != "RIFF")
    fail(ErrorKind::MalformedWav, origin + ": missing RIFF magic");
  c.u32();  // declared riff size; unreliable in the wild, ignored
  if (c.tag() != "WAVE")
    fail(ErrorKind::MalformedWav, origin + ": missing WAVE tag");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits_per_sample = 0;
  std::uint32_t rate = 0;
  const unsigned char* samples = nullptr;
  std::size_t data_bytes = 0;

  while (c.pos + 8 <= c.size) {
    std::string id = c.tag();
    std::uint32_t chunk_size = c.u32();
    if (c.pos + chunk_size > c.size)
      fail(ErrorKind::MalformedWav,
           origin + ": chunk '" + id + "' of " + std::to_string(chunk_size) +
               " bytes exceeds file length");
    if (id == "fmt ") {
      if (chunk_size < 16)
        fail(ErrorKind::MalformedWav, origin + ": fmt chunk too small");
      std::size_t end = c.pos + chunk_size;
      format = c.u16();
      channels = c.u16();
      rate = c.u32();
      c.u32();  // byte rate
      c.u16();  // block align
      bits_per_sample = c.u16();
      c.pos = end;
      have_fmt = true;
    } else if (id == "data") {
      samples = c.data + c.pos;
      data_bytes = chunk_size;
      c.pos += chunk_size;
    } else {
      c.pos += chunk_size;
    }
    if (c.pos % 2 == 1) c.pos++;  // chunks are word aligned
  }

  if (!have_fmt) fail(ErrorKind::MalformedWav, origin + ": no fmt chunk");
  if (!samples) fail(ErrorKind::MalformedWav, origin + ": no data chunk");

  if (format != 1 && format != 3)
    fail(ErrorKind::UnsupportedEncoding,
         origin + ": format tag " + std::to_string(format) +
             " (only PCM and IEEE float are supported)");
  if (format == 1 && bits_per_sample != 16)
    fail(ErrorKind::UnsupportedEncoding,
         origin + ": " + std::to_string(bits_per_sample) +
             "-bit PCM (only 16-bit is supported)");
  if (format == 3 && bits_per_sample != 32)
    fail(ErrorKind::UnsupportedEncoding,
         origin + ": " + std::to_string(bits_per_sample) +
             "-bit float (only 32-bit is supported)");
  if (channels != 1 && channels != 2)
    fail(ErrorKind::UnsupportedEncoding,
         origin + ": " + std::to_string(channels) + " channels");
  if (!supported_rate(rate))
    fail(ErrorKind::UnsupportedEncoding,
         origin + ": sample rate " + std::to_string(rate));

  std::size_t bytes_per_sample = bits_per_sample / 8;
  std::size_t frame_bytes = bytes_per_sample * channels;
  std::size_t n = data_bytes / frame_bytes;
  if (n == 0) fail(ErrorKind::MalformedWav, origin + ": empty data chunk");

  StereoWaveform w;
  w.sample_rate_hz = static_cast<int>(rate);
  w.left.resize(n);
  w.right.resize(n);
  for (std::size_t i = 0; i < n; i++) {
    const unsigned char* p = samples + i * frame_bytes;
    double l = format == 1 ? pcm16_to_double(p) : f32_to_double(p);
    double r = l;
    if (channels == 2) {
      const unsigned char* q = p + bytes_per_sample;
      r = format == 1 ? pcm16_to_double(q) : f32_to_double(q);
    }
    w.left[i] = l;
    w.right[i] = r;
  }
  return w;
}

StereoWaveform load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::IoError, "read failed on " + path);
  return parse_wav(bytes, path);
}

}  // namespace mbinet
