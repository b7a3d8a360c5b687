#include "rmsteg/wav.hpp"

#include <cstring>
#include <fstream>

#include "rmsteg/error.hpp"

namespace rmsteg {
namespace {

constexpr uint16_t kFormatPcm = 1;

uint16_t read_u16(const uint8_t* p) { return static_cast<uint16_t>(p[0] | (p[1] << 8)); }
uint32_t read_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}
void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

}  // namespace

AudioSignal read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io_failure, "cannot open " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const uint8_t* data = reinterpret_cast<const uint8_t*>(buf.data());
  const size_t n = buf.size();

  if (n < 12 || std::memcmp(data, "RIFF", 4) != 0 || std::memcmp(data + 8, "WAVE", 4) != 0)
    raise(Errc::not_wav, path.string() + " is not a RIFF/WAVE file");

  bool have_fmt = false;
  uint16_t channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  size_t pos = 12;
  while (pos + 8 <= n) {
    const char* id = reinterpret_cast<const char*>(data + pos);
    const uint32_t chunk_size = read_u32(data + pos + 4);
    pos += 8;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_size < 16 || pos + 16 > n) raise(Errc::truncated_file, "fmt chunk too small");
      const uint16_t format = read_u16(data + pos);
      channels = read_u16(data + pos + 2);
      sample_rate = read_u32(data + pos + 4);
      bits = read_u16(data + pos + 14);
      if (format != kFormatPcm)
        raise(Errc::unsupported_format, "only PCM (format tag 1) is supported");
      if (channels != 1) raise(Errc::unsupported_format, "only mono is supported");
      if (bits != 8 && bits != 16) raise(Errc::unsupported_format, "only 8/16-bit is supported");
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) raise(Errc::truncated_file, "data chunk before fmt chunk");
      if (pos + chunk_size > n)
        raise(Errc::truncated_file, "data chunk shorter than declared size");
      const size_t bytes_per_sample = bits / 8;
      const size_t count = chunk_size / bytes_per_sample;
      std::vector<int32_t> raw(count);
      if (bits == 16) {
        for (size_t i = 0; i < count; ++i)
          raw[i] = static_cast<int16_t>(read_u16(data + pos + 2 * i));
      } else {
        // 8-bit WAV stores unsigned samples offset by 128.
        for (size_t i = 0; i < count; ++i)
          raw[i] = static_cast<int32_t>(data[pos + i]) - 128;
      }
      return AudioSignal::from_raw(std::move(raw), static_cast<int>(sample_rate), bits);
    }
    pos += chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }
  raise(Errc::truncated_file, "missing data chunk in " + path.string());
}

void write_wav(const AudioSignal& signal, const std::filesystem::path& path) {
  const uint16_t bits = static_cast<uint16_t>(signal.bit_depth);
  const uint16_t block_align = bits / 8;
  const uint32_t data_bytes = static_cast<uint32_t>(signal.raw.size() * block_align);

  std::string out;
  out.reserve(44 + data_bytes);
  out.append("RIFF");
  put_u32(out, 36 + data_bytes);
  out.append("WAVE");
  out.append("fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<uint32_t>(signal.sample_rate));
  put_u32(out, static_cast<uint32_t>(signal.sample_rate) * block_align);
  put_u16(out, block_align);
  put_u16(out, bits);
  out.append("data");
  put_u32(out, data_bytes);
  if (bits == 16) {
    for (int32_t v : signal.raw) put_u16(out, static_cast<uint16_t>(static_cast<int16_t>(v)));
  } else {
    for (int32_t v : signal.raw) out.push_back(static_cast<char>(v + 128));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) raise(Errc::io_failure, "cannot open " + path.string() + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) raise(Errc::io_failure, "short write to " + path.string());
}

}  // namespace rmsteg
