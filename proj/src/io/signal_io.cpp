#include "echolevel/io/signal_io.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>

#include "echolevel/error.hpp"
#include "echolevel/io/dataset_csv.hpp"

namespace echolevel::io {

namespace {

constexpr std::string_view kSignalMagic = "# echolevel-signal";

void put_u16(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v & 0xFF);
  out += static_cast<char>(v >> 8);
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

std::uint32_t get_u32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[at + static_cast<std::size_t>(i)]);
  return v;
}

std::uint16_t get_u16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) | (static_cast<unsigned char>(b[at + 1]) << 8));
}

bool ends_with(const std::string& s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  return std::equal(suffix.begin(), suffix.end(), s.end() - static_cast<std::ptrdiff_t>(suffix.size()),
                    [](char a, char b) { return a == std::tolower(static_cast<unsigned char>(b)); });
}

}  // namespace

std::string write_signal_csv(const dsp::SampledSignal& signal) {
  std::string out;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", signal.sample_rate_hz);
  out += std::string(kSignalMagic) + " format_version=1.0 sample_rate_hz=" + buf + "\nsample\n";
  for (double v : signal.samples) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out += buf;
  }
  return out;
}

dsp::SampledSignal read_signal_csv(std::string_view text, const std::string& source) {
  dsp::SampledSignal sig;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false, have_columns = false;
  auto fail = [&](const std::string& msg) -> void {
    throw FormatError(source + ": line " + std::to_string(line_no) + ": " + msg);
  };
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!have_header) {
      if (line.substr(0, kSignalMagic.size()) != kSignalMagic) fail("expected the '# echolevel-signal' header line");
      const auto v = line.find("format_version=");
      if (v == std::string_view::npos || line.substr(v + 15, 2) != "1.") fail("unsupported or missing format_version");
      const auto r = line.find("sample_rate_hz=");
      if (r == std::string_view::npos) fail("header lacks sample_rate_hz");
      std::string_view rate = line.substr(r + 15);
      rate = rate.substr(0, rate.find(' '));
      const auto [p, ec] = std::from_chars(rate.data(), rate.data() + rate.size(), sig.sample_rate_hz);
      if (ec != std::errc() || p != rate.data() + rate.size() || !(sig.sample_rate_hz > 0.0)) {
        fail("sample_rate_hz must be a positive number");
      }
      have_header = true;
      continue;
    }
    if (!have_columns) {
      if (line != "sample") fail("expected the column line 'sample'");
      have_columns = true;
      continue;
    }
    if (line.empty()) continue;
    double v = 0.0;
    const auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || p != line.data() + line.size()) fail("'" + std::string(line) + "' is not a number");
    sig.samples.push_back(v);
  }
  if (!have_header) throw FormatError(source + ": empty file, expected the '# echolevel-signal' header line");
  if (!have_columns) throw FormatError(source + ": missing the column line 'sample'");
  return sig;
}

std::string encode_wav_pcm16(const dsp::SampledSignal& signal) {
  const auto rate = static_cast<std::uint32_t>(std::lround(signal.sample_rate_hz));
  if (rate == 0) throw InputError("WAV output needs a positive integer sample rate");
  const auto data_bytes = static_cast<std::uint32_t>(signal.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, rate);
  put_u32(out, rate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (double v : signal.samples) {
    const double clipped = std::clamp(v, -1.0, 1.0);
    const auto s = static_cast<std::int16_t>(std::lround(clipped * 32767.0));
    put_u16(out, static_cast<std::uint16_t>(s));
  }
  return out;
}

dsp::SampledSignal decode_wav_pcm16(std::string_view b, const std::string& source) {
  auto fail = [&](const std::string& msg) -> void { throw FormatError(source + ": " + msg); };
  if (b.size() < 12 || b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE") fail("not a RIFF/WAVE file");
  std::size_t at = 12;
  bool have_fmt = false;
  dsp::SampledSignal sig;
  while (at + 8 <= b.size()) {
    const std::string_view id = b.substr(at, 4);
    const std::uint32_t size = get_u32(b, at + 4);
    const std::size_t body = at + 8;
    if (body + size > b.size()) fail("chunk '" + std::string(id) + "' runs past the end of the file");
    if (id == "fmt ") {
      if (size < 16) fail("fmt chunk is too short");
      if (get_u16(b, body) != 1) fail("only PCM WAV files are supported");
      if (get_u16(b, body + 2) != 1) fail("only mono WAV files are supported");
      if (get_u16(b, body + 14) != 16) fail("only 16-bit WAV files are supported");
      sig.sample_rate_hz = get_u32(b, body + 4);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) fail("data chunk precedes the fmt chunk");
      for (std::size_t i = 0; i + 1 < size; i += 2) {
        sig.samples.push_back(static_cast<std::int16_t>(get_u16(b, body + i)) / 32767.0);
      }
      return sig;
    }
    at = body + size + (size & 1);
  }
  fail("no data chunk");
  return sig;
}

SignalFormat format_for_path(const std::string& path) {
  return ends_with(path, ".wav") ? SignalFormat::Wav : SignalFormat::Csv;
}

void write_signal_file(const std::string& path, const dsp::SampledSignal& signal, SignalFormat format) {
  write_text_file_atomic(path, format == SignalFormat::Wav ? encode_wav_pcm16(signal) : write_signal_csv(signal));
}

void write_signal_file(const std::string& path, const dsp::SampledSignal& signal) {
  write_signal_file(path, signal, format_for_path(path));
}

dsp::SampledSignal read_signal_file(const std::string& path) {
  const std::string bytes = read_text_file(path);
  return format_for_path(path) == SignalFormat::Wav ? decode_wav_pcm16(bytes, path) : read_signal_csv(bytes, path);
}

}  // namespace echolevel::io
