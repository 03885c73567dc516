#pragma once

#include <string>
#include <string_view>

#include "echolevel/dsp.hpp"

namespace echolevel::io {

/// Signal CSV: "# echolevel-signal format_version=1.0 sample_rate_hz=<fs>",
/// the column line "sample", then one value per line at full precision.
std::string write_signal_csv(const dsp::SampledSignal& signal);
dsp::SampledSignal read_signal_csv(std::string_view text, const std::string& source = "<signal>");

/// Mono PCM16 WAV. Samples are clipped to [-1, 1] and scaled by 32767.
std::string encode_wav_pcm16(const dsp::SampledSignal& signal);
dsp::SampledSignal decode_wav_pcm16(std::string_view bytes, const std::string& source = "<wav>");

enum class SignalFormat { Csv, Wav };

/// Picks the format from the extension: ".wav" is WAV, anything else CSV.
SignalFormat format_for_path(const std::string& path);

void write_signal_file(const std::string& path, const dsp::SampledSignal& signal);
void write_signal_file(const std::string& path, const dsp::SampledSignal& signal, SignalFormat format);
dsp::SampledSignal read_signal_file(const std::string& path);

}  // namespace echolevel::io
