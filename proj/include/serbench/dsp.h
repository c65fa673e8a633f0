// serbench/dsp.h

// Copyright 2026  The serbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SERBENCH_DSP_H_
#define SERBENCH_DSP_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "serbench/base.h"

namespace serbench {

struct Waveform {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate = 16000;

  /// Throws Error(kInvalidValue) if empty, non-finite, out of range, or the
  /// rate is not positive.
  void Validate() const;
};

/// Reads a mono RIFF/WAVE file (8/16/24/32-bit integer PCM or 32/64-bit float)
/// or, for any other extension, the text format: a `rate=<hz>` line followed
/// by one sample per line.
Waveform ReadWaveform(const std::string &path);
Waveform ParseWav(std::string_view bytes);
Waveform ParseTextWaveform(std::string_view text);
/// 16-bit PCM mono.
std::string EncodeWav16(const Waveform &wave);

/// Spectrogram front-end settings. Durations are converted to samples with
/// rounding, so 32 ms / 16 ms at 16 kHz gives 512 / 256.
struct SpectrogramConfig {
  double window_ms = 32.0;
  double hop_ms = 16.0;
  int mel_bands = 128;
  double clip_db_threshold = -60.0;
  int lld_mel_bands = 12;

  void Validate() const;
  std::size_t WindowSamples(int sample_rate) const;
  std::size_t HopSamples(int sample_rate) const;
};

/// Clip thresholds for the four spectrogram variants. Only -60 dB is a
/// published setting; the others are defaults.
inline const std::vector<double> kDefaultClipThresholds = {-30.0, -45.0, -60.0,
                                                           -75.0};

/// floor((length - window) / hop) + 1; zero when length < window.
std::size_t FrameCount(std::size_t length, std::size_t window, std::size_t hop);

std::size_t NextPowerOfTwo(std::size_t n);

/// Slaney mel scale: linear below 1 kHz, logarithmic above.
double HzToMel(double hz);
double MelToHz(double mel);

/// Triangular filters equally spaced on the mel scale from 0 Hz to Nyquist,
/// each scaled to unit area (2 / bandwidth).
class MelFilterbank {
 public:
  MelFilterbank(int bands, std::size_t fft_size, int sample_rate);

  int bands() const { return static_cast<int>(weights_.rows()); }
  std::size_t bins() const { return weights_.cols(); }
  double center_hz(int band) const { return centers_hz_[band]; }
  const Matrix &weights() const { return weights_; }

  /// power has fft_size/2 + 1 entries; out has bands() entries.
  void Apply(std::span<const double> power, std::span<double> out) const;

 private:
  Matrix weights_;
  std::vector<double> centers_hz_;
};

/// Hann-windowed, zero-padded power spectra of each frame
/// (frames x (fft_size/2 + 1)).
Matrix PowerSpectrogram(const Waveform &wave, std::size_t window, std::size_t hop,
                        std::size_t fft_size);

/// Periodic Hann window.
std::vector<double> HannWindow(std::size_t length);

struct MelSpectrogram {
  Matrix frames;  // time x mel_bands, mapped linearly from [clip, 0] dB to [-1, 1]
  Matrix db;      // same shape, clipped dB relative to the global maximum
  SpectrogramConfig config;
};

/// Throws if the waveform is shorter than one window. An all-zero waveform
/// yields an all-floor spectrogram.
MelSpectrogram ComputeMelSpectrogram(const Waveform &wave,
                                     const SpectrogramConfig &config);

/// One spectrogram per clip threshold; the power computation is shared.
std::vector<MelSpectrogram> ComputeClippedSpectrograms(
    const Waveform &wave, const SpectrogramConfig &config,
    std::span<const double> thresholds);

struct LLDFrameSequence {
  Matrix frames;  // time x descriptors
  std::vector<std::string> descriptor_names;
  Matrix deltas;  // same shape as frames
};

/// Per frame: log energy, zero-crossing rate, normalized spectral centroid,
/// spectral flux, then lld_mel_bands mel log powers. Deltas follow Delta().
LLDFrameSequence ExtractLlds(const Waveform &wave, const SpectrogramConfig &config);

/// delta[0] = 0, delta[t] = frames[t] - frames[t-1]. Throws on empty input.
Matrix Delta(const Matrix &frames);

}  // namespace serbench

#endif  // SERBENCH_DSP_H_
