// serbench/dsp.cc

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

#include "serbench/dsp.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <memory>
#include <mutex>
#include <numbers>

namespace serbench {

void Waveform::Validate() const {
  if (sample_rate <= 0)
    throw Error(Errc::kInvalidValue, "waveform sample rate must be positive");
  if (samples.empty()) throw Error(Errc::kInvalidValue, "waveform is empty");
  for (double s : samples)
    if (!std::isfinite(s) || s < -1.0 || s > 1.0)
      throw Error(Errc::kInvalidValue,
                  "waveform sample outside [-1, 1] or non-finite");
}

namespace {

std::uint32_t ReadLe(std::string_view bytes, std::size_t pos, int width) {
  if (pos + width > bytes.size())
    throw Error(Errc::kParse, "truncated WAV data");
  std::uint32_t v = 0;
  for (int i = 0; i < width; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  return v;
}

void AppendLe(std::string &out, std::uint32_t v, int width) {
  for (int i = 0; i < width; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

}  // namespace

Waveform ParseWav(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" || bytes.substr(8, 4) != "WAVE")
    throw Error(Errc::kParse, "not a RIFF/WAVE file");
  int format = -1, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::string_view data;
  bool have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    std::string_view id = bytes.substr(pos, 4);
    std::uint32_t size = ReadLe(bytes, pos + 4, 4);
    std::size_t body = pos + 8;
    if (id == "fmt ") {
      format = static_cast<int>(ReadLe(bytes, body, 2));
      channels = static_cast<int>(ReadLe(bytes, body + 2, 2));
      rate = ReadLe(bytes, body + 4, 4);
      bits = static_cast<int>(ReadLe(bytes, body + 14, 2));
      if (format == 0xFFFE && size >= 26)
        format = static_cast<int>(ReadLe(bytes, body + 24, 2));
    } else if (id == "data") {
      std::size_t len = std::min<std::size_t>(size, bytes.size() - body);
      data = bytes.substr(body, len);
      have_data = true;
    }
    pos = body + size + (size & 1);
  }
  if (format < 0 || !have_data) throw Error(Errc::kParse, "WAV file lacks fmt or data chunk");
  if (channels != 1)
    throw Error(Errc::kInvalidValue,
                "expected mono audio, found " + std::to_string(channels) + " channels");

  Waveform wave;
  wave.sample_rate = static_cast<int>(rate);
  const int width = bits / 8;
  if (width <= 0) throw Error(Errc::kParse, "invalid WAV sample width");
  const std::size_t n = data.size() / width;
  wave.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t p = i * width;
    if (format == 1) {
      std::uint32_t raw = ReadLe(data, p, width);
      double v;
      if (width == 1) {
        v = (static_cast<double>(raw) - 128.0) / 128.0;
      } else {
        // Sign-extend from the sample width.
        const int shift = 32 - bits;
        std::int32_t s = static_cast<std::int32_t>(raw << shift) >> shift;
        v = static_cast<double>(s) / static_cast<double>(1u << (bits - 1));
      }
      wave.samples[i] = v;
    } else if (format == 3 && width == 4) {
      std::uint32_t raw = ReadLe(data, p, 4);
      float f;
      std::memcpy(&f, &raw, 4);
      wave.samples[i] = std::clamp(static_cast<double>(f), -1.0, 1.0);
    } else if (format == 3 && width == 8) {
      std::uint64_t raw = ReadLe(data, p, 4) |
                          (static_cast<std::uint64_t>(ReadLe(data, p + 4, 4)) << 32);
      double d;
      std::memcpy(&d, &raw, 8);
      wave.samples[i] = std::clamp(d, -1.0, 1.0);
    } else {
      throw Error(Errc::kParse, "unsupported WAV encoding (format " +
                                    std::to_string(format) + ", " +
                                    std::to_string(bits) + " bits)");
    }
  }
  return wave;
}

Waveform ParseTextWaveform(std::string_view text) {
  Waveform wave;
  bool have_rate = false;
  for (const std::string &raw : SplitFields(text, '\n')) {
    std::string_view line = Trim(raw);
    if (line.empty()) continue;
    if (!have_rate) {
      if (line.starts_with("#")) line.remove_prefix(1);
      line = Trim(line);
      if (!line.starts_with("rate="))
        throw Error(Errc::kParse, "text waveform must start with 'rate=<hz>'");
      wave.sample_rate = static_cast<int>(ParseInt(line.substr(5)));
      have_rate = true;
      continue;
    }
    wave.samples.push_back(ParseReal(line));
  }
  if (!have_rate) throw Error(Errc::kParse, "text waveform is empty");
  return wave;
}

Waveform ReadWaveform(const std::string &path) {
  std::string bytes = ReadFile(path);
  std::string ext = ToLower(std::filesystem::path(path).extension().string());
  try {
    Waveform wave = ext == ".wav" ? ParseWav(bytes) : ParseTextWaveform(bytes);
    wave.Validate();
    return wave;
  } catch (const Error &e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string EncodeWav16(const Waveform &wave) {
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(wave.samples.size() * 2);
  std::string out = "RIFF";
  AppendLe(out, 36 + data_bytes, 4);
  out += "WAVEfmt ";
  AppendLe(out, 16, 4);
  AppendLe(out, 1, 2);  // PCM
  AppendLe(out, 1, 2);  // mono
  AppendLe(out, static_cast<std::uint32_t>(wave.sample_rate), 4);
  AppendLe(out, static_cast<std::uint32_t>(wave.sample_rate) * 2, 4);
  AppendLe(out, 2, 2);
  AppendLe(out, 16, 2);
  out += "data";
  AppendLe(out, data_bytes, 4);
  for (double s : wave.samples) {
    long v = std::lround(std::clamp(s, -1.0, 1.0) * 32767.0);
    AppendLe(out, static_cast<std::uint32_t>(static_cast<std::int16_t>(v)) & 0xffff, 2);
  }
  return out;
}

void SpectrogramConfig::Validate() const {
  if (!(hop_ms > 0.0) || !(window_ms > hop_ms))
    throw Error(Errc::kInvalidValue, "spectrogram config requires window_ms > hop_ms > 0");
  if (mel_bands < 1) throw Error(Errc::kInvalidValue, "mel_bands must be >= 1");
  if (lld_mel_bands < 1) throw Error(Errc::kInvalidValue, "lld_mel_bands must be >= 1");
  if (!(clip_db_threshold < 0.0))
    throw Error(Errc::kInvalidValue, "clip_db_threshold must be negative");
}

std::size_t SpectrogramConfig::WindowSamples(int sample_rate) const {
  return static_cast<std::size_t>(std::llround(window_ms * sample_rate / 1000.0));
}

std::size_t SpectrogramConfig::HopSamples(int sample_rate) const {
  return static_cast<std::size_t>(std::llround(hop_ms * sample_rate / 1000.0));
}

std::size_t FrameCount(std::size_t length, std::size_t window, std::size_t hop) {
  if (window == 0 || hop == 0 || length < window) return 0;
  return (length - window) / hop + 1;
}

std::size_t NextPowerOfTwo(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double HzToMel(double hz) {
  constexpr double kFSp = 200.0 / 3.0;
  constexpr double kMinLogHz = 1000.0;
  constexpr double kMinLogMel = kMinLogHz / kFSp;
  static const double kLogStep = std::log(6.4) / 27.0;
  if (hz < kMinLogHz) return hz / kFSp;
  return kMinLogMel + std::log(hz / kMinLogHz) / kLogStep;
}

double MelToHz(double mel) {
  constexpr double kFSp = 200.0 / 3.0;
  constexpr double kMinLogHz = 1000.0;
  constexpr double kMinLogMel = kMinLogHz / kFSp;
  static const double kLogStep = std::log(6.4) / 27.0;
  if (mel < kMinLogMel) return mel * kFSp;
  return kMinLogHz * std::exp(kLogStep * (mel - kMinLogMel));
}

MelFilterbank::MelFilterbank(int bands, std::size_t fft_size, int sample_rate) {
  if (bands < 1) throw Error(Errc::kInvalidValue, "mel filterbank needs >= 1 band");
  const std::size_t bins = fft_size / 2 + 1;
  weights_ = Matrix(static_cast<std::size_t>(bands), bins);
  const double nyquist = sample_rate / 2.0;
  const double mel_max = HzToMel(nyquist);
  std::vector<double> edges(bands + 2);
  for (int i = 0; i < bands + 2; ++i)
    edges[i] = MelToHz(mel_max * i / (bands + 1));
  centers_hz_.assign(edges.begin() + 1, edges.end() - 1);
  for (int b = 0; b < bands; ++b) {
    const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
    const double norm = 2.0 / (hi - lo);
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / fft_size;
      const double rise = (f - lo) / (mid - lo);
      const double fall = (hi - f) / (hi - mid);
      weights_(b, k) = std::max(0.0, std::min(rise, fall)) * norm;
    }
  }
}

void MelFilterbank::Apply(std::span<const double> power, std::span<double> out) const {
  for (std::size_t b = 0; b < weights_.rows(); ++b) {
    double acc = 0.0;
    auto w = weights_.row(b);
    for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * power[k];
    out[b] = acc;
  }
}

std::vector<double> HannWindow(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n)
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / length);
  return w;
}

namespace {

// FFTW planning is not thread-safe; execution on a private plan is.
std::mutex &PlannerMutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(fftw_alloc_real(n)),
        out_(fftw_alloc_complex(n / 2 + 1)) {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  double *input() { return in_; }
  void Power(std::span<double> out) {
    fftw_execute(plan_);
    for (std::size_t k = 0; k <= n_ / 2; ++k)
      out[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
  }

 private:
  std::size_t n_;
  double *in_;
  fftw_complex *out_;
  fftw_plan plan_;
};

struct Framing {
  std::size_t window, hop, fft_size, frames;
};

Framing CheckedFraming(const Waveform &wave, const SpectrogramConfig &config) {
  config.Validate();
  wave.Validate();
  Framing f;
  f.window = config.WindowSamples(wave.sample_rate);
  f.hop = config.HopSamples(wave.sample_rate);
  if (f.hop == 0 || f.window <= f.hop)
    throw Error(Errc::kInvalidValue, "window/hop round to invalid sample counts");
  if (wave.samples.size() < f.window)
    throw Error(Errc::kInvalidValue,
                "waveform of " + std::to_string(wave.samples.size()) +
                    " samples is shorter than one window (" +
                    std::to_string(f.window) + ")");
  f.fft_size = NextPowerOfTwo(f.window);
  f.frames = FrameCount(wave.samples.size(), f.window, f.hop);
  return f;
}

MelSpectrogram ClipAndNormalize(const Matrix &mel_power, const SpectrogramConfig &config) {
  double peak = 0.0;
  for (double v : mel_power.data()) peak = std::max(peak, v);
  const double floor = config.clip_db_threshold;
  MelSpectrogram out;
  out.config = config;
  out.db = Matrix(mel_power.rows(), mel_power.cols(), floor);
  out.frames = Matrix(mel_power.rows(), mel_power.cols(), -1.0);
  if (peak <= 0.0) return out;  // silence: all floor
  for (std::size_t t = 0; t < mel_power.rows(); ++t) {
    for (std::size_t b = 0; b < mel_power.cols(); ++b) {
      const double p = mel_power(t, b);
      double db = p > 0.0 ? 10.0 * std::log10(p / peak) : floor;
      db = std::clamp(db, floor, 0.0);
      out.db(t, b) = db;
      out.frames(t, b) = 1.0 + 2.0 * db / (-floor);
    }
  }
  return out;
}

Matrix MelPower(const Matrix &power, const MelFilterbank &fb) {
  Matrix mel(power.rows(), static_cast<std::size_t>(fb.bands()));
  for (std::size_t t = 0; t < power.rows(); ++t) fb.Apply(power.row(t), mel.row(t));
  return mel;
}

}  // namespace

Matrix PowerSpectrogram(const Waveform &wave, std::size_t window, std::size_t hop,
                        std::size_t fft_size) {
  const std::size_t frames = FrameCount(wave.samples.size(), window, hop);
  const std::vector<double> hann = HannWindow(window);
  Matrix power(frames, fft_size / 2 + 1);
  RealFft fft(fft_size);
  double *in = fft.input();
  for (std::size_t t = 0; t < frames; ++t) {
    const double *src = wave.samples.data() + t * hop;
    for (std::size_t n = 0; n < window; ++n) in[n] = src[n] * hann[n];
    for (std::size_t n = window; n < fft_size; ++n) in[n] = 0.0;
    fft.Power(power.row(t));
  }
  return power;
}

MelSpectrogram ComputeMelSpectrogram(const Waveform &wave,
                                     const SpectrogramConfig &config) {
  const double thr = config.clip_db_threshold;
  return std::move(ComputeClippedSpectrograms(wave, config, {&thr, 1}).front());
}

std::vector<MelSpectrogram> ComputeClippedSpectrograms(
    const Waveform &wave, const SpectrogramConfig &config,
    std::span<const double> thresholds) {
  Framing f = CheckedFraming(wave, config);
  MelFilterbank fb(config.mel_bands, f.fft_size, wave.sample_rate);
  Matrix mel = MelPower(PowerSpectrogram(wave, f.window, f.hop, f.fft_size), fb);
  std::vector<MelSpectrogram> out;
  for (double thr : thresholds) {
    SpectrogramConfig c = config;
    c.clip_db_threshold = thr;
    c.Validate();
    out.push_back(ClipAndNormalize(mel, c));
  }
  return out;
}

Matrix Delta(const Matrix &frames) {
  if (frames.rows() == 0) throw Error(Errc::kInvalidValue, "delta of empty frame sequence");
  Matrix out(frames.rows(), frames.cols());
  for (std::size_t t = 1; t < frames.rows(); ++t)
    for (std::size_t j = 0; j < frames.cols(); ++j)
      out(t, j) = frames(t, j) - frames(t - 1, j);
  return out;
}

LLDFrameSequence ExtractLlds(const Waveform &wave, const SpectrogramConfig &config) {
  constexpr double kFloor = 1e-10;
  Framing f = CheckedFraming(wave, config);
  Matrix power = PowerSpectrogram(wave, f.window, f.hop, f.fft_size);
  MelFilterbank fb(config.lld_mel_bands, f.fft_size, wave.sample_rate);
  const std::size_t bands = static_cast<std::size_t>(config.lld_mel_bands);
  const std::size_t bins = power.cols();
  const double nyquist = wave.sample_rate / 2.0;

  LLDFrameSequence seq;
  seq.descriptor_names = {"log_energy", "zero_crossing_rate", "spectral_centroid",
                          "spectral_flux"};
  for (std::size_t b = 0; b < bands; ++b)
    seq.descriptor_names.push_back("mel_log_power_" + std::to_string(b));
  seq.frames = Matrix(f.frames, 4 + bands);

  std::vector<double> mel(bands), shape(bins), prev_shape(bins, 0.0);
  for (std::size_t t = 0; t < f.frames; ++t) {
    const double *x = wave.samples.data() + t * f.hop;
    double energy = 0.0;
    std::size_t crossings = 0;
    for (std::size_t n = 0; n < f.window; ++n) {
      energy += x[n] * x[n];
      if (n > 0 && x[n - 1] * x[n] < 0.0) ++crossings;
    }
    auto p = power.row(t);
    double total = 0.0, weighted = 0.0, mag_total = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      total += p[k];
      weighted += p[k] * (static_cast<double>(k) * wave.sample_rate / f.fft_size);
      shape[k] = std::sqrt(p[k]);
      mag_total += shape[k];
    }
    for (std::size_t k = 0; k < bins; ++k)
      shape[k] = mag_total > 0.0 ? shape[k] / mag_total : 0.0;
    double flux = 0.0;
    if (t > 0)
      for (std::size_t k = 0; k < bins; ++k) {
        const double d = shape[k] - prev_shape[k];
        flux += d * d;
      }
    prev_shape = shape;
    fb.Apply(p, mel);

    auto row = seq.frames.row(t);
    row[0] = std::log(energy + kFloor);
    row[1] = static_cast<double>(crossings) / static_cast<double>(f.window - 1);
    row[2] = total > 0.0 ? weighted / total / nyquist : 0.0;
    row[3] = flux;
    for (std::size_t b = 0; b < bands; ++b) row[4 + b] = std::log(mel[b] + kFloor);
  }
  seq.deltas = Delta(seq.frames);
  return seq;
}

}  // namespace serbench
