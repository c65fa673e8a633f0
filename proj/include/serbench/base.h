// serbench/base.h

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

#ifndef SERBENCH_BASE_H_
#define SERBENCH_BASE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace serbench {

/// Error categories. The CLI maps the validation-type ones to exit code 1
/// and everything else to exit code 2.
enum class Errc {
  kParse,
  kConfig,
  kInvalidValue,
  kDuplicateId,
  kMissingUtterance,
  kDimensionMismatch,
  kNonFinite,
  kInsufficientFrames,
  kDegenerate,
  kMissingTranscript,
  kModalityConflict,
  kUndefinedClass,
  kCoverage,
  kMissingCache,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string &what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }
  bool IsValidation() const;

 private:
  Errc code_;
};

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  /// Appends a row; on an empty 0x0 matrix this fixes the column count.
  void AppendRow(std::span<const double> values);

  const std::vector<double> &data() const { return data_; }
  bool operator==(const Matrix &other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Seeded generator. Only the raw mt19937_64 stream is used; the derived
/// draws are implemented here so results do not depend on the standard
/// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double Uniform();
  /// Uniform integer in [0, n), unbiased; n > 0.
  std::size_t Below(std::size_t n);
  /// Standard normal (Box-Muller, one value per call).
  double Normal();

  template <typename T>
  void Shuffle(std::vector<T> &v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = Below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// 64-bit FNV-1a.
std::uint64_t Fnv1a64(std::string_view bytes);
std::uint64_t Fnv1a64(std::string_view bytes, std::uint64_t basis);

std::string HexDigest(std::uint64_t value);

/// Shortest decimal that round-trips to the same double.
std::string FormatReal(double value);
/// Strict decimal parse; throws Error(kParse) on trailing garbage.
double ParseReal(std::string_view text);
long long ParseInt(std::string_view text);

std::vector<std::string> SplitFields(std::string_view text, char delim);
std::string_view Trim(std::string_view text);
std::string ToLower(std::string_view text);

/// Runs fn(0..n-1) on up to `jobs` threads. The first exception thrown by any
/// task is rethrown after all threads finish.
void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)> &fn);

std::string ReadFile(const std::string &path);
/// Writes atomically enough for our purposes: write to a temp name then rename.
void WriteFile(const std::string &path, std::string_view contents);

}  // namespace serbench

#endif  // SERBENCH_BASE_H_
