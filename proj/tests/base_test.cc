// tests/base_test.cc

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


#include "serbench/base.h"

#include <atomic>
#include <cmath>
#include <limits>
#include <set>

#include "doctest.h"
#include "test_util.h"

namespace serbench {
namespace {

using testing::ThrownCode;

TEST_CASE("rng is reproducible and stays in range") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.Uniform();
    CHECK(u == b.Uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  Rng c(7);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) ++hits[c.Below(5)];
  for (int h : hits) CHECK(h > 850);
  CHECK(c.Below(1) == 0);
}

TEST_CASE("normal draws have roughly unit moments") {
  Rng rng(3);
  double s = 0.0, ss = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.Normal();
    s += z;
    ss += z * z;
  }
  CHECK(std::abs(s / n) < 0.05);
  CHECK(std::abs(ss / n - 1.0) < 0.05);
}

TEST_CASE("shuffle is a permutation") {
  Rng rng(11);
  std::vector<int> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i;
  rng.Shuffle(v);
  std::set<int> seen(v.begin(), v.end());
  CHECK(seen.size() == 100);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 99);
}

TEST_CASE("fnv1a64 matches the reference vectors") {
  CHECK(Fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(Fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(Fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(HexDigest(0xabcULL) == "0000000000000abc");
}

TEST_CASE("real formatting round-trips") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1e-300, 123456789.123, 1.0 / 3.0}) {
    CHECK(ParseReal(FormatReal(v)) == v);
  }
  CHECK(FormatReal(0.5) == "0.5");
  CHECK(FormatReal(2.0) == "2");
  CHECK(std::isnan(ParseReal("nan")));
  CHECK(std::isinf(ParseReal("inf")));
  CHECK(ThrownCode([] { ParseReal("1.5x"); }) == Errc::kParse);
  CHECK(ThrownCode([] { ParseReal(""); }) == Errc::kParse);
  CHECK(ParseInt(" 17 ") == 17);
  CHECK(ThrownCode([] { ParseInt("3.5"); }) == Errc::kParse);
}

TEST_CASE("string helpers") {
  CHECK(SplitFields("a\tb\t\tc", '\t') == std::vector<std::string>{"a", "b", "", "c"});
  CHECK(SplitFields("", ',') == std::vector<std::string>{""});
  CHECK(Trim("  x y \r\n") == "x y");
  CHECK(ToLower("AbC1") == "abc1");
}

TEST_CASE("matrix rows") {
  Matrix m;
  const double r0[] = {1, 2, 3};
  const double r1[] = {4, 5, 6};
  m.AppendRow(r0);
  m.AppendRow(r1);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(1, 2) == 6);
  const double bad[] = {1, 2};
  CHECK(ThrownCode([&] { m.AppendRow(bad); }) == Errc::kDimensionMismatch);
}

TEST_CASE("parallel for covers every index and propagates errors") {
  for (int jobs : {1, 3, 8}) {
    std::vector<int> hit(97, 0);
    ParallelFor(hit.size(), jobs, [&](std::size_t i) { hit[i] += 1; });
    for (int h : hit) CHECK(h == 1);
  }
  CHECK(ThrownCode([] {
          ParallelFor(10, 4, [](std::size_t i) {
            if (i == 6) throw Error(Errc::kDegenerate, "boom");
          });
        }) == Errc::kDegenerate);
}

TEST_CASE("file round trip creates parent directories") {
  testing::TempDir dir("base");
  const std::string path = dir / "a/b/c.txt";
  WriteFile(path, "hello\n");
  CHECK(ReadFile(path) == "hello\n");
  CHECK(ThrownCode([&] { ReadFile(dir / "missing"); }) == Errc::kIo);
}

TEST_CASE("validation codes") {
  CHECK(Error(Errc::kParse, "").IsValidation());
  CHECK(Error(Errc::kConfig, "").IsValidation());
  CHECK_FALSE(Error(Errc::kIo, "").IsValidation());
  CHECK_FALSE(Error(Errc::kDegenerate, "").IsValidation());
}

}  // namespace
}  // namespace serbench
