#include <doctest.h>

#include <array>
#include <cmath>
#include <thread>
#include <vector>

#include "mesospec/errors.hpp"
#include "mesospec/rng.hpp"

using namespace mesospec;

namespace {

std::vector<std::uint64_t> first_words(SeedSpec seed, std::size_t count) {
  Stream s(seed);
  std::vector<std::uint64_t> out(count);
  for (auto& w : out) w = s();
  return out;
}

}  // namespace

TEST_CASE("Philox4x32-10 matches the Random123 known-answer vectors") {
  using B = Philox4x32::Block;
  CHECK(Philox4x32::bijection(B{0, 0, 0, 0}, {0, 0}) ==
        B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::bijection(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                              {0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::bijection(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                              {0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("make_stream is deterministic and streams are distinct") {
  const auto a = first_words({1, 0}, 100);
  CHECK(a == first_words({1, 0}, 100));
  const auto b = first_words({1, 1}, 100);
  CHECK(a != b);
  // No shared prefix: differ already in the first word.
  CHECK(a.front() != b.front());
  CHECK(first_words({2, 0}, 100) != a);
}

TEST_CASE("a stream drawn on another thread reproduces the same words") {
  const auto expected = first_words({1, 7}, 1000);
  std::vector<std::vector<std::uint64_t>> results(8);
  {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < results.size(); ++t) {
      workers.emplace_back([&, t] { results[t] = first_words({1, 7}, 1000); });
    }
  }
  for (const auto& r : results) CHECK(r == expected);
}

TEST_CASE("uniform01 stays in [0, 1)") {
  Stream s({3, 0});
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("sample respects the support of each entry law") {
  Stream s({11, 4});
  const EntryDistribution rad{EntryKind::rademacher, 1.0};
  const EntryDistribution uni{EntryKind::uniform, 1.0};
  int plus = 0;
  for (int i = 0; i < 10000; ++i) {
    const double r = sample(rad, s);
    REQUIRE((r == 1.0 || r == -1.0));
    plus += r > 0;
    const double u = sample(uni, s);
    REQUIRE(std::abs(u) <= std::sqrt(3.0));
  }
  CHECK(std::abs(plus - 5000) < 300);
  const EntryDistribution rad3{EntryKind::rademacher, 3.0};
  const double r = sample(rad3, s);
  CHECK((r == 3.0 || r == -3.0));
}

TEST_CASE("gaussian draws have the right mean and variance") {
  Stream s({2024, 0});
  const auto m = moment_check({EntryKind::gaussian, 1.0}, 1'000'000, s);
  CHECK(std::abs(m.mean) < 4e-3);
  CHECK(std::abs(m.variance - 1.0) < 1e-2);
  CHECK(std::abs(m.fourth_moment - 3.0) < 0.05);
}

TEST_CASE("moment_check fourth moments") {
  Stream s({5, 5});
  SUBCASE("rademacher is exactly one for any n") {
    for (std::uint64_t n : {2ull, 17ull, 1000ull}) {
      CHECK(moment_check({EntryKind::rademacher, 1.0}, n, s).fourth_moment == 1.0);
    }
  }
  SUBCASE("uniform on +-sqrt(3) has E X^4 = 9/5") {
    const auto m = moment_check({EntryKind::uniform, 1.0}, 1'000'000, s);
    CHECK(std::abs(m.fourth_moment - 1.8) < 0.05);
    CHECK(std::abs(m.variance - 1.0) < 1e-2);
  }
  SUBCASE("scale enters as scale^2 in the variance") {
    const auto m = moment_check({EntryKind::uniform, 0.5}, 200'000, s);
    CHECK(std::abs(m.variance - 0.25) < 5e-3);
  }
}

TEST_CASE("moment_check rejects fewer than two draws and bad scales") {
  Stream s({1, 0});
  CHECK_THROWS_AS(moment_check({EntryKind::gaussian, 1.0}, 1, s), ValidationError);
  CHECK_THROWS_AS(moment_check({EntryKind::gaussian, 0.0}, 10, s), ValidationError);
  CHECK_THROWS_AS(moment_check({EntryKind::gaussian, -1.0}, 10, s), ValidationError);
}

TEST_CASE("neighbouring streams are uncorrelated") {
  Stream a({99, 0}), b({99, 1});
  constexpr int n = 100000;
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.normal(), y = b.normal();
    sa += x; sb += y; saa += x * x; sbb += y * y; sab += x * y;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double corr = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
  CHECK(std::abs(corr) < 0.01);
}

TEST_CASE("entry kind names round-trip") {
  for (auto k : {EntryKind::gaussian, EntryKind::rademacher, EntryKind::uniform}) {
    CHECK(parse_entry_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_entry_kind("cauchy"), ValidationError);
}
