#include "mesospec/rng.hpp"

#include <cmath>
#include <numbers>

#include "mesospec/errors.hpp"

namespace mesospec {

namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57;
constexpr int kPhiloxRounds = 10;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

}  // namespace

Philox4x32::Block Philox4x32::bijection(Block ctr, Key key) noexcept {
  for (int round = 0; round < kPhiloxRounds; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kPhiloxM4x32A, ctr[0], lo0, hi0);
    mulhilo(kPhiloxM4x32B, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW32A;
    key[1] += kPhiloxW32B;
  }
  return ctr;
}

Stream::Stream(SeedSpec seed) noexcept
    : seed_(seed),
      key_{static_cast<std::uint32_t>(seed.master_seed),
           static_cast<std::uint32_t>(seed.master_seed >> 32)} {}

void Stream::refill() noexcept {
  const Philox4x32::Block counter{
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(seed_.stream_id),
      static_cast<std::uint32_t>(seed_.stream_id >> 32)};
  buffer_ = Philox4x32::bijection(counter, key_);
  ++block_;
  used_ = 0;
}

Stream::result_type Stream::operator()() noexcept {
  if (used_ >= 4) refill();
  const std::uint64_t lo = buffer_[used_];
  const std::uint64_t hi = buffer_[used_ + 1];
  used_ += 2;
  return lo | (hi << 32);
}

double Stream::uniform01() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double Stream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  // u1 in (0, 1] keeps the logarithm finite.
  const double u1 = static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double sample(const EntryDistribution& dist, Stream& stream) noexcept {
  switch (dist.kind) {
    case EntryKind::gaussian:
      return dist.scale * stream.normal();
    case EntryKind::rademacher:
      return (stream() >> 63) ? dist.scale : -dist.scale;
    case EntryKind::uniform:
      return dist.scale * std::numbers::sqrt3 * (2.0 * stream.uniform01() - 1.0);
  }
  return 0.0;
}

void validate(const EntryDistribution& dist) {
  if (!(dist.scale > 0.0) || !std::isfinite(dist.scale)) {
    throw ValidationError("must be a positive finite real", "scale");
  }
}

Moments moment_check(const EntryDistribution& dist, std::uint64_t n_draws, Stream& stream) {
  validate(dist);
  if (n_draws < 2) throw ValidationError("at least 2 draws required", "n_draws");

  // Welford for mean/variance; the raw fourth moment is a plain average.
  double mean = 0.0, m2 = 0.0, fourth = 0.0;
  for (std::uint64_t i = 0; i < n_draws; ++i) {
    const double x = sample(dist, stream);
    const double delta = x - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x - mean);
    const double x2 = x * x;
    fourth += x2 * x2;
  }
  const auto n = static_cast<double>(n_draws);
  return {mean, m2 / (n - 1.0), fourth / n};
}

const char* to_string(EntryKind kind) noexcept {
  switch (kind) {
    case EntryKind::gaussian: return "gaussian";
    case EntryKind::rademacher: return "rademacher";
    case EntryKind::uniform: return "uniform";
  }
  return "unknown";
}

EntryKind parse_entry_kind(const std::string& text) {
  if (text == "gaussian") return EntryKind::gaussian;
  if (text == "rademacher") return EntryKind::rademacher;
  if (text == "uniform") return EntryKind::uniform;
  throw ValidationError("expected one of gaussian|rademacher|uniform, got '" + text + "'", "entry");
}

}  // namespace mesospec
