#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>

namespace mesospec {

/// Identifies one independent random stream: the master seed of a run plus
/// the index of the Monte Carlo realization that owns the stream.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// Philox4x32-10 keyed by the master seed. The 128-bit counter is split into
/// a 64-bit block index (low half) and the stream id (high half), so a
/// stream's output depends only on its SeedSpec and never on which thread
/// consumes it or when.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block bijection(Block counter, Key key) noexcept;
};

/// Stateful generator over one Philox stream. Satisfies
/// std::uniform_random_bit_generator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(SeedSpec seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept;

  /// Standard normal via Box-Muller; the second variate of each pair is
  /// cached and returned by the next call.
  double normal() noexcept;

  const SeedSpec& seed() const noexcept { return seed_; }

 private:
  void refill() noexcept;

  SeedSpec seed_;
  Philox4x32::Key key_;
  std::uint64_t block_ = 0;
  Philox4x32::Block buffer_{};
  int used_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

inline Stream make_stream(SeedSpec seed) noexcept { return Stream(seed); }

enum class EntryKind { gaussian, rademacher, uniform };

/// Mean-zero scalar law with standard deviation `scale`.
///   gaussian   : Normal(0, scale^2)
///   rademacher : +-scale with probability 1/2
///   uniform    : Uniform[-scale*sqrt(3), scale*sqrt(3)]
struct EntryDistribution {
  EntryKind kind = EntryKind::gaussian;
  double scale = 1.0;

  friend bool operator==(const EntryDistribution&, const EntryDistribution&) = default;
};

double sample(const EntryDistribution& dist, Stream& stream) noexcept;

struct Moments {
  double mean = 0.0;
  double variance = 0.0;       // unbiased, divisor n - 1
  double fourth_moment = 0.0;  // raw E[X^4]
};

/// Empirical moments of `n_draws` samples. Throws ValidationError if
/// n_draws < 2 or the distribution is invalid.
Moments moment_check(const EntryDistribution& dist, std::uint64_t n_draws, Stream& stream);

void validate(const EntryDistribution& dist);

const char* to_string(EntryKind kind) noexcept;
EntryKind parse_entry_kind(const std::string& text);

}  // namespace mesospec
