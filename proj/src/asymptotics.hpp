#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pcy {

/// Ordinary least-squares line over an index window, with the residual kept
/// as the max absolute deviation (the quantity the O(1) statements bound).
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  std::size_t window_lo = 0;  // inclusive indices into the input arrays
  std::size_t window_hi = 0;

  std::string to_json() const;
};

FitResult linear_fit(std::span<const double> xs, std::span<const double> ys,
                     std::size_t window_lo, std::size_t window_hi);

struct LimitEstimate {
  double value = 0.0;
  double halfwidth = 0.0;  // max deviation within the averaged tail
};

/// Mean of the last quarter of the sequence; halfwidth is the max deviation
/// inside that tail. Requires at least 8 entries.
LimitEstimate limit_estimate(std::span<const double> seq);

enum class Verdict { bounded, growing };

struct BoundednessResult {
  Verdict verdict = Verdict::bounded;
  double growth_factor = 0.0;  // max|tail| / max|head|
};

/// Splits the sequence at `split` and compares peak magnitudes;
/// growth_factor above `threshold` reads as growing. A zero head maximum
/// defers to the tail alone.
BoundednessResult boundedness_check(std::span<const double> seq, std::size_t split,
                                    double threshold = 4.0);

/// max - min of the values inside [lo, hi]; the band width used by the
/// residual-stability checks.
double band_width(std::span<const double> seq, std::size_t lo, std::size_t hi);

}  // namespace pcy
