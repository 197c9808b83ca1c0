#include "asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "real.hpp"

namespace pcy {

FitResult linear_fit(std::span<const double> xs, std::span<const double> ys,
                     std::size_t window_lo, std::size_t window_hi) {
  if (xs.size() != ys.size()) {
    throw Error(errc::bad_argument, "linear_fit: xs and ys differ in length");
  }
  if (window_hi >= xs.size() || window_lo > window_hi) {
    throw Error(errc::bad_argument, "linear_fit: window out of range");
  }
  std::size_t m = window_hi - window_lo + 1;
  if (m < 3) {
    throw Error(errc::bad_argument, "linear_fit: need at least 3 points");
  }
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = window_lo; i <= window_hi; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  double mx = sx / static_cast<double>(m);
  double my = sy / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = window_lo; i <= window_hi; ++i) {
    double dx = xs[i] - mx;
    sxx += dx * dx;
    sxy += dx * (ys[i] - my);
  }
  if (sxx == 0.0) {
    throw Error(errc::domain, "linear_fit: degenerate window (all xs equal)");
  }
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.window_lo = window_lo;
  fit.window_hi = window_hi;
  double worst = 0.0;
  for (std::size_t i = window_lo; i <= window_hi; ++i) {
    worst = std::max(worst, std::abs(ys[i] - (fit.intercept + fit.slope * xs[i])));
  }
  fit.residual = worst;
  return fit;
}

std::string FitResult::to_json() const {
  std::ostringstream out;
  out.precision(17);
  out << "{\"slope\":" << slope << ",\"intercept\":" << intercept
      << ",\"residual\":" << residual << ",\"window\":[" << window_lo << ',' << window_hi
      << "]}";
  return out.str();
}

LimitEstimate limit_estimate(std::span<const double> seq) {
  if (seq.size() < 8) {
    throw Error(errc::bad_argument, "limit_estimate: need at least 8 entries");
  }
  std::size_t tail = seq.size() / 4;
  std::size_t start = seq.size() - tail;
  double mean = 0.0;
  for (std::size_t i = start; i < seq.size(); ++i) mean += seq[i];
  mean /= static_cast<double>(tail);
  double dev = 0.0;
  for (std::size_t i = start; i < seq.size(); ++i) {
    dev = std::max(dev, std::abs(seq[i] - mean));
  }
  return LimitEstimate{mean, dev};
}

BoundednessResult boundedness_check(std::span<const double> seq, std::size_t split,
                                    double threshold) {
  if (split == 0 || split >= seq.size()) {
    throw Error(errc::bad_argument, "boundedness_check: split outside the sequence");
  }
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < split; ++i) head = std::max(head, std::abs(seq[i]));
  for (std::size_t i = split; i < seq.size(); ++i) tail = std::max(tail, std::abs(seq[i]));
  BoundednessResult r;
  if (head == 0.0) {
    r.growth_factor = tail == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    r.verdict = tail == 0.0 ? Verdict::bounded : Verdict::growing;
    return r;
  }
  r.growth_factor = tail / head;
  r.verdict = r.growth_factor > threshold ? Verdict::growing : Verdict::bounded;
  return r;
}

double band_width(std::span<const double> seq, std::size_t lo, std::size_t hi) {
  if (hi >= seq.size() || lo > hi) {
    throw Error(errc::bad_argument, "band_width: window out of range");
  }
  auto [mn, mx] = std::minmax_element(seq.begin() + static_cast<std::ptrdiff_t>(lo),
                                      seq.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  return *mx - *mn;
}

}  // namespace pcy
