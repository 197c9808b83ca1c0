#pragma once

#include <optional>
#include <string>
#include <vector>

#include "real.hpp"

namespace pcy {

/// Correspondence map past a hyperbolic saddle, modeled as the power law
/// D(x) = c * x^mu on (0, x_max], optionally with a multiplicative
/// perturbation (1 + a*x) to probe robustness of leading-order statements.
struct DulacMap {
  Real mu;
  Real c;
  Real x_max;
  Real perturb;  // coefficient a of the (1 + a*x) factor; 0 for the pure law

  DulacMap(Real mu_, Real c_, Real x_max_, Real perturb_ = Real(0.0, Real::default_bits));
  Real operator()(const Real& x) const;
};

/// Pointwise equal to second(first(x)) on the common domain: exponents
/// multiply, the coefficient becomes c2 * c1^mu2. Only defined for the
/// pure power law (perturb = 0 on both factors).
DulacMap compose(const DulacMap& first, const DulacMap& second);

/// Return map of a broken saddle loop on its cross-section:
///   g_eps(y) = c * y^lambda * (1 + a*y) - eps   for y in (0, y_max].
/// y = 0 marks the first hit S of the stable separatrix; a non-positive
/// image means the orbit leaves through the gap [x(U), x(S)).
/// p0 is the entry coordinate of the winding separatrix.
struct LoopReturnMap {
  Real lambda;
  Real c;
  Real eps;
  Real p0;
  Real y_max;
  Real perturb;

  LoopReturnMap(Real lambda_, Real c_, Real eps_, Real p0_, Real y_max_,
                Real perturb_ = Real(0.0, Real::default_bits));
  long bits() const { return lambda.bits(); }
  LoopReturnMap with_eps(const Real& e) const;
};

/// Positive quantity stored as w = -ln(value); the only representation in
/// which sparkling splittings survive at depth (values underflow every
/// binary format long before n reaches 40).
struct LogEps {
  Real neg_ln;

  explicit LogEps(Real w) : neg_ln(std::move(w)) {}
  static LogEps from_value(const Real& eps);
  /// Materializes exp(-neg_ln); nullopt when it underflows the MPFR range.
  std::optional<Real> value() const;
  double neg_ln_d() const { return neg_ln.to_double(); }
};

struct IterateResult {
  Real value;       // g^k(y) for the last computed k
  int turns_done;   // k
  bool escaped;     // value <= 0, orbit left through the gap at turn k
};

/// Iterates g_eps from y at most n times in plain arithmetic, stopping at
/// the first non-positive image. Throws errc::overflow when an iterate
/// exceeds y_max and errc::domain when y is outside (0, y_max].
IterateResult loop_iterate(const LoopReturnMap& g, const Real& y, int n);

struct TurnCountOptions {
  int cap = 100000;              // nontermination guard
  double connection_tol = 0.0;   // log-units; 0 -> 2^(-bits/2)
};

/// Number of full turns before escape: N = max{ n >= 0 : g^n(p0) > 0 }.
/// An iterate landing within connection_tol of the section origin counts
/// as a separatrix connection and returns its own turn index, so that the
/// value at eps = eps_n (as produced by the solver) is n, matching the
/// bracketing eps_{N+1} <= eps < eps_N away from the sheet boundaries.
int count_turns(const LoopReturnMap& g, TurnCountOptions opts = {});
int count_turns(const LoopReturnMap& g, const LogEps& eps, TurnCountOptions opts = {});

struct SparklingOptions {
  Real tol;  // relative tolerance on -ln(eps); NaN -> 2^-(bits-32)
  SparklingOptions() : tol(Real(53)) {}
};

struct SparklingRoot {
  int n;
  LogEps eps;  // the unique eps_n > 0 with g^n(p0) = 0
};

/// Solves g_eps^n(p0) = 0 for eps by bisection in the -ln(eps) chart;
/// g_eps^n(p0) is strictly decreasing in eps, so the sign of the orbit's
/// survival brackets the root. n = 1 is closed form.
SparklingRoot solve_sparkling(const LoopReturnMap& family, int n, SparklingOptions opts = {});

struct SparklingEntry {
  int n;
  LogEps eps;
};

struct SparklingTable {
  std::vector<SparklingEntry> entries;
  bool truncated = false;        // solver gave up before n_max
  std::string truncation_reason;

  const LogEps& eps_at(int n) const;  // entry with index n (1-based sheets)
};

/// Table of eps_n for n = 1..n_max; strictly decreasing in eps (strictly
/// increasing in -ln eps). Each entry is re-verified by an independent
/// forward iteration pass. On solver failure the table truncates at the
/// last solvable index with `truncated` set.
SparklingTable sparkling_table(const LoopReturnMap& family, int n_max, SparklingOptions opts = {});

/// CSV with header n,eps,ln_neg_ln_eps. eps printed in scientific notation
/// with a precision-dependent digit count, ln_neg_ln_eps with 17
/// significant digits.
std::string sparkling_table_csv(const SparklingTable& table, long bits);

namespace detail {

struct LogStep {
  bool positive;  // image > 0
  Real ln_next;   // ln g(y), valid when positive
  Real margin;    // ln(c y^lambda (1+a y)) - ln(eps); ~0 at a connection
};

/// One application of g in the log chart: ln_y = ln y, ln_eps = ln eps.
/// Setting ln_eps to -inf evaluates the unbroken map (eps = 0).
LogStep loop_step_log(const LoopReturnMap& g, const Real& ln_y, const Real& ln_eps);

}  // namespace detail

}  // namespace pcy
