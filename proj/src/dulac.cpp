#include "dulac.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace pcy {

namespace {

void require(bool cond, int code, const char* msg) {
  if (!cond) throw Error(code, msg);
}

}  // namespace

DulacMap::DulacMap(Real mu_, Real c_, Real x_max_, Real perturb_)
    : mu(std::move(mu_)), c(std::move(c_)), x_max(std::move(x_max_)), perturb(std::move(perturb_)) {
  require(mu > 0.0, errc::bad_argument, "dulac map: exponent must be positive");
  require(c > 0.0, errc::bad_argument, "dulac map: coefficient must be positive");
  require(x_max > 0.0, errc::bad_argument, "dulac map: domain bound must be positive");
}

Real DulacMap::operator()(const Real& x) const {
  require(x > 0.0, errc::domain, "dulac map: x must be positive");
  require(x <= x_max, errc::domain, "dulac map: x beyond domain bound");
  Real y = c * pow(x, mu);
  if (!perturb.is_zero()) y = y * (1.0 + perturb * x);
  return y;
}

DulacMap compose(const DulacMap& first, const DulacMap& second) {
  require(first.perturb.is_zero() && second.perturb.is_zero(), errc::bad_argument,
          "compose: only pure power laws compose exactly");
  // Image of `first` is (0, c1 * x_max^mu1]; it must reach into the domain
  // of `second`.
  Real image_top = first.c * pow(first.x_max, first.mu);
  require(image_top > 0.0, errc::domain, "compose: empty image");
  Real mu = first.mu * second.mu;
  Real c = second.c * pow(first.c, second.mu);
  // Largest x whose image stays inside second's domain.
  Real x_max = first.x_max;
  if (image_top > second.x_max) {
    x_max = pow(second.x_max / first.c, Real(1.0, first.mu.bits()) / first.mu);
  }
  return DulacMap(mu, c, x_max);
}

LoopReturnMap::LoopReturnMap(Real lambda_, Real c_, Real eps_, Real p0_, Real y_max_, Real perturb_)
    : lambda(std::move(lambda_)),
      c(std::move(c_)),
      eps(std::move(eps_)),
      p0(std::move(p0_)),
      y_max(std::move(y_max_)),
      perturb(std::move(perturb_)) {
  require(lambda > 1.0, errc::bad_argument, "loop map: lambda must exceed 1");
  require(c > 0.0, errc::bad_argument, "loop map: coefficient must be positive");
  require(p0 > 0.0 && p0 < y_max, errc::existence, "loop map: p0 must lie in (0, y_max)");
}

LoopReturnMap LoopReturnMap::with_eps(const Real& e) const {
  LoopReturnMap g = *this;
  g.eps = e;
  return g;
}

LogEps LogEps::from_value(const Real& eps) {
  require(eps > 0.0, errc::domain, "log chart needs a positive value");
  return LogEps(-log(eps));
}

std::optional<Real> LogEps::value() const {
  Real v = exp(-neg_ln);
  if (v.is_zero() || v.is_inf()) return std::nullopt;
  return v;
}

IterateResult loop_iterate(const LoopReturnMap& g, const Real& y, int n) {
  require(n >= 0, errc::bad_argument, "loop_iterate: n must be >= 0");
  require(y > 0.0 && y <= g.y_max, errc::domain, "loop_iterate: y outside (0, y_max]");
  Real cur = y;
  for (int k = 1; k <= n; ++k) {
    Real next = g.c * pow(cur, g.lambda);
    if (!g.perturb.is_zero()) next = next * (1.0 + g.perturb * cur);
    next = next - g.eps;
    if (next > g.y_max) {
      throw Error(errc::overflow, "loop_iterate: orbit left the modeled annulus");
    }
    if (!(next > 0.0)) {
      return IterateResult{next, k, true};
    }
    cur = next;
  }
  return IterateResult{cur, n, false};
}

namespace detail {

LogStep loop_step_log(const LoopReturnMap& g, const Real& ln_y, const Real& ln_eps) {
  long bits = std::max(ln_y.bits(), g.bits());
  Real a = log(g.c) + g.lambda * ln_y;
  if (!g.perturb.is_zero()) {
    Real y = exp(ln_y);
    if (!y.is_zero()) a = a + log1p(g.perturb * y);
  }
  Real margin = a - ln_eps;  // +inf when eps = 0
  if (margin.is_inf() && margin.sign() > 0) {
    return LogStep{true, a, std::move(margin)};
  }
  if (!(margin > 0.0)) {
    return LogStep{false, Real(bits), std::move(margin)};
  }
  // ln(e^a - e^b) = a + log1p(-e^(b-a)); skip the correction once it falls
  // below the working precision.
  Real cutoff(-0.6931471805599453 * static_cast<double>(bits + 64), 64);
  Real diff = ln_eps - a;
  Real ln_next = a;
  if (diff > cutoff) {
    ln_next = a + log1p(-exp(diff));
  }
  return LogStep{true, std::move(ln_next), std::move(margin)};
}

}  // namespace detail

namespace {

int count_turns_impl(const LoopReturnMap& g, const Real& ln_eps, const TurnCountOptions& opts) {
  long bits = g.bits();
  Real conn_tol = opts.connection_tol > 0.0
                      ? Real(opts.connection_tol, bits)
                      : pow(Real(2.0, bits), Real(-static_cast<double>(bits / 2), bits));
  Real ln_ymax = log(g.y_max);
  Real ln_y = log(g.p0);
  for (int n = 0;; ++n) {
    if (n > opts.cap) {
      throw Error(errc::nontermination,
                  "count_turns: turn cap exceeded (eps too close to 0 for this precision)");
    }
    auto step = detail::loop_step_log(g, ln_y, ln_eps);
    if (!step.margin.is_inf() && abs(step.margin) <= conn_tol) {
      return n + 1;  // orbit coalesces with the stable separatrix at this turn
    }
    if (!step.positive) {
      return n;
    }
    if (step.ln_next > ln_ymax) {
      throw Error(errc::overflow, "count_turns: orbit left the modeled annulus");
    }
    ln_y = step.ln_next;
  }
}

}  // namespace

int count_turns(const LoopReturnMap& g, TurnCountOptions opts) {
  require(g.eps > 0.0, errc::domain,
          "count_turns: eps must be positive (eps < 0 births a limit cycle; "
          "eps = 0 keeps the loop)");
  return count_turns_impl(g, log(g.eps), opts);
}

int count_turns(const LoopReturnMap& g, const LogEps& eps, TurnCountOptions opts) {
  return count_turns_impl(g, -eps.neg_ln, opts);
}

namespace {

// Sign of g_eps^n(p0) at eps = exp(-w): +1 survives n turns, -1 escapes
// earlier (or exactly hits zero, which bisection treats as the low side).
int orbit_sign(const LoopReturnMap& g, const Real& w, int n) {
  Real ln_eps = -w;
  Real ln_y = log(g.p0);
  for (int k = 0; k < n; ++k) {
    auto step = detail::loop_step_log(g, ln_y, ln_eps);
    if (!step.positive) return -1;
    ln_y = step.ln_next;
  }
  return 1;
}

Real solve_tol(const LoopReturnMap& family, const SparklingOptions& opts) {
  long bits = family.bits();
  if (!opts.tol.is_nan()) {
    require(opts.tol > 0.0, errc::bad_argument, "solve_sparkling: tol must be positive");
    return opts.tol;
  }
  return pow(Real(2.0, bits), Real(-static_cast<double>(bits - 32), bits));
}

}  // namespace

SparklingRoot solve_sparkling(const LoopReturnMap& family, int n, SparklingOptions opts) {
  require(n >= 1, errc::bad_argument, "solve_sparkling: n must be >= 1");
  require(family.p0 < family.y_max, errc::existence, "solve_sparkling: p0 must be below y_max");
  long bits = family.bits();
  Real one(1.0, bits);

  Real tol = solve_tol(family, opts);
  // w_1 = -ln(c p0^lambda (1 + a p0)) is closed form.
  Real w1 = -(log(family.c) + family.lambda * log(family.p0));
  if (!family.perturb.is_zero()) w1 = w1 - log1p(family.perturb * family.p0);
  if (n == 1) return SparklingRoot{1, LogEps(w1)};

  // March the sheet chain up to n; each step brackets w_k between w_{k-1}
  // (escape side) and an expanded upper bound (survival side).
  Real w_prev = w1;
  Real ln_c = log(family.c);
  for (int k = 2; k <= n; ++k) {
    Real lo = w_prev;
    Real hi = max(family.lambda * w_prev - ln_c + 2.0, lo + 2.0);
    int guard = 0;
    while (orbit_sign(family, hi, k) <= 0) {
      lo = hi;
      hi = family.lambda * abs(hi) + 2.0;
      if (++guard > 300) {
        throw Error(errc::precision, "solve_sparkling: bracket expansion failed");
      }
    }
    // Invariant: sign(lo) <= 0 < sign(hi).
    while (hi - lo > tol * max(abs(lo), one)) {
      Real mid = (lo + hi) * 0.5;
      if (mid <= lo || mid >= hi) {
        throw Error(errc::precision,
                    "solve_sparkling: bracket collapsed below representable spacing");
      }
      if (orbit_sign(family, mid, k) > 0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    w_prev = (lo + hi) * 0.5;
  }
  return SparklingRoot{n, LogEps(w_prev)};
}

const LogEps& SparklingTable::eps_at(int n) const {
  for (const auto& e : entries) {
    if (e.n == n) return e.eps;
  }
  throw Error(errc::bad_argument, "sparkling table: no entry with index " + std::to_string(n));
}

SparklingTable sparkling_table(const LoopReturnMap& family, int n_max, SparklingOptions opts) {
  require(n_max >= 1, errc::bad_argument, "sparkling_table: n_max must be >= 1");
  SparklingTable table;
  table.entries.reserve(static_cast<size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    try {
      auto root = solve_sparkling(family, n, opts);
      table.entries.push_back(SparklingEntry{n, root.eps});
    } catch (const Error& e) {
      if (table.entries.empty()) throw;  // nothing solvable at all
      table.truncated = true;
      table.truncation_reason = e.what();
      break;
    }
  }
  // Verification pass: monotone w, and each root survives exactly to a
  // near-zero iterate under independent forward iteration.
  for (size_t i = 0; i < table.entries.size(); ++i) {
    const auto& ent = table.entries[i];
    if (i > 0 && !(ent.eps.neg_ln > table.entries[i - 1].eps.neg_ln)) {
      throw Error(errc::internal, "sparkling_table: eps sequence not strictly decreasing");
    }
    Real ln_eps = -ent.eps.neg_ln;
    Real ln_y = log(family.p0);
    for (int k = 0; k < ent.n - 1; ++k) {
      auto step = detail::loop_step_log(family, ln_y, ln_eps);
      if (!step.positive) {
        throw Error(errc::internal, "sparkling_table: root escapes before its index");
      }
      ln_y = step.ln_next;
    }
    auto last = detail::loop_step_log(family, ln_y, ln_eps);
    if (abs(last.margin) > 1e-3) {
      throw Error(errc::internal, "sparkling_table: root fails the connection re-check");
    }
  }
  return table;
}

std::string sparkling_table_csv(const SparklingTable& table, long bits) {
  std::ostringstream out;
  out << "n,eps,ln_neg_ln_eps\n";
  for (const auto& e : table.entries) {
    int digits = digits_for_neg_log(e.eps.neg_ln, bits);
    out << e.n << ',' << format_exp_neg(e.eps.neg_ln, digits) << ','
        << log(e.eps.neg_ln).str(17) << '\n';
  }
  return out.str();
}

}  // namespace pcy
