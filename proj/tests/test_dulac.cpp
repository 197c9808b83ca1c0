#include <doctest.h>

#include <cmath>
#include <random>
#include <tuple>
#include <vector>

#include "dulac.hpp"

using namespace pcy;

namespace {

constexpr long kBits = 256;

Real r(double x, long bits = kBits) { return Real(x, bits); }

LoopReturnMap make_map(double lambda, double c, double p0, long bits = kBits) {
  return LoopReturnMap(Real(lambda, bits), Real(c, bits), Real(0.0, bits), Real(p0, bits),
                       Real(1.0, bits));
}

// Independent sheet oracle: sign scan of the plain-arithmetic iteration over
// a log-spaced eps grid, then bisection, never touching the log-chart
// solver path.
Real oracle_sheet(const LoopReturnMap& g, int n) {
  auto survives = [&](const Real& eps) {
    Real y = g.p0;
    for (int k = 0; k < n; ++k) {
      Real next = g.c * pow(y, g.lambda) - eps;
      if (!(next > 0.0)) return false;
      y = next;
    }
    return true;
  };
  const int grid = 400;
  Real lo(kBits), hi(kBits);
  bool bracketed = false;
  Real prev = r(1e-30);
  bool prev_s = survives(prev);
  for (int i = 1; i <= grid; ++i) {
    double t = static_cast<double>(i) / grid;
    Real eps = exp(r(std::log(1e-30) * (1.0 - t)));  // 1e-30 .. 1
    bool s = survives(eps);
    if (s != prev_s) {
      lo = prev;
      hi = eps;
      bracketed = true;
      break;
    }
    prev = eps;
    prev_s = s;
  }
  REQUIRE(bracketed);
  for (int i = 0; i < 500; ++i) {
    Real mid = (lo + hi) * 0.5;
    if (survives(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) * 0.5;
}

}  // namespace

TEST_CASE("dulac map evaluation") {
  DulacMap ident(r(1), r(1), r(1));
  CHECK(ident(r(0.5)).to_double() == doctest::Approx(0.5).epsilon(1e-15));
  DulacMap sq(r(2), r(3), r(1));
  CHECK(sq(r(0.1)).to_double() == doctest::Approx(0.03).epsilon(1e-15));
  DulacMap mid(r(1.5), r(1), r(1));
  CHECK(mid(r(0.04)).to_double() == doctest::Approx(0.008).epsilon(1e-14));
  CHECK_THROWS_AS(mid(r(0.0)), Error);
  CHECK_THROWS_AS(mid(r(1.5)), Error);
}

TEST_CASE("dulac composition multiplies exponents") {
  DulacMap ident(r(1), r(1), r(10));
  DulacMap m(r(1.7), r(0.8), r(10));
  DulacMap same = compose(ident, m);
  CHECK(same.mu == m.mu);
  CHECK(same.c == m.c);

  DulacMap a(r(2), r(1), r(10));
  DulacMap b(r(3), r(2), r(10));
  DulacMap ab = compose(a, b);
  CHECK(ab.mu.to_double() == doctest::Approx(6.0));
  CHECK(ab.c.to_double() == doctest::Approx(2.0));
  // pointwise equality with second(first(x))
  for (double x : {0.2, 0.5, 0.9}) {
    CHECK(ab(r(x)).to_double() == doctest::Approx(b(a(r(x))).to_double()).epsilon(1e-30));
  }
  // paper rule: exponents multiply
  DulacMap lam(r(2.3), r(1.1), r(10));
  DulacMap rho(r(0.7), r(0.9), r(10));
  CHECK(compose(lam, rho).mu.to_double() == doctest::Approx(2.3 * 0.7));
}

TEST_CASE("loop iteration and escape") {
  // eps = 0: closed form y^(2^n)
  auto g0 = make_map(2, 1, 0.5);
  auto res = loop_iterate(g0, r(0.5), 3);
  CHECK_FALSE(res.escaped);
  CHECK(res.value.to_double() == doctest::Approx(0.00390625).epsilon(1e-15));

  double p0 = std::exp(-1.0);
  auto g = make_map(2, 1, p0).with_eps(r(0.05));
  auto r1 = loop_iterate(g, g.p0, 1);
  CHECK_FALSE(r1.escaped);
  CHECK(r1.value.to_double() == doctest::Approx(0.0853353).epsilon(1e-5));
  auto r2 = loop_iterate(g, g.p0, 2);
  CHECK(r2.escaped);
  CHECK(r2.turns_done == 2);
  CHECK(r2.value.to_double() == doctest::Approx(-0.0427179).epsilon(1e-5));

  CHECK_THROWS_AS(loop_iterate(g, r(-0.1), 1), Error);
  // orbit leaving the annulus: big coefficient pushes past y_max
  auto big = LoopReturnMap(r(2), r(30), r(0.0), r(0.5), r(1.0));
  CHECK_THROWS_AS(loop_iterate(big, r(0.5), 1), Error);
}

TEST_CASE("turn counting matches the examples") {
  double p0 = std::exp(-1.0);
  auto g = make_map(2, 1, p0);
  CHECK(count_turns(g.with_eps(r(0.2))) == 0);
  CHECK(count_turns(g.with_eps(r(0.05))) == 1);
  CHECK(count_turns(g.with_eps(r(0.01))) == 2);
  CHECK_THROWS_AS(count_turns(g.with_eps(r(-0.01))), Error);  // limit-cycle regime
  CHECK_THROWS_AS(count_turns(g.with_eps(r(0.0))), Error);    // surviving loop

  // nontermination guard
  TurnCountOptions opts;
  opts.cap = 3;
  CHECK_THROWS_AS(count_turns(g, LogEps(r(1e9)), opts), Error);
}

TEST_CASE("sheet solver against closed forms and the scan oracle") {
  double p0 = std::exp(-1.0);
  auto g = make_map(2, 1, p0);

  auto s1 = solve_sparkling(g, 1);
  CHECK(s1.eps.value()->to_double() == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));

  // eps2 via the quadratic closed form u^2 + u - p0^2 = 0
  double u = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * std::exp(-2.0)));
  double eps2_closed = std::exp(-2.0) - u;
  auto s2 = solve_sparkling(g, 2);
  CHECK(s2.eps.value()->to_double() == doctest::Approx(eps2_closed).epsilon(1e-13));
  CHECK(s2.eps.value()->to_double() == doctest::Approx(0.0145815).epsilon(1e-5));

  // n <= 3 against the independent scan-plus-refine oracle, 12 digits
  const std::tuple<double, double, double> fams[] = {
      {2.0, 1.0, p0}, {1.5, 0.8, 0.25}, {2.7, 1.3, 0.2}};
  for (auto [lam, c, q0] : fams) {
    auto fam = make_map(lam, c, q0);
    for (int n = 1; n <= 3; ++n) {
      Real expect = oracle_sheet(fam, n);
      Real got = *solve_sparkling(fam, n).eps.value();
      CHECK(abs(got / expect - 1.0).to_double() < 1e-12);
    }
  }
}

TEST_CASE("sparkling table invariants") {
  auto g = make_map(2, 1, std::exp(-1.0));
  auto tbl = sparkling_table(g, 12);
  REQUIRE(tbl.entries.size() == 12);
  CHECK_FALSE(tbl.truncated);
  CHECK(tbl.eps_at(1).value()->to_double() == doctest::Approx(0.1353353).epsilon(1e-6));
  CHECK(tbl.eps_at(2).value()->to_double() == doctest::Approx(0.0145815).epsilon(1e-5));
  for (size_t i = 1; i < tbl.entries.size(); ++i) {
    CHECK(tbl.entries[i].eps.neg_ln > tbl.entries[i - 1].eps.neg_ln);  // eps decreasing
  }
  // count_turns at bracket midpoints equals the sheet index (brute-force
  // iteration oracle for moderate n, log chart beyond)
  for (int n = 1; n < 12; ++n) {
    Real mid_w = (tbl.eps_at(n).neg_ln + tbl.eps_at(n + 1).neg_ln) * 0.5;
    CHECK(count_turns(g, LogEps(mid_w)) == n);
    auto mid_eps = LogEps(mid_w).value();
    if (mid_eps) {
      auto it = loop_iterate(g.with_eps(*mid_eps), g.p0, n + 1);
      CHECK(it.escaped);
      CHECK(it.turns_done == n + 1);
    }
  }
  // the solved sheet is a connection: exactly n turns there
  CHECK(count_turns(g.with_eps(*tbl.eps_at(1).value())) == 1);
  CHECK(count_turns(g.with_eps(*tbl.eps_at(5).value())) == 5);
}

TEST_CASE("monotonicity of the n-th image in eps") {
  auto g = make_map(2, 1, 0.3);
  auto tbl = sparkling_table(g, 4);
  double w1 = tbl.eps_at(1).neg_ln.to_double();
  double w4 = tbl.eps_at(4).neg_ln.to_double();
  Real prev(kBits);
  bool have_prev = false;
  for (int i = 0; i < 100; ++i) {
    double w = w4 + (w1 - w4) * (static_cast<double>(i) + 0.5) / 100.0;  // eps increasing
    Real eps = exp(r(-w));
    auto it = loop_iterate(g.with_eps(eps), g.p0, 3);
    if (it.escaped) {
      have_prev = false;
      continue;
    }
    if (have_prev) CHECK(it.value < prev);  // strictly decreasing in eps
    prev = it.value;
    have_prev = true;
  }
}

TEST_CASE("bracket consistency over random samples") {
  std::mt19937_64 rng(20240817);
  const std::tuple<double, double, double> fams[] = {
      {2.0, 1.0, 0.3}, {1.5, 0.5, 0.1}, {3.0, 2.0, 0.3}};
  for (auto [lam, c, q0] : fams) {
    auto g = make_map(lam, c, q0);
    auto tbl = sparkling_table(g, 40);
    std::uniform_real_distribution<double> unif(tbl.eps_at(1).neg_ln.to_double(),
                                                tbl.eps_at(40).neg_ln.to_double());
    for (int k = 0; k < 100; ++k) {
      Real w = r(unif(rng));
      int n = count_turns(g, LogEps(w));
      REQUIRE(n >= 1);
      REQUIRE(n <= 39);
      // eps_{N+1} <= eps < eps_N  <=>  w_N < w <= w_{N+1}
      CHECK(tbl.eps_at(n).neg_ln < w);
      CHECK(w <= tbl.eps_at(n + 1).neg_ln);
    }
  }
}

TEST_CASE("slope law at depth") {
  auto g = make_map(2, 1, 0.1);
  auto tbl = sparkling_table(g, 40);
  // least-squares slope of ln(-ln eps_n) over n in [10, 40]
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  std::vector<double> resid;
  for (int n = 10; n <= 40; ++n) {
    double x = n, y = log(tbl.eps_at(n).neg_ln).to_double();
    sx += x; sy += y; sxx += x * x; sxy += x * y; ++m;
  }
  double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  CHECK(slope == doctest::Approx(std::log(2.0)).epsilon(0.01));
  // residual sequence ln w_n - n ln(lambda) stays in a narrow band
  double lo = 1e300, hi = -1e300;
  for (int n = 10; n <= 40; ++n) {
    double v = log(tbl.eps_at(n).neg_ln).to_double() - n * std::log(2.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi - lo < 0.05);
}

TEST_CASE("entry above the contracting range: sheets accumulate on a positive value") {
  // lambda = 1.5, c = 2 puts the unbroken map's repelling fixed point at
  // 0.25 < p0 = 0.3, so the orbit of p0 never winds onto the loop for small
  // eps and the sheet values pile up on eps_c = c p0^lambda - p0 instead of
  // tending to 0; no slope law can hold here.
  auto g = make_map(1.5, 2.0, 0.3);
  auto tbl = sparkling_table(g, 40);
  double eps_c = 2.0 * std::pow(0.3, 1.5) - 0.3;
  double w_c = -std::log(eps_c);
  CHECK(tbl.eps_at(40).neg_ln.to_double() == doctest::Approx(w_c).epsilon(1e-4));
  CHECK(tbl.eps_at(40).neg_ln.to_double() < 4.0);  // nowhere near lambda^40
}

TEST_CASE("precision consistency between 128 and 256 bits") {
  for (long n : {3L, 17L}) {
    auto g128 = make_map(2, 1, 0.3, 128);
    auto g256 = make_map(2, 1, 0.3, 256);
    Real w128 = solve_sparkling(g128, static_cast<int>(n)).eps.neg_ln;
    Real w256 = solve_sparkling(g256, static_cast<int>(n)).eps.neg_ln;
    CHECK(abs(w128 / w256 - 1.0).to_double() < 1e-25);
  }
}

TEST_CASE("multiplicative perturbation keeps the leading-order law") {
  auto plain = make_map(2, 1, 0.2);
  LoopReturnMap bent(r(2), r(1), r(0.0), r(0.2), r(1.0), r(0.1));
  auto tp = sparkling_table(plain, 30);
  auto tb = sparkling_table(bent, 30);
  // same leading slope, order-one offset only
  double sp = log(tp.eps_at(30).neg_ln).to_double() - log(tp.eps_at(10).neg_ln).to_double();
  double sb = log(tb.eps_at(30).neg_ln).to_double() - log(tb.eps_at(10).neg_ln).to_double();
  CHECK(sp / 20.0 == doctest::Approx(std::log(2.0)).epsilon(0.01));
  CHECK(sb / 20.0 == doctest::Approx(std::log(2.0)).epsilon(0.01));
  // perturbed values differ from plain ones (the toggle does something)
  CHECK(abs(tb.eps_at(5).neg_ln - tp.eps_at(5).neg_ln).to_double() > 1e-6);
}

TEST_CASE("csv serialization of a table") {
  auto g = make_map(2, 1, std::exp(-1.0));
  auto tbl = sparkling_table(g, 3);
  std::string csv = sparkling_table_csv(tbl, kBits);
  CHECK(csv.rfind("n,eps,ln_neg_ln_eps\n", 0) == 0);
  CHECK(csv.find("\n1,1.3533528") != std::string::npos);
  CHECK(csv.find("\n2,1.4581480") != std::string::npos);
  // three data rows
  int rows = 0;
  for (char ch : csv) rows += ch == '\n' ? 1 : 0;
  CHECK(rows == 4);
}
