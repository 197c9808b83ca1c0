#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "polycycle.h"

namespace {

std::string take(char* s) {
  std::string out(s);
  pcy_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("status codes and error messages") {
  pcy_loop_map* m = nullptr;
  CHECK(pcy_loop_map_create(0.5, 1.0, 0.3, 1.0, 0.0, 256, &m) == PCY_ERR_BAD_ARGUMENT);
  CHECK(std::strlen(pcy_last_error()) > 0);
  CHECK(pcy_loop_map_create(2.0, 1.0, 0.3, 1.0, 0.0, 13, &m) == PCY_ERR_BAD_ARGUMENT);
  CHECK(pcy_loop_map_create(2.0, 1.0, 1.5, 1.0, 0.0, 256, &m) == PCY_ERR_EXISTENCE);
}

TEST_CASE("dulac surface") {
  pcy_dulac *a = nullptr, *b = nullptr, *ab = nullptr;
  REQUIRE(pcy_dulac_create(2.0, 1.0, 10.0, 128, &a) == PCY_OK);
  REQUIRE(pcy_dulac_create(3.0, 2.0, 10.0, 128, &b) == PCY_OK);
  double y = 0.0;
  CHECK(pcy_dulac_apply(a, 0.1, &y) == PCY_OK);
  CHECK(y == doctest::Approx(0.01));
  CHECK(pcy_dulac_apply(a, -1.0, &y) == PCY_ERR_DOMAIN);
  REQUIRE(pcy_dulac_compose(a, b, &ab) == PCY_OK);
  double mu = 0.0, c = 0.0;
  CHECK(pcy_dulac_params(ab, &mu, &c, nullptr) == PCY_OK);
  CHECK(mu == doctest::Approx(6.0));
  CHECK(c == doctest::Approx(2.0));
  pcy_dulac_free(ab);
  pcy_dulac_free(b);
  pcy_dulac_free(a);
}

TEST_CASE("sparkling table through the shared surface") {
  pcy_loop_map* m = nullptr;
  REQUIRE(pcy_loop_map_create(2.0, 1.0, std::exp(-1.0), 1.0, 0.0, 256, &m) == PCY_OK);

  double value = 0.0;
  int turns = 0, escaped = 0;
  CHECK(pcy_loop_iterate(m, 0.05, std::exp(-1.0), 2, &value, &turns, &escaped) == PCY_OK);
  CHECK(escaped == 1);
  CHECK(turns == 2);
  CHECK(value == doctest::Approx(-0.0427179).epsilon(1e-4));

  int n = -1;
  CHECK(pcy_count_turns(m, 0.01, &n) == PCY_OK);
  CHECK(n == 2);
  CHECK(pcy_count_turns(m, -0.1, &n) == PCY_ERR_DOMAIN);

  double w1 = 0.0;
  CHECK(pcy_solve_sparkling(m, 1, &w1) == PCY_OK);
  CHECK(std::exp(-w1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));

  pcy_table* t = nullptr;
  REQUIRE(pcy_sparkling_table(m, 10, &t) == PCY_OK);
  CHECK(pcy_table_size(t) == 10);
  CHECK(pcy_table_truncated(t) == 0);
  int idx = 0;
  double w = 0.0;
  CHECK(pcy_table_entry(t, 1, &idx, &w) == PCY_OK);
  CHECK(idx == 2);
  CHECK(std::exp(-w) == doctest::Approx(0.0145815).epsilon(1e-4));
  CHECK(pcy_table_entry(t, 99, &idx, &w) == PCY_ERR_BAD_ARGUMENT);

  char* csv = nullptr;
  REQUIRE(pcy_table_csv(t, &csv) == PCY_OK);
  CHECK(take(csv).rfind("n,eps,ln_neg_ln_eps\n", 0) == 0);

  char* eps_str = nullptr;
  REQUIRE(pcy_format_eps(w1, 7, &eps_str) == PCY_OK);
  CHECK(take(eps_str) == "1.353353e-1");

  pcy_table_free(t);
  pcy_loop_map_free(m);
}

TEST_CASE("model, staircase and synchronization") {
  double phi = 0.0;
  CHECK(pcy_phi(2.0, 0.5, &phi) == PCY_OK);
  CHECK(phi == doctest::Approx(1.0));
  CHECK(pcy_phi(0.5, 0.5, &phi) == PCY_ERR_DOMAIN);

  pcy_model* m = nullptr;
  REQUIRE(pcy_model_create(PCY_GLASSES, 2.0, 0.5, 1, 1, 1, 0.0, 0.3, 0.3, 1.0, nullptr, 0, 256,
                           &m) == PCY_OK);
  double wd = 0.0;
  CHECK(pcy_synchronize(m, -std::log(1e-4), nullptr, &wd) == PCY_OK);
  CHECK(std::exp(-wd) == doctest::Approx(1e-4).epsilon(1e-10));  // lambda rho = 1, c = 1

  pcy_set_threads(2);
  pcy_staircase* st = nullptr;
  REQUIRE(pcy_staircase_run(m, 5, 24, &st) == PCY_OK);
  pcy_set_threads(1);
  CHECK(pcy_staircase_size(st) == 20);
  double phi_hat = 0.0, resid = 0.0;
  CHECK(pcy_estimate_phi(st, 0, 19, &phi_hat, &resid) == PCY_OK);
  CHECK(phi_hat == doctest::Approx(1.0).epsilon(0.05));
  char* csv = nullptr;
  REQUIRE(pcy_staircase_csv(st, &csv) == PCY_OK);
  CHECK(take(csv).rfind("eps,delta,n_left,m_right\n", 0) == 0);
  pcy_staircase_free(st);
  pcy_model_free(m);
}

TEST_CASE("comparison and fits") {
  pcy_loop_map *a = nullptr, *b = nullptr;
  REQUIRE(pcy_loop_map_create(2.0, 1.0, 0.3, 1.0, 0.0, 256, &a) == PCY_OK);
  REQUIRE(pcy_loop_map_create(4.0, 1.0, 0.3, 1.0, 0.0, 256, &b) == PCY_OK);
  pcy_comparison* cmp = nullptr;
  REQUIRE(pcy_compare_families(a, b, 5, 30, 0, &cmp) == PCY_OK);
  double limit = 0.0, hw = 0.0;
  CHECK(pcy_comparison_ratio_limit(cmp, &limit, &hw) == PCY_OK);
  CHECK(limit == doctest::Approx(2.0).epsilon(0.03));
  int n = 0;
  double ratio = 0.0, diff = 0.0, kappa = 0.0;
  CHECK(pcy_comparison_row(cmp, 0, &n, &ratio, &diff, &kappa) == PCY_OK);
  CHECK(n == 5);
  pcy_comparison_free(cmp);
  pcy_loop_map_free(b);
  pcy_loop_map_free(a);

  double xs[] = {1, 2, 3, 4};
  double ys[] = {3, 5, 7, 9};
  pcy_fit fit{};
  CHECK(pcy_linear_fit(xs, ys, 4, 0, 3, &fit) == PCY_OK);
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(1.0));

  double seq[] = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  double v = 0.0;
  CHECK(pcy_limit_estimate(seq, 10, &v, &hw) == PCY_OK);
  CHECK(v == 1.0);
  int growing = -1;
  double factor = 0.0;
  CHECK(pcy_boundedness_check(seq, 10, 5, 4.0, &growing, &factor) == PCY_OK);
  CHECK(growing == 0);
}

TEST_CASE("flow surface: fields, saddles, integration") {
  pcy_field* f = nullptr;
  REQUIRE(pcy_field_linear(1.0, -2.0, &f) == PCY_OK);
  double vx = 0.0, vy = 0.0;
  CHECK(pcy_field_eval(f, 2.0, 3.0, &vx, &vy) == PCY_OK);
  CHECK(vx == 2.0);
  CHECK(vy == -6.0);

  pcy_saddle_info s{};
  CHECK(pcy_find_saddle(f, 0.2, 0.1, &s) == PCY_OK);
  CHECK(s.nu == doctest::Approx(2.0));

  double sections[5] = {1.0, 0.0, 0.0, 1.0, 0.5};
  pcy_trajectory* tr = nullptr;
  REQUIRE(pcy_integrate(f, 0.01, 0.8, 6.0, sections, 1, 1e-10, 1e-12, &tr) == PCY_OK);
  CHECK(pcy_trajectory_size(tr) > 4);
  CHECK(pcy_trajectory_crossing_count(tr) == 1);
  double tc = 0.0, coord = 0.0;
  int dir = 0, sidx = -1;
  CHECK(pcy_trajectory_crossing(tr, 0, &tc, &coord, &dir, &sidx) == PCY_OK);
  CHECK(sidx == 0);
  // x(t) = 0.01 e^t crosses x=1 at t = ln(100); y there is 0.8 e^{-2t}
  CHECK(tc == doctest::Approx(std::log(100.0)).epsilon(1e-8));
  CHECK(coord == doctest::Approx(0.8 * std::exp(-2.0 * std::log(100.0))).epsilon(1e-6));
  char* csv = nullptr;
  REQUIRE(pcy_trajectory_csv(tr, &csv) == PCY_OK);
  CHECK(take(csv).rfind("t,x,y\n", 0) == 0);
  pcy_trajectory_free(tr);

  pcy_field* rev = nullptr;
  REQUIRE(pcy_field_reversed(f, &rev) == PCY_OK);
  CHECK(pcy_field_eval(rev, 2.0, 3.0, &vx, &vy) == PCY_OK);
  CHECK(vx == -2.0);
  pcy_field_free(rev);
  pcy_field_free(f);
}

TEST_CASE("glued default spec and check through the shared surface") {
  char* js = nullptr;
  REQUIRE(pcy_glued_default_spec(&js) == PCY_OK);
  std::string spec = take(js);
  CHECK(spec.find("\"lambda\"") != std::string::npos);

  pcy_glued_report rep{};
  REQUIRE(pcy_glued_check(spec.c_str(), &rep) == PCY_OK);
  CHECK(std::abs(rep.eps_measured) < 1e-6);
  CHECK(rep.eig_err_l < 1e-12);

  CHECK(pcy_glued_check("not json", &rep) == PCY_ERR_INTERNAL);
  pcy_field* f = nullptr;
  REQUIRE(pcy_field_glued(spec.c_str(), &f) == PCY_OK);
  double vx = 0.0, vy = 0.0;
  CHECK(pcy_field_eval(f, 0.05, 0.02, &vx, &vy) == PCY_OK);
  CHECK(vx == doctest::Approx(0.05));
  pcy_field_free(f);
}
