#include <doctest.h>

#include <cmath>
#include <vector>

#include "flow/field.hpp"
#include "flow/integrator.hpp"
#include "flow/saddle.hpp"
#include "real.hpp"

using namespace pcy::flow;

TEST_CASE("jacobians agree with central differences") {
  std::vector<Vec2> pts{{0.3, -0.2}, {1.1, 0.7}, {-0.5, 0.4}, {0.0, 0.0}};
  CHECK(jacobian_check(bt_family(-0.06, -0.5), pts) < 1e-5);
  CHECK(jacobian_check(hamiltonian_cubic(0.1), pts) < 1e-5);
  CHECK(jacobian_check(linear_field(1.0, -2.0), pts) < 1e-5);
}

TEST_CASE("harmonic rotation returns to the start") {
  IntegrateOptions opts;
  auto tr = integrate(harmonic_field(), {1.0, 0.0}, 2.0 * M_PI, {}, opts);
  CHECK(tr.stop == StopReason::time_reached);
  CHECK((tr.final_point - Vec2{1.0, 0.0}).norm() < 10.0 * opts.rel_tol * 100.0);
}

TEST_CASE("linear field closed form") {
  auto tr = integrate(linear_field(1.0, -2.0), {1.0, 1.0}, 1.0, {});
  CHECK(tr.final_point.x == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
  CHECK(tr.final_point.y == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
}

TEST_CASE("halving the tolerance moves crossings by less than 5 tol") {
  Section sec{{0.0, 0.0}, {1.0, 0.0}, 2.0};
  IntegrateOptions coarse;
  coarse.rel_tol = 1e-8;
  coarse.abs_tol = 1e-10;
  IntegrateOptions fine = coarse;
  fine.rel_tol = 5e-9;
  fine.abs_tol = 5e-11;
  auto a = integrate(bt_family(-0.06, -0.5), {0.05, 0.0}, 16.0, {sec}, coarse);
  auto b = integrate(bt_family(-0.06, -0.5), {0.05, 0.0}, 16.0, {sec}, fine);
  REQUIRE(a.crossings.size() >= 1);
  REQUIRE(a.crossings.size() == b.crossings.size());
  for (size_t i = 0; i < a.crossings.size(); ++i) {
    CHECK(std::abs(a.crossings[i].coordinate - b.crossings[i].coordinate) < 5.0 * 1e-6);
  }
}

TEST_CASE("event determinism") {
  Section sec{{0.0, 0.0}, {1.0, 0.0}, 2.0};
  auto a = integrate(bt_family(-0.06, -0.5), {0.05, 0.0}, 16.0, {sec});
  auto b = integrate(bt_family(-0.06, -0.5), {0.05, 0.0}, 16.0, {sec});
  REQUIRE(a.crossings.size() == b.crossings.size());
  for (size_t i = 0; i < a.crossings.size(); ++i) {
    CHECK(a.crossings[i].time == b.crossings[i].time);
    CHECK(a.crossings[i].coordinate == b.crossings[i].coordinate);
  }
}

TEST_CASE("time reversal consistency") {
  IntegrateOptions opts;
  auto fwd = integrate(bt_family(-0.06, -0.5), {0.05, 0.0}, 5.0, {}, opts);
  auto back = integrate(bt_family(-0.06, -0.5), fwd.final_point, -5.0, {}, opts);
  CHECK((back.final_point - Vec2{0.05, 0.0}).norm() < 100.0 * opts.rel_tol * 10.0);
}

TEST_CASE("energy drift on the integrable cubic") {
  IntegrateOptions opts;
  Vec2 x0{0.5, 0.0};
  auto tr = integrate(hamiltonian_cubic(0.0), x0, 8.0, {}, opts);
  CHECK(std::abs(cubic_energy(tr.final_point) - cubic_energy(x0)) < 100.0 * opts.rel_tol);
}

TEST_CASE("saddle classification") {
  auto s = find_saddle(linear_field(1.0, -2.0), {0.1, 0.1});
  CHECK(s.position.norm() < 1e-10);
  CHECK(s.nu == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(s.mu_unstable == doctest::Approx(1.0));
  CHECK(s.mu_stable == doctest::Approx(-2.0));
  CHECK(std::abs(s.v_unstable.x) == doctest::Approx(1.0));

  auto c = find_saddle(hamiltonian_cubic(0.0), {0.1, -0.05});
  CHECK(c.position.norm() < 1e-10);
  CHECK(c.nu == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.mu_unstable == doctest::Approx(1.0).epsilon(1e-12));

  // a center is not a saddle
  CHECK_THROWS_AS(find_saddle(hamiltonian_cubic(0.0), {1.01, 0.0}), pcy::Error);
  CHECK_THROWS_AS(find_saddle(harmonic_field(), {0.3, 0.1}), pcy::Error);
}

TEST_CASE("separatrix along a linear saddle axis") {
  auto field = linear_field(1.0, -2.0);
  auto s = find_saddle(field, {0.0, 0.0});
  Section sec{{1.0, 0.0}, {0.0, 1.0}, 0.5};
  auto tr = trace_separatrix(field, s, Branch::unstable_plus, {sec});
  auto hit = first_crossing(tr);
  REQUIRE(hit.has_value());
  CHECK(std::abs(hit->coordinate) < 1e-9);  // the axis is the separatrix
}

TEST_CASE("cubic homoclinic arm follows the zero energy level") {
  auto field = hamiltonian_cubic(0.0);
  auto s = find_saddle(field, {0.05, 0.05});
  // crossing of the vertical section x = 1.4 should land on H = 0
  Section sec{{1.4, 0.0}, {0.0, 1.0}, 1.0};
  TraceOptions opts;
  auto tr = trace_separatrix(field, s, Branch::unstable_plus, {sec}, opts);
  auto hit = first_crossing(tr);
  REQUIRE(hit.has_value());
  double y_level = std::sqrt(1.4 * 1.4 - 2.0 * std::pow(1.4, 3) / 3.0);
  CHECK(std::abs(hit->coordinate - y_level) < 1e-6);

  // halving the seed offset moves the crossing by less than 10 h
  TraceOptions half = opts;
  half.seed_offset = 0.5 * opts.seed_offset;
  auto tr2 = trace_separatrix(field, s, Branch::unstable_plus, {sec}, half);
  auto hit2 = first_crossing(tr2);
  REQUIRE(hit2.has_value());
  CHECK(std::abs(hit->coordinate - hit2->coordinate) < 10.0 * opts.seed_offset);
}

TEST_CASE("splitting vanishes on the integrable loop and tracks dissipation") {
  auto prob = cubic_loop_problem();
  Section sec = make_loop_section(prob, 0.0);
  CHECK(std::abs(splitting_at(prob, 0.0, sec)) < 1e-8);
  // Melnikov sign check at nu = +-1e-3
  double plus = splitting_at(prob, +1e-3, sec);
  double minus = splitting_at(prob, -1e-3, sec);
  CHECK(plus > 0.0);
  CHECK(minus < 0.0);
}

TEST_CASE("homoclinic location on the symmetric cubic family") {
  auto prob = cubic_loop_problem();
  double nu = find_homoclinic(prob, -0.1, 0.1, 1e-10);
  CHECK(std::abs(nu) < 1e-8);
  CHECK_THROWS_AS(find_homoclinic(prob, 0.01, 0.1, 1e-10), pcy::Error);  // no sign change
}

TEST_CASE("bt homoclinic: location, attracting-side lambda, sanity band") {
  auto prob = bt_loop_problem(-0.06, -0.5);
  double beta1 = find_homoclinic(prob, -0.12, -0.02, 1e-9);
  Section sec = make_loop_section(prob, beta1);
  CHECK(std::abs(splitting_at(prob, beta1, sec)) < 1e-8);
  // classical prediction -(6/25) beta2^2 = -0.06 as a +-25% sanity band
  CHECK(beta1 > -0.075);
  CHECK(beta1 < -0.045);
  auto s = find_saddle(prob.family.with_param(0, beta1), prob.saddle_seed);
  CHECK(s.nu > 1.0);  // attracting side after time reversal
  // forward-time saddle has nu < 1 (trace > 0): the two frames agree
  auto fwd = find_saddle(bt_family(beta1, -0.5), prob.saddle_seed);
  CHECK(fwd.nu == doctest::Approx(1.0 / s.nu).epsilon(1e-9));
}

TEST_CASE("bt flow sparkling: sheets decay and match the direct event") {
  auto prob = bt_loop_problem(-0.06, -0.5);
  double beta1 = find_homoclinic(prob, -0.12, -0.02, 1e-10);
  auto res = measure_sparkling_flow(prob, beta1, 0.35, 2, 3, 1e-9);
  REQUIRE(res.points.size() == 2);
  CHECK(res.time_reversed);
  CHECK(res.lambda > 1.0);
  CHECK(res.points[0].eps > res.points[1].eps);
  CHECK(res.points[1].eps > 0.0);

  // Independent event solver for the deeper sheet: root of "the n-th
  // crossing coordinate equals the stable-manifold hit" located by direct
  // value bisection, no winding counts involved.
  Section sec = make_loop_section(prob, beta1);
  double p0_coord = 0.35 * sec.halfwidth;
  auto gap = [&](double param) {
    auto field = prob.family.with_param(0, param);
    auto s = find_saddle(field, prob.saddle_seed);
    TraceOptions topts = prob.trace;
    topts.integ.record_trajectory = false;
    topts.integ.max_crossings = 1;
    auto ts = trace_separatrix(field, s, prob.stable_branch, {sec}, topts);
    REQUIRE(ts.crossings.size() == 1);
    IntegrateOptions iopts = prob.trace.integ;
    iopts.record_trajectory = false;
    iopts.max_crossings = 3;
    auto orbit = integrate(field, sec.base + p0_coord * sec.direction, 2000.0, {sec}, iopts);
    REQUIRE(orbit.crossings.size() >= 3);
    return orbit.crossings[2].coordinate - ts.crossings[0].coordinate;
  };
  double lo = res.points[1].param - 5e-4, hi = res.points[1].param + 5e-4;
  double glo = gap(lo);
  REQUIRE(glo * gap(hi) < 0.0);
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    double gm = gap(mid);
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  double param_direct = 0.5 * (lo + hi);
  CHECK(res.points[1].param ==
        doctest::Approx(param_direct).epsilon(1e-5));
}

TEST_CASE("trajectory csv shapes") {
  Section sec{{0.0, 0.0}, {1.0, 0.0}, 2.0};
  auto tr = integrate(harmonic_field(), {1.0, 0.0}, 3.0, {sec});
  auto tcsv = trajectory_csv(tr);
  CHECK(tcsv.rfind("t,x,y\n", 0) == 0);
  auto ccsv = crossings_csv(tr);
  CHECK(ccsv.rfind("t,coord,dir\n", 0) == 0);
}
