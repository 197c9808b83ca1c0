#include "saddle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "../dulac.hpp"
#include "../real.hpp"

namespace pcy::flow {

Saddle find_saddle(const PlanarField& field, Vec2 seed, double tol) {
  Vec2 p = seed;
  bool converged = false;
  for (int i = 0; i < 60; ++i) {
    Vec2 v = field(p);
    if (v.norm() < tol) {
      converged = true;
      break;
    }
    Mat2 j = field.jacobian(p);
    double det = j.det();
    if (std::abs(det) < 1e-300) {
      throw Error(errc::no_convergence, "find_saddle: singular jacobian during Newton");
    }
    // p -= J^{-1} v
    Vec2 step{(j.a22 * v.x - j.a12 * v.y) / det, (-j.a21 * v.x + j.a11 * v.y) / det};
    p = p - step;
    if (step.norm() > 1e6) {
      throw Error(errc::no_convergence, "find_saddle: Newton diverged");
    }
  }
  if (!converged && field(p).norm() >= tol) {
    throw Error(errc::no_convergence, "find_saddle: Newton did not reach tolerance");
  }

  Mat2 j = field.jacobian(p);
  double tr = j.trace(), det = j.det();
  double disc = tr * tr - 4.0 * det;
  if (det >= 0.0 || disc <= 0.0) {
    throw Error(errc::not_saddle, "find_saddle: eigenvalues do not straddle zero");
  }
  double root = std::sqrt(disc);
  double mu_u = 0.5 * (tr + root);
  double mu_s = 0.5 * (tr - root);

  auto eigenvector = [&](double mu) {
    // (J - mu I) v = 0; pick the numerically stronger row.
    Vec2 r1{j.a11 - mu, j.a12};
    Vec2 r2{j.a21, j.a22 - mu};
    Vec2 v = r1.norm() >= r2.norm() ? Vec2{-r1.y, r1.x} : Vec2{-r2.y, r2.x};
    v = v.unit();
    if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = -v;  // deterministic sign
    return v;
  };

  Saddle s;
  s.position = p;
  s.mu_unstable = mu_u;
  s.mu_stable = mu_s;
  s.v_unstable = eigenvector(mu_u);
  s.v_stable = eigenvector(mu_s);
  s.nu = -mu_s / mu_u;
  return s;
}

Trajectory trace_separatrix(const PlanarField& field, const Saddle& saddle, Branch branch,
                            const std::vector<Section>& sections, const TraceOptions& opts) {
  Vec2 dir;
  bool stable = false;
  switch (branch) {
    case Branch::unstable_plus: dir = saddle.v_unstable; break;
    case Branch::unstable_minus: dir = -saddle.v_unstable; break;
    case Branch::stable_plus: dir = saddle.v_stable; stable = true; break;
    case Branch::stable_minus: dir = -saddle.v_stable; stable = true; break;
  }
  Vec2 start = saddle.position + opts.seed_offset * dir;
  double t_end = stable ? -opts.t_max : opts.t_max;
  // Near the saddle the orbit scale is the seed offset; absolute error made
  // there is amplified by the unstable growth on the way out, so the
  // absolute tolerance must resolve the seed scale.
  IntegrateOptions iopts = opts.integ;
  iopts.abs_tol = std::min(iopts.abs_tol, opts.seed_offset * iopts.rel_tol);
  return integrate(field, start, t_end, sections, iopts);
}

std::optional<Crossing> first_crossing(const Trajectory& tr) {
  if (tr.crossings.empty()) return std::nullopt;
  return tr.crossings.front();
}

double splitting(const PlanarField& field, const SplittingAnchors& anchors, const Section& section,
                 const TraceOptions& opts) {
  TraceOptions topts = opts;
  topts.integ.record_trajectory = false;
  topts.integ.max_crossings = 1;
  Trajectory tu = trace_separatrix(field, anchors.unstable_saddle, anchors.unstable_branch,
                                   {section}, topts);
  Trajectory ts = trace_separatrix(field, anchors.stable_saddle, anchors.stable_branch, {section},
                                   topts);
  auto cu = first_crossing(tu);
  auto cs = first_crossing(ts);
  if (!cu || !cs) {
    throw Error(errc::missing_crossing,
                "splitting: a separatrix missed the section (loop broken too widely?)");
  }
  return cs->coordinate - cu->coordinate;
}

double loop_splitting(const PlanarField& field, const Saddle& saddle, Branch u, Branch s,
                      const Section& section, const TraceOptions& opts) {
  return splitting(field, SplittingAnchors{saddle, u, saddle, s}, section, opts);
}

// ------------------------------------------------------------------ loop ---

namespace {

Saddle problem_saddle(const LoopProblem& prob, double param) {
  return find_saddle(prob.family.with_param(prob.param_index, param), prob.saddle_seed);
}

}  // namespace

Section make_loop_section(const LoopProblem& prob, double param) {
  PlanarField field = prob.family.with_param(prob.param_index, param);
  Saddle s = find_saddle(field, prob.saddle_seed);
  double reach = prob.capture_reach;
  Section capture{{s.position.x + reach, s.position.y}, {1.0, 0.0}, std::abs(reach) - 0.05};
  TraceOptions topts = prob.trace;
  topts.integ.record_trajectory = false;
  topts.integ.max_crossings = 1;
  Trajectory arm = trace_separatrix(field, s, prob.unstable_branch, {capture}, topts);
  auto hit = first_crossing(arm);
  if (!hit) {
    throw Error(errc::missing_crossing, "loop section: the loop arm missed the capture line");
  }
  Vec2 base{s.position.x + reach + hit->coordinate, s.position.y};
  double interior = reach < 0.0 ? 1.0 : -1.0;  // back toward the saddle side
  double span = std::abs(s.position.x - base.x);
  return Section{base, {interior, 0.0}, prob.section_halfwidth_frac * span};
}

double splitting_at(const LoopProblem& prob, double param, const Section& section) {
  PlanarField field = prob.family.with_param(prob.param_index, param);
  Saddle s = find_saddle(field, prob.saddle_seed);
  return splitting(field, SplittingAnchors{s, prob.unstable_branch, s, prob.stable_branch},
                   section, prob.trace);
}

double splitting_at(const LoopProblem& prob, double param) {
  Section section = make_loop_section(prob, param);
  return splitting_at(prob, param, section);
}

double find_homoclinic(const LoopProblem& prob, double lo, double hi, double tol) {
  if (!(hi > lo)) throw Error(errc::bad_argument, "find_homoclinic: empty bracket");
  Section section = make_loop_section(prob, 0.5 * (lo + hi));
  double flo = splitting_at(prob, lo, section);
  double fhi = splitting_at(prob, hi, section);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) {
    throw Error(errc::no_bracket, "find_homoclinic: splitting does not change sign on bracket");
  }
  double fm = flo;
  double mid = lo;
  for (int i = 0; i < 200 && std::abs(fm) >= tol; ++i) {
    mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    fm = splitting_at(prob, mid, section);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  if (std::abs(fm) >= tol) {
    throw Error(errc::no_convergence, "find_homoclinic: bisection stalled above tolerance");
  }
  return mid;
}

// ------------------------------------------------------- flow sparkling ---

namespace {

struct WindingCount {
  int above = 0;         // crossings strictly inside (coordinate > coord_S)
  bool escaped = false;  // a crossing at or below coord_S was seen
  bool in_chart = true;  // stable hit still near the section center
  double coord_s = 0.0;
};

// Crossings of the marked point's orbit that stay on the winding side of
// the stable-manifold hit, truncated at the first escape.
WindingCount count_windings(const LoopProblem& prob, const Section& section, double param,
                            double p0_coord, int cap) {
  PlanarField field = prob.family.with_param(prob.param_index, param);
  Saddle s = find_saddle(field, prob.saddle_seed);

  TraceOptions topts = prob.trace;
  topts.integ.record_trajectory = false;
  topts.integ.max_crossings = 1;
  Trajectory ts = trace_separatrix(field, s, prob.stable_branch, {section}, topts);
  auto cs = first_crossing(ts);
  if (!cs) throw Error(errc::missing_crossing, "sparkling: stable separatrix missed the section");

  IntegrateOptions iopts = prob.trace.integ;
  iopts.record_trajectory = false;
  iopts.max_crossings = static_cast<std::size_t>(cap) + 2;
  Vec2 start = section.base + p0_coord * section.direction;
  Trajectory orbit = integrate(field, start, prob.trace.t_max * (cap + 2), {section}, iopts);

  WindingCount wc;
  wc.coord_s = cs->coordinate;
  // Once the stable hit wanders off toward the section edge the annulus
  // chart no longer represents the unbroken loop; counts out there are
  // meaningless.
  wc.in_chart = std::abs(wc.coord_s) <= 0.45 * section.halfwidth;
  // Windings decrease strictly toward the stable hit; a non-decreasing
  // crossing is an outside pass after escape, not a winding.
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& c : orbit.crossings) {
    if (c.coordinate > wc.coord_s && c.coordinate < prev) {
      prev = c.coordinate;
      ++wc.above;
      if (wc.above > cap) break;
    } else {
      wc.escaped = true;  // left through the gap (or the modeled annulus)
      break;
    }
  }
  return wc;
}

}  // namespace

FlowSparklingResult measure_sparkling_flow(const LoopProblem& prob, double param_homoclinic,
                                           double p0_frac, int n_lo, int n_hi, double tol) {
  if (n_lo < 1 || n_hi < n_lo) {
    throw Error(errc::bad_argument, "measure_sparkling_flow: bad index range");
  }
  if (n_hi > 8) {
    throw Error(errc::precision,
                "measure_sparkling_flow: double precision is exhausted beyond n ~ 6");
  }
  Section section = make_loop_section(prob, param_homoclinic);
  double p0_coord = p0_frac * section.halfwidth;

  FlowSparklingResult result;
  result.param_homoclinic = param_homoclinic;
  Saddle s0 = problem_saddle(prob, param_homoclinic);
  result.lambda = s0.nu;
  result.time_reversed = prob.time_reversed;

  // Which side of the homoclinic value opens the escape gap: only there
  // does the winding orbit ever cross at or below the stable-manifold hit.
  double scale = std::max(std::abs(param_homoclinic), 1e-3);
  int side = 0;
  double d0 = 1e-7 * scale;
  for (double d = d0; d < 0.5 * scale; d *= 4.0) {
    auto up = count_windings(prob, section, param_homoclinic + d, p0_coord, n_hi + 2);
    auto dn = count_windings(prob, section, param_homoclinic - d, p0_coord, n_hi + 2);
    if (up.escaped && !dn.escaped) { side = +1; break; }
    if (dn.escaped && !up.escaped) { side = -1; break; }
  }
  if (side == 0) {
    throw Error(errc::no_bracket, "measure_sparkling_flow: no escape side found near the loop");
  }

  // Far from the loop the broken geometry stops supporting the section
  // chart; for bracketing purposes such parameters count as fully escaped.
  auto windings = [&](double d, int cap) {
    try {
      auto wc = count_windings(prob, section, param_homoclinic + side * d, p0_coord, cap);
      return wc.in_chart ? wc.above : 0;
    } catch (const Error& e) {
      if (e.code() == errc::missing_crossing) return 0;
      throw;
    }
  };

  // The splitting responds linearly to the parameter near the loop; deep
  // sheets sit below the subtraction noise of two crossing coordinates and
  // are measured through the calibrated parameter distance instead.
  double d_cal = 1e-5 * scale;
  double slope = (splitting_at(prob, param_homoclinic + d_cal, section) -
                  splitting_at(prob, param_homoclinic - d_cal, section)) /
                 (2.0 * d_cal);

  for (int n = n_lo; n <= n_hi; ++n) {
    // Bracket the sheet: near the loop windings >= n, far side < n.
    double d_near = d0;
    while (windings(d_near, n) < n) {
      d_near *= 0.25;
      if (d_near < 1e-17 * scale) {
        throw Error(errc::precision, "measure_sparkling_flow: sheet below parameter resolution");
      }
    }
    double d_far = std::max(d_near * 4.0, d0);
    while (windings(d_far, n) >= n) {
      d_far *= 4.0;
      if (d_far > 10.0 * scale) {
        throw Error(errc::no_bracket, "measure_sparkling_flow: no escape within parameter range");
      }
    }
    for (int i = 0; i < 200; ++i) {
      double dm = 0.5 * (d_near + d_far);
      if (dm == d_near || dm == d_far) break;
      if (windings(dm, n) >= n) {
        d_near = dm;
      } else {
        d_far = dm;
      }
      if ((d_far - d_near) < tol * std::max(d_near, 1e-12)) break;
    }
    double param_n = param_homoclinic + side * 0.5 * (d_near + d_far);
    double d_n = 0.5 * (d_near + d_far);
    double eps_n = std::abs(slope) * d_n;
    if (eps_n > 1e-6) {
      eps_n = std::abs(splitting_at(prob, param_n, section));
    }
    result.points.push_back(FlowSparklingPoint{n, param_n, eps_n});
  }
  return result;
}

LoopProblem bt_loop_problem(double beta1_guess, double beta2) {
  LoopProblem prob{bt_family(beta1_guess, beta2).reversed(), 0, Vec2{}, Branch::unstable_minus,
                   Branch::stable_minus, -2.5, 0.35, true, TraceOptions{}};
  prob.saddle_seed = Vec2{0.5 * (-beta2 + std::sqrt(beta2 * beta2 - 4.0 * beta1_guess)), 0.0};
  return prob;
}

LoopProblem cubic_loop_problem() {
  LoopProblem prob{hamiltonian_cubic(0.0), 0, Vec2{0.05, 0.05}, Branch::unstable_plus,
                   Branch::stable_plus, 2.2, 0.35, false, TraceOptions{}};
  return prob;
}

// ----------------------------------------------------------- model fit ---

namespace {

double model_w(double lambda, double c, double p0, int n) {
  const long bits = 128;
  LoopReturnMap g(Real(lambda, bits), Real(c, bits), Real(0.0, bits), Real(p0, bits),
                  Real(1e6, bits));
  return solve_sparkling(g, n).eps.neg_ln.to_double();
}

}  // namespace

LoopModelFit fit_loop_model(double lambda, double eps2, double eps3) {
  if (!(eps2 > eps3 && eps3 > 0.0)) {
    throw Error(errc::bad_argument, "fit_loop_model: need eps2 > eps3 > 0");
  }
  double w2 = -std::log(eps2), w3 = -std::log(eps3);
  // For fixed c, w2(p0) is strictly decreasing over the contracting range
  // p0 < c^(-1/(lambda-1)); match w2 by bisection in p0, then walk c by
  // bisection on the w3 mismatch.
  auto p0_for = [&](double c) {
    double ceiling = 0.999 * std::pow(1.0 / c, 1.0 / (lambda - 1.0));
    double lo = 1e-9 * ceiling, hi = ceiling;
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      if (model_w(lambda, c, mid, 2) > w2) {
        lo = mid;
      } else {
        hi = mid;
      }
      if (hi - lo < 1e-14 * ceiling) break;
    }
    return 0.5 * (lo + hi);
  };
  auto w3_gap = [&](double c) { return model_w(lambda, c, p0_for(c), 3) - w3; };

  // The sheet recursion w3 ~ lambda w2 - ln(c) seeds the bracket.
  double c_seed = std::exp(lambda * w2 - w3);
  double c_lo = c_seed / 64.0, c_hi = c_seed * 64.0;
  double g_lo = w3_gap(c_lo), g_hi = w3_gap(c_hi);
  if ((g_lo < 0.0) == (g_hi < 0.0)) {
    throw Error(errc::no_bracket, "fit_loop_model: no coefficient matches both sheets");
  }
  for (int i = 0; i < 100; ++i) {
    double c_mid = std::sqrt(c_lo * c_hi);
    double g_mid = w3_gap(c_mid);
    if ((g_mid < 0.0) == (g_lo < 0.0)) {
      c_lo = c_mid;
      g_lo = g_mid;
    } else {
      c_hi = c_mid;
    }
    if (c_hi / c_lo < 1.0 + 1e-12) break;
  }
  double c = std::sqrt(c_lo * c_hi);
  return LoopModelFit{c, p0_for(c)};
}

double predict_sheet(double lambda, const LoopModelFit& fit, int n) {
  return std::exp(-model_w(lambda, fit.c, fit.p0, n));
}

}  // namespace pcy::flow
