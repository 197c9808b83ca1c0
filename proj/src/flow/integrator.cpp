#include "integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "../real.hpp"

namespace pcy::flow {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Error weights (5th minus embedded 4th order solution).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights (Hairer's contd5).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

struct DenseSegment {
  double t0 = 0.0, h = 0.0;
  Vec2 y0, c1, c2, c3, c4;

  Vec2 eval(double t) const {
    double th = (t - t0) / h;
    double th1 = 1.0 - th;
    // y0 + th*(c1 + th1*(c2 + th*(c3 + th1*c4)))
    Vec2 inner = c3 + th1 * c4;
    inner = c2 + th * inner;
    inner = c1 + th1 * inner;
    return y0 + th * inner;
  }
};

struct StepResult {
  Vec2 y1;
  Vec2 k7;  // derivative at the step end (FSAL)
  double err = 0.0;
  DenseSegment dense;
};

StepResult dp5_step(const PlanarField& f, double t, Vec2 y, Vec2 k1, double h,
                    const IntegrateOptions& opts) {
  Vec2 k2 = f(y + h * (a21 * k1));
  Vec2 k3 = f(y + h * (a31 * k1 + a32 * k2));
  Vec2 k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  Vec2 k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  Vec2 k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  Vec2 y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  Vec2 k7 = f(y1);
  Vec2 errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

  auto comp = [&](double e, double y0c, double y1c) {
    double sk = opts.abs_tol + opts.rel_tol * std::max(std::abs(y0c), std::abs(y1c));
    double q = e / sk;
    return q * q;
  };
  double err = std::sqrt(0.5 * (comp(errv.x, y.x, y1.x) + comp(errv.y, y.y, y1.y)));

  DenseSegment seg;
  seg.t0 = t;
  seg.h = h;
  seg.y0 = y;
  Vec2 dy = y1 - y;
  seg.c1 = dy;
  seg.c2 = h * k1 - dy;
  seg.c3 = dy - h * k7 - seg.c2;
  seg.c4 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
  return StepResult{y1, k7, err, seg};
}

// Root of the section-plane signature on one dense segment by bisection;
// g0 and g1 must straddle zero.
double locate_crossing(const DenseSegment& seg, const Section& s, double ta, double tb,
                       double ga, double event_tol) {
  for (int i = 0; i < 200; ++i) {
    double tm = 0.5 * (ta + tb);
    double gm = s.offset(seg.eval(tm));
    if (std::abs(gm) < event_tol || std::abs(tb - ta) < 1e-15 * std::max(1.0, std::abs(tb))) {
      return tm;
    }
    if ((ga < 0.0) == (gm < 0.0)) {
      ta = tm;
      ga = gm;
    } else {
      tb = tm;
    }
  }
  return 0.5 * (ta + tb);
}

}  // namespace

Trajectory integrate(const PlanarField& field, Vec2 x0, double t_end,
                     const std::vector<Section>& sections, const IntegrateOptions& opts) {
  if (opts.rel_tol <= 0.0 || opts.abs_tol <= 0.0) {
    throw Error(errc::bad_argument, "integrate: tolerances must be positive");
  }
  Trajectory tr;
  double dir = t_end >= 0.0 ? 1.0 : -1.0;
  double t = 0.0;
  Vec2 y = x0;
  Vec2 k1 = field(y);
  double h = dir * std::min(opts.max_step, 1e-4 * (1.0 + y.norm()) / std::max(k1.norm(), 1e-8));

  if (opts.record_trajectory) {
    tr.times.push_back(t);
    tr.points.push_back(y);
  }

  std::vector<double> g_prev(sections.size());
  for (std::size_t i = 0; i < sections.size(); ++i) {
    g_prev[i] = sections[i].offset(y);
    if (g_prev[i] == 0.0) {
      // Departing from the section itself: take the outgoing side so the
      // launch is not recorded as a crossing.
      double gv = (dir * k1).dot(sections[i].direction.perp());
      g_prev[i] = gv >= 0.0 ? 1e-300 : -1e-300;
    }
  }

  std::size_t steps = 0;
  while (dir * (t_end - t) > 0.0) {
    if (++steps > opts.max_steps) {
      tr.stop = StopReason::step_count;
      break;
    }
    if (dir * (t + h) > dir * t_end) h = t_end - t;
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) {
      throw Error(errc::no_convergence, "integrate: step size underflow (near-singular field)");
    }
    StepResult st = dp5_step(field, t, y, k1, h, opts);
    if (st.err > 1.0) {
      double f = std::max(0.2, 0.9 * std::pow(st.err, -0.2));
      h *= f;
      continue;
    }
    double t_new = t + h;
    // Section events on the accepted segment; probe interior samples so
    // closely spaced double crossings within one step are still seen.
    for (std::size_t si = 0; si < sections.size(); ++si) {
      const Section& s = sections[si];
      constexpr int probes = 4;
      double ta = t;
      double ga = g_prev[si];
      for (int q = 1; q <= probes; ++q) {
        double tb = t + h * (static_cast<double>(q) / probes);
        double gb = s.offset(st.dense.eval(tb));
        if ((ga < 0.0) != (gb < 0.0)) {
          double tc = locate_crossing(st.dense, s, ta, tb, ga, opts.event_tol);
          Vec2 pc = st.dense.eval(tc);
          double coord = s.coordinate(pc);
          if (std::abs(coord) <= s.halfwidth) {
            Vec2 vel = field(pc);
            int cross_dir = vel.dot(s.direction.perp()) >= 0.0 ? +1 : -1;
            tr.crossings.push_back(Crossing{tc, coord, cross_dir, static_cast<int>(si)});
          }
        }
        ta = tb;
        ga = gb;
      }
      g_prev[si] = ga;
    }
    t = t_new;
    y = st.y1;
    k1 = st.k7;
    if (opts.record_trajectory) {
      tr.times.push_back(t);
      tr.points.push_back(y);
    }
    if (opts.max_crossings > 0 && tr.crossings.size() >= opts.max_crossings) {
      tr.stop = StopReason::crossing_count;
      break;
    }
    if (y.x < opts.box_xmin || y.x > opts.box_xmax || y.y < opts.box_ymin ||
        y.y > opts.box_ymax) {
      tr.stop = StopReason::box_exit;
      break;
    }
    double f = st.err <= 1e-30 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(st.err, -0.2)));
    h *= f;
    if (std::abs(h) > opts.max_step) h = dir * opts.max_step;
  }

  std::sort(tr.crossings.begin(), tr.crossings.end(), [dir](const Crossing& a, const Crossing& b) {
    return dir * a.time < dir * b.time;
  });
  tr.t_end = t;
  tr.final_point = y;
  return tr;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream out;
  out.precision(17);
  out << "t,x,y\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    out << tr.times[i] << ',' << tr.points[i].x << ',' << tr.points[i].y << '\n';
  }
  return out.str();
}

std::string crossings_csv(const Trajectory& tr) {
  std::ostringstream out;
  out.precision(17);
  out << "t,coord,dir\n";
  for (const auto& c : tr.crossings) {
    out << c.time << ',' << c.coordinate << ',' << c.direction_of_crossing << '\n';
  }
  return out.str();
}

}  // namespace pcy::flow
