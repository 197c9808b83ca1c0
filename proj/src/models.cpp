#include "models.hpp"

#include <cmath>
#include <mutex>
#include <optional>
#include <sstream>

#include "parallel.hpp"

namespace pcy {

namespace {

void require(bool cond, int code, const char* msg) {
  if (!cond) throw Error(code, msg);
}

}  // namespace

PolycycleModel::PolycycleModel(Variant v, LoopReturnMap left_, Real rho_, Real right_c, Real q0,
                               BridgeTransition bridge_, std::vector<Real> eta_)
    : variant(v),
      left(std::move(left_)),
      right_rev(reversed_loop(rho_, right_c, q0, left.y_max)),
      rho(std::move(rho_)),
      bridge(std::move(bridge_)),
      eta(std::move(eta_)) {
  require(rho > 0.0 && rho < 1.0, errc::domain, "polycycle model: rho must lie in (0, 1)");
}

LoopReturnMap reversed_loop(const Real& rho, const Real& c, const Real& q0, const Real& y_max) {
  require(rho > 0.0 && rho < 1.0, errc::domain, "reversed_loop: rho must lie in (0, 1)");
  Real one(1.0, rho.bits());
  return LoopReturnMap(one / rho, c, Real(0.0, rho.bits()), q0, y_max);
}

Real phi(const Real& lambda, const Real& rho) {
  require(lambda > 1.0, errc::domain, "phi: lambda must exceed 1");
  require(rho > 0.0 && rho < 1.0, errc::domain, "phi: rho must lie in (0, 1)");
  return -log(rho) / log(lambda);
}

double phi(double lambda, double rho) {
  if (!(lambda > 1.0) || !(rho > 0.0 && rho < 1.0)) {
    throw Error(errc::domain, "phi: need lambda > 1 and rho in (0, 1)");
  }
  return -std::log(rho) / std::log(lambda);
}

Real glasses_c_delta(const PolycycleModel& m) {
  long bits = m.left.bits();
  Real big(1e30, bits);  // domain bounds are irrelevant for the coefficient
  DulacMap left_saddle(m.left.lambda, m.left.c, big);
  DulacMap bridge_map(Real(1.0, bits), m.bridge.c_b, big);
  DulacMap right_saddle(m.rho, m.right_rev.c, big);
  DulacMap composite = compose(compose(left_saddle, bridge_map), right_saddle);
  return composite.c;
}

LogEps synchronize_glasses(const PolycycleModel& m, const LogEps& eps) {
  require(m.variant == Variant::glasses, errc::bad_argument,
          "synchronize_glasses: model is not the glasses variant");
  require(m.bridge.sigma.is_zero(), errc::domain,
          "synchronize_glasses: the inner connection requires sigma = 0");
  Real c_delta = glasses_c_delta(m);
  // ln delta = ln c_delta + lambda*rho * ln eps
  Real w = m.left.lambda * m.rho * eps.neg_ln - log(c_delta);
  return LogEps(w);
}

Real synchronize_glasses(const PolycycleModel& m, const Real& eps) {
  require(eps > 0.0, errc::domain, "synchronize_glasses: eps must be positive");
  require(eps <= m.left.y_max, errc::domain,
          "synchronize_glasses: eps beyond the outer section bound");
  auto d = synchronize_glasses(m, LogEps::from_value(eps));
  auto v = d.value();
  if (!v) throw Error(errc::precision, "synchronize_glasses: delta underflows this precision");
  return *v;
}

EarsSync synchronize_ears(const PolycycleModel& m, const LogEps& eps) {
  require(m.variant == Variant::ears, errc::bad_argument,
          "synchronize_ears: model is not the ears variant");
  // sigma = c1 eps^lambda with c1 = c_b * c_L, then delta = c2 sigma^rho
  // with c2 the right saddle coefficient.
  Real c1 = m.bridge.c_b * m.left.c;
  Real c2 = m.right_rev.c;
  Real w_sigma = m.left.lambda * eps.neg_ln - log(c1);
  Real w_delta = m.rho * w_sigma - log(c2);
  return EarsSync{LogEps(w_sigma), LogEps(w_delta)};
}

std::pair<Real, Real> synchronize_ears(const PolycycleModel& m, const Real& eps) {
  require(eps > 0.0, errc::domain, "synchronize_ears: eps must be positive");
  require(eps <= m.left.y_max, errc::domain, "synchronize_ears: eps beyond the outer section bound");
  auto s = synchronize_ears(m, LogEps::from_value(eps));
  auto sv = s.sigma.value();
  auto dv = s.delta.value();
  if (!sv || !dv) throw Error(errc::precision, "synchronize_ears: result underflows this precision");
  return {*sv, *dv};
}

std::vector<StaircasePoint> staircase(const PolycycleModel& m, const std::vector<LogEps>& eps_seq,
                                      TurnCountOptions opts) {
  // Points are independent tasks; slots are index-addressed so the worker
  // count never changes the result.
  std::vector<std::optional<StaircasePoint>> slots(eps_seq.size());
  std::exception_ptr failure;
  std::mutex failure_mu;
  parallel_for(eps_seq.size(), [&](std::size_t i) {
    const auto& eps = eps_seq[i];
    try {
      LogEps delta = m.variant == Variant::glasses ? synchronize_glasses(m, eps)
                                                   : synchronize_ears(m, eps).delta;
      int n_left = count_turns(m.left, eps, opts);
      int m_right = count_turns(m.right_rev, delta, opts);
      slots[i] = StaircasePoint{eps, delta, n_left, m_right};
    } catch (const Error& e) {
      if (e.code() != errc::nontermination) {
        std::scoped_lock lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
      // cap reached: leave the slot empty; the sweep truncates there
    }
  });
  if (failure) std::rethrow_exception(failure);
  std::vector<StaircasePoint> out;
  out.reserve(eps_seq.size());
  for (auto& s : slots) {
    if (!s) break;  // truncate at the first capped point
    out.push_back(std::move(*s));
  }
  return out;
}

std::vector<LogEps> bracket_midpoints(const SparklingTable& table, int n_lo, int n_hi) {
  require(n_lo >= 1 && n_hi >= n_lo, errc::bad_argument, "bracket_midpoints: bad index range");
  std::vector<LogEps> out;
  out.reserve(static_cast<size_t>(n_hi - n_lo + 1));
  for (int n = n_lo; n <= n_hi; ++n) {
    const Real& w_n = table.eps_at(n).neg_ln;
    const Real& w_next = table.eps_at(n + 1).neg_ln;
    out.push_back(LogEps((w_n + w_next) * 0.5));
  }
  return out;
}

PhiEstimate estimate_phi(const std::vector<StaircasePoint>& points, std::size_t window_lo,
                         std::size_t window_hi) {
  require(window_hi < points.size() && window_lo <= window_hi, errc::bad_argument,
          "estimate_phi: window out of range");
  require(window_hi - window_lo + 1 >= 5, errc::bad_argument,
          "estimate_phi: need at least 5 staircase points");
  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (const auto& p : points) {
    xs.push_back(static_cast<double>(p.m_right));
    ys.push_back(static_cast<double>(p.n_left));
  }
  for (std::size_t i = window_lo; i < window_hi; ++i) {
    require(points[i + 1].n_left > points[i].n_left, errc::bad_argument,
            "estimate_phi: n_left must be strictly increasing over the window");
  }
  double x_min = xs[window_lo], x_max = xs[window_lo];
  for (std::size_t i = window_lo; i <= window_hi; ++i) {
    x_min = std::min(x_min, xs[i]);
    x_max = std::max(x_max, xs[i]);
  }
  if (x_max == x_min) {
    throw Error(errc::domain, "estimate_phi: degenerate fit (all m_right equal)");
  }
  FitResult fit = linear_fit(xs, ys, window_lo, window_hi);
  PhiEstimate est;
  est.fit = fit;
  est.phi_hat = fit.slope;
  est.residual = fit.residual / (0.5 * (x_max - x_min));
  return est;
}

FamilyComparison compare_families(const SparklingTable& a, const Real& lambda_a,
                                  const SparklingTable& b, const Real& lambda_b, int n_lo,
                                  int n_hi, int shift) {
  require(n_lo >= 1 && n_hi >= n_lo, errc::bad_argument, "compare_families: bad index range");
  FamilyComparison cmp;
  cmp.index_shift = shift;
  double ln_la = log(lambda_a).to_double();
  double ln_lb = log(lambda_b).to_double();
  for (int n = n_lo; n <= n_hi; ++n) {
    const Real& w_a = a.eps_at(n).neg_ln;
    const Real& w_b = b.eps_at(n + shift).neg_ln;
    double lw_a = log(w_a).to_double();
    double lw_b = log(w_b).to_double();
    cmp.n.push_back(n);
    cmp.ratios.push_back(lw_b / lw_a);
    cmp.differences.push_back(lw_b / ln_lb - lw_a / ln_la);
  }
  cmp.ratio_limit = limit_estimate(cmp.ratios);
  return cmp;
}

std::vector<double> holder_profile(const SparklingTable& a, const SparklingTable& b, int n_lo,
                                   int n_hi, int shift) {
  require(n_lo >= 1 && n_hi >= n_lo, errc::bad_argument, "holder_profile: bad index range");
  std::vector<double> kappa;
  kappa.reserve(static_cast<size_t>(n_hi - n_lo + 1));
  for (int n = n_lo; n <= n_hi; ++n) {
    const Real& w_a = a.eps_at(n).neg_ln;
    const Real& w_b = b.eps_at(n + shift).neg_ln;
    kappa.push_back((w_b / w_a).to_double());
  }
  return kappa;
}

std::string comparison_csv(const FamilyComparison& cmp, const std::vector<double>& kappa) {
  require(kappa.size() == cmp.n.size(), errc::bad_argument,
          "comparison_csv: kappa length mismatch");
  std::ostringstream out;
  out.precision(17);
  out << "n,ratio,difference,kappa\n";
  for (std::size_t i = 0; i < cmp.n.size(); ++i) {
    out << cmp.n[i] << ',' << cmp.ratios[i] << ',' << cmp.differences[i] << ',' << kappa[i]
        << '\n';
  }
  return out.str();
}

std::string staircase_csv(const std::vector<StaircasePoint>& points, long bits) {
  std::ostringstream out;
  out << "eps,delta,n_left,m_right\n";
  for (const auto& p : points) {
    out << format_exp_neg(p.eps.neg_ln, digits_for_neg_log(p.eps.neg_ln, bits)) << ','
        << format_exp_neg(p.delta.neg_ln, digits_for_neg_log(p.delta.neg_ln, bits)) << ','
        << p.n_left << ',' << p.m_right << '\n';
  }
  return out.str();
}

// --------------------------------------------------------------- diagram ---

namespace {

// Deepest sheet index whose eps still lands inside double range.
int clamp_index_to_double(const SparklingTable& table, int wanted) {
  int best = 0;
  for (const auto& e : table.entries) {
    if (e.n > wanted) break;
    if (e.eps.neg_ln.to_double() < 700.0) best = e.n;
  }
  return best;
}

}  // namespace

std::vector<Curve> bifurcation_diagram(const PolycycleModel& m, const DiagramSpec& spec) {
  require(m.variant == Variant::glasses, errc::bad_argument,
          "bifurcation_diagram: glasses variant only");
  require(m.bridge.sigma.is_zero(), errc::domain, "bifurcation_diagram: sigma = 0 slice only");
  require(spec.samples >= 2, errc::bad_argument, "bifurcation_diagram: need at least 2 samples");
  require(spec.eps_min > 0.0 && spec.eps_min < spec.eps_max, errc::bad_argument,
          "bifurcation_diagram: bad eps range");

  std::vector<Curve> curves;
  SparklingTable left_tbl = sparkling_table(m.left, spec.n_max);
  SparklingTable right_tbl = sparkling_table(m.right_rev, spec.m_max);
  double w_at_eps_min = synchronize_glasses(m, LogEps::from_value(Real(spec.eps_min, 64))).neg_ln.to_double();
  double w_at_eps_max = synchronize_glasses(m, LogEps::from_value(Real(spec.eps_max, 64))).neg_ln.to_double();
  double d_lo = std::exp(-std::min(w_at_eps_min, 700.0));
  double d_hi = std::exp(-w_at_eps_max);

  if (spec.left_sheets) {
    int top = clamp_index_to_double(left_tbl, spec.n_max);
    for (int n = 1; n <= top; ++n) {
      double eps_n = std::exp(-left_tbl.eps_at(n).neg_ln.to_double());
      Curve c{CurveKind::left_sheet, n, {}};
      c.points.push_back({eps_n, d_lo});
      c.points.push_back({eps_n, d_hi});
      curves.push_back(std::move(c));
    }
  }
  if (spec.right_sheets) {
    int top = clamp_index_to_double(right_tbl, spec.m_max);
    for (int mi = 1; mi <= top; ++mi) {
      double delta_m = std::exp(-right_tbl.eps_at(mi).neg_ln.to_double());
      Curve c{CurveKind::right_sheet, mi, {}};
      c.points.push_back({spec.eps_min, delta_m});
      c.points.push_back({spec.eps_max, delta_m});
      curves.push_back(std::move(c));
    }
  }
  if (spec.synchronizing) {
    Curve c{CurveKind::synchronizing, 0, {}};
    double l0 = std::log(spec.eps_min), l1 = std::log(spec.eps_max);
    for (int i = 0; i < spec.samples; ++i) {
      double t = static_cast<double>(i) / static_cast<double>(spec.samples - 1);
      double eps = std::exp(l0 + (l1 - l0) * t);
      double wd = synchronize_glasses(m, LogEps::from_value(Real(eps, 64))).neg_ln.to_double();
      if (wd > 700.0) continue;  // below double range; drop the sample
      c.points.push_back({eps, std::exp(-wd)});
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

std::string curves_json(const std::vector<Curve>& curves) {
  std::ostringstream out;
  out.precision(17);
  out << "[";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const char* kind = c.kind == CurveKind::left_sheet
                           ? "left_sheet"
                           : (c.kind == CurveKind::right_sheet ? "right_sheet" : "synchronizing");
    out << (i ? "," : "") << "{\"kind\":\"" << kind << "\",\"index\":" << c.index
        << ",\"points\":[";
    for (std::size_t j = 0; j < c.points.size(); ++j) {
      out << (j ? "," : "") << '[' << c.points[j][0] << ',' << c.points[j][1] << ']';
    }
    out << "]}";
  }
  out << "]";
  return out.str();
}

}  // namespace pcy
