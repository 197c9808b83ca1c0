#include "../include/polycycle.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "asymptotics.hpp"
#include "dulac.hpp"
#include "parallel.hpp"
#include "flow/glued.hpp"
#include "flow/saddle.hpp"
#include "models.hpp"
#include "real.hpp"

namespace {

thread_local std::string g_last_error;

pcy_status set_error(int code, const char* what) {
  g_last_error = what;
  return static_cast<pcy_status>(code);
}

template <typename F>
pcy_status guarded(F&& f) {
  try {
    f();
    return PCY_OK;
  } catch (const pcy::Error& e) {
    return set_error(e.code(), e.what());
  } catch (const std::exception& e) {
    return set_error(pcy::errc::internal, e.what());
  } catch (...) {
    return set_error(pcy::errc::internal, "unknown failure");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

pcy_status require_arg(bool ok, const char* msg) {
  if (ok) return PCY_OK;
  return set_error(pcy::errc::bad_argument, msg);
}

}  // namespace

struct pcy_dulac {
  pcy::DulacMap map;
};
struct pcy_loop_map {
  pcy::LoopReturnMap map;
};
struct pcy_table {
  pcy::SparklingTable table;
  long bits;
};
struct pcy_model {
  pcy::PolycycleModel model;
};
struct pcy_staircase {
  std::vector<pcy::StaircasePoint> points;
  long bits;
};
struct pcy_comparison {
  pcy::FamilyComparison cmp;
  std::vector<double> kappa;
};
struct pcy_diagram {
  std::vector<pcy::Curve> curves;
};
struct pcy_field {
  pcy::flow::PlanarField field;
};
struct pcy_trajectory {
  pcy::flow::Trajectory tr;
};
struct pcy_flow_sparkling {
  pcy::flow::FlowSparklingResult res;
};

extern "C" {

const char* pcy_version(void) { return "0.1.0"; }
const char* pcy_last_error(void) { return g_last_error.c_str(); }
void pcy_string_free(char* s) { std::free(s); }
void pcy_set_threads(int k) { pcy::worker_count().store(k < 1 ? 1 : k); }

/* ------------------------------------------------------------- dulac --- */

pcy_status pcy_dulac_create(double mu, double c, double x_max, long bits, pcy_dulac** out) {
  if (auto rc = require_arg(out != nullptr, "null output")) return rc;
  return guarded([&] {
    pcy::Real m(mu, bits), cc(c, bits), xm(x_max, bits);
    *out = new pcy_dulac{pcy::DulacMap(m, cc, xm, pcy::Real(0.0, bits))};
  });
}

void pcy_dulac_free(pcy_dulac* m) { delete m; }

pcy_status pcy_dulac_apply(const pcy_dulac* m, double x, double* y) {
  if (auto rc = require_arg(m && y, "null argument")) return rc;
  return guarded([&] { *y = m->map(pcy::Real(x, m->map.mu.bits())).to_double(); });
}

pcy_status pcy_dulac_compose(const pcy_dulac* first, const pcy_dulac* second, pcy_dulac** out) {
  if (auto rc = require_arg(first && second && out, "null argument")) return rc;
  return guarded([&] { *out = new pcy_dulac{pcy::compose(first->map, second->map)}; });
}

pcy_status pcy_dulac_params(const pcy_dulac* m, double* mu, double* c, double* x_max) {
  if (auto rc = require_arg(m != nullptr, "null map")) return rc;
  if (mu) *mu = m->map.mu.to_double();
  if (c) *c = m->map.c.to_double();
  if (x_max) *x_max = m->map.x_max.to_double();
  return PCY_OK;
}

/* --------------------------------------------------- loop return maps --- */

pcy_status pcy_loop_map_create(double lambda, double c, double p0, double y_max, double perturb,
                               long bits, pcy_loop_map** out) {
  if (auto rc = require_arg(out != nullptr, "null output")) return rc;
  return guarded([&] {
    *out = new pcy_loop_map{pcy::LoopReturnMap(pcy::Real(lambda, bits), pcy::Real(c, bits),
                                               pcy::Real(0.0, bits), pcy::Real(p0, bits),
                                               pcy::Real(y_max, bits),
                                               pcy::Real(perturb, bits))};
  });
}

void pcy_loop_map_free(pcy_loop_map* m) { delete m; }

pcy_status pcy_loop_iterate(const pcy_loop_map* m, double eps, double y, int n, double* value,
                            int* turns_done, int* escaped) {
  if (auto rc = require_arg(m && value && turns_done && escaped, "null argument")) return rc;
  return guarded([&] {
    long bits = m->map.bits();
    auto res = pcy::loop_iterate(m->map.with_eps(pcy::Real(eps, bits)), pcy::Real(y, bits), n);
    *value = res.value.to_double();
    *turns_done = res.turns_done;
    *escaped = res.escaped ? 1 : 0;
  });
}

pcy_status pcy_count_turns(const pcy_loop_map* m, double eps, int* n_out) {
  if (auto rc = require_arg(m && n_out, "null argument")) return rc;
  return guarded(
      [&] { *n_out = pcy::count_turns(m->map.with_eps(pcy::Real(eps, m->map.bits()))); });
}

pcy_status pcy_count_turns_log(const pcy_loop_map* m, double neg_ln_eps, int* n_out) {
  if (auto rc = require_arg(m && n_out, "null argument")) return rc;
  return guarded([&] {
    *n_out = pcy::count_turns(m->map, pcy::LogEps(pcy::Real(neg_ln_eps, m->map.bits())));
  });
}

pcy_status pcy_solve_sparkling(const pcy_loop_map* m, int n, double* neg_ln_eps) {
  if (auto rc = require_arg(m && neg_ln_eps, "null argument")) return rc;
  return guarded([&] { *neg_ln_eps = pcy::solve_sparkling(m->map, n).eps.neg_ln.to_double(); });
}

pcy_status pcy_format_eps(double neg_ln_eps, int digits, char** out) {
  if (auto rc = require_arg(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = dup_string(pcy::format_exp_neg(pcy::Real(neg_ln_eps, 64), digits)); });
}

pcy_status pcy_sparkling_table(const pcy_loop_map* m, int n_max, pcy_table** out) {
  if (auto rc = require_arg(m && out, "null argument")) return rc;
  return guarded([&] {
    *out = new pcy_table{pcy::sparkling_table(m->map, n_max), m->map.bits()};
  });
}

void pcy_table_free(pcy_table* t) { delete t; }
int pcy_table_size(const pcy_table* t) { return t ? static_cast<int>(t->table.entries.size()) : 0; }
int pcy_table_truncated(const pcy_table* t) { return t && t->table.truncated ? 1 : 0; }

pcy_status pcy_table_entry(const pcy_table* t, int i, int* n, double* neg_ln_eps) {
  if (auto rc = require_arg(t && i >= 0 && i < pcy_table_size(t), "index out of range")) return rc;
  const auto& e = t->table.entries[static_cast<size_t>(i)];
  if (n) *n = e.n;
  if (neg_ln_eps) *neg_ln_eps = e.eps.neg_ln.to_double();
  return PCY_OK;
}

pcy_status pcy_table_csv(const pcy_table* t, char** out) {
  if (auto rc = require_arg(t && out, "null argument")) return rc;
  return guarded([&] { *out = dup_string(pcy::sparkling_table_csv(t->table, t->bits)); });
}

/* ---------------------------------------------------- polycycle models --- */

pcy_status pcy_model_create(int variant, double lambda, double rho, double c_left,
                            double c_right, double c_bridge, double sigma, double p0, double q0,
                            double y_max, const double* eta, size_t eta_len, long bits,
                            pcy_model** out) {
  if (auto rc = require_arg(out != nullptr, "null output")) return rc;
  if (auto rc = require_arg(variant == PCY_GLASSES || variant == PCY_EARS, "unknown variant")) {
    return rc;
  }
  return guarded([&] {
    std::vector<pcy::Real> eta_v;
    for (size_t i = 0; i < eta_len; ++i) eta_v.emplace_back(eta[i], bits);
    pcy::LoopReturnMap left(pcy::Real(lambda, bits), pcy::Real(c_left, bits),
                            pcy::Real(0.0, bits), pcy::Real(p0, bits), pcy::Real(y_max, bits));
    pcy::PolycycleModel model(variant == PCY_GLASSES ? pcy::Variant::glasses : pcy::Variant::ears,
                              std::move(left), pcy::Real(rho, bits), pcy::Real(c_right, bits),
                              pcy::Real(q0, bits),
                              pcy::BridgeTransition{pcy::Real(c_bridge, bits),
                                                    pcy::Real(sigma, bits)},
                              std::move(eta_v));
    *out = new pcy_model{std::move(model)};
  });
}

void pcy_model_free(pcy_model* m) { delete m; }

pcy_status pcy_phi(double lambda, double rho, double* out) {
  if (auto rc = require_arg(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = pcy::phi(lambda, rho); });
}

pcy_status pcy_synchronize(const pcy_model* m, double neg_ln_eps, double* neg_ln_sigma,
                           double* neg_ln_delta) {
  if (auto rc = require_arg(m && neg_ln_delta, "null argument")) return rc;
  return guarded([&] {
    pcy::LogEps eps(pcy::Real(neg_ln_eps, m->model.left.bits()));
    if (m->model.variant == pcy::Variant::glasses) {
      *neg_ln_delta = pcy::synchronize_glasses(m->model, eps).neg_ln.to_double();
      if (neg_ln_sigma) *neg_ln_sigma = std::nan("");
    } else {
      auto s = pcy::synchronize_ears(m->model, eps);
      *neg_ln_delta = s.delta.neg_ln.to_double();
      if (neg_ln_sigma) *neg_ln_sigma = s.sigma.neg_ln.to_double();
    }
  });
}

pcy_status pcy_staircase_run(const pcy_model* m, int n_lo, int n_hi, pcy_staircase** out) {
  if (auto rc = require_arg(m && out, "null argument")) return rc;
  return guarded([&] {
    auto table = pcy::sparkling_table(m->model.left, n_hi + 1);
    auto eps_seq = pcy::bracket_midpoints(table, n_lo, n_hi);
    *out = new pcy_staircase{pcy::staircase(m->model, eps_seq), m->model.left.bits()};
  });
}

void pcy_staircase_free(pcy_staircase* s) { delete s; }
int pcy_staircase_size(const pcy_staircase* s) {
  return s ? static_cast<int>(s->points.size()) : 0;
}

pcy_status pcy_staircase_point(const pcy_staircase* s, int i, double* neg_ln_eps,
                               double* neg_ln_delta, int* n_left, int* m_right) {
  if (auto rc = require_arg(s && i >= 0 && i < pcy_staircase_size(s), "index out of range")) {
    return rc;
  }
  const auto& p = s->points[static_cast<size_t>(i)];
  if (neg_ln_eps) *neg_ln_eps = p.eps.neg_ln.to_double();
  if (neg_ln_delta) *neg_ln_delta = p.delta.neg_ln.to_double();
  if (n_left) *n_left = p.n_left;
  if (m_right) *m_right = p.m_right;
  return PCY_OK;
}

pcy_status pcy_staircase_csv(const pcy_staircase* s, char** out) {
  if (auto rc = require_arg(s && out, "null argument")) return rc;
  return guarded([&] { *out = dup_string(pcy::staircase_csv(s->points, s->bits)); });
}

pcy_status pcy_estimate_phi(const pcy_staircase* s, int window_lo, int window_hi,
                            double* phi_hat, double* residual) {
  if (auto rc = require_arg(s && phi_hat && residual, "null argument")) return rc;
  return guarded([&] {
    auto est = pcy::estimate_phi(s->points, static_cast<size_t>(window_lo),
                                 static_cast<size_t>(window_hi));
    *phi_hat = est.phi_hat;
    *residual = est.residual;
  });
}

pcy_status pcy_compare_families(const pcy_loop_map* a, const pcy_loop_map* b, int n_lo, int n_hi,
                                int index_shift, pcy_comparison** out) {
  if (auto rc = require_arg(a && b && out, "null argument")) return rc;
  return guarded([&] {
    auto ta = pcy::sparkling_table(a->map, n_hi);
    auto tb = pcy::sparkling_table(b->map, n_hi + std::max(0, index_shift));
    auto cmp = pcy::compare_families(ta, a->map.lambda, tb, b->map.lambda, n_lo, n_hi,
                                     index_shift);
    auto kappa = pcy::holder_profile(ta, tb, n_lo, n_hi, index_shift);
    *out = new pcy_comparison{std::move(cmp), std::move(kappa)};
  });
}

void pcy_comparison_free(pcy_comparison* c) { delete c; }
int pcy_comparison_size(const pcy_comparison* c) {
  return c ? static_cast<int>(c->cmp.n.size()) : 0;
}

pcy_status pcy_comparison_row(const pcy_comparison* c, int i, int* n, double* ratio,
                              double* difference, double* kappa) {
  if (auto rc = require_arg(c && i >= 0 && i < pcy_comparison_size(c), "index out of range")) {
    return rc;
  }
  size_t k = static_cast<size_t>(i);
  if (n) *n = c->cmp.n[k];
  if (ratio) *ratio = c->cmp.ratios[k];
  if (difference) *difference = c->cmp.differences[k];
  if (kappa) *kappa = c->kappa[k];
  return PCY_OK;
}

pcy_status pcy_comparison_ratio_limit(const pcy_comparison* c, double* value, double* halfwidth) {
  if (auto rc = require_arg(c && value && halfwidth, "null argument")) return rc;
  *value = c->cmp.ratio_limit.value;
  *halfwidth = c->cmp.ratio_limit.halfwidth;
  return PCY_OK;
}

pcy_status pcy_comparison_csv(const pcy_comparison* c, char** out) {
  if (auto rc = require_arg(c && out, "null argument")) return rc;
  return guarded([&] { *out = dup_string(pcy::comparison_csv(c->cmp, c->kappa)); });
}

/* ------------------------------------------------- bifurcation diagram --- */

pcy_status pcy_bifdiag(const pcy_model* m, int n_max, int m_max, double eps_min, double eps_max,
                       int samples, int draw_left, int draw_right, int draw_synchro,
                       pcy_diagram** out) {
  if (auto rc = require_arg(m && out, "null argument")) return rc;
  return guarded([&] {
    pcy::DiagramSpec spec;
    spec.n_max = n_max;
    spec.m_max = m_max;
    spec.eps_min = eps_min;
    spec.eps_max = eps_max;
    spec.samples = samples;
    spec.left_sheets = draw_left != 0;
    spec.right_sheets = draw_right != 0;
    spec.synchronizing = draw_synchro != 0;
    *out = new pcy_diagram{pcy::bifurcation_diagram(m->model, spec)};
  });
}

void pcy_diagram_free(pcy_diagram* d) { delete d; }
int pcy_diagram_curve_count(const pcy_diagram* d) {
  return d ? static_cast<int>(d->curves.size()) : 0;
}

pcy_status pcy_diagram_curve(const pcy_diagram* d, int i, const char** kind, int* index,
                             int* n_points) {
  if (auto rc = require_arg(d && i >= 0 && i < pcy_diagram_curve_count(d), "index out of range")) {
    return rc;
  }
  const auto& c = d->curves[static_cast<size_t>(i)];
  if (kind) {
    *kind = c.kind == pcy::CurveKind::left_sheet
                ? "left_sheet"
                : (c.kind == pcy::CurveKind::right_sheet ? "right_sheet" : "synchronizing");
  }
  if (index) *index = c.index;
  if (n_points) *n_points = static_cast<int>(c.points.size());
  return PCY_OK;
}

pcy_status pcy_diagram_point(const pcy_diagram* d, int i, int j, double* x, double* y) {
  if (auto rc = require_arg(d && i >= 0 && i < pcy_diagram_curve_count(d), "index out of range")) {
    return rc;
  }
  const auto& c = d->curves[static_cast<size_t>(i)];
  if (auto rc = require_arg(j >= 0 && j < static_cast<int>(c.points.size()), "point out of range")) {
    return rc;
  }
  if (x) *x = c.points[static_cast<size_t>(j)][0];
  if (y) *y = c.points[static_cast<size_t>(j)][1];
  return PCY_OK;
}

pcy_status pcy_diagram_json(const pcy_diagram* d, char** out) {
  if (auto rc = require_arg(d && out, "null argument")) return rc;
  return guarded([&] { *out = dup_string(pcy::curves_json(d->curves)); });
}

/* -------------------------------------------------------- asymptotics --- */

pcy_status pcy_linear_fit(const double* xs, const double* ys, size_t len, size_t window_lo,
                          size_t window_hi, pcy_fit* out) {
  if (auto rc = require_arg(xs && ys && out, "null argument")) return rc;
  return guarded([&] {
    auto fit = pcy::linear_fit(std::span(xs, len), std::span(ys, len), window_lo, window_hi);
    out->slope = fit.slope;
    out->intercept = fit.intercept;
    out->residual = fit.residual;
    out->window_lo = static_cast<int>(fit.window_lo);
    out->window_hi = static_cast<int>(fit.window_hi);
  });
}

pcy_status pcy_limit_estimate(const double* seq, size_t len, double* value, double* halfwidth) {
  if (auto rc = require_arg(seq && value && halfwidth, "null argument")) return rc;
  return guarded([&] {
    auto est = pcy::limit_estimate(std::span(seq, len));
    *value = est.value;
    *halfwidth = est.halfwidth;
  });
}

pcy_status pcy_boundedness_check(const double* seq, size_t len, size_t split, double threshold,
                                 int* growing, double* growth_factor) {
  if (auto rc = require_arg(seq && growing && growth_factor, "null argument")) return rc;
  return guarded([&] {
    auto res = pcy::boundedness_check(std::span(seq, len), split, threshold);
    *growing = res.verdict == pcy::Verdict::growing ? 1 : 0;
    *growth_factor = res.growth_factor;
  });
}

/* --------------------------------------------------------------- flow --- */

pcy_status pcy_field_bt(double beta1, double beta2, pcy_field** out) {
  if (auto rc = require_arg(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = new pcy_field{pcy::flow::bt_family(beta1, beta2)}; });
}

pcy_status pcy_field_cubic(double nu, pcy_field** out) {
  if (auto rc = require_arg(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = new pcy_field{pcy::flow::hamiltonian_cubic(nu)}; });
}

pcy_status pcy_field_linear(double a, double b, pcy_field** out) {
  if (auto rc = require_arg(out != nullptr, "null output")) return rc;
  return guarded([&] { *out = new pcy_field{pcy::flow::linear_field(a, b)}; });
}

pcy_status pcy_field_glued(const char* spec_json, pcy_field** out) {
  if (auto rc = require_arg(spec_json && out, "null argument")) return rc;
  return guarded([&] {
    pcy::flow::GluedGlasses g(pcy::flow::GluedSpec::from_json(spec_json));
    *out = new pcy_field{g.field()};
  });
}

pcy_status pcy_field_reversed(const pcy_field* f, pcy_field** out) {
  if (auto rc = require_arg(f && out, "null argument")) return rc;
  return guarded([&] { *out = new pcy_field{f->field.reversed()}; });
}

void pcy_field_free(pcy_field* f) { delete f; }

pcy_status pcy_field_eval(const pcy_field* f, double x, double y, double* vx, double* vy) {
  if (auto rc = require_arg(f && vx && vy, "null argument")) return rc;
  return guarded([&] {
    auto v = f->field(pcy::flow::Vec2{x, y});
    *vx = v.x;
    *vy = v.y;
  });
}

namespace {

void fill_saddle(const pcy::flow::Saddle& s, pcy_saddle_info* out) {
  out->x = s.position.x;
  out->y = s.position.y;
  out->mu_unstable = s.mu_unstable;
  out->mu_stable = s.mu_stable;
  out->vux = s.v_unstable.x;
  out->vuy = s.v_unstable.y;
  out->vsx = s.v_stable.x;
  out->vsy = s.v_stable.y;
  out->nu = s.nu;
}

}  // namespace

pcy_status pcy_find_saddle(const pcy_field* f, double seed_x, double seed_y,
                           pcy_saddle_info* out) {
  if (auto rc = require_arg(f && out, "null argument")) return rc;
  return guarded([&] {
    fill_saddle(pcy::flow::find_saddle(f->field, pcy::flow::Vec2{seed_x, seed_y}), out);
  });
}

pcy_status pcy_integrate(const pcy_field* f, double x0, double y0, double t_end,
                         const double* sections, size_t n_sections, double rel_tol,
                         double abs_tol, pcy_trajectory** out) {
  if (auto rc = require_arg(f && out && (n_sections == 0 || sections), "null argument")) return rc;
  return guarded([&] {
    std::vector<pcy::flow::Section> secs;
    for (size_t i = 0; i < n_sections; ++i) {
      const double* s = sections + 5 * i;
      secs.push_back(pcy::flow::Section{{s[0], s[1]},
                                        pcy::flow::Vec2{s[2], s[3]}.unit(), s[4]});
    }
    pcy::flow::IntegrateOptions opts;
    if (rel_tol > 0) opts.rel_tol = rel_tol;
    if (abs_tol > 0) opts.abs_tol = abs_tol;
    *out = new pcy_trajectory{pcy::flow::integrate(f->field, {x0, y0}, t_end, secs, opts)};
  });
}

void pcy_trajectory_free(pcy_trajectory* t) { delete t; }
size_t pcy_trajectory_size(const pcy_trajectory* t) { return t ? t->tr.times.size() : 0; }

pcy_status pcy_trajectory_point(const pcy_trajectory* t, size_t i, double* time, double* x,
                                double* y) {
  if (auto rc = require_arg(t && i < pcy_trajectory_size(t), "index out of range")) return rc;
  if (time) *time = t->tr.times[i];
  if (x) *x = t->tr.points[i].x;
  if (y) *y = t->tr.points[i].y;
  return PCY_OK;
}

size_t pcy_trajectory_crossing_count(const pcy_trajectory* t) {
  return t ? t->tr.crossings.size() : 0;
}

pcy_status pcy_trajectory_crossing(const pcy_trajectory* t, size_t i, double* time,
                                   double* coordinate, int* direction, int* section_index) {
  if (auto rc = require_arg(t && i < pcy_trajectory_crossing_count(t), "index out of range")) {
    return rc;
  }
  const auto& c = t->tr.crossings[i];
  if (time) *time = c.time;
  if (coordinate) *coordinate = c.coordinate;
  if (direction) *direction = c.direction_of_crossing;
  if (section_index) *section_index = c.section_index;
  return PCY_OK;
}

pcy_status pcy_trajectory_csv(const pcy_trajectory* t, char** out) {
  if (auto rc = require_arg(t && out, "null argument")) return rc;
  return guarded([&] { *out = dup_string(pcy::flow::trajectory_csv(t->tr)); });
}

pcy_status pcy_crossings_csv(const pcy_trajectory* t, char** out) {
  if (auto rc = require_arg(t && out, "null argument")) return rc;
  return guarded([&] { *out = dup_string(pcy::flow::crossings_csv(t->tr)); });
}

/* -------------------------------------------------- loop experiments --- */

pcy_status pcy_bt_homoclinic(double beta2, double beta1_lo, double beta1_hi, double tol,
                             double* beta1, double* splitting_residual, pcy_saddle_info* saddle,
                             int* time_reversed) {
  if (auto rc = require_arg(beta1 != nullptr, "null output")) return rc;
  return guarded([&] {
    auto prob = pcy::flow::bt_loop_problem(0.5 * (beta1_lo + beta1_hi), beta2);
    double b1 = pcy::flow::find_homoclinic(prob, beta1_lo, beta1_hi, tol);
    *beta1 = b1;
    if (splitting_residual) *splitting_residual = pcy::flow::splitting_at(prob, b1);
    if (saddle) {
      auto s = pcy::flow::find_saddle(prob.family.with_param(0, b1), prob.saddle_seed);
      fill_saddle(s, saddle);
    }
    if (time_reversed) *time_reversed = prob.time_reversed ? 1 : 0;
  });
}

pcy_status pcy_bt_sparkling(double beta2, double beta1_hom, double p0_frac, int n_lo, int n_hi,
                            double tol, pcy_flow_sparkling** out) {
  if (auto rc = require_arg(out != nullptr, "null output")) return rc;
  return guarded([&] {
    auto prob = pcy::flow::bt_loop_problem(beta1_hom, beta2);
    *out = new pcy_flow_sparkling{
        pcy::flow::measure_sparkling_flow(prob, beta1_hom, p0_frac, n_lo, n_hi, tol)};
  });
}

void pcy_flow_sparkling_free(pcy_flow_sparkling* s) { delete s; }
int pcy_flow_sparkling_size(const pcy_flow_sparkling* s) {
  return s ? static_cast<int>(s->res.points.size()) : 0;
}

pcy_status pcy_flow_sparkling_point(const pcy_flow_sparkling* s, int i, int* n, double* param,
                                    double* eps) {
  if (auto rc = require_arg(s && i >= 0 && i < pcy_flow_sparkling_size(s), "index out of range")) {
    return rc;
  }
  const auto& p = s->res.points[static_cast<size_t>(i)];
  if (n) *n = p.n;
  if (param) *param = p.param;
  if (eps) *eps = p.eps;
  return PCY_OK;
}

pcy_status pcy_flow_sparkling_lambda(const pcy_flow_sparkling* s, double* lambda,
                                     int* time_reversed) {
  if (auto rc = require_arg(s && lambda, "null argument")) return rc;
  *lambda = s->res.lambda;
  if (time_reversed) *time_reversed = s->res.time_reversed ? 1 : 0;
  return PCY_OK;
}

pcy_status pcy_fit_loop_model(double lambda, double eps2, double eps3, double* c, double* p0) {
  if (auto rc = require_arg(c && p0, "null argument")) return rc;
  return guarded([&] {
    auto fit = pcy::flow::fit_loop_model(lambda, eps2, eps3);
    *c = fit.c;
    *p0 = fit.p0;
  });
}

pcy_status pcy_predict_sheet(double lambda, double c, double p0, int n, double* eps) {
  if (auto rc = require_arg(eps != nullptr, "null output")) return rc;
  return guarded(
      [&] { *eps = pcy::flow::predict_sheet(lambda, pcy::flow::LoopModelFit{c, p0}, n); });
}

/* ------------------------------------------------------- glued field --- */

pcy_status pcy_glued_check(const char* spec_json, pcy_glued_report* out) {
  if (auto rc = require_arg(spec_json && out, "null argument")) return rc;
  return guarded([&] {
    auto rep = pcy::flow::glued_check(pcy::flow::GluedSpec::from_json(spec_json));
    out->eps_measured = rep.eps_measured;
    out->sigma_measured = rep.sigma_measured;
    out->delta_measured = rep.delta_measured;
    out->eig_err_l = rep.eig_err_l;
    out->eig_err_r = rep.eig_err_r;
  });
}

pcy_status pcy_glued_default_spec(char** json_out) {
  if (auto rc = require_arg(json_out != nullptr, "null output")) return rc;
  return guarded([&] { *json_out = dup_string(pcy::flow::GluedSpec{}.to_json()); });
}

}  // extern "C"
