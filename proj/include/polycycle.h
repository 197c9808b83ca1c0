/* polycycle: saddle-loop return maps, sparkling-connection solving, polycycle
 * synchronization, and planar-flow validation, behind a C interface.
 *
 * Conventions:
 *  - all functions return pcy_status; outputs go through pointers;
 *  - on failure pcy_last_error() carries a thread-local message;
 *  - splitting values are passed in the log chart as neg_ln = -ln(eps)
 *    wherever they can be too small for doubles (they underflow every
 *    binary format once the turn count passes ~15);
 *  - strings returned through char** are heap-allocated; release them with
 *    pcy_string_free().
 */
#ifndef POLYCYCLE_H
#define POLYCYCLE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pcy_status {
  PCY_OK = 0,
  PCY_ERR_DOMAIN = 1,
  PCY_ERR_PRECISION = 2,
  PCY_ERR_EXISTENCE = 3,
  PCY_ERR_NONTERMINATION = 4,
  PCY_ERR_OVERFLOW = 5,
  PCY_ERR_NO_BRACKET = 6,
  PCY_ERR_NO_CONVERGENCE = 7,
  PCY_ERR_NOT_SADDLE = 8,
  PCY_ERR_MISSING_CROSSING = 9,
  PCY_ERR_GEOMETRY = 10,
  PCY_ERR_BAD_ARGUMENT = 11,
  PCY_ERR_INTERNAL = 12
} pcy_status;

const char* pcy_version(void);
const char* pcy_last_error(void);
void pcy_string_free(char* s);

/* Worker count for parallel sweeps (staircases etc.). Outputs never depend
 * on it; default 1. */
void pcy_set_threads(int k);

/* ------------------------------------------------------------- dulac --- */

typedef struct pcy_dulac pcy_dulac;

pcy_status pcy_dulac_create(double mu, double c, double x_max, long bits, pcy_dulac** out);
void pcy_dulac_free(pcy_dulac* m);
pcy_status pcy_dulac_apply(const pcy_dulac* m, double x, double* y);
pcy_status pcy_dulac_compose(const pcy_dulac* first, const pcy_dulac* second, pcy_dulac** out);
pcy_status pcy_dulac_params(const pcy_dulac* m, double* mu, double* c, double* x_max);

/* --------------------------------------------------- loop return maps --- */

typedef struct pcy_loop_map pcy_loop_map;

/* g_eps(y) = c * y^lambda * (1 + perturb*y) - eps on (0, y_max]; p0 is the
 * winding entry coordinate. bits >= 53 selects the working precision. */
pcy_status pcy_loop_map_create(double lambda, double c, double p0, double y_max, double perturb,
                               long bits, pcy_loop_map** out);
void pcy_loop_map_free(pcy_loop_map* m);

pcy_status pcy_loop_iterate(const pcy_loop_map* m, double eps, double y, int n, double* value,
                            int* turns_done, int* escaped);
pcy_status pcy_count_turns(const pcy_loop_map* m, double eps, int* n_out);
pcy_status pcy_count_turns_log(const pcy_loop_map* m, double neg_ln_eps, int* n_out);
/* Unique eps_n > 0 with g^n(p0) = 0, as neg_ln = -ln(eps_n). */
pcy_status pcy_solve_sparkling(const pcy_loop_map* m, int n, double* neg_ln_eps);

/* eps = exp(-neg_ln_eps) in scientific notation, exact in the log chart. */
pcy_status pcy_format_eps(double neg_ln_eps, int digits, char** out);

typedef struct pcy_table pcy_table;

pcy_status pcy_sparkling_table(const pcy_loop_map* m, int n_max, pcy_table** out);
void pcy_table_free(pcy_table* t);
int pcy_table_size(const pcy_table* t);
int pcy_table_truncated(const pcy_table* t);
pcy_status pcy_table_entry(const pcy_table* t, int i, int* n, double* neg_ln_eps);
/* CSV: n,eps,ln_neg_ln_eps */
pcy_status pcy_table_csv(const pcy_table* t, char** out);

/* ---------------------------------------------------- polycycle models --- */

typedef struct pcy_model pcy_model;

#define PCY_GLASSES 0
#define PCY_EARS 1

pcy_status pcy_model_create(int variant, double lambda, double rho, double c_left,
                            double c_right, double c_bridge, double sigma, double p0, double q0,
                            double y_max, const double* eta, size_t eta_len, long bits,
                            pcy_model** out);
void pcy_model_free(pcy_model* m);

pcy_status pcy_phi(double lambda, double rho, double* out);

/* Synchronizing connection: for glasses writes only neg_ln_delta (requires
 * sigma = 0); for ears writes neg_ln_sigma too. */
pcy_status pcy_synchronize(const pcy_model* m, double neg_ln_eps, double* neg_ln_sigma,
                           double* neg_ln_delta);

typedef struct pcy_staircase pcy_staircase;

/* Staircase over the canonical eps sequence (left-loop sheet bracket
 * midpoints for n = n_lo..n_hi). */
pcy_status pcy_staircase_run(const pcy_model* m, int n_lo, int n_hi, pcy_staircase** out);
void pcy_staircase_free(pcy_staircase* s);
int pcy_staircase_size(const pcy_staircase* s);
pcy_status pcy_staircase_point(const pcy_staircase* s, int i, double* neg_ln_eps,
                               double* neg_ln_delta, int* n_left, int* m_right);
/* CSV: eps,delta,n_left,m_right */
pcy_status pcy_staircase_csv(const pcy_staircase* s, char** out);
/* Slope of n_left vs m_right over point indices [window_lo, window_hi];
 * residual is scaled to slope units. */
pcy_status pcy_estimate_phi(const pcy_staircase* s, int window_lo, int window_hi,
                            double* phi_hat, double* residual);

typedef struct pcy_comparison pcy_comparison;

pcy_status pcy_compare_families(const pcy_loop_map* a, const pcy_loop_map* b, int n_lo, int n_hi,
                                int index_shift, pcy_comparison** out);
void pcy_comparison_free(pcy_comparison* c);
int pcy_comparison_size(const pcy_comparison* c);
pcy_status pcy_comparison_row(const pcy_comparison* c, int i, int* n, double* ratio,
                              double* difference, double* kappa);
pcy_status pcy_comparison_ratio_limit(const pcy_comparison* c, double* value, double* halfwidth);
/* CSV: n,ratio,difference,kappa */
pcy_status pcy_comparison_csv(const pcy_comparison* c, char** out);

/* ------------------------------------------------- bifurcation diagram --- */

typedef struct pcy_diagram pcy_diagram;

pcy_status pcy_bifdiag(const pcy_model* m, int n_max, int m_max, double eps_min, double eps_max,
                       int samples, int draw_left, int draw_right, int draw_synchro,
                       pcy_diagram** out);
void pcy_diagram_free(pcy_diagram* d);
int pcy_diagram_curve_count(const pcy_diagram* d);
pcy_status pcy_diagram_curve(const pcy_diagram* d, int i, const char** kind, int* index,
                             int* n_points);
pcy_status pcy_diagram_point(const pcy_diagram* d, int i, int j, double* x, double* y);
pcy_status pcy_diagram_json(const pcy_diagram* d, char** out);

/* -------------------------------------------------------- asymptotics --- */

typedef struct pcy_fit {
  double slope;
  double intercept;
  double residual; /* max |deviation| over the window */
  int window_lo;
  int window_hi;
} pcy_fit;

pcy_status pcy_linear_fit(const double* xs, const double* ys, size_t len, size_t window_lo,
                          size_t window_hi, pcy_fit* out);
pcy_status pcy_limit_estimate(const double* seq, size_t len, double* value, double* halfwidth);
pcy_status pcy_boundedness_check(const double* seq, size_t len, size_t split, double threshold,
                                 int* growing, double* growth_factor);

/* --------------------------------------------------------------- flow --- */

typedef struct pcy_field pcy_field;

pcy_status pcy_field_bt(double beta1, double beta2, pcy_field** out);
pcy_status pcy_field_cubic(double nu, pcy_field** out);
pcy_status pcy_field_linear(double a, double b, pcy_field** out);
pcy_status pcy_field_glued(const char* spec_json, pcy_field** out);
pcy_status pcy_field_reversed(const pcy_field* f, pcy_field** out);
void pcy_field_free(pcy_field* f);
pcy_status pcy_field_eval(const pcy_field* f, double x, double y, double* vx, double* vy);

typedef struct pcy_saddle_info {
  double x, y;
  double mu_unstable, mu_stable;
  double vux, vuy; /* unit unstable eigenvector */
  double vsx, vsy; /* unit stable eigenvector */
  double nu;       /* |mu_stable| / mu_unstable */
} pcy_saddle_info;

pcy_status pcy_find_saddle(const pcy_field* f, double seed_x, double seed_y,
                           pcy_saddle_info* out);

typedef struct pcy_trajectory pcy_trajectory;

/* sections: 5 doubles per section (base_x, base_y, dir_x, dir_y, halfwidth).
 * Negative t_end integrates in reversed time. */
pcy_status pcy_integrate(const pcy_field* f, double x0, double y0, double t_end,
                         const double* sections, size_t n_sections, double rel_tol,
                         double abs_tol, pcy_trajectory** out);
void pcy_trajectory_free(pcy_trajectory* t);
size_t pcy_trajectory_size(const pcy_trajectory* t);
pcy_status pcy_trajectory_point(const pcy_trajectory* t, size_t i, double* time, double* x,
                                double* y);
size_t pcy_trajectory_crossing_count(const pcy_trajectory* t);
pcy_status pcy_trajectory_crossing(const pcy_trajectory* t, size_t i, double* time,
                                   double* coordinate, int* direction, int* section_index);
pcy_status pcy_trajectory_csv(const pcy_trajectory* t, char** out);  /* t,x,y */
pcy_status pcy_crossings_csv(const pcy_trajectory* t, char** out);   /* t,coord,dir */

/* -------------------------------------------------- loop experiments --- */

/* Homoclinic parameter of the family x'=y, y'=b1+b2x+x^2+xy at fixed beta2,
 * located by bisection on the measured splitting over [lo, hi] in beta1.
 * The measurement runs on the reversed field (the loop attracts there);
 * the reported saddle data is for that field, so nu > 1. */
pcy_status pcy_bt_homoclinic(double beta2, double beta1_lo, double beta1_hi, double tol,
                             double* beta1, double* splitting_residual, pcy_saddle_info* saddle,
                             int* time_reversed);

typedef struct pcy_flow_sparkling pcy_flow_sparkling;

/* Sheet parameters and splittings for n = n_lo..n_hi turns of the marked
 * point's orbit (p0 at p0_frac of the section halfwidth). */
pcy_status pcy_bt_sparkling(double beta2, double beta1_hom, double p0_frac, int n_lo, int n_hi,
                            double tol, pcy_flow_sparkling** out);
void pcy_flow_sparkling_free(pcy_flow_sparkling* s);
int pcy_flow_sparkling_size(const pcy_flow_sparkling* s);
pcy_status pcy_flow_sparkling_point(const pcy_flow_sparkling* s, int i, int* n, double* param,
                                    double* eps);
pcy_status pcy_flow_sparkling_lambda(const pcy_flow_sparkling* s, double* lambda,
                                     int* time_reversed);

/* Return-map constants recovered from two measured splittings; predicts
 * deeper sheet values for the map-vs-flow comparison. */
pcy_status pcy_fit_loop_model(double lambda, double eps2, double eps3, double* c, double* p0);
pcy_status pcy_predict_sheet(double lambda, double c, double p0, int n, double* eps);

/* ------------------------------------------------------- glued field --- */

typedef struct pcy_glued_report {
  double eps_measured;
  double sigma_measured;
  double delta_measured;
  double eig_err_l;
  double eig_err_r;
} pcy_glued_report;

pcy_status pcy_glued_check(const char* spec_json, pcy_glued_report* out);
pcy_status pcy_glued_default_spec(char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* POLYCYCLE_H */
