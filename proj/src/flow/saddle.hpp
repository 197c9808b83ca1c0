#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "integrator.hpp"

namespace pcy::flow {

struct Saddle {
  Vec2 position;
  double mu_unstable = 0.0;  // positive eigenvalue
  double mu_stable = 0.0;    // negative eigenvalue
  Vec2 v_unstable;           // unit eigenvectors
  Vec2 v_stable;
  double nu = 0.0;           // |mu_stable| / mu_unstable
};

/// Newton iteration on the velocity from `seed`; classifies the equilibrium
/// through the jacobian eigensystem. Throws errc::no_convergence or
/// errc::not_saddle.
Saddle find_saddle(const PlanarField& field, Vec2 seed, double tol = 1e-12);

enum class Branch { unstable_plus, unstable_minus, stable_plus, stable_minus };

struct TraceOptions {
  double seed_offset = 1e-7;
  double t_max = 200.0;
  // Tighter than plain integration: transverse error made while crawling
  // away from the saddle is amplified by the unstable growth.
  IntegrateOptions integ = {.rel_tol = 1e-11, .abs_tol = 1e-13};
};

/// Integrates the chosen separatrix branch from position + h*(signed
/// eigenvector); stable branches run in reversed time. Crossings are
/// recorded against the given sections.
Trajectory trace_separatrix(const PlanarField& field, const Saddle& saddle, Branch branch,
                            const std::vector<Section>& sections, const TraceOptions& opts = {});

/// First crossing of the trace with section 0, or nullopt.
std::optional<Crossing> first_crossing(const Trajectory& tr);

struct SplittingAnchors {
  Saddle unstable_saddle;
  Branch unstable_branch = Branch::unstable_plus;
  Saddle stable_saddle;
  Branch stable_branch = Branch::stable_plus;
};

/// Separatrix splitting on `section`: x(S) - x(U), S the first hit of the
/// stable branch traced in reversed time, U the first hit of the unstable
/// branch traced forward. The loop case passes the same saddle twice.
/// Throws errc::missing_crossing when either branch misses the section.
double splitting(const PlanarField& field, const SplittingAnchors& anchors, const Section& section,
                 const TraceOptions& opts = {});

/// Convenience for a saddle loop on `saddle`: unstable branch `u`, stable
/// branch `s`, measured on `section`.
double loop_splitting(const PlanarField& field, const Saddle& saddle, Branch u, Branch s,
                      const Section& section, const TraceOptions& opts = {});

// ------------------------------------------------------ homoclinic (BT) ---

/// A one-parameter slice of a family with a saddle loop: which parameter
/// varies, where the saddle sits, which branches form the loop, and where
/// to look for the loop body when placing the cross-section.
struct LoopProblem {
  PlanarField family;
  std::size_t param_index = 0;  // the free parameter
  Vec2 saddle_seed;
  Branch unstable_branch = Branch::unstable_plus;
  Branch stable_branch = Branch::stable_plus;
  // The loop body is captured where the traced loop arm crosses the
  // horizontal line through the saddle, `capture_reach` away (sign picks
  // the side). The measuring section sits there, pointing back toward the
  // interior, with halfwidth this fraction of the distance to the saddle.
  double capture_reach = -2.5;
  double section_halfwidth_frac = 0.35;
  // The family already runs in reversed time (so that the loop attracts
  // from inside); carried into results for reporting.
  bool time_reversed = false;
  TraceOptions trace;
};

/// Cross-section across the loop at the given parameter: based where the
/// loop arm crosses the capture line, oriented into the winding annulus.
Section make_loop_section(const LoopProblem& prob, double param);

/// Splitting as a function of the free parameter, on a fresh section or a
/// caller-pinned one (pin the section across a bisection run).
double splitting_at(const LoopProblem& prob, double param);
double splitting_at(const LoopProblem& prob, double param, const Section& section);

/// Bisection on the measured splitting over [lo, hi]; requires a sign
/// change. Returns the parameter with |splitting| < tol.
double find_homoclinic(const LoopProblem& prob, double lo, double hi, double tol);

struct FlowSparklingPoint {
  int n = 0;
  double param = 0.0;  // parameter value on the n-turn connection sheet
  double eps = 0.0;    // measured splitting there
};

struct FlowSparklingResult {
  std::vector<FlowSparklingPoint> points;
  double lambda = 0.0;         // characteristic number of the loop saddle
  bool time_reversed = false;  // measurement ran on -v so the loop attracts
  double param_homoclinic = 0.0;
};

/// Sparkling measurement on a concrete family: for each n in [n_lo, n_hi],
/// bisection on the family parameter for the event "the orbit of the marked
/// point crosses the section exactly n times and the n-th crossing lands on
/// the stable separatrix". The marked point sits at fraction `p0_frac` of
/// the distance from the section origin (the stable-manifold hit) into the
/// winding annulus. When the loop repels in forward time the whole
/// measurement runs on the reversed field.
FlowSparklingResult measure_sparkling_flow(const LoopProblem& prob, double param_homoclinic,
                                           double p0_frac, int n_lo, int n_hi, double tol);

/// Loop problem for the x' = y, y' = b1 + b2 x + x^2 + x y family at the
/// given beta2, with beta1 free. The loop of this family repels from the
/// inside (positive saddle quantity), so the problem is posed on the
/// reversed field, where the characteristic number exceeds one and the
/// winding picture applies; `time_reversed` on results reflects that.
LoopProblem bt_loop_problem(double beta1_guess, double beta2);

/// Loop problem for x' = y, y' = x - x^2 + nu*y with nu free; at nu = 0 the
/// loop is exact on the zero energy level.
LoopProblem cubic_loop_problem();

struct LoopModelFit {
  double c = 0.0;
  double p0 = 0.0;
};

/// Recovers the return-map constants (c, p0) of the power-law loop model
/// with fixed lambda from two measured splittings eps_2 and eps_3, by
/// matching the model's own sheet values. Used to predict deeper sheets.
LoopModelFit fit_loop_model(double lambda, double eps2, double eps3);

/// Model sheet value eps_n for the fitted constants (256-bit solve).
double predict_sheet(double lambda, const LoopModelFit& fit, int n);

}  // namespace pcy::flow
