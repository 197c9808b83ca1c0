#pragma once

#include <array>
#include <string>
#include <vector>

#include "asymptotics.hpp"
#include "dulac.hpp"

namespace pcy {

enum class Variant { glasses, ears };

/// Regular correspondence along the bridge connection, modeled affine:
/// x -> c_b * x, offset by the bridge splitting sigma. sigma = 0 iff the
/// bridge connection survives.
struct BridgeTransition {
  Real c_b;
  Real sigma;
};

/// Two saddle loops coupled through a bridge. The left loop carries the
/// lambda > 1 saddle and splitting eps; the right loop is modeled in
/// reversed time, so its return map has exponent 1/rho > 1 and splitting
/// delta. eta is a passive parameter block that must never enter a formula.
struct PolycycleModel {
  Variant variant;
  LoopReturnMap left;       // exponent lambda
  LoopReturnMap right_rev;  // exponent 1/rho (reversed time)
  Real rho;                 // in (0, 1)
  BridgeTransition bridge;
  std::vector<Real> eta;

  PolycycleModel(Variant v, LoopReturnMap left_, Real rho_, Real right_c, Real q0,
                 BridgeTransition bridge_, std::vector<Real> eta_ = {});

  Real lambda() const { return left.lambda; }
};

/// Builds the reversed-time right loop map directly from forward-time data
/// (characteristic number rho < 1); identical by construction to handing
/// the map the exponent 1/rho, which is what the reversal invariant checks.
LoopReturnMap reversed_loop(const Real& rho, const Real& c, const Real& q0, const Real& y_max);

/// The invariant -ln(rho)/ln(lambda); positive on lambda > 1, 0 < rho < 1,
/// with nonvanishing differential there.
Real phi(const Real& lambda, const Real& rho);
double phi(double lambda, double rho);

/// Coefficient of the synchronizing curve delta = c_delta * eps^(lambda*rho)
/// for glasses: the left saddle map, the affine bridge, and the right saddle
/// map composed via the power-law composition rule.
Real glasses_c_delta(const PolycycleModel& m);

/// Glasses synchronization (requires sigma = 0): delta = c_delta * eps^(lambda rho).
LogEps synchronize_glasses(const PolycycleModel& m, const LogEps& eps);
Real synchronize_glasses(const PolycycleModel& m, const Real& eps);

/// Ears synchronization: sigma = c1 * eps^lambda, delta = c2 * sigma^rho,
/// hence the same composite exponent lambda*rho over eps.
struct EarsSync {
  LogEps sigma;
  LogEps delta;
};
EarsSync synchronize_ears(const PolycycleModel& m, const LogEps& eps);
std::pair<Real, Real> synchronize_ears(const PolycycleModel& m, const Real& eps);

struct StaircasePoint {
  LogEps eps;
  LogEps delta;
  int n_left;
  int m_right;
};

/// Walks eps through the given decreasing sequence; for each value the
/// synchronizing delta and both turn counts. Truncates at the first point
/// where a count exceeds the cap.
std::vector<StaircasePoint> staircase(const PolycycleModel& m, const std::vector<LogEps>& eps_seq,
                                      TurnCountOptions opts = {});

/// Log-midpoints of the left loop's sheet brackets for n = n_lo..n_hi;
/// the canonical eps sequence for staircase experiments (n_left = n there).
std::vector<LogEps> bracket_midpoints(const SparklingTable& table, int n_lo, int n_hi);

struct PhiEstimate {
  double phi_hat = 0.0;
  double residual = 0.0;  // slope half-width: max fit deviation / half x-spread
  FitResult fit;
};

/// Least-squares slope of n_left against m_right over [window_lo, window_hi]
/// (indices into the staircase). The returned residual is scaled to slope
/// units so that estimates of different models are comparable.
PhiEstimate estimate_phi(const std::vector<StaircasePoint>& points, std::size_t window_lo,
                         std::size_t window_hi);

struct FamilyComparison {
  std::vector<int> n;                  // matched left index
  std::vector<double> ratios;          // ln(-ln eps~_{n+a}) / ln(-ln eps_n)
  std::vector<double> differences;     // ln(-ln eps~)/ln lambda~ - ln(-ln eps)/ln lambda
  int index_shift = 0;
  LimitEstimate ratio_limit;
};

/// Matches sheet indices of two unfoldings with a fixed shift a and reports
/// the ratio and difference sequences; the ratio limit estimates
/// ln(lambda~)/ln(lambda).
FamilyComparison compare_families(const SparklingTable& a, const Real& lambda_a,
                                  const SparklingTable& b, const Real& lambda_b, int n_lo,
                                  int n_hi, int shift);

/// kappa_n = ln(eps~_{n+a}) / ln(eps_n): converges to a positive constant
/// when the characteristic numbers agree and runs geometrically (ratio
/// lambda~/lambda per step) when they differ.
std::vector<double> holder_profile(const SparklingTable& a, const SparklingTable& b, int n_lo,
                                   int n_hi, int shift);

/// CSV with header n,ratio,difference,kappa over the matched range.
std::string comparison_csv(const FamilyComparison& cmp, const std::vector<double>& kappa);

/// CSV with header eps,delta,n_left,m_right.
std::string staircase_csv(const std::vector<StaircasePoint>& points, long bits);

// ------------------------------------------------------------- diagram ---

enum class CurveKind { left_sheet, right_sheet, synchronizing };

struct Curve {
  CurveKind kind;
  int index;  // sheet index; 0 for the synchronizing curve
  std::vector<std::array<double, 2>> points;  // (eps, delta)
};

struct DiagramSpec {
  int n_max = 6;
  int m_max = 6;
  double eps_min = 1e-12;
  double eps_max = 0.5;
  int samples = 64;
  bool left_sheets = true;
  bool right_sheets = true;
  bool synchronizing = true;
};

/// Bifurcation-diagram curves in the (eps, delta) plane on the sigma = 0
/// slice: vertical left sheets eps = eps_n, horizontal right sheets
/// delta = delta_m, and the synchronizing curve delta = c_delta eps^(lambda rho).
/// Indices are clamped to the double-representable depth.
std::vector<Curve> bifurcation_diagram(const PolycycleModel& m, const DiagramSpec& spec);

std::string curves_json(const std::vector<Curve>& curves);

}  // namespace pcy
