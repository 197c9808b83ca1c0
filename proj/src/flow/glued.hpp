#pragma once

#include <memory>
#include <string>

#include "integrator.hpp"
#include "saddle.hpp"

namespace pcy::flow {

/// Build parameters for the glued "glasses" field: two linear saddles with
/// loops l (around L) and r (around R), a bridge b from L to R, a feeding
/// source above L and an absorbing sink right of R, all realized as linear
/// cells joined by channel and corner cells along an axis-aligned wire
/// graph. Transverse offsets (eps, sigma, delta) break the connections with
/// exactly those measured splittings.
struct GluedSpec {
  double lambda = 2.0;  // left characteristic number, eigenvalues (1, -lambda)
  double rho = 0.5;     // right characteristic number, eigenvalues (rho, -1)
  double eps = 0.0;     // loop l splitting offset
  double sigma = 0.0;   // bridge splitting offset
  double delta = 0.0;   // loop r splitting offset
  double disk_radius = 0.5;
  double channel_width = 0.36;
  Vec2 center_l{0.0, 0.0};
  Vec2 center_r{4.0, 0.0};

  static GluedSpec from_json(const std::string& text);
  std::string to_json() const;
};

class GluedGlasses {
 public:
  explicit GluedGlasses(const GluedSpec& spec);

  const GluedSpec& spec() const { return spec_; }
  PlanarField field() const;

  Vec2 saddle_l() const;
  Vec2 saddle_r() const;

  /// Measuring sections on the final approach channels of l, b, r,
  /// oriented so the measured splitting equals the corresponding offset.
  Section section_l() const;
  Section section_b() const;
  Section section_r() const;

  /// Branch anchors for the three splitting measurements.
  SplittingAnchors anchors_l(const Saddle& L) const;
  SplittingAnchors anchors_b(const Saddle& L, const Saddle& R) const;
  SplittingAnchors anchors_r(const Saddle& R) const;

 private:
  GluedSpec spec_;
  std::shared_ptr<const struct GluedImpl> impl_;
};

struct GluedCheckReport {
  double eps_measured = 0.0;
  double sigma_measured = 0.0;
  double delta_measured = 0.0;
  double eig_err_l = 0.0;  // worst eigenvalue mismatch at L vs (1, -lambda)
  double eig_err_r = 0.0;  // at R vs (rho, -1)
};

/// Builds the field and measures the three splittings plus the saddle
/// eigenvalue errors; the closure check for the construction.
GluedCheckReport glued_check(const GluedSpec& spec);

}  // namespace pcy::flow
