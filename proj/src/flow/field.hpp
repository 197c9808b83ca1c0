#pragma once

#include <functional>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace pcy::flow {

/// Planar vector field with parameters. Evaluator and jacobian are plain
/// callables; fields are immutable after construction and safe to share
/// across workers. When no analytic jacobian is supplied, central finite
/// differences stand in.
class PlanarField {
 public:
  using Eval = std::function<Vec2(Vec2, const std::vector<double>&)>;
  using Jac = std::function<Mat2(Vec2, const std::vector<double>&)>;

  PlanarField(Eval eval, Jac jac, std::vector<double> params)
      : eval_(std::move(eval)), jac_(std::move(jac)), params_(std::move(params)) {}
  PlanarField(Eval eval, std::vector<double> params);

  Vec2 operator()(Vec2 p) const { return eval_(p, params_); }
  Mat2 jacobian(Vec2 p) const { return jac_(p, params_); }

  const std::vector<double>& params() const { return params_; }
  PlanarField with_params(std::vector<double> params) const {
    return PlanarField(eval_, jac_, std::move(params));
  }
  PlanarField with_param(std::size_t index, double value) const;

  /// Same orbits, opposite time direction.
  PlanarField reversed() const;

 private:
  Eval eval_;
  Jac jac_;
  std::vector<double> params_;
};

/// Central finite-difference jacobian at step h, for validating analytic
/// jacobians against the evaluator.
Mat2 fd_jacobian(const PlanarField& field, Vec2 p, double h = 1e-6);

/// Largest relative mismatch between the analytic jacobian and central
/// differences over a batch of sample points.
double jacobian_check(const PlanarField& field, const std::vector<Vec2>& points, double h = 1e-6);

// Built-in families.

/// x' = y, y' = beta1 + beta2*x + x^2 + x*y; params = {beta1, beta2}.
PlanarField bt_family(double beta1, double beta2);

/// x' = y, y' = x - x^2 + nu*y (H = y^2/2 - x^2/2 + x^3/3 at nu = 0);
/// params = {nu}.
PlanarField hamiltonian_cubic(double nu);
double cubic_energy(Vec2 p);

/// x' = a*x, y' = b*y.
PlanarField linear_field(double a, double b);

/// x' = -y, y' = x.
PlanarField harmonic_field();

}  // namespace pcy::flow
