#include "field.hpp"

#include <algorithm>
#include <cmath>

#include "../real.hpp"

namespace pcy::flow {

PlanarField::PlanarField(Eval eval, std::vector<double> params)
    : eval_(std::move(eval)), params_(std::move(params)) {
  Eval ev = eval_;
  jac_ = [ev](Vec2 p, const std::vector<double>& prm) {
    const double h = 1e-6;
    Vec2 fx1 = ev({p.x + h, p.y}, prm), fx0 = ev({p.x - h, p.y}, prm);
    Vec2 fy1 = ev({p.x, p.y + h}, prm), fy0 = ev({p.x, p.y - h}, prm);
    return Mat2{(fx1.x - fx0.x) / (2 * h), (fy1.x - fy0.x) / (2 * h),
                (fx1.y - fx0.y) / (2 * h), (fy1.y - fy0.y) / (2 * h)};
  };
}

PlanarField PlanarField::with_param(std::size_t index, double value) const {
  if (index >= params_.size()) {
    throw Error(errc::bad_argument, "with_param: parameter index out of range");
  }
  auto prm = params_;
  prm[index] = value;
  return PlanarField(eval_, jac_, std::move(prm));
}

PlanarField PlanarField::reversed() const {
  Eval ev = eval_;
  Jac jc = jac_;
  return PlanarField([ev](Vec2 p, const std::vector<double>& prm) { return -ev(p, prm); },
                     [jc](Vec2 p, const std::vector<double>& prm) { return -jc(p, prm); },
                     params_);
}

Mat2 fd_jacobian(const PlanarField& field, Vec2 p, double h) {
  Vec2 fx1 = field({p.x + h, p.y}), fx0 = field({p.x - h, p.y});
  Vec2 fy1 = field({p.x, p.y + h}), fy0 = field({p.x, p.y - h});
  return Mat2{(fx1.x - fx0.x) / (2 * h), (fy1.x - fy0.x) / (2 * h), (fx1.y - fx0.y) / (2 * h),
              (fy1.y - fy0.y) / (2 * h)};
}

double jacobian_check(const PlanarField& field, const std::vector<Vec2>& points, double h) {
  double worst = 0.0;
  for (Vec2 p : points) {
    Mat2 a = field.jacobian(p);
    Mat2 d = fd_jacobian(field, p, h);
    double scale = std::max({std::abs(a.a11), std::abs(a.a12), std::abs(a.a21), std::abs(a.a22),
                             1e-12});
    worst = std::max({worst, std::abs(a.a11 - d.a11) / scale, std::abs(a.a12 - d.a12) / scale,
                      std::abs(a.a21 - d.a21) / scale, std::abs(a.a22 - d.a22) / scale});
  }
  return worst;
}

PlanarField bt_family(double beta1, double beta2) {
  return PlanarField(
      [](Vec2 p, const std::vector<double>& b) {
        return Vec2{p.y, b[0] + b[1] * p.x + p.x * p.x + p.x * p.y};
      },
      [](Vec2 p, const std::vector<double>& b) {
        return Mat2{0.0, 1.0, b[1] + 2.0 * p.x + p.y, p.x};
      },
      {beta1, beta2});
}

PlanarField hamiltonian_cubic(double nu) {
  return PlanarField(
      [](Vec2 p, const std::vector<double>& prm) {
        return Vec2{p.y, p.x - p.x * p.x + prm[0] * p.y};
      },
      [](Vec2 p, const std::vector<double>& prm) {
        return Mat2{0.0, 1.0, 1.0 - 2.0 * p.x, prm[0]};
      },
      {nu});
}

double cubic_energy(Vec2 p) { return 0.5 * p.y * p.y - 0.5 * p.x * p.x + p.x * p.x * p.x / 3.0; }

PlanarField linear_field(double a, double b) {
  return PlanarField(
      [](Vec2 p, const std::vector<double>& prm) { return Vec2{prm[0] * p.x, prm[1] * p.y}; },
      [](Vec2, const std::vector<double>& prm) {
        return Mat2{prm[0], 0.0, 0.0, prm[1]};
      },
      {a, b});
}

PlanarField harmonic_field() {
  return PlanarField([](Vec2 p, const std::vector<double>&) { return Vec2{-p.y, p.x}; },
                     [](Vec2, const std::vector<double>&) {
                       return Mat2{0.0, -1.0, 1.0, 0.0};
                     },
                     {});
}

}  // namespace pcy::flow
