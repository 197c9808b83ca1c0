#pragma once

#include <optional>
#include <string>
#include <vector>

#include "field.hpp"
#include "geometry.hpp"

namespace pcy::flow {

/// Cross-section segment: base point, unit direction, halfwidth. Crossing
/// coordinate is signed arclength along `direction` measured from `base`.
struct Section {
  Vec2 base;
  Vec2 direction;  // unit
  double halfwidth = 1.0;

  double coordinate(Vec2 p) const { return (p - base).dot(direction); }
  double offset(Vec2 p) const { return (p - base).dot(direction.perp()); }
};

struct Crossing {
  double time = 0.0;
  double coordinate = 0.0;
  int direction_of_crossing = +1;  // sign of the normal velocity
  int section_index = 0;
};

struct IntegrateOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double event_tol = 1e-11;
  double max_step = 1.0;
  std::size_t max_steps = 2000000;
  // Integration aborts (without error) on leaving this box.
  double box_xmin = -50.0, box_xmax = 50.0, box_ymin = -50.0, box_ymax = 50.0;
  bool record_trajectory = true;
  // Stop once this many crossings were recorded (0 = unlimited).
  std::size_t max_crossings = 0;
};

enum class StopReason { time_reached, box_exit, step_count, crossing_count };

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec2> points;
  std::vector<Crossing> crossings;
  StopReason stop = StopReason::time_reached;
  double t_end = 0.0;
  Vec2 final_point;
};

/// Adaptive embedded Runge-Kutta pair (Dormand-Prince 5(4)) with quartic
/// dense output. Section crossings are located by root-finding on the dense
/// interpolant to |coordinate step| < event_tol. Negative t_end integrates
/// in reversed time. Throws errc::no_convergence on step-size underflow.
Trajectory integrate(const PlanarField& field, Vec2 x0, double t_end,
                     const std::vector<Section>& sections, const IntegrateOptions& opts = {});

std::string trajectory_csv(const Trajectory& tr);
std::string crossings_csv(const Trajectory& tr);

}  // namespace pcy::flow
