#include "garma/mobility.hpp"

#include <cmath>

#include "garma/numeric.hpp"

namespace garma {

WaypointModel::WaypointModel(WaypointParams params) : params_(params), rng_(params.seed) {
  if (params_.node_count == 0) throw InputError("waypoint model needs at least one node");
  if (!(params_.box > 0.0)) throw InputError("waypoint box must be positive");
  if (!(params_.speed >= 0.0)) throw InputError("waypoint speed must be non-negative");
  pos_.resize(params_.node_count);
  target_.resize(params_.node_count);
  wait_.assign(params_.node_count, 0);
  for (auto& p : pos_) p = draw_point();
  for (auto& t : target_) t = draw_point();
}

Point2 WaypointModel::draw_point() {
  std::uniform_real_distribution<double> u(0.0, params_.box);
  const double x = u(rng_);
  return {x, u(rng_)};
}

void WaypointModel::step() {
  for (std::size_t i = 0; i < pos_.size(); ++i) {
    if (wait_[i] > 0) {
      --wait_[i];
      continue;
    }
    const double dx = target_[i][0] - pos_[i][0];
    const double dy = target_[i][1] - pos_[i][1];
    const double dist = std::hypot(dx, dy);
    if (dist <= params_.speed) {
      pos_[i] = target_[i];
      target_[i] = draw_point();
      wait_[i] = params_.pause;
    } else {
      const double f = params_.speed / dist;
      pos_[i][0] += f * dx;
      pos_[i][1] += f * dy;
    }
  }
}

}  // namespace garma
