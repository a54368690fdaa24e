#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "garma/graph.hpp"

namespace garma {

struct WaypointParams {
  std::size_t node_count = 100;
  double box = 1000.0;   // meters, square side
  double speed = 1.0;    // meters per iteration
  std::size_t pause = 0; // iterations spent at each waypoint
  std::uint64_t seed = 1;
};

/// Random waypoint mobility: each node walks at constant speed toward a
/// uniform target in the box, pauses, then draws a new target.
class WaypointModel {
 public:
  explicit WaypointModel(WaypointParams params);

  void step();
  const std::vector<Point2>& positions() const noexcept { return pos_; }
  const WaypointParams& params() const noexcept { return params_; }

 private:
  Point2 draw_point();

  WaypointParams params_;
  std::mt19937_64 rng_;
  std::vector<Point2> pos_;
  std::vector<Point2> target_;
  std::vector<std::size_t> wait_;
};

}  // namespace garma
