#pragma once

#include <cstdint>

#include "pgas/topology.hpp"
#include "pgas/types.hpp"

namespace pgas {

struct RuntimeConfig {
  std::uint32_t num_units = 1;
  std::uint32_t node_size = 1;
  std::uint32_t blades_per_chassis = 16;
  std::uint32_t chassis_per_group = 1;
  LatencyModel latency;
  RoutingMode routing = RoutingMode::LocalityAware;
  /// Hold each message until its simulated cost has elapsed in real time.
  /// Disabling keeps the accounting but delivers as fast as possible.
  bool realize_latency = true;
  /// Record every applied envelope (see Transport::trace()).
  bool trace_messages = false;

  Topology topology() const {
    return Topology{num_units, node_size, blades_per_chassis, chassis_per_group};
  }

  void validate() const {
    topology().validate();
    latency.validate();
  }
};

}  // namespace pgas
