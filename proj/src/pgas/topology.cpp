#include "pgas/topology.hpp"

#include <string>

namespace pgas {

const char* to_string(HopClass hop) {
  switch (hop) {
    case HopClass::IntraNode: return "intra_node";
    case HopClass::Rank1: return "rank1";
    case HopClass::Rank2: return "rank2";
    case HopClass::Rank3: return "rank3";
  }
  return "?";
}

void Topology::validate() const {
  if (num_units == 0 || node_size == 0 || blades_per_chassis == 0 || chassis_per_group == 0) {
    throw Error(Errc::InvalidConfig,
                "topology: num_units, node_size, blades_per_chassis and chassis_per_group must be >= 1");
  }
}

HopClass classify(const Topology& topo, UnitId origin, UnitId target) {
  const auto node_a = topo.node_of(origin);
  const auto node_b = topo.node_of(target);
  if (node_a == node_b) return HopClass::IntraNode;
  const auto chassis_a = topo.chassis_of_node(node_a);
  const auto chassis_b = topo.chassis_of_node(node_b);
  if (chassis_a == chassis_b) return HopClass::Rank1;
  if (topo.group_of_chassis(chassis_a) == topo.group_of_chassis(chassis_b)) return HopClass::Rank2;
  return HopClass::Rank3;
}

void LatencyModel::validate() const {
  for (std::size_t c = 0; c < kNumHopClasses; ++c) {
    if (!(base_seconds[c] >= 0.0) || !(seconds_per_byte[c] >= 0.0)) {
      throw Error(Errc::InvalidConfig, "latency model: parameters must be finite and >= 0 (class " +
                                           std::string(to_string(static_cast<HopClass>(c))) + ")");
    }
  }
  for (std::size_t c = 1; c < kNumHopClasses; ++c) {
    if (base_seconds[c] < base_seconds[c - 1]) {
      throw Error(Errc::InvalidConfig,
                  "latency model: base latency must be non-decreasing intra_node <= rank1 <= rank2 <= rank3");
    }
  }
}

}  // namespace pgas
