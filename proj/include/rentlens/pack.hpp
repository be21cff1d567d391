#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rentlens/arch.hpp"
#include "rentlens/netlist.hpp"
#include "rentlens/vprnet.hpp"

namespace rentlens {

enum class SeedPolicy { MostPins, MostCriticalNets };

struct PackConfig {
  double target_ext_pin_util = 1.0;  // caps distinct external input nets
  SeedPolicy seed_policy = SeedPolicy::MostPins;
  bool allow_unrelated = true;
  std::uint64_t rng_seed = 1;  // reserved; the greedy order is id-determined

  void validate() const;
};

// Greedy seed-based clustering (VPack-style, connectivity attraction only).
// Every logic primitive lands in exactly one cluster; the distinct external
// input nets of a cluster never exceed
//   max(1, floor(target_ext_pin_util * arch.cluster_inputs))
// except for flagged singletons whose lone block already exceeds the knob;
// those are reported through `diagnostics` instead of failing the pack.
ClusterMap pack(const Netlist& netlist, const ArchSpec& arch,
                const PackConfig& cfg,
                std::vector<std::string>* diagnostics = nullptr);

// Simplified VPR-style .net emission; parse_vpr_net() round-trips it to an
// identical ClusterMap.
std::string write_net(const ClusterMap& cm, const Netlist& netlist,
                      const ArchSpec& arch);

}  // namespace rentlens
