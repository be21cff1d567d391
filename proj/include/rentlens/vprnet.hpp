#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rentlens/netlist.hpp"

namespace rentlens {

struct Cluster {
  int id = -1;
  std::string name;
  std::string kind;            // instance prefix: "clb", "io", ...
  std::vector<int> primitives; // prepack block ids, ascending
  int used_input_pins = 0;
  int used_output_pins = 0;
  int used_clock_pins = 0;

  int primitive_count() const { return static_cast<int>(primitives.size()); }
};

// Assignment of prepack primitives to clusters. Logic primitives are
// partitioned by the clb-level clusters; I/O blocks sit in singleton pseudo
// clusters (taken from the file when present, synthesized otherwise).
struct ClusterMap {
  std::vector<Cluster> clusters;
  std::vector<int> primitive_owner;  // block id -> cluster id

  bool operator==(const ClusterMap&) const = default;
};

// Parse a VPR-style .net XML cluster netlist against its pre-packing
// netlist. Pin usage counts port entries that are not the literal `open`.
// Per-cluster terminal counts are cross-checked against the nets actually
// crossing the cluster boundary; mismatches become warnings, not errors.
ClusterMap parse_vpr_net(std::string_view xml_text, const Netlist& prepack,
                         std::vector<std::string>* warnings = nullptr);

ClusterMap load_vpr_net_file(const std::string& path, const Netlist& prepack,
                             std::vector<std::string>* warnings = nullptr);

struct ClusterAverages {
  double b_avg = 0.0;  // mean primitives per cluster
  double t_avg = 0.0;  // mean used input+output pins (clocks optional)
  int n_clusters = 0;
};

ClusterAverages cluster_averages(const ClusterMap& cm, std::string_view kind,
                                 bool include_clocks = false);

// Distinct countable nets crossing the cluster boundary, by direction.
// Used for the parse-time cross-check and by the packer's writer.
struct CrossingPins {
  int inputs = 0;
  int outputs = 0;
  int clocks = 0;
};
CrossingPins crossing_pins(const Netlist& prepack,
                           const std::vector<int>& primitives,
                           bool ignore_globals = true);

}  // namespace rentlens
