#pragma once

#include <cstdint>
#include <vector>

#include "rentlens/netlist.hpp"
#include "rentlens/partition.hpp"
#include "rentlens/rent.hpp"

namespace rentlens {

struct GenSpec {
  int n_blocks = 256;
  double target_r = 0.6;      // in (0, 1]
  int t_block = 5;            // pins per primitive: t-1 inputs + 1 output
  std::uint64_t seed = 1;
  double latch_fraction = 0.0;  // fraction of primitives emitted as latches

  void validate() const;
};

// Bottom-up hierarchical construction: groups are paired randomly; at every
// merge the surviving external pin count is forced to round(t * B^r), the
// rest being tied off by fresh nets between the two halves. Leftover
// externals at the top become primary I/O. Deterministic per seed.
Netlist generate(const GenSpec& spec);

struct SweepEntry {
  GenSpec spec;
  Netlist netlist;
  double fitted_r = 0.0;
};

// generate + prepack fit for every spec, in order.
std::vector<SweepEntry> sweep(const std::vector<GenSpec>& specs,
                              const PartitionConfig& pcfg,
                              const AnalyzeOptions& opts);

}  // namespace rentlens
