#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rentlens/netlist.hpp"

namespace rentlens {

struct PartitionConfig {
  double balance_epsilon = 0.1;  // |w(A)-w(B)| <= max(eps * total, w_max)
  int restarts = 10;
  std::uint64_t seed = 1;
  int leaf_threshold = 1;        // stop splitting once node weight <= this
  double coarsen_ratio = 0.5;    // per-level matching stops at this shrink
  bool ignore_globals = true;
  int max_threads = 0;           // 0 = RENTLENS_THREADS or hardware default
};

// One node of the recursive bipartition tree. block_ids are ids into the
// netlist the tree was built from, ascending.
struct PartitionNode {
  int depth = 0;
  std::vector<int> block_ids;
  long long B = 0;    // contained primitive weight
  long long T = 0;    // external terminals (distinct countable nets)
  long long cut = -1; // nets spanning the two children; -1 for a leaf
  std::unique_ptr<PartitionNode> left;
  std::unique_ptr<PartitionNode> right;

  bool is_leaf() const { return !left; }
};

// Number of distinct countable nets leaving `block_ids`: non-dangling,
// non-global (unless configured otherwise), with a pin inside and either a
// pin outside or a boundary marker from subnetlist truncation.
long long external_terminals(const Netlist& netlist,
                             const std::vector<int>& block_ids,
                             bool ignore_globals = true);

struct BipartitionResult {
  std::vector<int> side_a;  // contains the smallest block id
  std::vector<int> side_b;
  long long cut = 0;
};

// Min-cut bipartition of `block_ids`, best of cfg.restarts multilevel runs
// (heavy-edge-matching coarsening, random balanced initial split, FM
// refinement at every uncoarsening level). Deterministic for a fixed seed.
BipartitionResult bipartition(const Netlist& netlist,
                              const std::vector<int>& block_ids,
                              const PartitionConfig& cfg);

// Full recursive bipartition tree over the logic blocks of `netlist`.
// Per-node RNG streams are derived from (seed, node path), so the result is
// bit-identical no matter how many worker threads run the sibling subtrees.
std::unique_ptr<PartitionNode> recursive_partition(const Netlist& netlist,
                                                   const PartitionConfig& cfg);

// Worker count resolved from cfg.max_threads / RENTLENS_THREADS. Never
// affects results, only wall time.
int resolve_threads(int requested);

}  // namespace rentlens
