#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rentlens {

enum class BlockKind { PrimaryInput, PrimaryOutput, Lut, Latch, BlackBox };

const char* to_string(BlockKind kind);

inline bool is_logic(BlockKind kind) {
  return kind == BlockKind::Lut || kind == BlockKind::Latch ||
         kind == BlockKind::BlackBox;
}

struct PinRef {
  int block = -1;
  std::string port;

  bool operator==(const PinRef&) const = default;
};

// Hyperedge. One driver, any number of sinks. A net that was truncated by
// induced_subnetlist keeps a synthetic boundary marker so terminal counts
// computed on the subnetlist stay exact.
struct Net {
  int id = -1;
  std::string name;
  std::optional<PinRef> driver;
  std::vector<PinRef> sinks;
  bool dangling = false;
  bool global = false;    // clock-like; skipped by terminal/cut counting
  bool boundary = false;  // synthetic pin from subnetlist truncation

  int total_pins() const {
    return static_cast<int>(sinks.size()) + (driver ? 1 : 0);
  }
};

struct Block {
  int id = -1;
  std::string name;
  BlockKind kind = BlockKind::Lut;
  int weight = 1;  // primitives contained; >1 only in cluster-level netlists
  std::vector<int> nets;  // distinct attached nets, ascending (built by finalize)
  std::string opaque;     // parser payload (truth table rows, latch init, model)

  // Number of distinct nets attached, driver and sinks alike.
  int pin_count() const { return static_cast<int>(nets.size()); }
};

class Netlist {
 public:
  std::string name;
  std::vector<Block> blocks;
  std::vector<Net> nets;

  int add_block(std::string block_name, BlockKind kind);
  int add_net(std::string net_name);

  // Rebuilds block adjacency, flags dangling nets, checks the structural
  // invariants (dense ids, resolvable pins, single driver, I/O degree).
  // Throws ParseError on violation. Call once after construction; the
  // netlist is immutable afterwards.
  void finalize();

  const Block& block(int id) const { return blocks[static_cast<size_t>(id)]; }
  const Net& net(int id) const { return nets[static_cast<size_t>(id)]; }

  int n_logic_blocks() const;
  // Sum of block weights over logic blocks (= primitive count even when
  // blocks are cluster-level aggregates).
  long long logic_weight() const;
};

struct BlockStats {
  int n_blocks = 0;
  int n_nets = 0;
  double avg_terminals = 0.0;  // mean pin_count over logic blocks
};

// Mean terminals per logic block; I/O blocks are excluded from the average.
// Throws DomainError when the netlist has no logic blocks.
BlockStats block_stats(const Netlist& netlist);

// Like block_stats but counting only nets that terminal analysis counts
// (non-global, non-dangling). This is the t that enters the Rent prefactor.
double avg_countable_terminals(const Netlist& netlist,
                               bool ignore_globals = true);

// Restriction of `netlist` to `block_ids` (any order, no duplicates). Nets
// crossing out of the set are truncated and marked `boundary`. Blocks are
// renumbered densely in ascending original-id order; if `orig_ids` is given
// it receives new-id -> original-id.
Netlist induced_subnetlist(const Netlist& netlist,
                           const std::vector<int>& block_ids,
                           std::vector<int>* orig_ids = nullptr);

}  // namespace rentlens
