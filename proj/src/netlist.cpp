#include "rentlens/netlist.hpp"

#include <algorithm>
#include <unordered_set>

#include "rentlens/error.hpp"

namespace rentlens {

const char* to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::PrimaryInput:
      return "input";
    case BlockKind::PrimaryOutput:
      return "output";
    case BlockKind::Lut:
      return "lut";
    case BlockKind::Latch:
      return "latch";
    case BlockKind::BlackBox:
      return "blackbox";
  }
  return "?";
}

int Netlist::add_block(std::string block_name, BlockKind kind) {
  Block b;
  b.id = static_cast<int>(blocks.size());
  b.name = std::move(block_name);
  b.kind = kind;
  blocks.push_back(std::move(b));
  return blocks.back().id;
}

int Netlist::add_net(std::string net_name) {
  Net n;
  n.id = static_cast<int>(nets.size());
  n.name = std::move(net_name);
  nets.push_back(std::move(n));
  return nets.back().id;
}

void Netlist::finalize() {
  const int nb = static_cast<int>(blocks.size());
  for (int i = 0; i < nb; ++i) {
    if (blocks[static_cast<size_t>(i)].id != i) {
      throw ParseError("block ids are not dense");
    }
    blocks[static_cast<size_t>(i)].nets.clear();
  }
  for (size_t i = 0; i < nets.size(); ++i) {
    Net& net = nets[i];
    if (net.id != static_cast<int>(i)) {
      throw ParseError("net ids are not dense");
    }
    auto check_pin = [&](const PinRef& pin) {
      if (pin.block < 0 || pin.block >= nb) {
        throw ParseError("net '" + net.name + "' references unknown block id " +
                         std::to_string(pin.block));
      }
      blocks[static_cast<size_t>(pin.block)].nets.push_back(net.id);
    };
    if (net.driver) {
      check_pin(*net.driver);
      for (const PinRef& s : net.sinks) {
        if (s == *net.driver) {
          throw ParseError("net '" + net.name +
                           "' lists its driver pin again as a sink");
        }
      }
    }
    for (const PinRef& s : net.sinks) {
      check_pin(s);
    }
    // Undriven nets were already flagged dangling by the parser; short nets
    // are flagged here.
    if (net.total_pins() < 2 || !net.driver) {
      net.dangling = true;
    }
  }
  for (Block& b : blocks) {
    std::sort(b.nets.begin(), b.nets.end());
    b.nets.erase(std::unique(b.nets.begin(), b.nets.end()), b.nets.end());
    if (b.kind == BlockKind::PrimaryInput) {
      if (b.nets.size() != 1 || !nets[static_cast<size_t>(b.nets[0])].driver ||
          nets[static_cast<size_t>(b.nets[0])].driver->block != b.id) {
        throw ParseError("primary input '" + b.name +
                         "' must drive exactly one net");
      }
    }
    if (b.kind == BlockKind::PrimaryOutput && b.nets.size() != 1) {
      throw ParseError("primary output '" + b.name +
                       "' must sink exactly one net");
    }
  }
}

int Netlist::n_logic_blocks() const {
  int n = 0;
  for (const Block& b : blocks) {
    if (is_logic(b.kind)) {
      ++n;
    }
  }
  return n;
}

long long Netlist::logic_weight() const {
  long long w = 0;
  for (const Block& b : blocks) {
    if (is_logic(b.kind)) {
      w += b.weight;
    }
  }
  return w;
}

BlockStats block_stats(const Netlist& netlist) {
  BlockStats stats;
  stats.n_blocks = static_cast<int>(netlist.blocks.size());
  stats.n_nets = static_cast<int>(netlist.nets.size());
  long long pin_sum = 0;
  int n_logic = 0;
  for (const Block& b : netlist.blocks) {
    if (!is_logic(b.kind)) {
      continue;
    }
    ++n_logic;
    pin_sum += b.pin_count();
  }
  if (n_logic == 0) {
    throw DomainError("netlist '" + netlist.name + "' has no logic blocks");
  }
  stats.avg_terminals = static_cast<double>(pin_sum) / n_logic;
  return stats;
}

double avg_countable_terminals(const Netlist& netlist, bool ignore_globals) {
  long long pin_sum = 0;
  int n_logic = 0;
  for (const Block& b : netlist.blocks) {
    if (!is_logic(b.kind)) {
      continue;
    }
    ++n_logic;
    for (int net_id : b.nets) {
      const Net& net = netlist.net(net_id);
      if (net.dangling || (ignore_globals && net.global)) {
        continue;
      }
      ++pin_sum;
    }
  }
  if (n_logic == 0) {
    throw DomainError("netlist '" + netlist.name + "' has no logic blocks");
  }
  return static_cast<double>(pin_sum) / n_logic;
}

Netlist induced_subnetlist(const Netlist& netlist,
                           const std::vector<int>& block_ids,
                           std::vector<int>* orig_ids) {
  std::vector<int> members = block_ids;
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  std::vector<int> new_id(netlist.blocks.size(), -1);
  for (int id : members) {
    if (id < 0 || id >= static_cast<int>(netlist.blocks.size())) {
      throw DomainError("induced_subnetlist: unknown block id " +
                        std::to_string(id));
    }
  }

  Netlist sub;
  sub.name = netlist.name;
  for (int id : members) {
    new_id[static_cast<size_t>(id)] = static_cast<int>(sub.blocks.size());
    Block b = netlist.block(id);
    b.id = new_id[static_cast<size_t>(id)];
    b.nets.clear();
    sub.blocks.push_back(std::move(b));
  }
  if (orig_ids) {
    *orig_ids = members;
  }

  for (const Net& net : netlist.nets) {
    Net copy;
    copy.name = net.name;
    copy.dangling = net.dangling;
    copy.global = net.global;
    copy.boundary = net.boundary;
    bool truncated = false;
    if (net.driver && new_id[static_cast<size_t>(net.driver->block)] >= 0) {
      copy.driver = PinRef{new_id[static_cast<size_t>(net.driver->block)],
                           net.driver->port};
    } else if (net.driver) {
      truncated = true;
    }
    for (const PinRef& s : net.sinks) {
      if (new_id[static_cast<size_t>(s.block)] >= 0) {
        copy.sinks.push_back(PinRef{new_id[static_cast<size_t>(s.block)], s.port});
      } else {
        truncated = true;
      }
    }
    if (copy.total_pins() == 0) {
      continue;  // net entirely outside the subset
    }
    copy.boundary = copy.boundary || truncated;
    copy.id = static_cast<int>(sub.nets.size());
    sub.nets.push_back(std::move(copy));
  }

  // finalize() would re-flag truncated driverless nets as dangling, which
  // must not happen: a truncated net is external, not dead. Build adjacency
  // by hand instead.
  for (Net& net : sub.nets) {
    auto attach = [&](const PinRef& pin) {
      sub.blocks[static_cast<size_t>(pin.block)].nets.push_back(net.id);
    };
    if (net.driver) {
      attach(*net.driver);
    }
    for (const PinRef& s : net.sinks) {
      attach(s);
    }
    if (!net.boundary && (net.total_pins() < 2 || !net.driver)) {
      net.dangling = true;
    }
  }
  for (Block& b : sub.blocks) {
    std::sort(b.nets.begin(), b.nets.end());
    b.nets.erase(std::unique(b.nets.begin(), b.nets.end()), b.nets.end());
  }
  return sub;
}

}  // namespace rentlens
