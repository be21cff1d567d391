#include "rentlens/pack.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rentlens/error.hpp"
#include "rentlens/xml.hpp"

namespace rentlens {

void PackConfig::validate() const {
  if (target_ext_pin_util < 0.0 || target_ext_pin_util > 1.0) {
    throw DomainError("target_ext_pin_util must be in [0, 1]");
  }
}

namespace {

bool countable(const Net& net) { return !net.dangling && !net.global; }

struct Limits {
  int capacity;
  int input_limit;  // utilization knob, inputs only
  int inputs;
  int outputs;
  int clocks;
};

bool fits(const Netlist& netlist, const std::vector<int>& members,
          const Limits& lim) {
  if (static_cast<int>(members.size()) > lim.capacity) {
    return false;
  }
  const CrossingPins cp = crossing_pins(netlist, members);
  return cp.inputs <= lim.input_limit && cp.outputs <= lim.outputs &&
         cp.clocks <= lim.clocks;
}

int seed_score(const Netlist& netlist, const Block& b, SeedPolicy policy) {
  if (policy == SeedPolicy::MostPins) {
    return b.pin_count();
  }
  // MostCriticalNets: two-pin nets are the ones a cluster can actually
  // absorb whole, so blocks on many of them make the best seeds.
  int two_pin = 0;
  for (int e : b.nets) {
    const Net& net = netlist.net(e);
    if (countable(net) && net.total_pins() == 2) {
      ++two_pin;
    }
  }
  return two_pin * 1024 + b.pin_count();
}

}  // namespace

ClusterMap pack(const Netlist& netlist, const ArchSpec& arch,
                const PackConfig& cfg, std::vector<std::string>* diagnostics) {
  cfg.validate();
  arch.validate();
  Limits lim;
  lim.capacity = arch.cluster_capacity;
  lim.inputs = arch.cluster_inputs;
  lim.outputs = arch.cluster_outputs;
  lim.clocks = arch.clocks;
  lim.input_limit = std::max(
      1, static_cast<int>(std::floor(cfg.target_ext_pin_util *
                                     arch.cluster_inputs)));

  // A primitive that busts the architecture on its own can never be packed.
  for (const Block& b : netlist.blocks) {
    if (!is_logic(b.kind)) {
      continue;
    }
    const CrossingPins cp = crossing_pins(netlist, {b.id});
    if (cp.inputs > lim.inputs) {
      throw AnalysisError("unpackable: block '" + b.name + "' needs " +
                          std::to_string(cp.inputs) + " inputs, CLB has " +
                          std::to_string(lim.inputs));
    }
    if (cp.outputs > lim.outputs || cp.clocks > lim.clocks) {
      throw AnalysisError("unpackable: block '" + b.name +
                          "' exceeds CLB output or clock pins");
    }
  }

  ClusterMap cm;
  cm.primitive_owner.assign(netlist.blocks.size(), -1);
  std::vector<char> clustered(netlist.blocks.size(), 0);
  std::vector<int> attraction(netlist.blocks.size(), 0);
  std::vector<char> net_touched(netlist.nets.size(), 0);

  std::vector<int> todo;
  for (const Block& b : netlist.blocks) {
    if (is_logic(b.kind)) {
      todo.push_back(b.id);
    }
  }

  int remaining = static_cast<int>(todo.size());
  while (remaining > 0) {
    // Seed: best score, lowest id on ties.
    int seed = -1;
    int best_score = -1;
    for (int b : todo) {
      if (clustered[static_cast<size_t>(b)]) {
        continue;
      }
      const int sc = seed_score(netlist, netlist.block(b), cfg.seed_policy);
      if (sc > best_score) {
        best_score = sc;
        seed = b;
      }
    }

    std::vector<int> members{seed};
    clustered[static_cast<size_t>(seed)] = 1;
    --remaining;

    std::fill(attraction.begin(), attraction.end(), 0);
    std::fill(net_touched.begin(), net_touched.end(), 0);
    auto absorb = [&](int b) {
      for (int e : netlist.block(b).nets) {
        if (net_touched[static_cast<size_t>(e)] ||
            !countable(netlist.net(e))) {
          continue;
        }
        net_touched[static_cast<size_t>(e)] = 1;
        const Net& net = netlist.net(e);
        if (net.driver) {
          ++attraction[static_cast<size_t>(net.driver->block)];
        }
        for (const PinRef& s : net.sinks) {
          ++attraction[static_cast<size_t>(s.block)];
        }
      }
    };
    absorb(seed);

    if (!fits(netlist, members, lim)) {
      // Bustable only through the utilization knob; arch limits were
      // pre-checked. Keep the lone block and report it.
      if (diagnostics) {
        diagnostics->push_back(
            "block '" + netlist.block(seed).name +
            "' alone exceeds the target pin utilization; packed as a "
            "singleton cluster");
      }
    } else {
      while (static_cast<int>(members.size()) < lim.capacity && remaining > 0) {
        // Best attracted candidate: shared-net count desc, id asc. If it no
        // longer fits, attracted growth is over (scanning deeper would
        // hand-pick pin-cheap blocks and undo the utilization knob).
        int best = -1;
        int best_attr = 0;
        for (int b : todo) {
          if (!clustered[static_cast<size_t>(b)] &&
              attraction[static_cast<size_t>(b)] > best_attr) {
            best_attr = attraction[static_cast<size_t>(b)];
            best = b;
          }
        }
        int chosen = -1;
        if (best >= 0) {
          members.push_back(best);
          if (fits(netlist, members, lim)) {
            chosen = best;
          } else {
            members.pop_back();
            break;  // pin wall: the cluster is as full as its pins allow
          }
        } else if (cfg.allow_unrelated) {
          // Nothing attracted is left; absorb any block that still fits.
          for (int b : todo) {
            if (clustered[static_cast<size_t>(b)]) {
              continue;
            }
            members.push_back(b);
            if (fits(netlist, members, lim)) {
              chosen = b;
              break;
            }
            members.pop_back();
          }
        }
        if (chosen < 0) {
          break;
        }
        clustered[static_cast<size_t>(chosen)] = 1;
        --remaining;
        absorb(chosen);
      }
    }

    Cluster cluster;
    cluster.id = static_cast<int>(cm.clusters.size());
    cluster.name = netlist.block(seed).name;
    cluster.kind = "clb";
    std::sort(members.begin(), members.end());
    cluster.primitives = members;
    const CrossingPins cp = crossing_pins(netlist, members);
    cluster.used_input_pins = cp.inputs;
    cluster.used_output_pins = cp.outputs;
    cluster.used_clock_pins = cp.clocks;
    for (int b : members) {
      cm.primitive_owner[static_cast<size_t>(b)] = cluster.id;
    }
    cm.clusters.push_back(std::move(cluster));
  }

  // Singleton pseudo-clusters for the I/O blocks.
  for (const Block& b : netlist.blocks) {
    if (is_logic(b.kind)) {
      continue;
    }
    Cluster io;
    io.id = static_cast<int>(cm.clusters.size());
    io.name = b.name;
    io.kind = "io";
    io.primitives.push_back(b.id);
    if (!b.nets.empty()) {
      const Net& net = netlist.net(b.nets[0]);
      if (!net.dangling) {
        if (net.global) {
          io.used_clock_pins = 1;
        } else if (b.kind == BlockKind::PrimaryInput) {
          io.used_output_pins = 1;
        } else {
          io.used_input_pins = 1;
        }
      }
    }
    cm.primitive_owner[static_cast<size_t>(b.id)] = io.id;
    cm.clusters.push_back(std::move(io));
  }
  return cm;
}

namespace {

void emit_port(std::string& out, int indent, const std::string& port_name,
               const std::vector<std::string>& entries) {
  out.append(static_cast<size_t>(indent), ' ');
  out += "<port name=\"" + port_name + "\">";
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i) {
      out += ' ';
    }
    out += xml_escape(entries[i]);
  }
  out += "</port>\n";
}

// Nets entering/leaving/clocking the member set, each listed once,
// ascending net id, padded with `open` to the port width.
struct ClusterNets {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> clocks;
};

ClusterNets cluster_nets(const Netlist& netlist, const std::vector<int>& members) {
  std::vector<char> inside(netlist.blocks.size(), 0);
  for (int b : members) {
    inside[static_cast<size_t>(b)] = 1;
  }
  ClusterNets cn;
  std::vector<char> seen(netlist.nets.size(), 0);
  std::vector<int> net_ids;
  for (int b : members) {
    for (int e : netlist.block(b).nets) {
      if (!seen[static_cast<size_t>(e)]) {
        seen[static_cast<size_t>(e)] = 1;
        net_ids.push_back(e);
      }
    }
  }
  std::sort(net_ids.begin(), net_ids.end());
  for (int e : net_ids) {
    const Net& net = netlist.net(e);
    if (net.dangling) {
      continue;
    }
    bool pin_outside = false;
    if (net.driver && !inside[static_cast<size_t>(net.driver->block)]) {
      pin_outside = true;
    }
    for (const PinRef& s : net.sinks) {
      if (pin_outside) {
        break;
      }
      if (!inside[static_cast<size_t>(s.block)]) {
        pin_outside = true;
      }
    }
    if (!pin_outside) {
      continue;
    }
    if (net.global) {
      cn.clocks.push_back(net.name);
    } else if (net.driver && inside[static_cast<size_t>(net.driver->block)]) {
      cn.outputs.push_back(net.name);
    } else {
      cn.inputs.push_back(net.name);
    }
  }
  return cn;
}

void pad_open(std::vector<std::string>& v, int width) {
  while (static_cast<int>(v.size()) < width) {
    v.emplace_back("open");
  }
}

void emit_leaf(std::string& out, const Netlist& netlist, int block_id,
               int indent, const std::string& instance) {
  const Block& b = netlist.block(block_id);
  std::vector<std::pair<std::string, std::string>> ins;
  std::string driven;
  std::string clock;
  for (int e : b.nets) {
    const Net& net = netlist.net(e);
    if (net.driver && net.driver->block == block_id) {
      driven = net.name;
    }
    for (const PinRef& s : net.sinks) {
      if (s.block != block_id) {
        continue;
      }
      if (net.global && s.port == "clk") {
        clock = net.name;
      } else {
        ins.emplace_back(s.port, net.name);
      }
    }
  }
  std::sort(ins.begin(), ins.end());

  const std::string pad(static_cast<size_t>(indent), ' ');
  out += pad + "<block name=\"" + xml_escape(b.name) + "\" instance=\"" +
         instance + "\">\n";
  out += pad + "  <inputs>\n";
  std::vector<std::string> in_nets;
  for (auto& [port, net] : ins) {
    in_nets.push_back(net);
  }
  if (in_nets.empty()) {
    in_nets.emplace_back("open");
  }
  emit_port(out, indent + 4, "in", in_nets);
  out += pad + "  </inputs>\n";
  out += pad + "  <outputs>\n";
  emit_port(out, indent + 4, "out", {driven.empty() ? "open" : driven});
  out += pad + "  </outputs>\n";
  out += pad + "  <clocks>\n";
  emit_port(out, indent + 4, "clk", {clock.empty() ? "open" : clock});
  out += pad + "  </clocks>\n";
  out += pad + "</block>\n";
}

}  // namespace

std::string write_net(const ClusterMap& cm, const Netlist& netlist,
                      const ArchSpec& arch) {
  std::string out;
  out += "<block name=\"" + xml_escape(netlist.name) +
         ".net\" instance=\"FPGA_packed_netlist[0]\">\n";

  std::vector<std::string> top_in;
  std::vector<std::string> top_out;
  std::vector<std::string> top_clk;
  for (const Block& b : netlist.blocks) {
    if (b.kind == BlockKind::PrimaryInput) {
      const bool drives_global =
          !b.nets.empty() && netlist.net(b.nets[0]).global;
      (drives_global ? top_clk : top_in).push_back(b.name);
    } else if (b.kind == BlockKind::PrimaryOutput) {
      top_out.push_back(b.name);
    }
  }
  auto emit_list = [&](const char* tag, const std::vector<std::string>& v) {
    out += "  <";
    out += tag;
    out += ">";
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) {
        out += ' ';
      }
      out += xml_escape(v[i]);
    }
    out += "</";
    out += tag;
    out += ">\n";
  };
  emit_list("inputs", top_in);
  emit_list("outputs", top_out);
  emit_list("clocks", top_clk);

  std::map<std::string, int> kind_counter;
  for (const Cluster& c : cm.clusters) {
    const int index = kind_counter[c.kind]++;
    out += "  <block name=\"" + xml_escape(c.name) + "\" instance=\"" +
           c.kind + "[" + std::to_string(index) + "]\" mode=\"default\">\n";
    ClusterNets cn = cluster_nets(netlist, c.primitives);
    if (c.kind == "clb") {
      pad_open(cn.inputs, arch.cluster_inputs);
      pad_open(cn.outputs, arch.cluster_outputs);
      pad_open(cn.clocks, arch.clocks);
    } else {
      pad_open(cn.inputs, 1);
      pad_open(cn.outputs, 1);
      pad_open(cn.clocks, 1);
    }
    out += "    <inputs>\n";
    emit_port(out, 6, "I", cn.inputs);
    out += "    </inputs>\n";
    out += "    <outputs>\n";
    emit_port(out, 6, "O", cn.outputs);
    out += "    </outputs>\n";
    out += "    <clocks>\n";
    emit_port(out, 6, "clk", cn.clocks);
    out += "    </clocks>\n";
    int ble = 0;
    for (int b : c.primitives) {
      std::string instance = "ble[" + std::to_string(ble++) + "]";
      if (c.kind == "io") {
        instance = netlist.block(b).kind == BlockKind::PrimaryInput
                       ? "inpad[0]"
                       : "outpad[0]";
      }
      emit_leaf(out, netlist, b, 4, instance);
    }
    out += "  </block>\n";
  }
  out += "</block>\n";
  return out;
}

}  // namespace rentlens
