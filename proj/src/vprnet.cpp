#include "rentlens/vprnet.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "rentlens/error.hpp"
#include "rentlens/xml.hpp"

namespace rentlens {

namespace {

int count_used_entries(const std::string& text) {
  std::istringstream ss(text);
  std::string tok;
  int used = 0;
  while (ss >> tok) {
    if (tok != "open") {
      ++used;
    }
  }
  return used;
}

// Sum of non-`open` entries across every <port> of a section, plus any bare
// text (the VTR top level lists io names without port wrappers).
int count_section(const XmlNode& section) {
  int used = count_used_entries(section.text);
  for (const XmlNode& child : section.children) {
    if (child.name == "port") {
      used += count_used_entries(child.text);
    }
  }
  return used;
}

void collect_leaves(const XmlNode& node, std::vector<std::string>& out) {
  bool has_block_child = false;
  for (const XmlNode& child : node.children) {
    if (child.name == "block") {
      has_block_child = true;
      const std::string* nm = child.attr("name");
      if (!nm) {
        throw ParseError("<block> without a name attribute");
      }
      if (*nm == "open") {
        continue;
      }
      collect_leaves(child, out);
    }
  }
  if (!has_block_child) {
    const std::string* nm = node.attr("name");
    if (nm && *nm != "open") {
      out.push_back(*nm);
    }
  }
}

}  // namespace

CrossingPins crossing_pins(const Netlist& prepack,
                           const std::vector<int>& primitives,
                           bool ignore_globals) {
  std::vector<char> inside(prepack.blocks.size(), 0);
  for (int b : primitives) {
    inside[static_cast<size_t>(b)] = 1;
  }
  CrossingPins cp;
  std::vector<char> seen(prepack.nets.size(), 0);
  for (int b : primitives) {
    for (int e : prepack.block(b).nets) {
      if (seen[static_cast<size_t>(e)]) {
        continue;
      }
      seen[static_cast<size_t>(e)] = 1;
      const Net& net = prepack.net(e);
      if (net.dangling) {
        continue;
      }
      bool pin_outside = net.boundary;
      if (!pin_outside && net.driver &&
          !inside[static_cast<size_t>(net.driver->block)]) {
        pin_outside = true;
      }
      if (!pin_outside) {
        for (const PinRef& s : net.sinks) {
          if (!inside[static_cast<size_t>(s.block)]) {
            pin_outside = true;
            break;
          }
        }
      }
      if (!pin_outside) {
        continue;
      }
      if (ignore_globals && net.global) {
        ++cp.clocks;
        continue;
      }
      const bool driven_inside =
          net.driver && inside[static_cast<size_t>(net.driver->block)];
      if (driven_inside) {
        ++cp.outputs;
      } else {
        ++cp.inputs;
      }
    }
  }
  return cp;
}

ClusterMap parse_vpr_net(std::string_view xml_text, const Netlist& prepack,
                         std::vector<std::string>* warnings) {
  const XmlNode root = parse_xml(xml_text);
  if (root.name != "block") {
    throw ParseError("root element must be <block>, got <" + root.name + ">");
  }

  std::unordered_map<std::string, int> block_by_name;
  for (const Block& b : prepack.blocks) {
    block_by_name.emplace(b.name, b.id);
  }

  ClusterMap cm;
  cm.primitive_owner.assign(prepack.blocks.size(), -1);

  for (const XmlNode& child : root.children) {
    if (child.name != "block") {
      continue;
    }
    const std::string* name = child.attr("name");
    if (!name) {
      throw ParseError("cluster <block> without a name attribute");
    }
    if (*name == "open") {
      continue;
    }
    const std::string* instance = child.attr("instance");
    if (!instance) {
      throw ParseError("cluster '" + *name + "' has no instance attribute");
    }

    Cluster cluster;
    cluster.id = static_cast<int>(cm.clusters.size());
    cluster.name = *name;
    cluster.kind = instance->substr(0, instance->find('['));

    for (const XmlNode& section : child.children) {
      if (section.name == "inputs") {
        cluster.used_input_pins += count_section(section);
      } else if (section.name == "outputs") {
        cluster.used_output_pins += count_section(section);
      } else if (section.name == "clocks") {
        cluster.used_clock_pins += count_section(section);
      }
    }

    std::vector<std::string> leaves;
    for (const XmlNode& sub : child.children) {
      if (sub.name != "block") {
        continue;
      }
      const std::string* sub_name = sub.attr("name");
      if (!sub_name) {
        throw ParseError("<block> without a name attribute");
      }
      if (*sub_name == "open") {
        continue;
      }
      collect_leaves(sub, leaves);
    }
    if (leaves.empty()) {
      throw ParseError("cluster '" + *name + "' contains no primitives");
    }
    for (const std::string& leaf : leaves) {
      auto it = block_by_name.find(leaf);
      if (it == block_by_name.end()) {
        throw ParseError("unknown primitive '" + leaf +
                         "' (not in the pre-packing netlist)");
      }
      if (cm.primitive_owner[static_cast<size_t>(it->second)] != -1) {
        throw ParseError("primitive '" + leaf +
                         "' appears in more than one cluster");
      }
      cm.primitive_owner[static_cast<size_t>(it->second)] = cluster.id;
      cluster.primitives.push_back(it->second);
    }
    std::sort(cluster.primitives.begin(), cluster.primitives.end());
    cm.clusters.push_back(std::move(cluster));
  }

  // Every logic primitive must be packed; I/O blocks missing from the file
  // get synthesized singleton pseudo-clusters.
  for (const Block& b : prepack.blocks) {
    if (cm.primitive_owner[static_cast<size_t>(b.id)] != -1) {
      continue;
    }
    if (is_logic(b.kind)) {
      throw ParseError("primitive '" + b.name +
                       "' is not present in any cluster");
    }
    Cluster io;
    io.id = static_cast<int>(cm.clusters.size());
    io.name = b.name;
    io.kind = "io";
    io.primitives.push_back(b.id);
    if (!b.nets.empty()) {
      const Net& net = prepack.net(b.nets[0]);
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

  if (warnings) {
    for (const Cluster& c : cm.clusters) {
      if (c.kind == "io") {
        continue;
      }
      const CrossingPins cp = crossing_pins(prepack, c.primitives);
      const int from_ports = c.used_input_pins + c.used_output_pins;
      const int from_nets = cp.inputs + cp.outputs;
      if (from_ports != from_nets) {
        warnings->push_back(
            "cluster '" + c.name + "': " + std::to_string(from_ports) +
            " used pins in ports but " + std::to_string(from_nets) +
            " distinct crossing nets (signal routed through the cluster?)");
      }
    }
  }
  return cm;
}

ClusterMap load_vpr_net_file(const std::string& path, const Netlist& prepack,
                             std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_vpr_net(ss.str(), prepack, warnings);
}

ClusterAverages cluster_averages(const ClusterMap& cm, std::string_view kind,
                                 bool include_clocks) {
  ClusterAverages avg;
  long long prim_sum = 0;
  long long pin_sum = 0;
  for (const Cluster& c : cm.clusters) {
    if (c.kind != kind) {
      continue;
    }
    ++avg.n_clusters;
    prim_sum += c.primitive_count();
    pin_sum += c.used_input_pins + c.used_output_pins;
    if (include_clocks) {
      pin_sum += c.used_clock_pins;
    }
  }
  if (avg.n_clusters == 0) {
    throw AnalysisError("no clusters of kind '" + std::string(kind) + "'");
  }
  avg.b_avg = static_cast<double>(prim_sum) / avg.n_clusters;
  avg.t_avg = static_cast<double>(pin_sum) / avg.n_clusters;
  return avg;
}

}  // namespace rentlens
