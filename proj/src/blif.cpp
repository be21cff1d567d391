#include "rentlens/blif.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "rentlens/error.hpp"

namespace rentlens {

namespace {

struct LogicalLine {
  int line_no = 0;  // first physical line
  std::vector<std::string> tokens;
};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}

// Physical lines -> comment-stripped, continuation-joined token lines.
std::vector<LogicalLine> tokenize(std::string_view text) {
  std::vector<LogicalLine> lines;
  LogicalLine cur;
  bool continuing = false;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, (nl == std::string_view::npos ? text.size() : nl) - pos);
    ++line_no;
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;

    const size_t hash = raw.find('#');
    if (hash != std::string_view::npos) {
      raw = raw.substr(0, hash);
    }
    bool continued = false;
    while (!raw.empty() && is_space(raw.back())) {
      raw.remove_suffix(1);
    }
    if (!raw.empty() && raw.back() == '\\') {
      continued = true;
      raw.remove_suffix(1);
    }

    if (!continuing) {
      cur = LogicalLine{};
      cur.line_no = line_no;
    }
    size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && is_space(raw[i])) {
        ++i;
      }
      const size_t start = i;
      while (i < raw.size() && !is_space(raw[i])) {
        ++i;
      }
      if (i > start) {
        cur.tokens.emplace_back(raw.substr(start, i - start));
      }
    }
    continuing = continued;
    if (!continuing && !cur.tokens.empty()) {
      lines.push_back(std::move(cur));
      cur = LogicalLine{};
    }
    if (nl == std::string_view::npos) {
      break;
    }
  }
  if (continuing && !cur.tokens.empty()) {
    lines.push_back(std::move(cur));
  }
  return lines;
}

struct NamesGate {
  std::vector<std::string> inputs;
  std::string output;
  std::string rows;  // raw truth-table text, kept opaque
  int line = 0;
};

struct LatchDecl {
  std::string input;
  std::string output;
  std::string type;     // empty when unclocked
  std::string control;  // empty or NIL when unclocked
  std::string init;
  int line = 0;
};

struct SubcktDecl {
  std::string model;
  std::vector<std::pair<std::string, std::string>> conns;  // formal -> actual
  int line = 0;
};

}  // namespace

Netlist parse_blif(std::string_view text, std::vector<std::string>* warnings) {
  const std::vector<LogicalLine> lines = tokenize(text);

  std::string model_name;
  bool saw_model = false;
  bool saw_end = false;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<NamesGate> gates;
  std::vector<LatchDecl> latches;
  std::vector<SubcktDecl> subckts;
  int last_line = 0;

  for (size_t li = 0; li < lines.size() && !saw_end; ++li) {
    const LogicalLine& ll = lines[li];
    last_line = ll.line_no;
    const std::string& head = ll.tokens[0];
    if (head[0] != '.') {
      throw ParseError("stray token '" + head + "' outside a .names block",
                       ll.line_no, 1);
    }
    if (head == ".model") {
      if (saw_model) {
        throw ParseError("multiple .model directives (one model per file)",
                         ll.line_no);
      }
      saw_model = true;
      model_name = ll.tokens.size() > 1 ? ll.tokens[1] : "top";
    } else if (head == ".inputs") {
      inputs.insert(inputs.end(), ll.tokens.begin() + 1, ll.tokens.end());
    } else if (head == ".outputs") {
      outputs.insert(outputs.end(), ll.tokens.begin() + 1, ll.tokens.end());
    } else if (head == ".names") {
      if (ll.tokens.size() < 2) {
        throw ParseError(".names needs at least an output net", ll.line_no);
      }
      NamesGate g;
      g.line = ll.line_no;
      g.output = ll.tokens.back();
      g.inputs.assign(ll.tokens.begin() + 1, ll.tokens.end() - 1);
      // Swallow the truth-table rows that follow.
      while (li + 1 < lines.size() && lines[li + 1].tokens[0][0] != '.') {
        const LogicalLine& row = lines[li + 1];
        std::string joined;
        for (const std::string& t : row.tokens) {
          if (!joined.empty()) {
            joined += ' ';
          }
          joined += t;
        }
        g.rows += joined;
        g.rows += '\n';
        ++li;
        last_line = row.line_no;
      }
      gates.push_back(std::move(g));
    } else if (head == ".latch") {
      LatchDecl l;
      l.line = ll.line_no;
      const size_t argc = ll.tokens.size() - 1;
      if (argc < 2 || argc > 5) {
        throw ParseError(".latch expects 2-5 arguments, got " +
                             std::to_string(argc),
                         ll.line_no);
      }
      l.input = ll.tokens[1];
      l.output = ll.tokens[2];
      if (argc >= 4) {
        l.type = ll.tokens[3];
        l.control = ll.tokens[4];
        if (argc == 5) {
          l.init = ll.tokens[5];
        }
      } else if (argc == 3) {
        l.init = ll.tokens[3];
      }
      latches.push_back(std::move(l));
    } else if (head == ".subckt") {
      if (ll.tokens.size() < 2) {
        throw ParseError(".subckt needs a model name", ll.line_no);
      }
      SubcktDecl s;
      s.line = ll.line_no;
      s.model = ll.tokens[1];
      for (size_t i = 2; i < ll.tokens.size(); ++i) {
        const std::string& t = ll.tokens[i];
        const size_t eq = t.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == t.size()) {
          throw ParseError(".subckt connection '" + t +
                               "' is not formal=actual",
                           ll.line_no);
        }
        s.conns.emplace_back(t.substr(0, eq), t.substr(eq + 1));
      }
      subckts.push_back(std::move(s));
    } else if (head == ".end") {
      saw_end = true;
    } else {
      throw ParseError("unsupported directive '" + head + "'", ll.line_no, 1);
    }
  }
  if (!saw_end) {
    throw ParseError("missing .end", std::max(1, last_line));
  }
  if (!saw_model) {
    throw ParseError("missing .model", 1);
  }

  Netlist netlist;
  netlist.name = model_name;
  std::unordered_map<std::string, int> net_id;
  auto net_of = [&](const std::string& nm) {
    auto it = net_id.find(nm);
    if (it != net_id.end()) {
      return it->second;
    }
    const int id = netlist.add_net(nm);
    net_id.emplace(nm, id);
    return id;
  };
  auto set_driver = [&](int net, PinRef pin, int line) {
    Net& n = netlist.nets[static_cast<size_t>(net)];
    if (n.driver) {
      throw ParseError("net '" + n.name + "' has multiple drivers", line);
    }
    n.driver = std::move(pin);
  };

  for (const std::string& nm : inputs) {
    const int b = netlist.add_block(nm, BlockKind::PrimaryInput);
    set_driver(net_of(nm), PinRef{b, "out"}, 0);
  }
  for (const NamesGate& g : gates) {
    const int b = netlist.add_block(g.output, BlockKind::Lut);
    netlist.blocks.back().opaque = g.rows;
    for (size_t i = 0; i < g.inputs.size(); ++i) {
      netlist.nets[static_cast<size_t>(net_of(g.inputs[i]))].sinks.push_back(
          PinRef{b, "in" + std::to_string(i)});
    }
    set_driver(net_of(g.output), PinRef{b, "out"}, g.line);
  }
  for (const LatchDecl& l : latches) {
    const int b = netlist.add_block(l.output, BlockKind::Latch);
    netlist.blocks.back().opaque = l.type + " " + l.init;
    netlist.nets[static_cast<size_t>(net_of(l.input))].sinks.push_back(
        PinRef{b, "D"});
    set_driver(net_of(l.output), PinRef{b, "Q"}, l.line);
    if (!l.control.empty() && l.control != "NIL") {
      const int cn = net_of(l.control);
      netlist.nets[static_cast<size_t>(cn)].sinks.push_back(PinRef{b, "clk"});
      netlist.nets[static_cast<size_t>(cn)].global = true;
    }
  }
  for (size_t si = 0; si < subckts.size(); ++si) {
    const SubcktDecl& s = subckts[si];
    const int b = netlist.add_block(s.model + "$" + std::to_string(si),
                                    BlockKind::BlackBox);
    netlist.blocks.back().opaque = s.model;
    for (const auto& [formal, actual] : s.conns) {
      const int net = net_of(actual);
      // Direction is not declared in flat BLIF: an otherwise undriven net is
      // taken as an output of this instance, anything else as an input.
      if (!netlist.nets[static_cast<size_t>(net)].driver) {
        set_driver(net, PinRef{b, formal}, s.line);
      } else {
        netlist.nets[static_cast<size_t>(net)].sinks.push_back(
            PinRef{b, formal});
      }
    }
  }
  for (const std::string& nm : outputs) {
    const int b = netlist.add_block("out:" + nm, BlockKind::PrimaryOutput);
    netlist.nets[static_cast<size_t>(net_of(nm))].sinks.push_back(
        PinRef{b, "in"});
  }

  // Undriven latch controls become implicit primary inputs (the usual BLIF
  // convention for benchmark clocks); other undriven nets stay dangling.
  for (size_t i = 0; i < netlist.nets.size(); ++i) {
    Net& n = netlist.nets[i];
    if (n.driver) {
      continue;
    }
    if (n.global) {
      const int b = netlist.add_block(n.name, BlockKind::PrimaryInput);
      n.driver = PinRef{b, "out"};
      if (warnings) {
        warnings->push_back("control net '" + n.name +
                            "' is undriven; added an implicit primary input");
      }
    } else {
      n.dangling = true;
      if (warnings) {
        warnings->push_back("undriven net '" + n.name + "' marked dangling");
      }
    }
  }

  netlist.finalize();
  return netlist;
}

Netlist parse_blif_file(const std::string& path,
                        std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_blif(ss.str(), warnings);
}

namespace {

// Wrap a token list with BLIF line continuations.
void emit_wrapped(std::string& out, const std::string& head,
                  const std::vector<std::string>& tokens) {
  out += head;
  size_t col = head.size();
  for (const std::string& t : tokens) {
    if (col + t.size() + 1 > 78) {
      out += " \\\n ";
      col = 1;
    }
    out += ' ';
    out += t;
    col += t.size() + 1;
  }
  out += '\n';
}

}  // namespace

std::string write_blif(const Netlist& netlist) {
  // port -> net maps per block, rebuilt from the nets.
  std::vector<std::map<std::string, std::string>> in_ports(netlist.blocks.size());
  std::vector<std::string> out_net(netlist.blocks.size());
  for (const Net& n : netlist.nets) {
    if (n.driver) {
      out_net[static_cast<size_t>(n.driver->block)] = n.name;
      in_ports[static_cast<size_t>(n.driver->block)];  // ensure slot
    }
    for (const PinRef& s : n.sinks) {
      in_ports[static_cast<size_t>(s.block)][s.port] = n.name;
    }
  }

  std::string out;
  out += ".model " + (netlist.name.empty() ? std::string("top") : netlist.name) +
         "\n";
  std::vector<std::string> pis;
  std::vector<std::string> pos;
  for (const Block& b : netlist.blocks) {
    if (b.kind == BlockKind::PrimaryInput) {
      pis.push_back(out_net[static_cast<size_t>(b.id)]);
    } else if (b.kind == BlockKind::PrimaryOutput) {
      for (int e : b.nets) {
        pos.push_back(netlist.net(e).name);
      }
    }
  }
  if (!pis.empty()) {
    emit_wrapped(out, ".inputs", pis);
  }
  if (!pos.empty()) {
    emit_wrapped(out, ".outputs", pos);
  }

  for (const Block& b : netlist.blocks) {
    switch (b.kind) {
      case BlockKind::Lut: {
        std::vector<std::string> tokens;
        // LUT inputs are ports in0..inK; numeric order is the column order.
        std::vector<std::pair<int, std::string>> ins;
        for (const auto& [port, net] : in_ports[static_cast<size_t>(b.id)]) {
          ins.emplace_back(std::atoi(port.c_str() + 2), net);
        }
        std::sort(ins.begin(), ins.end());
        for (auto& [idx, net] : ins) {
          tokens.push_back(net);
        }
        tokens.push_back(out_net[static_cast<size_t>(b.id)]);
        emit_wrapped(out, ".names", tokens);
        if (!b.opaque.empty()) {
          out += b.opaque;
        } else if (!ins.empty()) {
          out += std::string(ins.size(), '1') + " 1\n";
        } else {
          out += "1\n";
        }
        break;
      }
      case BlockKind::Latch: {
        const auto& ports = in_ports[static_cast<size_t>(b.id)];
        std::string type = "re";
        std::string init = "2";
        if (!b.opaque.empty()) {
          std::istringstream ss(b.opaque);
          ss >> type >> init;
          if (init.empty()) {
            init = "2";
          }
        }
        out += ".latch " + ports.at("D") + " " + out_net[static_cast<size_t>(b.id)];
        auto clk = ports.find("clk");
        if (clk != ports.end()) {
          out += " " + (type.empty() ? std::string("re") : type) + " " +
                 clk->second;
        }
        out += " " + init + "\n";
        break;
      }
      case BlockKind::BlackBox: {
        std::string model = b.opaque.empty() ? b.name : b.opaque;
        out += ".subckt " + model;
        std::vector<std::pair<std::string, std::string>> conns(
            in_ports[static_cast<size_t>(b.id)].begin(),
            in_ports[static_cast<size_t>(b.id)].end());
        if (!out_net[static_cast<size_t>(b.id)].empty()) {
          // The driving port name is not recorded in in_ports; recover it.
          for (const Net& n : netlist.nets) {
            if (n.driver && n.driver->block == b.id) {
              conns.emplace_back(n.driver->port, n.name);
            }
          }
        }
        std::sort(conns.begin(), conns.end());
        for (const auto& [formal, actual] : conns) {
          out += " " + formal + "=" + actual;
        }
        out += "\n";
        break;
      }
      case BlockKind::PrimaryInput:
      case BlockKind::PrimaryOutput:
        break;
    }
  }
  out += ".end\n";
  return out;
}

}  // namespace rentlens
