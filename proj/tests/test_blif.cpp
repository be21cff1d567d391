#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "rentlens/blif.hpp"
#include "rentlens/error.hpp"
#include "rentlens/gnl.hpp"
#include "rentlens/rng.hpp"

using namespace rentlens;

namespace {

constexpr const char* kMinimal =
    ".model c\n.inputs a b\n.outputs y\n.names a b y\n11 1\n.end\n";

// Name-keyed incidence: for every net, its driver and sink (block name,
// port) sets; plus every block's kind. Stable under renumbering.
std::string incidence_key(const Netlist& n) {
  std::map<std::string, std::string> by_net;
  for (const Net& net : n.nets) {
    std::string desc;
    if (net.driver) {
      desc += "<" + n.block(net.driver->block).name + ":" + net.driver->port;
    }
    std::set<std::string> sinks;
    for (const PinRef& s : net.sinks) {
      sinks.insert(n.block(s.block).name + ":" + s.port);
    }
    for (const std::string& s : sinks) {
      desc += ">" + s;
    }
    desc += net.dangling ? "D" : "";
    desc += net.global ? "G" : "";
    by_net[net.name] += desc;
  }
  std::string out;
  for (const auto& [name, desc] : by_net) {
    out += name + "=" + desc + ";";
  }
  std::map<std::string, std::string> blocks;
  for (const Block& b : n.blocks) {
    blocks[b.name] = to_string(b.kind);
  }
  for (const auto& [name, kind] : blocks) {
    out += name + ":" + kind + ";";
  }
  return out;
}

}  // namespace

TEST_CASE("minimal model parses to the expected shape") {
  const Netlist n = parse_blif(kMinimal);
  CHECK(n.name == "c");
  CHECK(n.blocks.size() == 4);  // 2 PI + LUT + PO
  CHECK(n.nets.size() == 3);
  CHECK(block_stats(n).avg_terminals == doctest::Approx(3.0));
}

TEST_CASE("a latch brings its own blocks and a global control net") {
  const std::string text =
      ".model c\n.inputs a b\n.outputs y\n.names a b y\n11 1\n"
      ".latch y q re clk 0\n.end\n";
  std::vector<std::string> warnings;
  const Netlist n = parse_blif(text, &warnings);
  CHECK(n.blocks.size() == 6);  // 2 PI + LUT + LATCH + PO + implicit clk PI
  int latch_pins = -1;
  bool clk_global = false;
  for (const Block& b : n.blocks) {
    if (b.kind == BlockKind::Latch) {
      latch_pins = b.pin_count();
    }
  }
  for (const Net& net : n.nets) {
    if (net.name == "clk") {
      clk_global = net.global;
    }
  }
  CHECK(latch_pins == 3);
  CHECK(clk_global);
  CHECK(!warnings.empty());  // the implicit primary input is reported
}

TEST_CASE("missing .end is a syntax error naming the last line") {
  const std::string text = ".model c\n.inputs a\n.outputs y\n.names a y\n1 1\n";
  try {
    parse_blif(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
}

TEST_CASE("multiple drivers are rejected") {
  const std::string text =
      ".model c\n.inputs a b\n.outputs y\n.names a y\n1 1\n.names b y\n1 1\n.end\n";
  CHECK_THROWS_AS(parse_blif(text), ParseError);
}

TEST_CASE("undriven nets warn and go dangling") {
  const std::string text = ".model c\n.outputs y\n.names a y\n1 1\n.end\n";
  std::vector<std::string> warnings;
  const Netlist n = parse_blif(text, &warnings);
  REQUIRE(!warnings.empty());
  bool found_dangling = false;
  for (const Net& net : n.nets) {
    if (net.name == "a") {
      found_dangling = net.dangling;
    }
  }
  CHECK(found_dangling);
}

TEST_CASE("comments and continuations parse per BLIF convention") {
  const std::string text =
      "# header comment\n.model c  # trailing\n.inputs a \\\n b\n"
      ".outputs y\n.names a b \\\ny\n11 1\n.end\n";
  const Netlist n = parse_blif(text);
  CHECK(n.blocks.size() == 4);
  CHECK(n.nets.size() == 3);
}

TEST_CASE(".subckt becomes a black box with inferred directions") {
  const std::string text =
      ".model c\n.inputs a\n.outputs y\n.subckt mul x=a z=w\n.names w y\n1 1\n.end\n";
  const Netlist n = parse_blif(text);
  int boxes = 0;
  for (const Block& b : n.blocks) {
    if (b.kind == BlockKind::BlackBox) {
      ++boxes;
      CHECK(b.opaque == "mul");
      CHECK(b.pin_count() == 2);
    }
  }
  CHECK(boxes == 1);
  for (const Net& net : n.nets) {
    if (net.name == "w") {
      REQUIRE(net.driver.has_value());
      CHECK(n.block(net.driver->block).kind == BlockKind::BlackBox);
    }
  }
}

TEST_CASE("round-trip preserves the minimal model") {
  const Netlist a = parse_blif(kMinimal);
  const Netlist b = parse_blif(write_blif(a));
  CHECK(incidence_key(a) == incidence_key(b));
}

TEST_CASE("round-trip is incidence-preserving on generated netlists") {
  for (std::uint64_t seed : {1, 2}) {
    GenSpec spec;
    spec.n_blocks = 512;
    spec.target_r = 0.6;
    spec.seed = seed;
    const Netlist a = generate(spec);
    const Netlist b = parse_blif(write_blif(a));
    CHECK(incidence_key(a) == incidence_key(b));
    CHECK(a.blocks.size() == b.blocks.size());
    CHECK(a.nets.size() == b.nets.size());
  }
}

TEST_CASE("round-trip keeps latched designs and their globals") {
  GenSpec spec;
  spec.n_blocks = 128;
  spec.target_r = 0.55;
  spec.seed = 5;
  spec.latch_fraction = 0.3;
  const Netlist a = generate(spec);
  const Netlist b = parse_blif(write_blif(a));
  CHECK(incidence_key(a) == incidence_key(b));
}

TEST_CASE("writing an empty netlist yields a parseable skeleton") {
  Netlist empty;
  empty.name = "void";
  const std::string text = write_blif(empty);
  const Netlist back = parse_blif(text);
  CHECK(back.blocks.empty());
  CHECK(back.nets.empty());
}

TEST_CASE("mutated inputs never escape as anything but ParseError") {
  GenSpec spec;
  spec.n_blocks = 32;
  spec.target_r = 0.6;
  spec.seed = 3;
  const std::string base = write_blif(generate(spec));
  std::mt19937_64 rng(0xf22);
  int parsed = 0;
  int rejected = 0;
  for (int iter = 0; iter < 400; ++iter) {
    std::string text = base;
    const int edits = 1 + static_cast<int>(rng() % 8);
    for (int k = 0; k < edits; ++k) {
      switch (rng() % 4) {
        case 0:  // flip a byte
          text[rand_index(rng, text.size())] =
              static_cast<char>(rng() % 256);
          break;
        case 1:  // truncate
          text.resize(rand_index(rng, text.size()) + 1);
          break;
        case 2:  // duplicate a slice
          {
            const size_t at = rand_index(rng, text.size());
            text.insert(at, text.substr(at / 2, 16));
          }
          break;
        default:  // delete a slice
          {
            const size_t at = rand_index(rng, text.size());
            text.erase(at, rng() % 24);
          }
      }
    }
    try {
      const Netlist n = parse_blif(text);
      (void)n;
      ++parsed;
    } catch (const ParseError&) {
      ++rejected;
    }
  }
  CHECK(parsed + rejected == 400);
  CHECK(rejected > 0);
}
