#include <doctest.h>

#include "oracles.hpp"
#include "rentlens/error.hpp"
#include "rentlens/netlist.hpp"
#include "rentlens/partition.hpp"
#include "rentlens/rng.hpp"

using namespace rentlens;

namespace {

// a -> LUT1 -> LUT2 -> out
Netlist two_lut_chain() {
  Netlist n;
  n.name = "chain";
  const int pi = n.add_block("a", BlockKind::PrimaryInput);
  const int l1 = n.add_block("l1", BlockKind::Lut);
  const int l2 = n.add_block("l2", BlockKind::Lut);
  const int po = n.add_block("out:y", BlockKind::PrimaryOutput);
  int e = n.add_net("a");
  n.nets[e].driver = PinRef{pi, "out"};
  n.nets[e].sinks.push_back(PinRef{l1, "in0"});
  e = n.add_net("n1");
  n.nets[e].driver = PinRef{l1, "out"};
  n.nets[e].sinks.push_back(PinRef{l2, "in0"});
  e = n.add_net("y");
  n.nets[e].driver = PinRef{l2, "out"};
  n.nets[e].sinks.push_back(PinRef{po, "in"});
  n.finalize();
  return n;
}

}  // namespace

TEST_CASE("block_stats on the two-LUT chain") {
  const Netlist n = two_lut_chain();
  const BlockStats s = block_stats(n);
  CHECK(s.n_blocks == 4);
  CHECK(s.n_nets == 3);
  CHECK(s.avg_terminals == doctest::Approx(2.0));
}

TEST_CASE("block_stats counts a latch's clock pin") {
  Netlist n;
  n.name = "ff";
  const int pi = n.add_block("d", BlockKind::PrimaryInput);
  const int ck = n.add_block("clk", BlockKind::PrimaryInput);
  const int ff = n.add_block("q", BlockKind::Latch);
  int e = n.add_net("d");
  n.nets[e].driver = PinRef{pi, "out"};
  n.nets[e].sinks.push_back(PinRef{ff, "D"});
  e = n.add_net("clk");
  n.nets[e].driver = PinRef{ck, "out"};
  n.nets[e].sinks.push_back(PinRef{ff, "clk"});
  n.nets[e].global = true;
  e = n.add_net("q");
  n.nets[e].driver = PinRef{ff, "Q"};
  n.finalize();
  CHECK(n.nets[2].dangling);  // q drives nothing
  CHECK(block_stats(n).avg_terminals == doctest::Approx(3.0));
}

TEST_CASE("block_stats matches the incidence-matrix recount") {
  for (std::uint64_t seed : {11, 12, 13}) {
    const Netlist n = oracle::random_hypergraph(10, 14, seed);
    CHECK(block_stats(n).avg_terminals ==
          doctest::Approx(oracle::avg_terminals(n)).epsilon(1e-12));
  }
}

TEST_CASE("block_stats requires logic blocks") {
  Netlist n;
  n.name = "io_only";
  const int pi = n.add_block("a", BlockKind::PrimaryInput);
  const int po = n.add_block("out:a", BlockKind::PrimaryOutput);
  const int e = n.add_net("a");
  n.nets[e].driver = PinRef{pi, "out"};
  n.nets[e].sinks.push_back(PinRef{po, "in"});
  n.finalize();
  CHECK_THROWS_AS(block_stats(n), DomainError);
}

TEST_CASE("block_stats is invariant under block and net reordering") {
  const Netlist n = oracle::random_hypergraph(12, 18, 99);
  Netlist rev;
  rev.name = n.name;
  std::vector<int> remap(n.blocks.size());
  for (size_t i = 0; i < n.blocks.size(); ++i) {
    const Block& b = n.blocks[n.blocks.size() - 1 - i];
    remap[static_cast<size_t>(b.id)] = rev.add_block(b.name, b.kind);
  }
  for (size_t i = 0; i < n.nets.size(); ++i) {
    const Net& src = n.nets[n.nets.size() - 1 - i];
    const int id = rev.add_net(src.name);
    if (src.driver) {
      rev.nets[id].driver =
          PinRef{remap[static_cast<size_t>(src.driver->block)], src.driver->port};
    }
    for (const PinRef& s : src.sinks) {
      rev.nets[id].sinks.push_back(
          PinRef{remap[static_cast<size_t>(s.block)], s.port});
    }
  }
  rev.finalize();
  CHECK(block_stats(rev).avg_terminals ==
        doctest::Approx(block_stats(n).avg_terminals).epsilon(1e-12));
}

TEST_CASE("finalize rejects structural violations") {
  Netlist n;
  n.add_block("a", BlockKind::Lut);
  const int e = n.add_net("x");
  n.nets[e].driver = PinRef{5, "out"};  // unknown block
  CHECK_THROWS_AS(n.finalize(), ParseError);

  Netlist two;
  const int pi = two.add_block("p", BlockKind::PrimaryInput);
  const int l = two.add_block("l", BlockKind::Lut);
  int e1 = two.add_net("p1");
  two.nets[e1].driver = PinRef{pi, "out"};
  two.nets[e1].sinks.push_back(PinRef{l, "in0"});
  int e2 = two.add_net("p2");
  two.nets[e2].driver = PinRef{pi, "out2"};  // PI driving two nets
  two.nets[e2].sinks.push_back(PinRef{l, "in1"});
  CHECK_THROWS_AS(two.finalize(), ParseError);
}

TEST_CASE("induced_subnetlist of the full block set is the identity") {
  const Netlist n = two_lut_chain();
  const Netlist sub = induced_subnetlist(n, {0, 1, 2, 3});
  REQUIRE(sub.blocks.size() == n.blocks.size());
  REQUIRE(sub.nets.size() == n.nets.size());
  for (size_t i = 0; i < n.blocks.size(); ++i) {
    CHECK(sub.blocks[i].name == n.blocks[i].name);
    CHECK(sub.blocks[i].pin_count() == n.blocks[i].pin_count());
  }
  for (const Net& net : sub.nets) {
    CHECK_FALSE(net.boundary);
  }
}

TEST_CASE("induced_subnetlist of the empty set is empty") {
  const Netlist sub = induced_subnetlist(two_lut_chain(), {});
  CHECK(sub.blocks.empty());
  CHECK(sub.nets.empty());
}

TEST_CASE("induced_subnetlist truncates crossing nets with boundary pins") {
  const Netlist n = two_lut_chain();
  const Netlist sub = induced_subnetlist(n, {1});  // just LUT1
  REQUIRE(sub.blocks.size() == 1);
  REQUIRE(sub.nets.size() == 2);
  for (const Net& net : sub.nets) {
    CHECK(net.boundary);
    CHECK_FALSE(net.dangling);
  }
  CHECK(sub.blocks[0].pin_count() == 2);
}

TEST_CASE("induced_subnetlist rejects unknown blocks") {
  CHECK_THROWS_AS(induced_subnetlist(two_lut_chain(), {42}), DomainError);
}

TEST_CASE(
    "external terminals of a subset equal the boundary count of its induced "
    "subnetlist") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 40; ++iter) {
    const Netlist n = oracle::random_hypergraph(11, 16, 1000 + iter);
    std::vector<int> subset;
    for (const Block& b : n.blocks) {
      if (rng() & 1) {
        subset.push_back(b.id);
      }
    }
    if (subset.empty()) {
      continue;
    }
    const Netlist sub = induced_subnetlist(n, subset);
    long long boundary_nets = 0;
    for (const Net& net : sub.nets) {
      if (net.boundary && !net.dangling && !net.global) {
        ++boundary_nets;
      }
    }
    CHECK(external_terminals(n, subset) == boundary_nets);
    std::vector<int> all;
    for (const Block& b : sub.blocks) {
      all.push_back(b.id);
    }
    CHECK(external_terminals(sub, all) == boundary_nets);
  }
}
