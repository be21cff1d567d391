// Test-only reference implementations, kept deliberately independent of the
// library's computation paths: dense incidence matrices, exhaustive
// enumeration, and raw normal equations.
#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "rentlens/netlist.hpp"
#include "rentlens/rent.hpp"

namespace oracle {

// Mean distinct attached nets per logic block, recounted from a dense
// block x net incidence matrix.
inline double avg_terminals(const rentlens::Netlist& netlist) {
  const size_t nb = netlist.blocks.size();
  const size_t nn = netlist.nets.size();
  std::vector<char> incidence(nb * nn, 0);
  for (const rentlens::Net& net : netlist.nets) {
    if (net.driver) {
      incidence[static_cast<size_t>(net.driver->block) * nn +
                static_cast<size_t>(net.id)] = 1;
    }
    for (const rentlens::PinRef& s : net.sinks) {
      incidence[static_cast<size_t>(s.block) * nn + static_cast<size_t>(net.id)] = 1;
    }
  }
  long long total = 0;
  int n_logic = 0;
  for (const rentlens::Block& b : netlist.blocks) {
    if (!rentlens::is_logic(b.kind)) {
      continue;
    }
    ++n_logic;
    for (size_t e = 0; e < nn; ++e) {
      total += incidence[static_cast<size_t>(b.id) * nn + e];
    }
  }
  return static_cast<double>(total) / n_logic;
}

// Exhaustive minimum balanced bipartition cut over the given blocks, using
// the same balance rule as the partitioner: |wA - wB| <= max(eps*W, w_max).
// Returns -1 when no feasible split exists. Counts distinct countable nets
// spanning the two sides.
inline long long min_cut(const rentlens::Netlist& netlist,
                         const std::vector<int>& blocks, double eps) {
  const int n = static_cast<int>(blocks.size());
  long long total = 0;
  long long wmax = 0;
  for (int b : blocks) {
    total += netlist.block(b).weight;
    wmax = std::max<long long>(wmax, netlist.block(b).weight);
  }
  const long long allowed = std::max(
      static_cast<long long>(std::floor(eps * static_cast<double>(total))),
      wmax);

  std::vector<int> side_of(netlist.blocks.size(), -1);
  long long best = -1;
  for (unsigned long mask = 0; mask < (1UL << (n - 1)); ++mask) {
    // Block 0 pinned to side 0 to halve the enumeration.
    long long w[2] = {0, 0};
    int cnt[2] = {0, 0};
    for (int i = 0; i < n; ++i) {
      const int s = (i == 0) ? 0 : static_cast<int>((mask >> (i - 1)) & 1UL);
      side_of[static_cast<size_t>(blocks[static_cast<size_t>(i)])] = s;
      w[s] += netlist.block(blocks[static_cast<size_t>(i)]).weight;
      ++cnt[s];
    }
    if (cnt[0] == 0 || cnt[1] == 0 || std::llabs(w[0] - w[1]) > allowed) {
      continue;
    }
    long long cut = 0;
    for (const rentlens::Net& net : netlist.nets) {
      if (net.dangling || net.global) {
        continue;
      }
      bool a = false;
      bool b = false;
      auto look = [&](int blk) {
        const int s = side_of[static_cast<size_t>(blk)];
        if (s == 0) {
          a = true;
        } else if (s == 1) {
          b = true;
        }
      };
      if (net.driver) {
        look(net.driver->block);
      }
      for (const rentlens::PinRef& s : net.sinks) {
        look(s.block);
      }
      if (a && b) {
        ++cut;
      }
    }
    if (best < 0 || cut < best) {
      best = cut;
    }
  }
  for (int b : blocks) {
    side_of[static_cast<size_t>(b)] = -1;
  }
  return best;
}

struct WlsFit {
  double t = 0.0;
  double r = 0.0;
};

// Weighted least squares of log T on log B via the raw normal equations,
// solved with Cramer's rule (a different algebraic route than the library's
// centered computation).
inline WlsFit wls(const std::vector<rentlens::RentPoint>& points) {
  double sw = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const rentlens::RentPoint& p : points) {
    const double x = std::log(p.b);
    const double y = std::log(p.t);
    sw += p.weight;
    sx += p.weight * x;
    sy += p.weight * y;
    sxx += p.weight * x * x;
    sxy += p.weight * x * y;
  }
  const double det = sw * sxx - sx * sx;
  WlsFit fit;
  fit.r = (sw * sxy - sx * sy) / det;
  fit.t = std::exp((sxx * sy - sx * sxy) / det);
  return fit;
}

// Random hypergraph as a Netlist: `n` single-output logic blocks, `m` nets
// with 2..4 distinct pins each.
inline rentlens::Netlist random_hypergraph(int n, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  rentlens::Netlist netlist;
  netlist.name = "rand" + std::to_string(seed);
  for (int b = 0; b < n; ++b) {
    netlist.add_block("v" + std::to_string(b), rentlens::BlockKind::Lut);
  }
  for (int e = 0; e < m; ++e) {
    const int id = netlist.add_net("e" + std::to_string(e));
    const int arity = 2 + static_cast<int>(rng() % 3);
    std::vector<int> pins;
    while (static_cast<int>(pins.size()) < arity) {
      const int b = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
      bool dup = false;
      for (int p : pins) {
        if (p == b) {
          dup = true;
        }
      }
      if (!dup) {
        pins.push_back(b);
      }
    }
    netlist.nets[static_cast<size_t>(id)].driver =
        rentlens::PinRef{pins[0], "out"};
    for (size_t i = 1; i < pins.size(); ++i) {
      netlist.nets[static_cast<size_t>(id)].sinks.push_back(
          rentlens::PinRef{pins[i], "in" + std::to_string(i)});
    }
  }
  netlist.finalize();
  return netlist;
}

}  // namespace oracle
