#include "rentlens/gnl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rentlens/error.hpp"
#include "rentlens/rng.hpp"

namespace rentlens {

void GenSpec::validate() const {
  if (n_blocks < 2) {
    throw DomainError("gen: n_blocks must be >= 2");
  }
  if (!(target_r > 0.0) || target_r > 1.0) {
    throw DomainError("gen: target_r must be in (0, 1]");
  }
  if (t_block < 2) {
    throw DomainError("gen: t_block must be >= 2 (one output, one input)");
  }
  if (latch_fraction < 0.0 || latch_fraction > 1.0) {
    throw DomainError("gen: latch_fraction must be in [0, 1]");
  }
}

namespace {

// Groups are merged kArity at a time. A net created at a merge takes at most
// one pin from each child group, so the number of distinct nets crossing any
// group boundary equals that group's enforced stub count exactly; fanout up
// to kArity-1 still leaves room to retire the t-1 input pins per block even
// at low target exponents, where few terminals survive a merge.
constexpr size_t kArity = 16;

struct Stub {
  int block = -1;
  int slot = -1;  // input slot index; -1 for an output stub
};

struct ProtoNet {
  int driver = -1;
  std::vector<Stub> sinks;
};

struct Group {
  long long size = 0;
  std::vector<Stub> open_in;
  std::vector<int> open_out;  // block ids with unconnected outputs

  size_t externals() const { return open_in.size() + open_out.size(); }
};

template <typename T>
T take_random(std::vector<T>& v, std::mt19937_64& rng) {
  const size_t i = rand_index(rng, v.size());
  T out = v[i];
  v[i] = v.back();
  v.pop_back();
  return out;
}

struct Merger {
  const double t_bar;
  const double target_r;
  std::vector<ProtoNet>& protonets;
  std::mt19937_64& rng;

  Group merge(std::vector<Group*> children) {
    Group g;
    long long pooled = 0;
    for (Group* c : children) {
      g.size += c->size;
      pooled += static_cast<long long>(c->externals());
    }
#ifdef RENTLENS_GNL_TRACE
    {
      long long outs = 0, ins = 0;
      for (Group* c : children) { outs += c->open_out.size(); ins += c->open_in.size(); }
      std::fprintf(stderr, "merge size=%lld k=%zu pooled=%lld outs=%lld ins=%lld\n",
                   g.size, children.size(), pooled, outs, ins);
    }
#endif
    const long long target = std::lround(
        t_bar * std::pow(static_cast<double>(g.size), target_r));
    long long delta = pooled - target;
    if (delta < -1) {
      throw AnalysisError(
          "infeasible spec: target terminals " + std::to_string(target) +
          " exceed the " + std::to_string(pooled) +
          " unconnected pins available at size " + std::to_string(g.size));
    }

    // Per-net bookkeeping of which children already contributed a pin.
    struct MergeNet {
      int id;
      std::vector<char> used;  // per child index
    };
    std::vector<MergeNet> merge_nets;

    auto out_avail = [&]() {
      long long n = 0;
      for (Group* c : children) {
        n += static_cast<long long>(c->open_out.size());
      }
      return n;
    };
    auto in_avail = [&]() {
      long long n = 0;
      for (Group* c : children) {
        n += static_cast<long long>(c->open_in.size());
      }
      return n;
    };

    while (delta >= 2) {
      const long long outs = out_avail();
      if (outs > 0) {
        // Driver child: sampled among those still holding output stubs.
        size_t di = 0;
        {
          long long pick = static_cast<long long>(rng() % static_cast<std::uint64_t>(outs));
          for (size_t i = 0; i < children.size(); ++i) {
            const long long k =
                static_cast<long long>(children[i]->open_out.size());
            if (pick < k) {
              di = i;
              break;
            }
            pick -= k;
          }
        }
        // Sink children by ring distance from the driver: contiguous windows
        // keep the structure inside a merge local, so cuts between the
        // enforced hierarchy levels stay Rent-like too.
        std::vector<size_t> cand;
        for (size_t step = 1; step < children.size(); ++step) {
          const size_t i = (di + step) % children.size();
          if (!children[i]->open_in.empty()) {
            cand.push_back(i);
          }
        }
        if (!cand.empty()) {
          // Drain input and output stubs proportionally: one driver stub
          // carries round(ins/outs) sinks, so neither pool runs dry while
          // pins remain to retire.
          const long long ratio = std::llround(
              static_cast<double>(in_avail()) / static_cast<double>(outs));
          long long width = 1 + std::clamp<long long>(
                                    ratio, 1,
                                    static_cast<long long>(children.size()) - 1);
          const size_t s = std::min(
              cand.size(),
              static_cast<size_t>(std::min<long long>(width - 1, delta - 1)));
          MergeNet mn;
          mn.id = static_cast<int>(protonets.size());
          mn.used.assign(children.size(), 0);
          mn.used[di] = 1;
          ProtoNet net;
          net.driver = take_random(children[di]->open_out, rng);
          for (size_t j = 0; j < s; ++j) {
            net.sinks.push_back(take_random(children[cand[j]]->open_in, rng));
            mn.used[cand[j]] = 1;
          }
          delta -= static_cast<long long>(1 + s);
          protonets.push_back(std::move(net));
          merge_nets.push_back(std::move(mn));
          continue;
        }
      }
      // No fresh net possible: widen a net from this merge into a child it
      // has not touched yet (still one pin per child, accounting stays
      // exact).
      if (!extend_once(children, merge_nets)) {
        break;
      }
      --delta;
    }
    if (delta == 1) {
      if (extend_once(children, merge_nets)) {
        --delta;
      }
      // else: one surplus external survives; rounding-level noise.
    }
    if (delta >= 2) {
      throw AnalysisError(
          "infeasible spec: cannot retire " + std::to_string(delta) +
          " pins at size " + std::to_string(g.size) +
          " (output stubs and net widths exhausted)");
    }

    for (Group* c : children) {
      g.open_in.insert(g.open_in.end(), c->open_in.begin(), c->open_in.end());
      g.open_out.insert(g.open_out.end(), c->open_out.begin(),
                        c->open_out.end());
    }
    return g;
  }

 private:
  struct MergeNetRef;

  // Widen a net from this merge into the nearest untouched child still
  // holding input stubs.
  template <typename MergeNets>
  bool extend_once(std::vector<Group*>& children, MergeNets& merge_nets) {
    for (auto& mn : merge_nets) {
      for (size_t i = 0; i < children.size(); ++i) {
        if (mn.used[i] || children[i]->open_in.empty()) {
          continue;
        }
        protonets[static_cast<size_t>(mn.id)].sinks.push_back(
            take_random(children[i]->open_in, rng));
        mn.used[i] = 1;
        return true;
      }
    }
    return false;
  }
};

}  // namespace

Netlist generate(const GenSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(mix64(spec.seed, 0x6e1ULL));

  const int n = spec.n_blocks;
  std::vector<char> is_latch(static_cast<size_t>(n), 0);
  long long stub_total = 0;
  for (int b = 0; b < n; ++b) {
    if (spec.latch_fraction > 0.0 &&
        static_cast<double>(rng() >> 11) * 0x1.0p-53 < spec.latch_fraction) {
      is_latch[static_cast<size_t>(b)] = 1;
      stub_total += 2;  // D + Q; the clock is global and not part of the law
    } else {
      stub_total += spec.t_block;
    }
  }
  const double t_bar = static_cast<double>(stub_total) / n;

  std::vector<ProtoNet> protonets;
  std::vector<Group> groups(static_cast<size_t>(n));
  for (int b = 0; b < n; ++b) {
    Group& g = groups[static_cast<size_t>(b)];
    g.size = 1;
    g.open_out.push_back(b);
    const int inputs = is_latch[static_cast<size_t>(b)] ? 1 : spec.t_block - 1;
    for (int s = 0; s < inputs; ++s) {
      g.open_in.push_back(Stub{b, s});
    }
  }

  Merger merger{t_bar, spec.target_r, protonets, rng};
  while (groups.size() > 1) {
    fisher_yates(groups, rng);
    std::vector<Group> next;
    size_t i = 0;
    while (i < groups.size()) {
      const size_t k = std::min(kArity, groups.size() - i);
      if (k == 1) {
        next.push_back(std::move(groups[i]));  // odd one out, merged next round
        break;
      }
      std::vector<Group*> children;
      for (size_t j = 0; j < k; ++j) {
        children.push_back(&groups[i + j]);
      }
      next.push_back(merger.merge(std::move(children)));
      i += k;
    }
    groups = std::move(next);
  }
  Group top = std::move(groups[0]);

  // Materialize.
  Netlist netlist;
  {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "gnl_r%.2f_b%d_s%llu", spec.target_r, n,
                  static_cast<unsigned long long>(spec.seed));
    netlist.name = buf;
  }
  for (int b = 0; b < n; ++b) {
    netlist.add_block("g" + std::to_string(b),
                      is_latch[static_cast<size_t>(b)] ? BlockKind::Latch
                                                       : BlockKind::Lut);
    if (is_latch[static_cast<size_t>(b)]) {
      netlist.blocks.back().opaque = "re 2";
    }
  }
  auto sink_port = [&](const Stub& s) {
    return is_latch[static_cast<size_t>(s.block)] ? std::string("D")
                                                  : "in" + std::to_string(s.slot);
  };
  auto driver_port = [&](int b) {
    return is_latch[static_cast<size_t>(b)] ? std::string("Q")
                                            : std::string("out");
  };
  for (size_t i = 0; i < protonets.size(); ++i) {
    const ProtoNet& pn = protonets[i];
    const int id = netlist.add_net("n" + std::to_string(i));
    netlist.nets[static_cast<size_t>(id)].driver =
        PinRef{pn.driver, driver_port(pn.driver)};
    for (const Stub& s : pn.sinks) {
      netlist.nets[static_cast<size_t>(id)].sinks.push_back(
          PinRef{s.block, sink_port(s)});
    }
  }
  // Leftover inputs are driven by fresh primary inputs, one net each, so the
  // top-level external count carries straight into primary I/O.
  std::sort(top.open_in.begin(), top.open_in.end(),
            [](const Stub& x, const Stub& y) {
              return x.block != y.block ? x.block < y.block : x.slot < y.slot;
            });
  for (size_t i = 0; i < top.open_in.size(); ++i) {
    const int pi = netlist.add_block("pi" + std::to_string(i),
                                     BlockKind::PrimaryInput);
    const int id = netlist.add_net("pi" + std::to_string(i));
    netlist.nets[static_cast<size_t>(id)].driver = PinRef{pi, "out"};
    netlist.nets[static_cast<size_t>(id)].sinks.push_back(
        PinRef{top.open_in[i].block, sink_port(top.open_in[i])});
  }
  std::sort(top.open_out.begin(), top.open_out.end());
  for (size_t i = 0; i < top.open_out.size(); ++i) {
    const int b = top.open_out[i];
    const int id = netlist.add_net("po" + std::to_string(i));
    netlist.nets[static_cast<size_t>(id)].driver = PinRef{b, driver_port(b)};
    const int po = netlist.add_block("out:po" + std::to_string(i),
                                     BlockKind::PrimaryOutput);
    netlist.nets[static_cast<size_t>(id)].sinks.push_back(PinRef{po, "in"});
  }
  // One shared clock for whatever latches were drawn.
  bool any_latch = false;
  for (int b = 0; b < n; ++b) {
    if (is_latch[static_cast<size_t>(b)]) {
      any_latch = true;
      break;
    }
  }
  if (any_latch) {
    const int pi = netlist.add_block("clk", BlockKind::PrimaryInput);
    const int id = netlist.add_net("clk");
    Net& clk = netlist.nets[static_cast<size_t>(id)];
    clk.driver = PinRef{pi, "out"};
    clk.global = true;
    for (int b = 0; b < n; ++b) {
      if (is_latch[static_cast<size_t>(b)]) {
        clk.sinks.push_back(PinRef{b, "clk"});
      }
    }
  }

  netlist.finalize();
  return netlist;
}

std::vector<SweepEntry> sweep(const std::vector<GenSpec>& specs,
                              const PartitionConfig& pcfg,
                              const AnalyzeOptions& opts) {
  std::vector<SweepEntry> out;
  for (const GenSpec& spec : specs) {
    SweepEntry entry;
    entry.spec = spec;
    entry.netlist = generate(spec);
    entry.fitted_r = analyze_prepack(entry.netlist, pcfg, opts).fit.r;
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace rentlens
