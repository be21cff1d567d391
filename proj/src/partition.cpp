#include "rentlens/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include "rentlens/error.hpp"
#include "rentlens/rng.hpp"

namespace rentlens {

namespace {

constexpr int kCoarseNodeTarget = 64;
constexpr int kMaxMatchNetSize = 50;  // larger nets carry no locality signal
constexpr int kMaxFmPasses = 12;

// Flat hypergraph view over a block subset. Nets are deduplicated by pin
// set, with multiplicity kept as a weight, so cut values still count
// original nets.
struct View {
  int n = 0;
  std::vector<long long> weight;
  std::vector<long long> net_weight;
  std::vector<std::vector<int>> pins;      // net -> ascending node indices
  std::vector<std::vector<int>> incident;  // node -> ascending net indices
  long long total_weight = 0;
  long long max_weight = 0;

  void finish() {
    total_weight = 0;
    max_weight = 0;
    for (long long w : weight) {
      total_weight += w;
      max_weight = std::max(max_weight, w);
    }
    incident.assign(static_cast<size_t>(n), {});
    for (size_t e = 0; e < pins.size(); ++e) {
      for (int u : pins[e]) {
        incident[static_cast<size_t>(u)].push_back(static_cast<int>(e));
      }
    }
  }
};

View build_view(const Netlist& netlist, const std::vector<int>& members,
                bool ignore_globals) {
  View view;
  view.n = static_cast<int>(members.size());
  std::vector<int> local(netlist.blocks.size(), -1);
  view.weight.resize(members.size());
  for (size_t i = 0; i < members.size(); ++i) {
    local[static_cast<size_t>(members[i])] = static_cast<int>(i);
    view.weight[i] = netlist.block(members[i]).weight;
  }

  std::map<std::vector<int>, long long> merged;
  std::vector<char> seen(netlist.nets.size(), 0);
  for (int b : members) {
    for (int e : netlist.block(b).nets) {
      if (seen[static_cast<size_t>(e)]) {
        continue;
      }
      seen[static_cast<size_t>(e)] = 1;
      const Net& net = netlist.net(e);
      if (net.dangling || (ignore_globals && net.global)) {
        continue;
      }
      std::vector<int> ps;
      if (net.driver && local[static_cast<size_t>(net.driver->block)] >= 0) {
        ps.push_back(local[static_cast<size_t>(net.driver->block)]);
      }
      for (const PinRef& s : net.sinks) {
        if (local[static_cast<size_t>(s.block)] >= 0) {
          ps.push_back(local[static_cast<size_t>(s.block)]);
        }
      }
      std::sort(ps.begin(), ps.end());
      ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
      if (ps.size() >= 2) {
        merged[ps] += 1;
      }
    }
  }
  for (auto& [ps, w] : merged) {
    view.pins.push_back(ps);
    view.net_weight.push_back(w);
  }
  view.finish();
  return view;
}

// Heavy-edge matching on 1/(|net|-1) clique weights; contracts matched pairs.
// Matching stops early once the level has shrunk to ratio * n nodes.
View coarsen(const View& view, double ratio, std::mt19937_64& rng,
             std::vector<int>& map_out) {
  const int n = view.n;
  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    order[static_cast<size_t>(i)] = i;
  }
  fisher_yates(order, rng);

  std::vector<int> mate(static_cast<size_t>(n), -1);
  std::vector<double> score(static_cast<size_t>(n), 0.0);
  std::vector<int> touched;
  const long long need_pairs =
      std::max<long long>(0, static_cast<long long>(
                                 std::ceil(n * (1.0 - ratio))));
  long long pairs = 0;
  for (int u : order) {
    if (mate[static_cast<size_t>(u)] != -1 || pairs >= need_pairs) {
      continue;
    }
    touched.clear();
    for (int e : view.incident[static_cast<size_t>(u)]) {
      const auto& ps = view.pins[static_cast<size_t>(e)];
      if (static_cast<int>(ps.size()) > kMaxMatchNetSize) {
        continue;
      }
      const double w = static_cast<double>(view.net_weight[static_cast<size_t>(e)]) /
                       (static_cast<double>(ps.size()) - 1.0);
      for (int v : ps) {
        if (v == u || mate[static_cast<size_t>(v)] != -1) {
          continue;
        }
        if (score[static_cast<size_t>(v)] == 0.0) {
          touched.push_back(v);
        }
        score[static_cast<size_t>(v)] += w;
      }
    }
    int best = -1;
    double best_score = 0.0;
    std::sort(touched.begin(), touched.end());
    for (int v : touched) {
      if (score[static_cast<size_t>(v)] > best_score) {
        best_score = score[static_cast<size_t>(v)];
        best = v;
      }
      score[static_cast<size_t>(v)] = 0.0;
    }
    if (best != -1) {
      mate[static_cast<size_t>(u)] = best;
      mate[static_cast<size_t>(best)] = u;
      ++pairs;
    }
  }

  map_out.assign(static_cast<size_t>(n), -1);
  View coarse;
  for (int u = 0; u < n; ++u) {
    if (mate[static_cast<size_t>(u)] != -1 && mate[static_cast<size_t>(u)] < u) {
      continue;  // represented by its mate
    }
    const int id = coarse.n++;
    map_out[static_cast<size_t>(u)] = id;
    long long w = view.weight[static_cast<size_t>(u)];
    if (mate[static_cast<size_t>(u)] != -1) {
      map_out[static_cast<size_t>(mate[static_cast<size_t>(u)])] = id;
      w += view.weight[static_cast<size_t>(mate[static_cast<size_t>(u)])];
    }
    coarse.weight.push_back(w);
  }

  std::map<std::vector<int>, long long> merged;
  std::vector<int> ps;
  for (size_t e = 0; e < view.pins.size(); ++e) {
    ps.clear();
    for (int u : view.pins[e]) {
      ps.push_back(map_out[static_cast<size_t>(u)]);
    }
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    if (ps.size() >= 2) {
      merged[ps] += view.net_weight[e];
    }
  }
  for (auto& [key, w] : merged) {
    coarse.pins.push_back(key);
    coarse.net_weight.push_back(w);
  }
  coarse.finish();
  return coarse;
}

long long cut_of(const View& view, const std::vector<char>& side) {
  long long cut = 0;
  for (size_t e = 0; e < view.pins.size(); ++e) {
    bool a = false;
    bool b = false;
    for (int u : view.pins[e]) {
      (side[static_cast<size_t>(u)] ? b : a) = true;
    }
    if (a && b) {
      cut += view.net_weight[e];
    }
  }
  return cut;
}

// Heavy-first greedy into the lighter side; final imbalance <= max weight.
std::vector<char> greedy_initial(const View& view, std::mt19937_64& rng) {
  std::vector<int> order(static_cast<size_t>(view.n));
  for (int i = 0; i < view.n; ++i) {
    order[static_cast<size_t>(i)] = i;
  }
  fisher_yates(order, rng);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return view.weight[static_cast<size_t>(a)] >
           view.weight[static_cast<size_t>(b)];
  });
  std::vector<char> side(static_cast<size_t>(view.n), 0);
  long long w[2] = {0, 0};
  long long cnt[2] = {0, 0};
  for (int u : order) {
    int s = (w[1] < w[0]) ? 1 : (w[0] < w[1] ? 0 : (cnt[1] < cnt[0] ? 1 : 0));
    side[static_cast<size_t>(u)] = static_cast<char>(s);
    w[s] += view.weight[static_cast<size_t>(u)];
    ++cnt[s];
  }
  return side;
}

struct FmState {
  const View* view = nullptr;
  std::vector<char> side;
  long long w[2] = {0, 0};
  long long count[2] = {0, 0};
  std::vector<std::array<long long, 2>> net_cnt;
  long long cut = 0;

  void reset(const View& v, std::vector<char> s) {
    view = &v;
    side = std::move(s);
    w[0] = w[1] = 0;
    count[0] = count[1] = 0;
    for (int u = 0; u < v.n; ++u) {
      const int sd = side[static_cast<size_t>(u)];
      w[sd] += v.weight[static_cast<size_t>(u)];
      ++count[sd];
    }
    net_cnt.assign(v.pins.size(), {0, 0});
    cut = 0;
    for (size_t e = 0; e < v.pins.size(); ++e) {
      for (int u : v.pins[e]) {
        ++net_cnt[e][static_cast<size_t>(side[static_cast<size_t>(u)])];
      }
      if (net_cnt[e][0] > 0 && net_cnt[e][1] > 0) {
        cut += v.net_weight[e];
      }
    }
  }

  long long diff() const { return std::llabs(w[0] - w[1]); }

  long long gain(int u) const {
    const int from = side[static_cast<size_t>(u)];
    long long g = 0;
    for (int e : view->incident[static_cast<size_t>(u)]) {
      if (net_cnt[static_cast<size_t>(e)][static_cast<size_t>(from)] == 1) {
        g += view->net_weight[static_cast<size_t>(e)];
      }
      if (net_cnt[static_cast<size_t>(e)][static_cast<size_t>(1 - from)] == 0) {
        g -= view->net_weight[static_cast<size_t>(e)];
      }
    }
    return g;
  }

  void move(int u) {
    const int from = side[static_cast<size_t>(u)];
    const int to = 1 - from;
    side[static_cast<size_t>(u)] = static_cast<char>(to);
    w[from] -= view->weight[static_cast<size_t>(u)];
    w[to] += view->weight[static_cast<size_t>(u)];
    --count[from];
    ++count[to];
    for (int e : view->incident[static_cast<size_t>(u)]) {
      const bool was_cut = net_cnt[static_cast<size_t>(e)][0] > 0 &&
                           net_cnt[static_cast<size_t>(e)][1] > 0;
      --net_cnt[static_cast<size_t>(e)][static_cast<size_t>(from)];
      ++net_cnt[static_cast<size_t>(e)][static_cast<size_t>(to)];
      const bool is_cut = net_cnt[static_cast<size_t>(e)][0] > 0 &&
                          net_cnt[static_cast<size_t>(e)][1] > 0;
      if (was_cut != is_cut) {
        cut += is_cut ? view->net_weight[static_cast<size_t>(e)]
                      : -view->net_weight[static_cast<size_t>(e)];
      }
    }
  }
};

// Gain buckets keyed descending; ties resolved by lowest node index.
class GainBuckets {
 public:
  void build(const FmState& st) {
    buckets_.clear();
    gain_.assign(static_cast<size_t>(st.view->n), 0);
    for (int u = 0; u < st.view->n; ++u) {
      gain_[static_cast<size_t>(u)] = st.gain(u);
      buckets_[gain_[static_cast<size_t>(u)]].insert(u);
    }
  }

  void update(int u, long long g) {
    buckets_[gain_[static_cast<size_t>(u)]].erase(u);
    if (buckets_[gain_[static_cast<size_t>(u)]].empty()) {
      buckets_.erase(gain_[static_cast<size_t>(u)]);
    }
    gain_[static_cast<size_t>(u)] = g;
    buckets_[g].insert(u);
  }

  void remove(int u) {
    auto it = buckets_.find(gain_[static_cast<size_t>(u)]);
    it->second.erase(u);
    if (it->second.empty()) {
      buckets_.erase(it);
    }
  }

  // Highest-gain node satisfying `ok`, lowest id within a gain level.
  template <typename Pred>
  int best(Pred ok) const {
    for (auto it = buckets_.rbegin(); it != buckets_.rend(); ++it) {
      for (int u : it->second) {
        if (ok(u)) {
          return u;
        }
      }
    }
    return -1;
  }

  long long gain_of(int u) const { return gain_[static_cast<size_t>(u)]; }

 private:
  std::map<long long, std::set<int>> buckets_;
  std::vector<long long> gain_;
};

// One FM pass: move-all with rollback to the best recorded prefix. Moves may
// overshoot the balance bound by one swap's worth of slack; prefixes are
// recorded only in balanced states.
bool fm_pass(FmState& st, long long allowed, std::vector<char>& best_side,
             long long& best_cut) {
  const View& view = *st.view;
  const long long slack = std::max(allowed, 2 * view.max_weight);
  GainBuckets buckets;
  buckets.build(st);
  std::vector<char> locked(static_cast<size_t>(view.n), 0);

  bool recorded_any = st.diff() <= allowed;
  long long local_best_cut = recorded_any
                                 ? st.cut
                                 : std::numeric_limits<long long>::max();
  long long least_diff = st.diff();
  std::vector<int> moves;
  long long best_prefix = recorded_any ? 0 : -1;
  long long least_diff_prefix = 0;

  const long long start_cut = local_best_cut;
  const bool start_feasible = recorded_any;

  for (int step = 0; step < view.n; ++step) {
    const int u = buckets.best([&](int v) {
      if (locked[static_cast<size_t>(v)]) {
        return false;
      }
      const int from = st.side[static_cast<size_t>(v)];
      if (st.count[from] <= 1) {
        return false;  // would empty a side
      }
      const long long nd = std::llabs(
          (st.w[0] - st.w[1]) +
          (from == 0 ? -2 : 2) * view.weight[static_cast<size_t>(v)]);
      return nd < st.diff() || nd <= slack;
    });
    if (u < 0) {
      break;
    }
    st.move(u);
    locked[static_cast<size_t>(u)] = 1;
    buckets.remove(u);
    moves.push_back(u);
    // Exact local regain: recompute every node sharing a net with u.
    for (int e : view.incident[static_cast<size_t>(u)]) {
      for (int v : view.pins[static_cast<size_t>(e)]) {
        if (v != u && !locked[static_cast<size_t>(v)]) {
          buckets.update(v, st.gain(v));
        }
      }
    }
    if (st.diff() <= allowed && st.count[0] >= 1 && st.count[1] >= 1) {
      if (!recorded_any || st.cut < local_best_cut) {
        recorded_any = true;
        local_best_cut = st.cut;
        best_prefix = static_cast<long long>(moves.size());
      }
    }
    if (st.diff() < least_diff) {
      least_diff = st.diff();
      least_diff_prefix = static_cast<long long>(moves.size());
    }
  }

  // Roll back to the chosen prefix: the best balanced one, or failing that
  // the most balanced one seen.
  const long long keep = recorded_any ? best_prefix : least_diff_prefix;
  for (long long i = static_cast<long long>(moves.size()) - 1; i >= keep; --i) {
    st.move(moves[static_cast<size_t>(i)]);
  }

  if (recorded_any) {
    best_side = st.side;
    best_cut = st.cut;
  }
  return (recorded_any && (!start_feasible || st.cut < start_cut)) ||
         (!recorded_any && st.diff() < least_diff + 1 && keep > 0);
}

void fm_refine(const View& view, std::vector<char>& side, long long allowed) {
  FmState st;
  st.reset(view, side);
  std::vector<char> best_side = side;
  long long best_cut = std::numeric_limits<long long>::max();
  bool feasible = st.diff() <= allowed;
  if (feasible) {
    best_cut = st.cut;
  }
  for (int pass = 0; pass < kMaxFmPasses; ++pass) {
    if (!fm_pass(st, allowed, best_side, best_cut)) {
      break;
    }
  }
  side = best_side;
}

struct RunResult {
  std::vector<char> side;
  long long cut = 0;
  bool feasible = false;
};

RunResult multilevel_run(const View& base, long long allowed0, double ratio,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<View> levels;
  std::vector<std::vector<int>> maps;
  levels.push_back(base);
  while (levels.back().n > kCoarseNodeTarget) {
    std::vector<int> m;
    View cv = coarsen(levels.back(), ratio, rng, m);
    if (cv.n >= levels.back().n) {
      break;
    }
    levels.push_back(std::move(cv));
    maps.push_back(std::move(m));
  }

  auto allowed_at = [&](const View& v) {
    return std::max(allowed0, v.max_weight);
  };

  std::vector<char> side = greedy_initial(levels.back(), rng);
  fm_refine(levels.back(), side, allowed_at(levels.back()));
  for (int l = static_cast<int>(levels.size()) - 2; l >= 0; --l) {
    std::vector<char> fine(static_cast<size_t>(levels[static_cast<size_t>(l)].n));
    for (int u = 0; u < levels[static_cast<size_t>(l)].n; ++u) {
      fine[static_cast<size_t>(u)] =
          side[static_cast<size_t>(maps[static_cast<size_t>(l)][static_cast<size_t>(u)])];
    }
    side = std::move(fine);
    fm_refine(levels[static_cast<size_t>(l)], side,
              allowed_at(levels[static_cast<size_t>(l)]));
  }

  RunResult rr;
  rr.cut = cut_of(base, side);
  long long w[2] = {0, 0};
  long long cnt[2] = {0, 0};
  for (int u = 0; u < base.n; ++u) {
    const int s = side[static_cast<size_t>(u)];
    w[s] += base.weight[static_cast<size_t>(u)];
    ++cnt[s];
  }
  rr.feasible = std::llabs(w[0] - w[1]) <= allowed0 && cnt[0] >= 1 && cnt[1] >= 1;
  rr.side = std::move(side);
  return rr;
}

}  // namespace

long long external_terminals(const Netlist& netlist,
                             const std::vector<int>& block_ids,
                             bool ignore_globals) {
  std::vector<char> inside(netlist.blocks.size(), 0);
  for (int b : block_ids) {
    inside[static_cast<size_t>(b)] = 1;
  }
  std::vector<char> seen(netlist.nets.size(), 0);
  long long count = 0;
  for (int b : block_ids) {
    for (int e : netlist.block(b).nets) {
      if (seen[static_cast<size_t>(e)]) {
        continue;
      }
      seen[static_cast<size_t>(e)] = 1;
      const Net& net = netlist.net(e);
      if (net.dangling || (ignore_globals && net.global)) {
        continue;
      }
      bool external = net.boundary;
      if (!external && net.driver && !inside[static_cast<size_t>(net.driver->block)]) {
        external = true;
      }
      if (!external) {
        for (const PinRef& s : net.sinks) {
          if (!inside[static_cast<size_t>(s.block)]) {
            external = true;
            break;
          }
        }
      }
      if (external) {
        ++count;
      }
    }
  }
  return count;
}

BipartitionResult bipartition(const Netlist& netlist,
                              const std::vector<int>& block_ids,
                              const PartitionConfig& cfg) {
  std::vector<int> members = block_ids;
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.size() < 2) {
    throw AnalysisError("bipartition: need at least two blocks, got " +
                        std::to_string(members.size()));
  }

  const View view = build_view(netlist, members, cfg.ignore_globals);
  const long long allowed =
      std::max(static_cast<long long>(
                   std::floor(cfg.balance_epsilon *
                              static_cast<double>(view.total_weight))),
               view.max_weight);

  const int restarts = std::max(1, cfg.restarts);
  RunResult best;
  bool have = false;
  for (int r = 0; r < restarts; ++r) {
    RunResult rr = multilevel_run(view, allowed, cfg.coarsen_ratio,
                                  mix64(cfg.seed, static_cast<std::uint64_t>(r)));
    if (!rr.feasible) {
      continue;
    }
    if (!have || rr.cut < best.cut) {
      best = std::move(rr);
      have = true;
    }
  }
  if (!have) {
    throw AnalysisError(
        "bipartition: no balanced split found (a single block exceeds the "
        "allowed side weight)");
  }

  BipartitionResult result;
  result.cut = best.cut;
  // Canonical orientation: the side holding the smallest block id is A.
  const char a_side = best.side[0];
  for (size_t i = 0; i < members.size(); ++i) {
    if (best.side[i] == a_side) {
      result.side_a.push_back(members[i]);
    } else {
      result.side_b.push_back(members[i]);
    }
  }
  return result;
}

namespace {

std::unique_ptr<PartitionNode> build_tree(const Netlist& netlist,
                                          std::vector<int> members,
                                          const PartitionConfig& cfg,
                                          std::uint64_t path, int depth,
                                          int spawn_depth) {
  auto node = std::make_unique<PartitionNode>();
  node->depth = depth;
  node->block_ids = std::move(members);
  for (int b : node->block_ids) {
    node->B += netlist.block(b).weight;
  }
  node->T = external_terminals(netlist, node->block_ids, cfg.ignore_globals);
  if (node->B <= cfg.leaf_threshold || node->block_ids.size() < 2) {
    return node;
  }

  PartitionConfig local = cfg;
  local.seed = mix64(cfg.seed, path);
  BipartitionResult split = bipartition(netlist, node->block_ids, local);
  node->cut = split.cut;

  if (depth < spawn_depth) {
    auto fut = std::async(std::launch::async, [&]() {
      return build_tree(netlist, std::move(split.side_a), cfg, path * 2,
                        depth + 1, spawn_depth);
    });
    node->right = build_tree(netlist, std::move(split.side_b), cfg,
                             path * 2 + 1, depth + 1, spawn_depth);
    node->left = fut.get();
  } else {
    node->left = build_tree(netlist, std::move(split.side_a), cfg, path * 2,
                            depth + 1, spawn_depth);
    node->right = build_tree(netlist, std::move(split.side_b), cfg,
                             path * 2 + 1, depth + 1, spawn_depth);
  }
  return node;
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) {
    return requested;
  }
  if (const char* env = std::getenv("RENTLENS_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) {
      return v;
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

std::unique_ptr<PartitionNode> recursive_partition(const Netlist& netlist,
                                                   const PartitionConfig& cfg) {
  std::vector<int> members;
  for (const Block& b : netlist.blocks) {
    if (is_logic(b.kind)) {
      members.push_back(b.id);
    }
  }
  if (members.empty()) {
    throw DomainError("recursive_partition: netlist has no logic blocks");
  }
  const int threads = resolve_threads(cfg.max_threads);
  int spawn_depth = 0;
  while ((1 << (spawn_depth + 1)) <= threads) {
    ++spawn_depth;
  }
  return build_tree(netlist, std::move(members), cfg, 1, 0, spawn_depth);
}

}  // namespace rentlens
