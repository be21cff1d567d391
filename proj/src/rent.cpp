#include "rentlens/rent.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <thread>

#include "rentlens/error.hpp"
#include "rentlens/rng.hpp"

namespace rentlens {

const char* to_string(Region region) {
  switch (region) {
    case Region::Prepack:
      return "prepack";
    case Region::IntraClb:
      return "intra";
    case Region::InterClb:
      return "inter";
  }
  return "?";
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::RDense:
      return "RDense";
    case Classification::RSparse:
      return "RSparse";
    case Classification::RModerate:
      return "RModerate";
  }
  return "?";
}

namespace {

struct DepthAgg {
  double log_b_sum = 0.0;
  double log_t_sum = 0.0;
  long long count = 0;
};

void accumulate(const PartitionNode& node, std::map<int, DepthAgg>& agg) {
  if (node.T > 0) {
    DepthAgg& a = agg[node.depth];
    a.log_b_sum += std::log(static_cast<double>(node.B));
    a.log_t_sum += std::log(static_cast<double>(node.T));
    ++a.count;
  }
  if (node.left) {
    accumulate(*node.left, agg);
    accumulate(*node.right, agg);
  }
}

std::vector<RentPoint> points_from_agg(const std::map<int, DepthAgg>& agg,
                                       Region region) {
  std::vector<RentPoint> points;
  for (const auto& [depth, a] : agg) {
    RentPoint p;
    p.depth = depth;
    p.b = std::exp(a.log_b_sum / static_cast<double>(a.count));
    p.t = std::exp(a.log_t_sum / static_cast<double>(a.count));
    p.weight = static_cast<double>(a.count);
    p.region = region;
    points.push_back(p);
  }
  return points;
}

}  // namespace

std::vector<RentPoint> collect_points(const PartitionNode& tree,
                                      Region region) {
  std::map<int, DepthAgg> agg;
  accumulate(tree, agg);
  if (agg.empty()) {
    throw AnalysisError("partition tree has no nodes with terminals");
  }
  return points_from_agg(agg, region);
}

RentFit fit_rent(const std::vector<RentPoint>& points, int drop_top_depths) {
  std::vector<int> depths;
  for (const RentPoint& p : points) {
    depths.push_back(p.depth);
  }
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  int min_depth = std::numeric_limits<int>::min();
  if (drop_top_depths > 0) {
    if (drop_top_depths >= static_cast<int>(depths.size())) {
      throw AnalysisError("fit_rent: not enough depths after Region-II drop");
    }
    min_depth = depths[static_cast<size_t>(drop_top_depths)];
  }

  double sw = 0.0;
  double swx = 0.0;
  double swy = 0.0;
  int n = 0;
  for (const RentPoint& p : points) {
    if (p.depth < min_depth) {
      continue;
    }
    if (p.b <= 0.0 || p.t <= 0.0 || p.weight <= 0.0) {
      throw DomainError("fit_rent: points must have positive B, T, weight");
    }
    sw += p.weight;
    swx += p.weight * std::log(p.b);
    swy += p.weight * std::log(p.t);
    ++n;
  }
  if (n < 2) {
    throw AnalysisError("fit_rent: need at least 2 points, have " +
                        std::to_string(n));
  }
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const RentPoint& p : points) {
    if (p.depth < min_depth) {
      continue;
    }
    const double dx = std::log(p.b) - xbar;
    const double dy = std::log(p.t) - ybar;
    sxx += p.weight * dx * dx;
    sxy += p.weight * dx * dy;
  }
  if (sxx == 0.0) {
    throw AnalysisError("fit_rent: all points share one abscissa");
  }

  RentFit fit;
  fit.r = sxy / sxx;
  const double intercept = ybar - fit.r * xbar;
  fit.t = std::exp(intercept);
  fit.n_points = n;
  for (const RentPoint& p : points) {
    if (p.depth < min_depth) {
      continue;
    }
    const double resid = std::log(p.t) - intercept - fit.r * std::log(p.b);
    fit.rss += p.weight * resid * resid;
  }
  return fit;
}

double estimate_bstar(double t_avg, double t, double r) {
  if (t_avg <= 0.0 || t <= 0.0 || r <= 0.0) {
    throw DomainError("estimate_bstar: T_avg, t and r must all be positive");
  }
  return std::pow(t_avg / t, 1.0 / r);
}

RDensity rdensity(double b_avg, double b_star, double tol) {
  if (b_avg <= 0.0 || b_star <= 0.0) {
    throw DomainError("rdensity: B_avg and B_star must be positive");
  }
  if (tol < 0.0) {
    throw DomainError("rdensity: tolerance must be non-negative");
  }
  RDensity rd;
  rd.d_r = b_avg / b_star;
  if (rd.d_r > 1.0 + tol) {
    rd.classification = Classification::RDense;
  } else if (rd.d_r < 1.0 - tol) {
    rd.classification = Classification::RSparse;
  } else {
    rd.classification = Classification::RModerate;
  }
  return rd;
}

UtilizationDensity utilization_density(const ClusterMap& cm,
                                       const ArchSpec& arch,
                                       std::string_view kind,
                                       bool include_clocks) {
  arch.validate();
  const int pin_capacity = arch.cluster_inputs + arch.cluster_outputs +
                           (include_clocks ? arch.clocks : 0);
  long long prim_sum = 0;
  long long pin_sum = 0;
  int n = 0;
  for (const Cluster& c : cm.clusters) {
    if (c.kind != kind) {
      continue;
    }
    ++n;
    if (c.primitive_count() > arch.cluster_capacity) {
      throw DomainError("cluster '" + c.name + "' holds " +
                        std::to_string(c.primitive_count()) +
                        " primitives, capacity is " +
                        std::to_string(arch.cluster_capacity));
    }
    int pins = c.used_input_pins + c.used_output_pins;
    if (include_clocks) {
      pins += c.used_clock_pins;
    }
    if (c.used_input_pins > arch.cluster_inputs ||
        c.used_output_pins > arch.cluster_outputs ||
        c.used_clock_pins > arch.clocks) {
      throw DomainError("cluster '" + c.name +
                        "' uses more pins than the architecture provides");
    }
    prim_sum += c.primitive_count();
    pin_sum += pins;
  }
  if (n == 0) {
    throw AnalysisError("no clusters of kind '" + std::string(kind) + "'");
  }
  UtilizationDensity ud;
  ud.d_b = static_cast<double>(prim_sum) / n / arch.cluster_capacity;
  ud.d_t = static_cast<double>(pin_sum) / n / pin_capacity;
  return ud;
}

TwoSegmentFit two_segment_fit(const std::vector<RentPoint>& points) {
  if (points.size() < 4) {
    throw AnalysisError("two_segment_fit: need at least 4 points, have " +
                        std::to_string(points.size()));
  }
  std::vector<RentPoint> sorted = points;
  std::sort(sorted.begin(), sorted.end(),
            [](const RentPoint& a, const RentPoint& b) {
              return a.b != b.b ? a.b < b.b : a.depth < b.depth;
            });

  const int n = static_cast<int>(sorted.size());
  TwoSegmentFit best;
  double best_rss = std::numeric_limits<double>::infinity();
  int best_split = -1;
  for (int k = 2; k + 2 <= n; ++k) {
    std::vector<RentPoint> left(sorted.begin(), sorted.begin() + k);
    std::vector<RentPoint> right(sorted.begin() + k, sorted.end());
    RentFit fl;
    RentFit fr;
    try {
      fl = fit_rent(left, 0);
      fr = fit_rent(right, 0);
    } catch (const AnalysisError&) {
      continue;  // degenerate side (all B equal); skip this split
    }
    const double total = fl.rss + fr.rss;
    if (total < best_rss) {
      best_rss = total;
      best.left = fl;
      best.right = fr;
      best_split = k;
    }
  }
  if (best_split < 0) {
    throw AnalysisError("two_segment_fit: no valid split position");
  }

  // Report the regime boundary as the intersection of the two fitted laws;
  // for near-parallel fits fall back to the geometric gap midpoint.
  const double slope_gap = best.left.r - best.right.r;
  if (std::abs(slope_gap) > 1e-12) {
    const double log_b =
        (std::log(best.right.t) - std::log(best.left.t)) / slope_gap;
    best.breakpoint_b = std::exp(log_b);
    best.breakpoint_t = best.left.t * std::pow(best.breakpoint_b, best.left.r);
  } else {
    best.breakpoint_b =
        std::sqrt(sorted[static_cast<size_t>(best_split - 1)].b *
                  sorted[static_cast<size_t>(best_split)].b);
    best.breakpoint_t = best.left.t * std::pow(best.breakpoint_b, best.left.r);
  }
  return best;
}

PrepackAnalysis analyze_prepack(const Netlist& prepack,
                                const PartitionConfig& pcfg,
                                const AnalyzeOptions& opts) {
  PartitionConfig cfg = pcfg;
  cfg.ignore_globals = opts.ignore_globals;
  PrepackAnalysis pa;
  pa.t = avg_countable_terminals(prepack, opts.ignore_globals);
  const auto tree = recursive_partition(prepack, cfg);
  pa.points = collect_points(*tree, Region::Prepack);
  pa.fit = fit_rent(pa.points, opts.drop_top_depths);
  return pa;
}

Netlist build_cluster_netlist(const Netlist& prepack, const ClusterMap& cm,
                              std::string_view kind) {
  Netlist out;
  out.name = prepack.name + ".clusters";
  std::vector<int> cluster_block(cm.clusters.size(), -1);
  for (const Cluster& c : cm.clusters) {
    if (c.kind != kind) {
      continue;
    }
    const int b = out.add_block(c.name, BlockKind::BlackBox);
    out.blocks[static_cast<size_t>(b)].weight = c.primitive_count();
    cluster_block[static_cast<size_t>(c.id)] = b;
  }

  for (const Net& net : prepack.nets) {
    if (net.dangling) {
      continue;
    }
    int driver_cluster = -1;
    bool external_touch = net.boundary;
    std::vector<int> touched;
    auto visit = [&](int block_id, bool is_driver) {
      const int owner = cm.primitive_owner[static_cast<size_t>(block_id)];
      const int cb =
          owner >= 0 ? cluster_block[static_cast<size_t>(owner)] : -1;
      if (cb < 0) {
        external_touch = true;  // I/O pad or foreign-kind cluster
        return;
      }
      touched.push_back(cb);
      if (is_driver) {
        driver_cluster = cb;
      }
    };
    if (net.driver) {
      visit(net.driver->block, true);
    }
    for (const PinRef& s : net.sinks) {
      visit(s.block, false);
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    if (touched.empty()) {
      continue;
    }
    if (touched.size() == 1 && !external_touch) {
      continue;  // fully absorbed inside one cluster
    }
    Net cnet;
    cnet.id = static_cast<int>(out.nets.size());
    cnet.name = net.name;
    cnet.global = net.global;
    cnet.boundary = external_touch;
    for (int cb : touched) {
      if (cb == driver_cluster) {
        cnet.driver = PinRef{cb, "p"};
      } else {
        cnet.sinks.push_back(PinRef{cb, "p"});
      }
    }
    out.nets.push_back(std::move(cnet));
  }

  // Adjacency by hand: a driverless net here is externally driven, not dead.
  for (const Net& net : out.nets) {
    if (net.driver) {
      out.blocks[static_cast<size_t>(net.driver->block)].nets.push_back(net.id);
    }
    for (const PinRef& s : net.sinks) {
      out.blocks[static_cast<size_t>(s.block)].nets.push_back(net.id);
    }
  }
  for (Block& b : out.blocks) {
    std::sort(b.nets.begin(), b.nets.end());
    b.nets.erase(std::unique(b.nets.begin(), b.nets.end()), b.nets.end());
  }
  return out;
}

namespace {

// Runs fn(i) for i in [0, n) across a few worker threads; each index writes
// only its own caller-owned slot, so scheduling cannot change the outcome.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (int i = w; i < n; i += threads) {
          fn(i);
        }
      } catch (...) {
        errors[static_cast<size_t>(w)] = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) {
    th.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

}  // namespace

DensityReport analyze(const Netlist& prepack, const ClusterMap& cm,
                      const ArchSpec& arch, const PartitionConfig& pcfg,
                      const AnalyzeOptions& opts) {
  DensityReport report;
  report.tol = opts.tol;

  const PrepackAnalysis pre = analyze_prepack(prepack, pcfg, opts);
  report.t = pre.t;
  report.prepack_fit = pre.fit;
  report.prepack_points = pre.points;

  // Intra-CLB: pool the per-cluster partition trees by depth.
  std::vector<const Cluster*> clbs;
  for (const Cluster& c : cm.clusters) {
    if (c.kind == opts.cluster_kind) {
      clbs.push_back(&c);
    }
  }
  if (clbs.empty()) {
    throw AnalysisError("no clusters of kind '" + opts.cluster_kind + "'");
  }
  std::vector<std::map<int, DepthAgg>> per_cluster(clbs.size());
  const int threads = resolve_threads(pcfg.max_threads);
  parallel_for(static_cast<int>(clbs.size()), threads, [&](int i) {
    const Cluster& c = *clbs[static_cast<size_t>(i)];
    const Netlist sub = induced_subnetlist(prepack, c.primitives);
    PartitionConfig cfg = pcfg;
    cfg.ignore_globals = opts.ignore_globals;
    cfg.seed = mix64(pcfg.seed, 0x1A7140000ULL + static_cast<std::uint64_t>(c.id));
    cfg.max_threads = 1;  // parallelism lives at the cluster level here
    const auto tree = recursive_partition(sub, cfg);
    accumulate(*tree, per_cluster[static_cast<size_t>(i)]);
  });
  std::map<int, DepthAgg> pooled;
  for (const auto& m : per_cluster) {
    for (const auto& [depth, a] : m) {
      DepthAgg& dst = pooled[depth];
      dst.log_b_sum += a.log_b_sum;
      dst.log_t_sum += a.log_t_sum;
      dst.count += a.count;
    }
  }
  report.intra_points = points_from_agg(pooled, Region::IntraClb);
  try {
    report.intra_fit = fit_rent(report.intra_points, 0);
  } catch (const AnalysisError&) {
    report.intra_fit.reset();
  }

  // Inter-CLB: partition the cluster-level netlist; B stays in primitives.
  const Netlist cluster_netlist =
      build_cluster_netlist(prepack, cm, opts.cluster_kind);
  if (cluster_netlist.n_logic_blocks() > 0) {
    PartitionConfig cfg = pcfg;
    cfg.ignore_globals = opts.ignore_globals;
    cfg.seed = mix64(pcfg.seed, 0x1A7E40000ULL);
    const auto tree = recursive_partition(cluster_netlist, cfg);
    report.inter_points = collect_points(*tree, Region::InterClb);
    try {
      report.inter_fit = fit_rent(report.inter_points, opts.drop_top_depths);
    } catch (const AnalysisError&) {
      report.inter_fit.reset();
    }
    if (report.inter_points.size() >= 4) {
      try {
        report.inter_segments = two_segment_fit(report.inter_points);
      } catch (const AnalysisError&) {
        report.inter_segments.reset();
      }
    }
  }

  const ClusterAverages ca =
      cluster_averages(cm, opts.cluster_kind, opts.include_clock_pins);
  report.n_clusters = ca.n_clusters;
  report.b_avg = ca.b_avg;
  report.t_avg = ca.t_avg;
  report.b_star = estimate_bstar(ca.t_avg, report.t, report.prepack_fit.r);
  const RDensity rd = rdensity(ca.b_avg, report.b_star, opts.tol);
  report.d_r = rd.d_r;
  report.classification = rd.classification;
  const UtilizationDensity ud = utilization_density(
      cm, arch, opts.cluster_kind, opts.include_clock_pins);
  report.d_b = ud.d_b;
  report.d_t = ud.d_t;
  return report;
}

}  // namespace rentlens
