#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rentlens/arch.hpp"
#include "rentlens/netlist.hpp"
#include "rentlens/partition.hpp"
#include "rentlens/vprnet.hpp"

namespace rentlens {

enum class Region { Prepack, IntraClb, InterClb };

const char* to_string(Region region);

struct RentPoint {
  double b = 0.0;       // geometric mean block weight at this depth
  double t = 0.0;       // geometric mean external terminals
  int depth = 0;
  double weight = 0.0;  // number of contributing tree nodes
  Region region = Region::Prepack;
};

struct RentFit {
  double t = 0.0;    // prefactor, exp(intercept)
  double r = 0.0;    // exponent, slope in log-log space
  double rss = 0.0;  // weighted residual sum of squares, log space
  int n_points = 0;
};

enum class Classification { RDense, RSparse, RModerate };

const char* to_string(Classification c);

struct TwoSegmentFit {
  RentFit left;
  RentFit right;
  double breakpoint_b = 0.0;  // where the two fitted laws intersect
  double breakpoint_t = 0.0;
};

struct DensityReport {
  double t = 0.0;  // mean countable terminals per primitive, pre-packing
  RentFit prepack_fit;
  std::optional<RentFit> intra_fit;
  std::optional<RentFit> inter_fit;
  int n_clusters = 0;
  double b_avg = 0.0;
  double t_avg = 0.0;
  double b_star = 0.0;
  double d_r = 0.0;
  double d_b = 0.0;
  double d_t = 0.0;
  double tol = 0.05;
  Classification classification = Classification::RModerate;
  std::optional<TwoSegmentFit> inter_segments;
  std::vector<RentPoint> prepack_points;
  std::vector<RentPoint> intra_points;
  std::vector<RentPoint> inter_points;
};

// One aggregated point per tree depth: geometric means of (B, T) over the
// nodes at that depth, zero-terminal nodes skipped, weight = node count.
std::vector<RentPoint> collect_points(const PartitionNode& tree, Region region);

// Weighted least squares of log T on log B after dropping the
// `drop_top_depths` shallowest depths (Region-II exclusion).
RentFit fit_rent(const std::vector<RentPoint>& points, int drop_top_depths);

// (T_avg / t)^(1/r): the CLB fill Rent's rule predicts for the observed
// terminal usage.
double estimate_bstar(double t_avg, double t, double r);

struct RDensity {
  double d_r = 0.0;
  Classification classification = Classification::RModerate;
};

RDensity rdensity(double b_avg, double b_star, double tol = 0.05);

struct UtilizationDensity {
  double d_b = 0.0;
  double d_t = 0.0;
};

UtilizationDensity utilization_density(const ClusterMap& cm,
                                       const ArchSpec& arch,
                                       std::string_view kind = "clb",
                                       bool include_clocks = false);

// Splits the point set at the position minimizing total weighted log-space
// RSS of the two sub-fits (each side keeps >= 2 points).
TwoSegmentFit two_segment_fit(const std::vector<RentPoint>& points);

struct AnalyzeOptions {
  int drop_top_depths = 1;  // applied to the prepack and inter-CLB fits
  double tol = 0.05;
  bool ignore_globals = true;
  bool include_clock_pins = false;
  std::string cluster_kind = "clb";
};

struct PrepackAnalysis {
  double t = 0.0;
  RentFit fit;
  std::vector<RentPoint> points;
};

PrepackAnalysis analyze_prepack(const Netlist& prepack,
                                const PartitionConfig& pcfg,
                                const AnalyzeOptions& opts);

// Cluster-level netlist: one weighted block per clb cluster, nets collapsed
// to the clusters they touch, I/O connections kept as boundary markers.
Netlist build_cluster_netlist(const Netlist& prepack, const ClusterMap& cm,
                              std::string_view kind = "clb");

// Full post-packing analysis: prepack fit, pooled intra-CLB fit, weighted
// inter-CLB fit, the density metrics, and the two-segment structure of the
// inter-CLB points.
DensityReport analyze(const Netlist& prepack, const ClusterMap& cm,
                      const ArchSpec& arch, const PartitionConfig& pcfg,
                      const AnalyzeOptions& opts);

}  // namespace rentlens
