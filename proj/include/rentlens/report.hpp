#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rentlens/partition.hpp"
#include "rentlens/rent.hpp"

namespace rentlens {

inline constexpr const char* kToolName = "rentlens";
inline constexpr const char* kToolVersion = "0.1.0";

// Everything the machine-readable report needs. The worker-thread count is
// deliberately not part of the echo: reports must be byte-identical across
// thread settings.
struct ReportContext {
  const Netlist* prepack = nullptr;
  PartitionConfig pcfg;
  AnalyzeOptions opts;
};

// Stable-key-order JSON. Same inputs and seed -> byte-identical text.
std::string report_json(const DensityReport& report, const ReportContext& ctx);
std::string report_json(const PrepackAnalysis& prepack_only,
                        const ReportContext& ctx);

// CSV schema: region,depth,B,T,weight (dot decimal, newline terminated).
std::string points_csv(const std::vector<const std::vector<RentPoint>*>& series);

// Self-contained log-log scatter plot, one series per region, one line per
// fit.
std::string plot_svg(const DensityReport& report, const std::string& title);
std::string plot_svg(const PrepackAnalysis& prepack_only,
                     const std::string& title);

// Side-by-side table for two report JSON documents (as emitted above).
// Throws ParseError when the two reports analyze different designs.
struct CompareResult {
  std::string table;
  std::string svg;  // grouped bars per metric
};
CompareResult compare_reports(const std::string& json_a,
                              const std::string& json_b,
                              const std::string& label_a,
                              const std::string& label_b);

}  // namespace rentlens
