#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rentlens/arch.hpp"
#include "rentlens/blif.hpp"
#include "rentlens/error.hpp"
#include "rentlens/gnl.hpp"
#include "rentlens/pack.hpp"
#include "rentlens/partition.hpp"
#include "rentlens/rent.hpp"
#include "rentlens/report.hpp"
#include "rentlens/vprnet.hpp"

namespace {

using namespace rentlens;

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ParseError("cannot write '" + path + "'");
  }
  out << content;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) {
    std::cerr << "warning: " << w << "\n";
  }
}

struct CommonArgs {
  std::string blif;
  std::string net;
  std::string arch;
  std::uint64_t seed = 1;
  int restarts = 10;
  double epsilon = 0.1;
  int drop_top_depths = 1;
  double tol = 0.05;
  bool ignore_globals = true;
  bool include_clock_pins = false;
  std::string cluster_kind = "clb";

  PartitionConfig pcfg() const {
    PartitionConfig cfg;
    cfg.seed = seed;
    cfg.restarts = restarts;
    cfg.balance_epsilon = epsilon;
    cfg.ignore_globals = ignore_globals;
    return cfg;
  }

  AnalyzeOptions aopts() const {
    AnalyzeOptions opts;
    opts.drop_top_depths = drop_top_depths;
    opts.tol = tol;
    opts.ignore_globals = ignore_globals;
    opts.include_clock_pins = include_clock_pins;
    opts.cluster_kind = cluster_kind;
    return opts;
  }

  ArchSpec load_arch() const {
    return arch.empty() ? ArchSpec{} : load_arch_file(arch);
  }
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_net) {
  cmd->add_option("--blif", args.blif, "pre-packing BLIF netlist")
      ->required();
  if (with_net) {
    cmd->add_option("--net", args.net, "post-packing .net cluster netlist");
    cmd->add_option("--arch", args.arch, "architecture key-value file");
    cmd->add_option("--tol", args.tol, "RModerate classification band")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--count-clock-pins", args.include_clock_pins,
                  "count clock pins in terminal and utilization figures");
    cmd->add_option("--cluster-kind", args.cluster_kind,
                    "instance prefix of logic clusters in the .net file");
  }
  cmd->add_option("--seed", args.seed, "partitioner RNG seed");
  cmd->add_option("--restarts", args.restarts, "multilevel restarts per node")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--epsilon", args.epsilon, "bipartition balance slack")
      ->check(CLI::Range(0.0, 0.499));
  cmd->add_option("--drop-top-depths", args.drop_top_depths,
                  "shallow depths excluded from fits (Region II)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--ignore-globals", args.ignore_globals,
                  "exclude clock/global nets from terminal counts");
}

std::string human_summary(const DensityReport& r) {
  char buf[512];
  std::string out;
  std::snprintf(buf, sizeof(buf), "t        = %.4f\nr_prepack = %.4f\n",
                r.t, r.prepack_fit.r);
  out += buf;
  if (r.intra_fit) {
    std::snprintf(buf, sizeof(buf), "r_intra   = %.4f\n", r.intra_fit->r);
    out += buf;
  } else {
    out += "r_intra   = -\n";
  }
  if (r.inter_fit) {
    std::snprintf(buf, sizeof(buf), "r_inter   = %.4f\n", r.inter_fit->r);
    out += buf;
  } else {
    out += "r_inter   = -\n";
  }
  std::snprintf(buf, sizeof(buf),
                "clusters  = %d\nB_avg     = %.4f\nT_avg     = %.4f\n"
                "B_star    = %.4f\nD_R       = %.4f  (%s)\n"
                "D_B       = %.4f\nD_T       = %.4f\n",
                r.n_clusters, r.b_avg, r.t_avg, r.b_star, r.d_r,
                to_string(r.classification), r.d_b, r.d_t);
  out += buf;
  return out;
}

int cmd_analyze(const CommonArgs& args, const std::string& json_path,
                const std::string& csv_path, const std::string& svg_path) {
  std::vector<std::string> warnings;
  const Netlist prepack = parse_blif_file(args.blif, &warnings);
  print_warnings(warnings);

  ReportContext ctx;
  ctx.prepack = &prepack;
  ctx.pcfg = args.pcfg();
  ctx.opts = args.aopts();

  if (args.net.empty()) {
    const PrepackAnalysis pa = analyze_prepack(prepack, ctx.pcfg, ctx.opts);
    if (json_path != "-") {
      std::printf("t        = %.4f\nr_prepack = %.4f  (%d points, rss %.3g)\n",
                  pa.t, pa.fit.r, pa.fit.n_points, pa.fit.rss);
    }
    if (!json_path.empty()) {
      write_output(json_path, report_json(pa, ctx));
    }
    if (!csv_path.empty()) {
      write_output(csv_path, points_csv({&pa.points}));
    }
    if (!svg_path.empty()) {
      write_output(svg_path, plot_svg(pa, prepack.name));
    }
    return 0;
  }

  warnings.clear();
  const ClusterMap cm = load_vpr_net_file(args.net, prepack, &warnings);
  print_warnings(warnings);
  const ArchSpec arch = args.load_arch();
  const DensityReport report =
      analyze(prepack, cm, arch, ctx.pcfg, ctx.opts);
  if (json_path != "-") {
    std::fputs(human_summary(report).c_str(), stdout);
  }
  if (!json_path.empty()) {
    write_output(json_path, report_json(report, ctx));
  }
  if (!csv_path.empty()) {
    write_output(csv_path,
                 points_csv({&report.prepack_points, &report.intra_points,
                             &report.inter_points}));
  }
  if (!svg_path.empty()) {
    write_output(svg_path, plot_svg(report, prepack.name));
  }
  return 0;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rentlens: post-packing interconnect structure analysis"};
  app.require_subcommand(1);

  // analyze
  CommonArgs an_args;
  std::string an_json;
  std::string an_csv;
  std::string an_svg;
  CLI::App* an = app.add_subcommand(
      "analyze", "Rent fit of a BLIF netlist, full density report with --net");
  add_common(an, an_args, true);
  an->add_option("--json", an_json, "report JSON path ('-' for stdout)");
  an->add_option("--csv", an_csv, "Rent point table (region,depth,B,T,weight)");
  an->add_option("--svg", an_svg, "log-log Rent plot");

  // compare
  CommonArgs cp_args;
  std::string cp_a_blif, cp_a_net, cp_b_blif, cp_b_net;
  std::string cp_a_report, cp_b_report;
  std::string cp_svg;
  CLI::App* cp = app.add_subcommand(
      "compare", "side-by-side density metrics for two packings");
  cp->add_option("--a-blif", cp_a_blif, "first pre-packing netlist");
  cp->add_option("--a-net", cp_a_net, "first packed netlist");
  cp->add_option("--b-blif", cp_b_blif, "second pre-packing netlist");
  cp->add_option("--b-net", cp_b_net, "second packed netlist");
  cp->add_option("--a-report", cp_a_report, "first report JSON");
  cp->add_option("--b-report", cp_b_report, "second report JSON");
  cp->add_option("--arch", cp_args.arch, "architecture key-value file");
  cp->add_option("--seed", cp_args.seed, "partitioner RNG seed");
  cp->add_option("--svg", cp_svg, "grouped-bar chart of the metrics");

  // gen
  GenSpec gen_spec;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand(
      "gen", "generate a synthetic netlist with a target Rent exponent");
  gen->add_option("--blocks", gen_spec.n_blocks, "number of primitives")
      ->required()
      ->check(CLI::Range(2, 1 << 24));
  gen->add_option("--rent", gen_spec.target_r, "target Rent exponent (0,1]")
      ->required()
      ->check(CLI::Range(std::nextafter(0.0, 1.0), 1.0));
  gen->add_option("--tpins", gen_spec.t_block, "pins per primitive")
      ->check(CLI::Range(2, 64));
  gen->add_option("--seed", gen_spec.seed, "generator seed");
  gen->add_option("--latch-frac", gen_spec.latch_fraction,
                  "fraction of primitives emitted as latches")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--out", gen_out, "output BLIF path")->required();

  // pack
  CommonArgs pk_args;
  PackConfig pk_cfg;
  std::string pk_out;
  std::string pk_policy = "most-pins";
  bool pk_no_unrelated = false;
  CLI::App* pk = app.add_subcommand(
      "pack", "greedy seed-based packing with a pin-utilization knob");
  pk->add_option("--blif", pk_args.blif, "pre-packing BLIF netlist")
      ->required();
  pk->add_option("--arch", pk_args.arch, "architecture key-value file");
  pk->add_option("--pin-util", pk_cfg.target_ext_pin_util,
                 "target external input pin utilization")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  pk->add_option("--seed-policy", pk_policy, "most-pins | most-critical-nets")
      ->check(CLI::IsMember({"most-pins", "most-critical-nets"}));
  pk->add_flag("--no-unrelated", pk_no_unrelated,
               "never absorb unconnected blocks");
  pk->add_option("--seed", pk_cfg.rng_seed, "reserved packer seed");
  pk->add_option("--out", pk_out, "output .net path")->required();

  // partition
  CommonArgs pt_args;
  std::string pt_points;
  std::string pt_json;
  CLI::App* pt = app.add_subcommand(
      "partition", "recursive bipartition tree and Rent points");
  add_common(pt, pt_args, false);
  pt->add_option("--points", pt_points, "dump RentPoints CSV");
  pt->add_option("--json", pt_json, "prepack report JSON ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(an)) {
      return cmd_analyze(an_args, an_json, an_csv, an_svg);
    }
    if (app.got_subcommand(cp)) {
      std::string ja;
      std::string jb;
      std::string la = "A";
      std::string lb = "B";
      if (!cp_a_report.empty() || !cp_b_report.empty()) {
        if (cp_a_report.empty() || cp_b_report.empty()) {
          throw ParseError("compare: need both --a-report and --b-report");
        }
        ja = slurp(cp_a_report);
        jb = slurp(cp_b_report);
        la = cp_a_report;
        lb = cp_b_report;
      } else {
        if (cp_a_blif.empty() || cp_a_net.empty() || cp_b_blif.empty() ||
            cp_b_net.empty()) {
          throw ParseError(
              "compare: need --a-blif/--a-net and --b-blif/--b-net (or two "
              "--*-report files)");
        }
        ReportContext ctx;
        ctx.pcfg = cp_args.pcfg();
        ctx.opts = cp_args.aopts();
        const ArchSpec arch = cp_args.load_arch();
        const Netlist na = parse_blif_file(cp_a_blif);
        const ClusterMap ma = load_vpr_net_file(cp_a_net, na);
        ctx.prepack = &na;
        ja = report_json(analyze(na, ma, arch, ctx.pcfg, ctx.opts), ctx);
        const Netlist nb = parse_blif_file(cp_b_blif);
        const ClusterMap mb = load_vpr_net_file(cp_b_net, nb);
        ctx.prepack = &nb;
        jb = report_json(analyze(nb, mb, arch, ctx.pcfg, ctx.opts), ctx);
        la = cp_a_net;
        lb = cp_b_net;
      }
      const CompareResult result = compare_reports(ja, jb, la, lb);
      std::fputs(result.table.c_str(), stdout);
      if (!cp_svg.empty()) {
        write_output(cp_svg, result.svg);
      }
      return 0;
    }
    if (app.got_subcommand(gen)) {
      const Netlist netlist = generate(gen_spec);
      write_output(gen_out, write_blif(netlist));
      const BlockStats stats = block_stats(netlist);
      std::printf("%s: %d blocks, %d nets, t=%.3f -> %s\n",
                  netlist.name.c_str(), stats.n_blocks, stats.n_nets,
                  stats.avg_terminals, gen_out.c_str());
      return 0;
    }
    if (app.got_subcommand(pk)) {
      std::vector<std::string> warnings;
      const Netlist netlist = parse_blif_file(pk_args.blif, &warnings);
      print_warnings(warnings);
      pk_cfg.seed_policy = pk_policy == "most-pins"
                               ? SeedPolicy::MostPins
                               : SeedPolicy::MostCriticalNets;
      pk_cfg.allow_unrelated = !pk_no_unrelated;
      const ArchSpec arch = pk_args.load_arch();
      std::vector<std::string> diagnostics;
      const ClusterMap cm = pack(netlist, arch, pk_cfg, &diagnostics);
      for (const std::string& d : diagnostics) {
        std::cerr << "diagnostic: " << d << "\n";
      }
      write_output(pk_out, write_net(cm, netlist, arch));
      int clbs = 0;
      int singletons = 0;
      for (const Cluster& c : cm.clusters) {
        if (c.kind == "clb") {
          ++clbs;
          if (c.primitive_count() == 1) {
            ++singletons;
          }
        }
      }
      std::printf("%d clusters (%d singletons, %zu flagged) -> %s\n", clbs,
                  singletons, diagnostics.size(), pk_out.c_str());
      return 0;
    }
    if (app.got_subcommand(pt)) {
      std::vector<std::string> warnings;
      const Netlist netlist = parse_blif_file(pt_args.blif, &warnings);
      print_warnings(warnings);
      ReportContext ctx;
      ctx.prepack = &netlist;
      ctx.pcfg = pt_args.pcfg();
      ctx.opts = pt_args.aopts();
      const PrepackAnalysis pa = analyze_prepack(netlist, ctx.pcfg, ctx.opts);
      if (pt_json != "-") {
        std::printf("t        = %.4f\nr_prepack = %.4f  (%d points)\n", pa.t,
                    pa.fit.r, pa.fit.n_points);
      }
      if (!pt_points.empty()) {
        write_output(pt_points, points_csv({&pa.points}));
      }
      if (!pt_json.empty()) {
        write_output(pt_json, report_json(pa, ctx));
      }
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
