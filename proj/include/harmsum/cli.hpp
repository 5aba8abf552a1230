// SPDX-License-Identifier: Apache-2.0
//
// cli.hpp
//
// Batch front-end. Exit codes: 0 success, 1 verification divergence,
// 2 usage or parameter error, 3 I/O or format error.

#pragma once

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harmsum/analysis.hpp"
#include "harmsum/io.hpp"
#include "harmsum/runner.hpp"

namespace harmsum::cli {

enum ExitCode : int { kOk = 0, kDivergence = 1, kUsage = 2, kIoError = 3 };

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Worker count for --parallel, capped by HARMSUM_THREADS when set.
inline unsigned parallel_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HARMSUM_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

namespace detail {

struct ParamFlags {
  std::uint32_t rows = 42;
  std::uint64_t chan = 4096;
  std::uint32_t hp = 8;
  std::uint32_t cand = 200;

  void add(CLI::App* app, bool with_dims = true) {
    if (with_dims) {
      app->add_option("--rows", rows, "Template rows in the processed half plane")->capture_default_str();
      app->add_option("--chan", chan, "Frequency channels")->capture_default_str();
    }
    app->add_option("--hp", hp, "Harmonic planes (1-8)")->capture_default_str();
    app->add_option("--cand", cand, "Candidate capacity per plane")->capture_default_str();
  }
  HsParams params() const { return {rows, chan, hp, cand}; }
};

inline std::pair<std::uint32_t, std::uint64_t> parse_target(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("--inject expects ROW:BIN, got " + s);
  try {
    return {static_cast<std::uint32_t>(std::stoul(s.substr(0, colon))), std::stoull(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw UsageError("--inject expects ROW:BIN, got " + s);
  }
}

inline std::string layout_line(const RfopLayout& l) {
  std::ostringstream os;
  os << "cols=" << l.n_col << " pwi=" << l.n_p_wi << " n_lp_cc=" << l.n_lp_cc
     << " pow2=" << (l.pow2_opt ? 1 : 0) << " demand=" << l.demand << " s_workgroup=" << l.s_workgroup()
     << " workgroups=" << l.n_workgroups << " ratio=" << l.load_ratio();
  return os.str();
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Harmonic-summing engines over an instrumented memory model", "harmsum"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a seeded noise FOP with an injected harmonic signal");
  detail::ParamFlags gen_p;
  gen_p.add(gen);
  std::uint64_t gen_seed = 1;
  std::string gen_target = "0:0";
  float gen_amp = 100.0f;
  float gen_noise = 1.0f;
  std::string gen_out;
  gen->add_option("--seed", gen_seed, "Noise seed")->capture_default_str();
  gen->add_option("--inject", gen_target, "Injection target ROW:BIN")->capture_default_str();
  gen->add_option("--amp", gen_amp, "Amplitude added at each stretched source")->capture_default_str();
  gen->add_option("--noise", gen_noise, "Uniform noise scale")->capture_default_str();
  gen->add_option("-o,--output", gen_out, "Output FOPB file")->required();

  // plan
  auto* plan = app.add_subcommand("plan", "Tabulate loaded points per cycle for reordered-FOP layouts");
  detail::ParamFlags plan_p;
  plan_p.add(plan);
  std::vector<std::uint32_t> plan_cols{1, 4, 16, 64};
  std::vector<std::uint32_t> plan_pwi{1, 2, 4, 8};
  std::string plan_csv;
  plan->add_option("--cols", plan_cols, "Columns per workgroup (list)")
      ->delimiter(',')
      ->capture_default_str();
  plan->add_option("--pwi", plan_pwi, "Points per work-item (list)")->delimiter(',')->capture_default_str();
  plan->add_option("--csv", plan_csv, "Also write the grid as CSV");

  // reorder
  auto* reo = app.add_subcommand("reorder", "Build a reordered, padded FOP (RFOP file)");
  detail::ParamFlags reo_p;
  reo_p.add(reo, false);
  std::string reo_in, reo_out;
  std::uint32_t reo_cols = 16, reo_pwi = 4;
  bool reo_pow2 = false;
  reo->add_option("-i,--input", reo_in, "Input FOPB file")->required();
  reo->add_option("-o,--output", reo_out, "Output RFOP file")->required();
  reo->add_option("--cols", reo_cols, "Columns per workgroup")->capture_default_str();
  reo->add_option("--pwi", reo_pwi, "Points per work-item")->capture_default_str();
  reo->add_flag("--pow2", reo_pow2, "Round loaded points per cycle up to a power of two");

  // run
  auto* run = app.add_subcommand("run", "Run one strategy and write candidates and access stats");
  detail::ParamFlags run_p;
  run_p.add(run, false);
  std::string run_strategy_name, run_in, run_rfop, run_ta, run_out, run_stats, run_debug;
  float run_threshold = 0.0f;
  std::size_t run_preload = 0;
  std::uint32_t run_cols = 16, run_pwi = 4;
  bool run_pow2 = false, run_no_dedup = false, run_csv = false, run_parallel = false;
  run->add_option("--strategy", run_strategy_name, "singlehp | mhp-naive | mhp-h | mhp-n | mhp-r")
      ->required();
  run->add_option("-i,--input", run_in, "Input FOPB file (all strategies but mhp-r)");
  run->add_option("--rfop", run_rfop, "Input RFOP file (mhp-r)");
  auto* opt_ta = run->add_option("--ta", run_ta, "Threshold CSV (n_hp lines x n_rows values)");
  auto* opt_thr = run->add_option("--threshold", run_threshold, "Uniform threshold for every plane and row");
  opt_ta->excludes(opt_thr);
  auto* opt_preload = run->add_option("--preload", run_preload, "mhp-h: points pinned on chip");
  auto* opt_cols = run->add_option("--cols", run_cols, "mhp-n/mhp-r: columns per workgroup");
  auto* opt_pwi = run->add_option("--pwi", run_pwi, "mhp-r: points per work-item (checked against RFOP)");
  auto* opt_pow2 = run->add_flag("--pow2", run_pow2, "mhp-r: expect a power-of-two layout");
  auto* opt_nodedup = run->add_flag("--no-dedup", run_no_dedup, "singlehp: load every stretch point");
  run->add_option("-o,--output", run_out, "Candidate output file")->required();
  run->add_flag("--csv", run_csv, "Write candidates as CSV instead of binary");
  run->add_option("--stats", run_stats, "Access stats CSV output");
  run->add_option("--debug-planes", run_debug, "Dump HP_1..HP_n as PREFIX.hpK.fop");
  run->add_flag("--parallel", run_parallel, "Process disjoint column ranges concurrently");

  // touch
  auto* touch = app.add_subcommand("touch", "Touch-frequency map and preload coverage curve");
  detail::ParamFlags touch_p;
  touch_p.add(touch);
  std::string touch_csv, touch_map_csv_path, touch_pgm;
  std::vector<std::uint64_t> touch_region{0, 16, 0, 1024};
  touch->add_option("--csv", touch_csv, "Coverage curve CSV");
  touch->add_option("--map-csv", touch_map_csv_path, "Touch counts CSV");
  touch->add_option("--pgm", touch_pgm, "Touch map as PGM heatmap");
  touch->add_option("--region", touch_region, "Region for the touch share: R0 R1 C0 C1 (half-open)")
      ->expected(4)
      ->capture_default_str();

  // verify
  auto* ver = app.add_subcommand("verify", "Cross-check strategies for bit-identical planes and candidates");
  detail::ParamFlags ver_p;
  ver_p.chan = 1024;
  ver_p.add(ver);
  bool ver_all = false, ver_parallel = false, ver_no_pow2 = false;
  std::vector<std::string> ver_list;
  std::uint64_t ver_seed = 1;
  std::string ver_in, ver_ta, ver_perturb;
  std::size_t ver_preload = 0;
  std::uint32_t ver_cols = 16, ver_pwi = 4;
  ver->add_flag("--all", ver_all, "Check all five strategies");
  ver->add_option("--strategies", ver_list, "Strategies to check")->delimiter(',');
  ver->add_option("--seed", ver_seed, "Seed for the generated FOP")->capture_default_str();
  ver->add_option("-i,--input", ver_in, "Use this FOPB file instead of generating one");
  ver->add_option("--ta", ver_ta, "Threshold CSV (default: rank-based, n_cand/2 per plane)");
  auto* opt_ver_preload =
      ver->add_option("--preload", ver_preload, "mhp-h preload size (default: 5% of the plane)");
  ver->add_option("--cols", ver_cols, "mhp-n/mhp-r columns per workgroup")->capture_default_str();
  ver->add_option("--pwi", ver_pwi, "mhp-r points per work-item")->capture_default_str();
  ver->add_flag("--no-pow2", ver_no_pow2, "mhp-r: use the general (non power-of-two) layout");
  ver->add_option("--perturb", ver_perturb,
                  "Fault injection: STRATEGY:ROW:COL adds 1.0 to that FOP point for one strategy");
  ver->add_flag("--parallel", ver_parallel, "Run engines in parallel mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) {
      const auto params = gen_p.params();
      params.validate(false);
      const auto [row, bin] = detail::parse_target(gen_target);
      const InjectionSpec spec{row, bin, gen_amp, gen_seed, gen_noise};
      write_fop(gen_out, generate_fop(params, spec));
      out << "wrote " << gen_out << " (" << params.n_rows << "x" << params.n_chan << ") injected row=" << row
          << " bin=" << bin << " amplitude=" << gen_amp << " planes=" << params.n_hp << "\n";
      return kOk;
    }

    if (plan->parsed()) {
      const auto params = plan_p.params();
      params.validate(false);
      std::ostringstream csv;
      csv << "cols,pwi,demand,general,general_ratio,pow2,pow2_ratio\n";
      out << std::left << std::setw(6) << "cols" << std::setw(5) << "pwi" << std::setw(8) << "demand"
          << std::setw(16) << "general" << "pow2\n";
      for (auto c : plan_cols) {
        if (c == 0 || params.n_chan % c != 0) {
          err << "skipping cols=" << c << ": does not divide n_chan\n";
          continue;
        }
        for (auto p : plan_pwi) {
          const auto g = plan_layout(params, c, p, false);
          const auto o = plan_layout(params, c, p, true);
          std::ostringstream gs, os;
          gs << g.n_lp_cc << " (x" << std::setprecision(2) << g.load_ratio() << ")";
          os << o.n_lp_cc << " (x" << std::setprecision(2) << o.load_ratio() << ")";
          out << std::left << std::setw(6) << c << std::setw(5) << p << std::setw(8) << g.demand
              << std::setw(16) << gs.str() << os.str() << "\n";
          csv << c << "," << p << "," << g.demand << "," << g.n_lp_cc << "," << g.load_ratio() << ","
              << o.n_lp_cc << "," << o.load_ratio() << "\n";
        }
      }
      if (!plan_csv.empty()) io_detail::write_text(plan_csv, csv.str());
      return kOk;
    }

    if (reo->parsed()) {
      const auto fop = read_fop(reo_in);
      HsParams params = reo_p.params();
      params.n_rows = fop.rows();
      params.n_chan = fop.cols();
      params.validate(false);
      const auto layout = plan_layout(params, reo_cols, reo_pwi, reo_pow2);
      const auto t0 = std::chrono::steady_clock::now();
      const auto rfop = build_rfop(fop, layout);
      const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);
      write_rfop(reo_out, rfop);
      out << "wrote " << reo_out << " " << detail::layout_line(layout) << " slots=" << rfop.data.size()
          << " size_ratio=" << static_cast<double>(rfop.data.size()) / static_cast<double>(fop.size())
          << " build_ms=" << ms.count() << "\n";
      return kOk;
    }

    if (run->parsed()) {
      const auto strategy = parse_strategy(run_strategy_name);
      if (!strategy) throw UsageError("unknown strategy " + run_strategy_name);
      const auto s = *strategy;
      auto reject = [&](CLI::Option* o, bool allowed) {
        if (o->count() > 0 && !allowed)
          throw UsageError(o->get_name() + " is not valid for strategy " + run_strategy_name);
      };
      reject(opt_preload, s == Strategy::MhpH);
      reject(opt_cols, s == Strategy::MhpN || s == Strategy::MhpR);
      reject(opt_pwi, s == Strategy::MhpR);
      reject(opt_pow2, s == Strategy::MhpR);
      reject(opt_nodedup, s == Strategy::SingleHp);

      HsParams params = run_p.params();
      std::optional<FopPlane> fop;
      std::optional<RfopBuffer> rfop;
      if (s == Strategy::MhpR) {
        if (run_rfop.empty()) throw UsageError("mhp-r requires --rfop (build one with `reorder`)");
        if (!run_in.empty()) throw UsageError("mhp-r reads --rfop, not --input");
        rfop = read_rfop(run_rfop);
        params.n_rows = rfop->layout.n_rows;
        params.n_chan = rfop->layout.n_chan;
        const auto& l = rfop->layout;
        if (l.n_hp != params.n_hp)
          throw UsageError("RFOP was planned for " + std::to_string(l.n_hp) + " planes, --hp is " +
                           std::to_string(params.n_hp));
        if (opt_cols->count() && run_cols != l.n_col)
          throw UsageError("--cols does not match the RFOP layout (" + std::to_string(l.n_col) + ")");
        if (opt_pwi->count() && run_pwi != l.n_p_wi)
          throw UsageError("--pwi does not match the RFOP layout (" + std::to_string(l.n_p_wi) + ")");
        if (opt_pow2->count() && run_pow2 != l.pow2_opt)
          throw UsageError("--pow2 does not match the RFOP layout");
        const auto expect = plan_layout(params, l.n_col, l.n_p_wi, l.pow2_opt);
        if (!(expect == l)) throw FormatError("RFOP layout is inconsistent with its geometry", 12);
      } else {
        if (run_in.empty()) throw UsageError(run_strategy_name + " requires --input");
        if (!run_rfop.empty()) throw UsageError("--rfop is only valid for mhp-r");
        fop = read_fop(run_in);
        params.n_rows = fop->rows();
        params.n_chan = fop->cols();
      }
      params.validate();

      ThresholdArray ta(params.n_hp, params.n_rows, run_threshold);
      if (!run_ta.empty()) {
        ta = read_thresholds(run_ta);
        if (!ta.matches(params))
          throw FormatError("threshold CSV is " + std::to_string(ta.n_hp()) + "x" +
                                std::to_string(ta.n_rows()) + ", expected " + std::to_string(params.n_hp) +
                                "x" + std::to_string(params.n_rows),
                            1);
      }

      EngineOptions opts;
      opts.debug_planes = !run_debug.empty();
      opts.threads = run_parallel ? parallel_threads() : 1;
      if (run_parallel && s != Strategy::SingleHp)
        err << "note: parallel mode merges per-range candidate rings in column order\n";

      EngineOutput result;
      GmaEntry analytic;
      if (s == Strategy::MhpR) {
        result = run_multiple_hp_r(params, *rfop, ta, opts);
        GmaKnobs g;
        g.layout = rfop->layout;
        analytic = analytic_gma(params, s, g);
      } else {
        RunKnobs knobs;
        knobs.dedup_stretch = !run_no_dedup;
        knobs.preload_size = run_preload;
        knobs.n_col = run_cols;
        auto r = run_strategy(s, params, *fop, ta, knobs, opts);
        result = std::move(r.output);
        analytic = r.analytic;
      }

      write_candidates(run_out, result.candidates, run_csv);
      const std::string row = stats_csv_row(s, result.stats, analytic);
      if (!run_stats.empty()) io_detail::write_text(run_stats, std::string(kStatsHeader) + "\n" + row + "\n");
      if (result.final_planes)
        for (std::uint32_t k = 0; k < result.final_planes->size(); ++k)
          write_fop(run_debug + ".hp" + std::to_string(k + 1) + ".fop", (*result.final_planes)[k]);

      std::uint64_t total = 0;
      for (const auto& r : result.candidates) total += r.size();
      out << kStatsHeader << "\n" << row << "\n";
      out << "candidates=" << total << " written to " << run_out << "\n";
      return kOk;
    }

    if (touch->parsed()) {
      const auto params = touch_p.params();
      params.validate(false);
      const auto map = compute_touch_map(params);
      const auto curve = coverage_curve(map);
      std::uint64_t at_max = 0;
      const auto mx = map.max();
      for (auto c : map.counts()) at_max += (c == mx);
      out << "max_touch=" << mx << " total=" << map.total() << "\n";
      out << "max_touch_fraction=" << static_cast<double>(at_max) / static_cast<double>(map.counts().size())
          << "\n";
      out << "fraction_for_coverage(0.5)=" << curve.fraction_for_coverage(0.5) << "\n";
      out << "fraction_for_coverage(0.9)=" << curve.fraction_for_coverage(0.9) << "\n";
      const IndexRange rows{touch_region[0], std::min<std::uint64_t>(touch_region[1], params.n_rows)};
      const IndexRange cols{touch_region[2], std::min<std::uint64_t>(touch_region[3], params.n_chan)};
      out << "region_share[" << rows.begin << ":" << rows.end << "," << cols.begin << ":" << cols.end
          << "]=" << region_touch_share(map, rows, cols) << "\n";
      if (!touch_csv.empty()) io_detail::write_text(touch_csv, coverage_csv(curve));
      if (!touch_map_csv_path.empty()) io_detail::write_text(touch_map_csv_path, touch_map_csv(map));
      if (!touch_pgm.empty()) io_detail::write_file(touch_pgm, touch_map_pgm(map));
      return kOk;
    }

    if (ver->parsed()) {
      std::vector<Strategy> strategies;
      if (ver_all || ver_list.empty()) {
        strategies.assign(std::begin(kAllStrategies), std::end(kAllStrategies));
      } else {
        for (const auto& n : ver_list) {
          const auto s = parse_strategy(n);
          if (!s) throw UsageError("unknown strategy " + n);
          strategies.push_back(*s);
        }
      }
      HsParams params = ver_p.params();
      FopPlane fop;
      if (!ver_in.empty()) {
        fop = read_fop(ver_in);
        params.n_rows = fop.rows();
        params.n_chan = fop.cols();
        params.validate();
      } else {
        params.validate();
        fop = generate_fop(params, {params.n_rows / 3, params.n_chan / 3, 100.0f, ver_seed, 1.0f});
      }

      ThresholdArray ta;
      if (!ver_ta.empty()) {
        ta = read_thresholds(ver_ta);
        if (!ta.matches(params)) throw FormatError("threshold CSV does not match parameters", 1);
      } else {
        ta = rank_thresholds(reference_planes(params, fop), params.n_rows, (params.n_cand + 1) / 2);
      }

      std::size_t perturb_target = strategies.size();
      std::uint32_t perturb_row = 0;
      std::uint64_t perturb_col = 0;
      if (!ver_perturb.empty()) {
        const auto first = ver_perturb.find(':');
        const auto ps = parse_strategy(ver_perturb.substr(0, first));
        if (!ps || first == std::string::npos) throw UsageError("--perturb expects STRATEGY:ROW:COL");
        const auto [r, c] = detail::parse_target(ver_perturb.substr(first + 1));
        if (r >= params.n_rows || c >= params.n_chan) throw UsageError("--perturb point outside the plane");
        perturb_row = r;
        perturb_col = c;
        for (std::size_t n = 0; n < strategies.size(); ++n)
          if (strategies[n] == *ps) perturb_target = n;
        if (perturb_target == strategies.size()) throw UsageError("--perturb strategy is not being verified");
      }

      RunKnobs knobs;
      knobs.preload_size = opt_ver_preload->count() ? ver_preload : params.plane_size() / 20;
      knobs.n_col = ver_cols;
      knobs.n_p_wi = ver_pwi;
      knobs.pow2 = !ver_no_pow2;
      EngineOptions opts;
      opts.debug_planes = true;
      opts.threads = ver_parallel ? parallel_threads() : 1;

      EngineOutput reference;
      reference.final_planes = reference_planes(params, fop);
      {
        GlobalStore g(fop);
        auto ref = run_multiple_hp_naive(params, g, ta, {false, 1});
        reference.candidates = std::move(ref.candidates);
      }

      std::vector<StrategyRun> runs;
      for (std::size_t n = 0; n < strategies.size(); ++n) {
        FopPlane input = fop;
        if (n == perturb_target) input.at(perturb_row, perturb_col) += 1.0f;
        runs.push_back(run_strategy(strategies[n], params, input, ta, knobs, opts));
      }
      std::vector<NamedOutput> named;
      for (std::size_t n = 0; n < strategies.size(); ++n)
        named.push_back({std::string(strategy_name(strategies[n])), &runs[n].output});
      const auto report = verify_equivalence(named, reference, &ta);

      for (std::size_t n = 0; n < strategies.size(); ++n) {
        const auto name = std::string(strategy_name(strategies[n]));
        bool ok = true;
        for (const auto& d : report.divergences) ok = ok && d.engine != name;
        std::uint64_t cands = 0;
        for (const auto& r : runs[n].output.candidates) cands += r.size();
        out << (ok ? "PASS " : "FAIL ") << std::left << std::setw(10) << name
            << " loads=" << runs[n].output.stats.global_loads
            << " stores=" << runs[n].output.stats.global_stores << " candidates=" << cands << "\n";
      }
      if (!report.passed()) {
        err << report.summary();
        return kDivergence;
      }
      out << report.summary() << "\n";
      return kOk;
    }
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << "\n";
    return kIoError;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"harmsum"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace harmsum::cli
