#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cournot/analysis.hpp"
#include "cournot/bargaining.hpp"
#include "cournot/csv.hpp"
#include "cournot/error.hpp"
#include "cournot/experiment.hpp"
#include "cournot/persistence.hpp"

namespace cournot::cli {

namespace fs = std::filesystem;

namespace {

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const SolverFailure& e) {
    fmt::print(err, "error: solver failure in {}\n", e.what());
    return kSolverFailure;
  } catch (const Unsupported& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kSolverFailure;
  } catch (const InputError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kBadInput;
  } catch (const Unavailable& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kBadInput;
  } catch (const InvalidArgument& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsage;
  } catch (const Infeasible& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kBadInput;
  }
}

std::optional<std::vector<ParamSet>> resolve_sets(const std::string& name, std::ostream& err) {
  const auto table = parse_cost_table(name);
  if (!table) {
    fmt::print(err, "error: unknown cost table '{}' (expected main or alt)\n", name);
    return std::nullopt;
  }
  return builtin_param_sets(*table);
}

void outcome_cells(csv::Writer& w, const Outcome& o) {
  w.cell(o.q_L).cell(o.q_H).cell(o.Q).cell(o.p).cell(o.pi_L).cell(o.pi_H);
  w.cell(o.PS).cell(o.CS).cell(o.TS);
}

std::string fit_csv(const FitTable& table, bool normalized) {
  csv::Writer w({"benchmark", "name", "Q", "CS", "PS", "TS"});
  for (const auto& row : table.rows) {
    w.cell(to_string(row.label)).cell(display_name(row.label));
    for (double v : normalized ? row.normalized : row.distance) w.cell(v);
    w.end_row();
  }
  return w.str();
}

std::string shares_csv(const std::vector<SetDeviations>& devs) {
  csv::Writer w({"set", "runs", "neither", "only_L", "only_H", "both"});
  for (const auto& d : devs) {
    const auto shares = classification_shares(d.verdicts);
    w.cell(d.set).cell(shares.runs);
    for (double s : shares.share) w.cell(s);
    w.end_row();
  }
  return w.str();
}

std::string subsample_csv(const std::vector<SetDeviations>& devs) {
  csv::Writer w({"set", "n_compatible", "mean_Q_compatible", "n_deviating", "mean_Q_deviating"});
  for (const auto& d : devs) {
    const auto split = subsample_split(d.runs, d.verdicts);
    w.cell(d.set).cell(split.n_compatible);
    if (split.mean_Q_compatible) w.cell(*split.mean_Q_compatible); else w.cell("");
    w.cell(split.n_deviating);
    if (split.mean_Q_deviating) w.cell(*split.mean_Q_deviating); else w.cell("");
    w.end_row();
  }
  return w.str();
}

std::vector<std::vector<BenchmarkPoint>> suites_for(const ExperimentSummary& summary) {
  std::vector<std::vector<BenchmarkPoint>> suites;
  for (const auto& set : summary.sets) suites.push_back(benchmark_suite(set.params));
  return suites;
}

}  // namespace

fs::path normalized_path(const fs::path& fit) {
  auto p = fit;
  p.replace_filename(fit.stem().string() + "_normalized" + fit.extension().string());
  return p;
}

fs::path costs_path(const fs::path& benchmarks) {
  auto p = benchmarks;
  p.replace_filename(benchmarks.stem().string() + "_costs" + benchmarks.extension().string());
  return p;
}

int cmd_benchmarks(const BenchmarksOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto sets = resolve_sets(opts.set, err);
    if (!sets) return static_cast<int>(kUsage);

    SuiteOptions suite_opts;
    suite_opts.lottery_surplus = opts.state_wise_lottery_cs ? LotterySurplus::kStateWise
                                                            : LotterySurplus::kOfExpectedQuantity;
    suite_opts.grid_minmax = opts.grid_minmax;
    suite_opts.grid = default_grid();

    csv::Writer bench({"set", "benchmark", "q_L", "q_H", "Q", "p", "pi_L", "pi_H", "PS", "CS", "TS"});
    csv::Writer costs({"set", "c_L", "c_H", "q_L_NE", "q_H_NE", "Q_NE", "Q_M"});
    for (const auto& set : *sets) {
      for (const auto& point : benchmark_suite(set.params, suite_opts)) {
        bench.cell(set.name).cell(to_string(point.label));
        outcome_cells(bench, point.outcome);
        bench.end_row();
      }
      const auto nash = nash_point(set.params).outcome;
      const auto mono = monopoly_point(set.params).outcome;
      costs.cell(set.name).cell(set.params.c_L).cell(set.params.c_H);
      costs.cell(nash.q_L).cell(nash.q_H).cell(nash.Q).cell(mono.Q);
      costs.end_row();
    }
    if (opts.out) {
      csv::write_file_atomic(*opts.out, bench.str());
      csv::write_file_atomic(costs_path(*opts.out), costs.str());
    } else {
      out << bench.str();
    }
    return static_cast<int>(kOk);
  });
}

int cmd_frontier(const FrontierOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto sets = resolve_sets(opts.set, err);
    if (!sets) return static_cast<int>(kUsage);
    const auto it = std::find_if(sets->begin(), sets->end(),
                                 [&](const ParamSet& s) { return s.name == opts.spec_name; });
    if (it == sets->end()) {
      fmt::print(err, "error: unknown parameterization '{}'\n", opts.spec_name);
      return static_cast<int>(kUsage);
    }
    if (opts.samples < 2) {
      fmt::print(err, "error: --samples must be at least 2\n");
      return static_cast<int>(kUsage);
    }
    const auto& params = it->params;
    csv::Writer w({"kind", "label", "pi_L", "pi_H", "p", "q_L", "q_H"});
    const double top = monopoly_profit(params, 0);
    for (int i = 0; i < opts.samples; ++i) {
      const double pi_L = top * i / (opts.samples - 1);
      const auto fp = frontier_value(params, pi_L, 0);
      w.cell("frontier").cell("").cell(fp.pi_L).cell(fp.pi_H).cell(fp.p).cell(fp.q_L).cell(fp.q_H);
      w.end_row();
    }
    for (const auto& point : benchmark_suite(params)) {
      const auto& o = point.outcome;
      w.cell("benchmark").cell(to_string(point.label)).cell(o.pi_L).cell(o.pi_H).cell(o.p);
      w.cell(o.q_L).cell(o.q_H);
      w.end_row();
    }
    if (opts.out) {
      csv::write_file_atomic(*opts.out, w.str());
    } else {
      out << w.str();
    }
    return static_cast<int>(kOk);
  });
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto sets = resolve_sets(opts.set, err);
    if (!sets) return static_cast<int>(kUsage);
    if (opts.out.empty()) {
      fmt::print(err, "error: --out is required\n");
      return static_cast<int>(kUsage);
    }

    ExperimentSpec spec;
    for (const auto& set : *sets) {
      if (opts.only.empty() ||
          std::find(opts.only.begin(), opts.only.end(), set.name) != opts.only.end()) {
        spec.param_sets.push_back(set);
      }
    }
    if (spec.param_sets.size() != (opts.only.empty() ? sets->size() : opts.only.size())) {
      fmt::print(err, "error: --only names an unknown parameterization\n");
      return static_cast<int>(kUsage);
    }
    spec.technology.alpha = opts.alpha;
    spec.technology.delta = opts.delta;
    spec.technology.k = opts.k;
    spec.technology.beta = opts.beta;
    spec.technology.nu = opts.beta ? std::nullopt : std::optional<double>(opts.nu.value_or(21.0));
    spec.runs = opts.runs;
    spec.master_seed = opts.seed;
    spec.post_rounds = opts.post_rounds;
    spec.convergence_window = opts.window;
    spec.max_periods = opts.max_periods;
    spec.validate();

    RunOptions run_opts;
    run_opts.threads = opts.threads;
    run_opts.keep_q = opts.write_q;
    int last_decile = -1;
    if (!opts.quiet) {
      run_opts.progress = [&](int done, int total) {
        const int decile = done * 10 / total;
        if (decile != last_decile) {
          last_decile = decile;
          fmt::print(err, "simulate: {}/{} runs\n", done, total);
        }
      };
    }
    const auto summary = run_experiment(spec, run_opts);
    WriteOptions write_opts;
    write_opts.write_q = opts.write_q;
    write_experiment(opts.out, summary, write_opts);

    bool all_valid = true;
    fmt::print(out, "{:<8}{:>10}{:>10}{:>10}{:>10}{:>10}\n", "set", "converged", "mean_Q", "mean_PS",
               "mean_CS", "mean_TS");
    for (const auto& set : summary.sets) {
      all_valid = all_valid && set.valid();
      fmt::print(out, "{:<8}{:>6}/{:<3}{:>10.3f}{:>10.2f}{:>10.2f}{:>10.2f}\n", set.name,
                 set.converged, set.runs, set.mean.Q, set.mean.PS, set.mean.CS, set.mean.TS);
    }
    if (!all_valid) {
      fmt::print(err, "error: a parameter set has no converged run (raise --max-periods)\n");
      return static_cast<int>(kNotConverged);
    }
    return static_cast<int>(kOk);
  });
}

int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto loaded = load_experiment(opts.sim);
    for (const auto& set : loaded.summary.sets) {
      if (!set.valid()) throw InputError(fmt::format("set '{}' has no converged runs", set.name));
    }
    const auto table = fit_distances(loaded.summary, suites_for(loaded.summary));
    const auto levels = fit_csv(table, false);
    const auto normalized = fit_csv(table, true);
    csv::write_file_atomic(opts.out, levels);
    csv::write_file_atomic(normalized_path(opts.out), normalized);
    out << levels;
    return static_cast<int>(kOk);
  });
}

int cmd_deviate(const DeviateOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto method = parse_deviation_method(opts.method);
    if (!method) {
      fmt::print(err, "error: unknown deviation method '{}'\n", opts.method);
      return static_cast<int>(kUsage);
    }
    const auto loaded = load_experiment(opts.sim);
    if (!loaded.has_q || !loaded.has_cycles) {
      throw InputError(fmt::format("{} has no Q-matrices or cycles; re-run simulate without --no-q",
                                   opts.sim.string()));
    }
    DeviationOptions dev_opts;
    dev_opts.horizon = opts.horizon;
    const auto devs = deviation_tests(loaded.summary, *method, dev_opts);
    const auto text = shares_csv(devs);
    csv::write_file_atomic(opts.out, text);
    out << text;
    return static_cast<int>(kOk);
  });
}

int cmd_figures(const FiguresOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    // Everything is computed before the first file is written.
    const auto loaded = load_experiment(opts.sim);
    const auto& summary = loaded.summary;
    const auto* sym = summary.find("sym");
    if (sym == nullptr) throw InputError("simulation has no 'sym' parameterization");
    for (const auto& set : summary.sets) {
      if (!set.valid()) throw InputError(fmt::format("set '{}' has no converged runs", set.name));
    }
    const auto suites = suites_for(summary);
    std::size_t sym_index = static_cast<std::size_t>(sym - summary.sets.data());

    std::map<std::string, std::string> files;

    // Levels and comparative statics (sym = 1).
    std::vector<std::pair<std::string, std::vector<Outcome>>> series;
    {
      std::vector<Outcome> sim;
      for (const auto& set : summary.sets) sim.push_back(set.mean);
      series.emplace_back("simulation", std::move(sim));
      for (auto label : kAllBenchmarks) {
        std::vector<Outcome> bench;
        for (const auto& suite : suites) {
          for (const auto& b : suite) {
            if (b.label == label) bench.push_back(b.outcome);
          }
        }
        series.emplace_back(std::string(to_string(label)), std::move(bench));
      }
    }
    csv::Writer levels({"set", "series", "Q", "CS", "PS", "TS"});
    csv::Writer normalized({"set", "series", "Q", "CS", "PS", "TS"});
    for (const auto& [name, values] : series) {
      for (std::size_t i = 0; i < values.size(); ++i) {
        levels.cell(summary.sets[i].name).cell(name);
        normalized.cell(summary.sets[i].name).cell(name);
        for (auto var : kFitVars) {
          const double v = value_of(values[i], var);
          const double ref = value_of(values[sym_index], var);
          levels.cell(v);
          normalized.cell(ref != 0 ? v / ref : std::nan(""));
        }
        levels.end_row();
        normalized.end_row();
      }
    }
    files["levels.csv"] = levels.str();
    files["normalized.csv"] = normalized.str();

    // Profit frontier with solution and simulation points.
    csv::Writer pareto({"set", "kind", "pi_L", "pi_H"});
    for (std::size_t i = 0; i < summary.sets.size(); ++i) {
      const auto& set = summary.sets[i];
      const double top = monopoly_profit(set.params, 0);
      for (int s = 0; s < opts.frontier_samples; ++s) {
        const double pi_L = top * s / std::max(1, opts.frontier_samples - 1);
        const auto fp = frontier_value(set.params, pi_L, 0);
        pareto.cell(set.name).cell("frontier").cell(fp.pi_L).cell(fp.pi_H);
        pareto.end_row();
      }
      pareto.cell(set.name).cell("simulation").cell(set.mean.pi_L).cell(set.mean.pi_H);
      pareto.end_row();
      for (const auto& b : suites[i]) {
        if (b.label == BenchmarkLabel::kErg || b.label == BenchmarkLabel::kNash) {
          pareto.cell(set.name).cell(to_string(b.label)).cell(b.outcome.pi_L).cell(b.outcome.pi_H);
          pareto.end_row();
        }
      }
      const auto mm = minmax_disagreement(set.params);
      pareto.cell(set.name).cell("minmax").cell(mm.d_L).cell(mm.d_H);
      pareto.end_row();
    }
    files["pareto.csv"] = pareto.str();

    if (loaded.has_q && loaded.has_cycles) {
      const auto best = deviation_tests(summary, DeviationMethod::kBestResponse);
      const auto qval = deviation_tests(summary, DeviationMethod::kQValue);
      files["deviation_best_response.csv"] = shares_csv(best);
      files["deviation_qvalue.csv"] = shares_csv(qval);
      files["subsample.csv"] = subsample_csv(best);
    } else {
      fmt::print(err, "figures: deviation panels skipped ({} has no {} or {})\n", opts.sim.string(),
                 simfiles::kQMatrices, simfiles::kCycles);
    }

    fs::create_directories(opts.out);
    for (const auto& [name, text] : files) {
      csv::write_file_atomic(opts.out / name, text);
      fmt::print(out, "{}\n", (opts.out / name).string());
    }
    return static_cast<int>(kOk);
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Asymmetric Cournot duopoly: benchmarks and Q-learning collusion experiments",
               "cournot-lab"};
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "INI/TOML file; [<subcommand>] sections mirror the flags");
  app.set_version_flag("--version", tool_version());
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads for simulate")
      ->envname("COURNOT_LAB_THREADS")
      ->check(CLI::NonNegativeNumber);

  const auto table_check = CLI::IsMember({"main", "alt"});

  BenchmarksOptions bench_opts;
  std::string bench_out;
  auto* bench = app.add_subcommand("benchmarks", "Oligopoly and bargaining benchmarks per parameterization");
  bench->add_option("--set", bench_opts.set, "Cost table (main|alt)")->check(table_check);
  bench->add_option("--out", bench_out, "Output CSV (stdout when omitted)");
  bench->add_flag("--state-wise-lottery-cs", bench_opts.state_wise_lottery_cs,
                  "Alternating monopoly CS as expectation of per-state CS");
  bench->add_flag("--grid-minmax", bench_opts.grid_minmax,
                  "Min-max disagreement on the learners' action grid");

  FrontierOptions frontier_opts;
  std::string frontier_out;
  auto* frontier = app.add_subcommand("frontier", "Sample the Pareto profit frontier of one parameterization");
  frontier->add_option("--set", frontier_opts.set, "Cost table (main|alt)")->check(table_check);
  frontier->add_option("--spec", frontier_opts.spec_name, "Parameterization (sym, asym1..asym6)")->required();
  frontier->add_option("--samples", frontier_opts.samples, "Number of frontier samples");
  frontier->add_option("--out", frontier_out, "Output CSV (stdout when omitted)");

  SimulateOptions sim_opts;
  std::string sim_out;
  double nu = 21.0;
  double beta = 0;
  auto* simulate = app.add_subcommand("simulate", "Run repeated Q-learning episodes");
  simulate->add_option("--set", sim_opts.set, "Cost table (main|alt)")->check(table_check);
  simulate->add_option("--only", sim_opts.only, "Restrict to these parameterizations")->delimiter(',');
  simulate->add_option("--k", sim_opts.k, "Memory length (0 or 1)")->check(CLI::IsMember({0, 1}));
  simulate->add_option("--alpha", sim_opts.alpha, "Learning rate");
  auto* nu_opt = simulate->add_option("--nu", nu, "Expected random visits per Q-matrix cell");
  auto* beta_opt = simulate->add_option("--beta", beta, "Exploration decay rate");
  nu_opt->excludes(beta_opt);
  simulate->add_option("--delta", sim_opts.delta, "Discount factor");
  simulate->add_option("--runs", sim_opts.runs, "Runs per parameterization")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_opts.seed, "Master seed");
  simulate->add_option("--post-rounds", sim_opts.post_rounds, "Greedy rounds after convergence");
  simulate->add_option("--window", sim_opts.window, "Convergence window in periods");
  simulate->add_option("--max-periods", sim_opts.max_periods, "Per-run period cap");
  bool no_q = false;
  simulate->add_flag("--no-q", no_q, "Do not store final Q-matrices");
  simulate->add_flag("--quiet", sim_opts.quiet, "No progress output");
  simulate->add_option("--out", sim_out, "Output directory")->required();

  AnalyzeOptions analyze_opts;
  std::string analyze_sim, analyze_out = "fit.csv";
  auto* analyze = app.add_subcommand("analyze", "Distances between simulation and benchmarks");
  analyze->add_option("--sim", analyze_sim, "Simulation directory")->required();
  analyze->add_option("--out", analyze_out, "Output CSV; *_normalized.csv is written alongside");

  DeviateOptions deviate_opts;
  std::string deviate_sim, deviate_out = "dev.csv";
  auto* deviate = app.add_subcommand("deviate", "One-shot deviation incentives per parameterization");
  deviate->add_option("--sim", deviate_sim, "Simulation directory")->required();
  deviate->add_option("--method", deviate_opts.method, "best_response|qvalue")
      ->check(CLI::IsMember({"best_response", "qvalue"}));
  deviate->add_option("--horizon", deviate_opts.horizon, "Periods simulated after the deviation");
  deviate->add_option("--out", deviate_out, "Output CSV");

  FiguresOptions figures_opts;
  std::string figures_sim, figures_out;
  auto* figures = app.add_subcommand("figures", "Plot-ready CSVs for every figure panel");
  figures->add_option("--sim", figures_sim, "Simulation directory")->required();
  figures->add_option("--out", figures_out, "Output directory")->required();
  figures->add_option("--samples", figures_opts.frontier_samples, "Frontier samples per set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? static_cast<int>(kOk) : static_cast<int>(kUsage);
  }

  if (*bench) {
    if (!bench_out.empty()) bench_opts.out = bench_out;
    return cmd_benchmarks(bench_opts, out, err);
  }
  if (*frontier) {
    if (!frontier_out.empty()) frontier_opts.out = frontier_out;
    return cmd_frontier(frontier_opts, out, err);
  }
  if (*simulate) {
    sim_opts.out = sim_out;
    sim_opts.threads = threads;
    sim_opts.write_q = !no_q;
    if (beta_opt->count() > 0) {
      sim_opts.beta = beta;
    } else {
      sim_opts.nu = nu;
    }
    return cmd_simulate(sim_opts, out, err);
  }
  if (*analyze) {
    analyze_opts.sim = analyze_sim;
    analyze_opts.out = analyze_out;
    return cmd_analyze(analyze_opts, out, err);
  }
  if (*deviate) {
    deviate_opts.sim = deviate_sim;
    deviate_opts.out = deviate_out;
    return cmd_deviate(deviate_opts, out, err);
  }
  figures_opts.sim = figures_sim;
  figures_opts.out = figures_out;
  return cmd_figures(figures_opts, out, err);
}

}  // namespace cournot::cli
