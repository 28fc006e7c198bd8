#include "cournot/persistence.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cournot/csv.hpp"
#include "cournot/error.hpp"
#include "cournot/qmatrix_io.hpp"

#ifndef COURNOT_LAB_VERSION
#define COURNOT_LAB_VERSION "0.0.0"
#endif

namespace cournot {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string tool_version() { return COURNOT_LAB_VERSION; }

std::string current_timestamp() {
  std::time_t now = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string manifest_to_json(const RunManifest& manifest) {
  const auto& spec = manifest.spec;
  json sets = json::array();
  for (const auto& set : spec.param_sets) {
    sets.push_back({{"name", set.name},
                    {"a", set.params.a},
                    {"b", set.params.b},
                    {"c_L", set.params.c_L},
                    {"c_H", set.params.c_H},
                    {"q_max", set.params.q_max}});
  }
  json j;
  j["tool"] = "cournot-lab";
  j["version"] = manifest.tool_version;
  j["timestamp"] = manifest.timestamp;
  j["spec"] = {
      {"param_sets", sets},
      {"technology",
       {{"alpha", spec.technology.alpha},
        {"nu", optional_number(spec.technology.nu)},
        {"beta", optional_number(spec.technology.beta)},
        {"delta", spec.technology.delta},
        {"k", spec.technology.k}}},
      {"runs", spec.runs},
      {"master_seed", spec.master_seed},
      {"post_rounds", spec.post_rounds},
      {"convergence_window", spec.convergence_window},
      {"max_periods", spec.max_periods},
      {"grid", spec.grid},
      {"q_init_low", spec.q_init_low},
      {"q_init_high", spec.q_init_high},
  };
  j["resolved"] = {{"beta", manifest.beta}, {"nu", manifest.nu}, {"agents", LearnerConfig::kAgents}};
  j["files"] = manifest.files;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  RunManifest manifest;
  try {
    const json j = json::parse(text);
    const json& s = j.at("spec");
    auto& spec = manifest.spec;
    for (const auto& set : s.at("param_sets")) {
      ParamSet ps;
      ps.name = set.at("name").get<std::string>();
      ps.params.a = set.at("a").get<double>();
      ps.params.b = set.at("b").get<double>();
      ps.params.c_L = set.at("c_L").get<double>();
      ps.params.c_H = set.at("c_H").get<double>();
      ps.params.q_max = set.at("q_max").get<double>();
      spec.param_sets.push_back(std::move(ps));
    }
    const json& tech = s.at("technology");
    spec.technology.alpha = tech.at("alpha").get<double>();
    spec.technology.nu = read_optional(tech.at("nu"));
    spec.technology.beta = read_optional(tech.at("beta"));
    spec.technology.delta = tech.at("delta").get<double>();
    spec.technology.k = tech.at("k").get<int>();
    spec.runs = s.at("runs").get<int>();
    spec.master_seed = s.at("master_seed").get<std::uint64_t>();
    spec.post_rounds = s.at("post_rounds").get<int>();
    spec.convergence_window = s.at("convergence_window").get<std::int64_t>();
    spec.max_periods = s.at("max_periods").get<std::int64_t>();
    spec.grid = s.at("grid").get<std::vector<double>>();
    spec.q_init_low = s.at("q_init_low").get<double>();
    spec.q_init_high = s.at("q_init_high").get<double>();
    manifest.beta = j.at("resolved").at("beta").get<double>();
    manifest.nu = j.at("resolved").at("nu").get<double>();
    manifest.tool_version = j.at("version").get<std::string>();
    manifest.timestamp = j.at("timestamp").get<std::string>();
    manifest.files = j.at("files").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw InputError(fmt::format("malformed manifest: {}", e.what()));
  }
  return manifest;
}

std::string summary_csv(const ExperimentSummary& summary) {
  csv::Writer w({"set", "runs", "converged", "mean_Q", "sd_Q", "mean_p", "mean_pi_L", "mean_pi_H",
                 "mean_PS", "mean_CS", "mean_TS", "mean_periods_to_convergence"});
  for (const auto& set : summary.sets) {
    w.cell(set.name).cell(set.runs).cell(set.converged);
    w.cell(set.mean.Q).cell(set.sd.Q).cell(set.mean.p).cell(set.mean.pi_L).cell(set.mean.pi_H);
    w.cell(set.mean.PS).cell(set.mean.CS).cell(set.mean.TS).cell(set.mean_periods);
    w.end_row();
  }
  return w.str();
}

std::string runs_csv(const ExperimentSummary& summary) {
  csv::Writer w({"set", "run", "seed", "converged", "periods", "Q", "pi_L", "pi_H", "PS", "CS", "TS"});
  const double nan = std::nan("");
  for (const auto& set : summary.sets) {
    for (const auto& r : set.records) {
      const Outcome o = r.episode.post_play.value_or(Outcome{nan, nan, nan, nan, nan, nan, nan, nan, nan});
      w.cell(set.name).cell(r.run).cell(static_cast<unsigned long long>(r.seed));
      w.cell(r.episode.converged ? 1 : 0).cell(static_cast<long long>(r.episode.periods));
      w.cell(o.Q).cell(o.pi_L).cell(o.pi_H).cell(o.PS).cell(o.CS).cell(o.TS);
      w.end_row();
    }
  }
  return w.str();
}

std::string cycles_csv(const ExperimentSummary& summary) {
  csv::Writer w({"set", "run", "anchor_state", "length", "actions"});
  for (const auto& set : summary.sets) {
    for (const auto& r : set.records) {
      if (!r.episode.converged) continue;
      std::string actions;
      for (const auto& a : r.episode.post_cycle) {
        if (!actions.empty()) actions += ';';
        actions += fmt::format("{}:{}", a.L, a.H);
      }
      w.cell(set.name).cell(r.run).cell(static_cast<long long>(r.episode.cycle_anchor));
      w.cell(static_cast<long long>(r.episode.post_cycle.size())).cell(actions);
      w.end_row();
    }
  }
  return w.str();
}

RunManifest write_experiment(const fs::path& dir, const ExperimentSummary& summary,
                             const WriteOptions& options) {
  fs::create_directories(dir);
  const auto& spec = summary.spec;

  RunManifest manifest;
  manifest.spec = spec;
  manifest.beta = spec.resolved_beta();
  manifest.nu = nu_from_beta(manifest.beta, static_cast<int>(spec.grid.size()),
                             LearnerConfig::kAgents, spec.technology.k);
  manifest.tool_version = tool_version();
  manifest.timestamp = options.timestamp.empty() ? current_timestamp() : options.timestamp;
  manifest.files = {simfiles::kManifest, simfiles::kSummary, simfiles::kRuns, simfiles::kCycles};

  bool write_q = options.write_q;
  for (const auto& set : summary.sets) {
    for (const auto& r : set.records) write_q = write_q && !r.episode.final_q[0].empty();
  }
  if (write_q) manifest.files.emplace_back(simfiles::kQMatrices);

  csv::write_file_atomic(dir / simfiles::kSummary, summary_csv(summary));
  csv::write_file_atomic(dir / simfiles::kRuns, runs_csv(summary));
  csv::write_file_atomic(dir / simfiles::kCycles, cycles_csv(summary));
  if (write_q) {
    std::vector<QMatrixRecord> records;
    const auto m = static_cast<std::uint32_t>(spec.grid.size());
    for (const auto& set : summary.sets) {
      for (const auto& r : set.records) {
        for (std::uint32_t agent = 0; agent < 2; ++agent) {
          records.push_back({m, 2, static_cast<std::uint32_t>(spec.technology.k), agent,
                             r.episode.final_q[agent]});
        }
      }
    }
    write_qmatrix_file(dir / simfiles::kQMatrices, records);
  } else {
    std::error_code ec;
    fs::remove(dir / simfiles::kQMatrices, ec);
  }
  // Manifest last: its presence marks a complete directory.
  csv::write_file_atomic(dir / simfiles::kManifest, manifest_to_json(manifest));
  return manifest;
}

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<JointAction> parse_cycle(std::string_view text) {
  std::vector<JointAction> cycle;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    const auto item = text.substr(start, end - start);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) throw InputError(fmt::format("bad cycle entry '{}'", item));
    cycle.push_back({static_cast<int>(csv::to_integer(item.substr(0, colon))),
                     static_cast<int>(csv::to_integer(item.substr(colon + 1)))});
    start = end + 1;
  }
  return cycle;
}

}  // namespace

LoadedExperiment load_experiment(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError(fmt::format("{} is not a directory", dir.string()));
  for (const char* required : {simfiles::kManifest, simfiles::kSummary, simfiles::kRuns}) {
    if (!fs::exists(dir / required)) {
      throw InputError(fmt::format("{} is missing {}", dir.string(), required));
    }
  }

  LoadedExperiment loaded;
  loaded.manifest = manifest_from_json(slurp(dir / simfiles::kManifest));
  const auto& spec = loaded.manifest.spec;
  loaded.summary.spec = spec;

  std::map<std::string, std::size_t> index;
  for (const auto& set : spec.param_sets) {
    index[set.name] = loaded.summary.sets.size();
    SetSummary s;
    s.name = set.name;
    s.params = set.params;
    loaded.summary.sets.push_back(std::move(s));
  }
  auto set_of = [&](const std::string& name) -> SetSummary& {
    auto it = index.find(name);
    if (it == index.end()) throw InputError(fmt::format("unknown parameter set '{}'", name));
    return loaded.summary.sets[it->second];
  };

  const double nan = std::nan("");
  const auto summary = csv::read_file(dir / simfiles::kSummary);
  std::size_t summary_rows = 0;
  for (const auto& row : summary.rows) {
    auto& s = set_of(row[summary.column("set")]);
    auto num = [&](const char* col) { return csv::to_double(row[summary.column(col)]); };
    s.runs = static_cast<int>(csv::to_integer(row[summary.column("runs")]));
    s.converged = static_cast<int>(csv::to_integer(row[summary.column("converged")]));
    s.mean = Outcome{nan, nan, num("mean_Q"), num("mean_p"), num("mean_pi_L"), num("mean_pi_H"),
                     num("mean_PS"), num("mean_CS"), num("mean_TS")};
    s.sd = Outcome{nan, nan, num("sd_Q"), nan, nan, nan, nan, nan, nan};
    s.mean_periods = num("mean_periods_to_convergence");
    ++summary_rows;
  }
  if (summary_rows != spec.param_sets.size()) {
    throw InputError(fmt::format("{} lists {} sets, manifest has {}", simfiles::kSummary,
                                 summary_rows, spec.param_sets.size()));
  }

  const auto runs = csv::read_file(dir / simfiles::kRuns);
  for (const auto& row : runs.rows) {
    auto& s = set_of(row[runs.column("set")]);
    RunRecord r;
    r.set = s.name;
    r.run = static_cast<int>(csv::to_integer(row[runs.column("run")]));
    r.seed = std::stoull(row[runs.column("seed")]);
    r.episode.converged = csv::to_integer(row[runs.column("converged")]) != 0;
    r.episode.periods = csv::to_integer(row[runs.column("periods")]);
    if (r.episode.converged) {
      auto num = [&](const char* col) { return csv::to_double(row[runs.column(col)]); };
      const double Q = num("Q");
      r.episode.post_play = Outcome{nan,        nan,       Q,         price(s.params, Q), num("pi_L"),
                                    num("pi_H"), num("PS"), num("CS"), num("TS")};
    }
    s.records.push_back(std::move(r));
  }
  for (auto& s : loaded.summary.sets) {
    std::sort(s.records.begin(), s.records.end(),
              [](const RunRecord& x, const RunRecord& y) { return x.run < y.run; });
  }

  if (fs::exists(dir / simfiles::kCycles)) {
    const auto cycles = csv::read_file(dir / simfiles::kCycles);
    for (const auto& row : cycles.rows) {
      auto& s = set_of(row[cycles.column("set")]);
      const auto run = csv::to_integer(row[cycles.column("run")]);
      auto it = std::find_if(s.records.begin(), s.records.end(),
                             [&](const RunRecord& r) { return r.run == run; });
      if (it == s.records.end()) throw InputError(fmt::format("cycle for unknown run {}/{}", s.name, run));
      it->episode.cycle_anchor = static_cast<std::size_t>(csv::to_integer(row[cycles.column("anchor_state")]));
      it->episode.post_cycle = parse_cycle(row[cycles.column("actions")]);
    }
    loaded.has_cycles = true;
  }

  if (fs::exists(dir / simfiles::kQMatrices)) {
    const auto records = read_qmatrix_file(dir / simfiles::kQMatrices);
    std::size_t expected = 0;
    for (const auto& s : loaded.summary.sets) expected += 2 * s.records.size();
    if (records.size() != expected) {
      throw InputError(fmt::format("{} holds {} matrices, expected {}", simfiles::kQMatrices,
                                   records.size(), expected));
    }
    std::size_t next = 0;
    for (auto& s : loaded.summary.sets) {
      for (auto& r : s.records) {
        for (int agent = 0; agent < 2; ++agent) {
          const auto& rec = records[next++];
          if (rec.agent != static_cast<std::uint32_t>(agent) ||
              rec.k != static_cast<std::uint32_t>(spec.technology.k) ||
              rec.m != spec.grid.size()) {
            throw InputError("Q-matrix record does not match the manifest");
          }
          r.episode.final_q[agent] = rec.q;
        }
      }
    }
    loaded.has_q = true;
  }
  return loaded;
}

}  // namespace cournot
