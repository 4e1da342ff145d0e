// Copyright 2026 The pirpsi Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Subcommand bodies for the pirpsi tool. Each returns its exit code and the
// text meant for stdout; files are written directly.

#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pirpsi/json_io.hpp"
#include "pirpsi/pirpsi.hpp"

namespace pirpsi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitDefect = 3;

enum class Format { kText, kJson, kCsv };

inline Format parse_format(const std::string& s) {
  if (s == "text") return Format::kText;
  if (s == "json") return Format::kJson;
  if (s == "csv") return Format::kCsv;
  throw ValidationError("unknown format '" + s + "' (text, json, csv)");
}

struct CommandResult {
  int code = kExitOk;
  std::string text;
};

// Resolved path for a report: explicit --out wins, then $PIRPSI_OUT_DIR,
// otherwise nothing is written.
inline std::string output_path(const std::string& out,
                               const std::string& default_name) {
  if (!out.empty()) return out;
  if (const char* dir = std::getenv("PIRPSI_OUT_DIR"); dir && *dir) {
    return (std::filesystem::path(dir) / default_name).string();
  }
  return {};
}

inline void write_file(const std::string& path, const std::string& body) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  f << body;
  if (!f) throw ValidationError("failed writing " + path);
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// "1/2,1/4" -> {1/2, 1/4}. Empty input gives no ratios.
inline std::vector<Rational> parse_ratio_list(const std::string& s) {
  std::vector<Rational> out;
  if (s.empty()) return out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(Rational::parse(item));
  return out;
}

// "1:1/2,4:1/2" -> ids and ratios in the given order.
inline std::pair<std::vector<MessageId>, std::vector<Rational>> parse_cache(
    const std::string& s) {
  std::vector<MessageId> ids;
  std::vector<Rational> ratios;
  if (s.empty()) return {ids, ratios};
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ValidationError("cache entry '" + item + "' must be id:ratio");
    }
    const std::string id = item.substr(0, colon);
    if (id.empty() || id.find_first_not_of("0123456789 ") != std::string::npos) {
      throw ValidationError("bad message id '" + id + "'");
    }
    ids.push_back(static_cast<MessageId>(std::stoul(id)));
    ratios.push_back(Rational::parse(item.substr(colon + 1)));
  }
  return {ids, ratios};
}

inline std::string ratio_list(const std::vector<Rational>& rs) {
  std::string out;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (i) out += ',';
    out += rs[i].str();
  }
  return out;
}

inline std::string decimal(const Rational& r) {
  std::ostringstream s;
  s.precision(12);
  s << r.to_double();
  return s.str();
}

// ---- capacity -------------------------------------------------------------

struct CapacityOptions {
  std::uint32_t n = 2;
  std::uint32_t k = 1;
  std::string r;
  Format format = Format::kText;
};

inline CommandResult cmd_capacity(const CapacityOptions& o) {
  auto ratios = parse_ratio_list(o.r);
  std::sort(ratios.begin(), ratios.end(), std::greater<>());
  const CostQuery q{o.n, o.k, static_cast<std::uint32_t>(ratios.size()),
                    ratios};
  const Rational cost = normalized_cost(q);
  CommandResult res;
  switch (o.format) {
    case Format::kText:
      res.text = cost.str() + " (" + decimal(cost) + ")\n";
      break;
    case Format::kJson:
      res.text = dump({{"n", o.n},
                       {"k", o.k},
                       {"m", q.m},
                       {"ratios", ratios},
                       {"cost", cost},
                       {"decimal", cost.to_double()}});
      break;
    case Format::kCsv:
      res.text = "n,k,m,ratios,cost,decimal\n" + std::to_string(o.n) + "," +
                 std::to_string(o.k) + "," + std::to_string(q.m) + ",\"" +
                 ratio_list(ratios) + "\"," + cost.str() + "," +
                 decimal(cost) + "\n";
      break;
  }
  return res;
}

// ---- optimize -------------------------------------------------------------

struct OptimizeOptions {
  std::uint32_t n = 2;
  std::uint32_t k = 1;
  std::string s = "0";
  std::optional<std::uint32_t> m;
  bool grid = false;
  Format format = Format::kText;
};

inline CommandResult cmd_optimize(const OptimizeOptions& o) {
  const Rational s = Rational::parse(o.s);
  std::vector<AllocationResult> candidates;
  AllocationResult best;
  if (o.m) {
    best = optimize_fixed_m(o.n, o.k, s, *o.m);
    candidates.push_back(best);
  } else {
    candidates = uniform_candidates(o.n, o.k, s);
    best = best_uniform(o.n, o.k, s);
  }
  nlohmann::json j{{"n", o.n}, {"k", o.k}, {"s", s}, {"best", best}};
  j["candidates"] = candidates;
  bool agree = true;
  if (o.grid) {
    // 1/12 refined so the uniform point itself lies on the grid.
    BigInt den = 12;
    if (best.m > 0) {
      den = boost::multiprecision::lcm(
          den, (s / Rational(static_cast<long long>(best.m))).den());
    }
    const Rational step(BigInt(1), den);
    std::size_t ties = 0;
    auto brute = brute_force_allocation(o.n, o.k, s, best.m, step, &ties);
    agree = brute.cost == best.cost;
    j["grid"] = {{"step", step},
                 {"minimizer", brute},
                 {"minimizers", ties},
                 {"agrees", agree}};
  }

  CommandResult res;
  res.code = agree ? kExitOk : kExitDefect;
  if (o.format == Format::kJson) {
    res.text = dump(j);
  } else if (o.format == Format::kCsv) {
    res.text = "m,ratios,cost,decimal,best\n";
    for (const auto& c : candidates) {
      res.text += std::to_string(c.m) + ",\"" + ratio_list(c.ratios) + "\"," +
                  c.cost.str() + "," + decimal(c.cost) + "," +
                  (c.m == best.m ? "1" : "0") + "\n";
    }
  } else {
    std::ostringstream out;
    out << candidates.size() << " uniform candidate"
        << (candidates.size() == 1 ? "" : "s") << "\n";
    for (const auto& c : candidates) {
      out << "  M=" << c.m << " r=" << (c.m ? c.ratios[0].str() : "-")
          << " cost=" << c.cost.str() << " (" << decimal(c.cost) << ")\n";
    }
    out << "optimal: M=" << best.m << " r=" << ratio_list(best.ratios)
        << " cost=" << best.cost.str() << "\n";
    if (o.grid) {
      out << "grid search (step " << j["grid"]["step"].get<std::string>()
          << "): "
          << (agree ? "agrees" : "DISAGREES") << ", "
          << j["grid"]["minimizers"].get<std::size_t>() << " minimizer(s)\n";
    }
    res.text = out.str();
  }
  return res;
}

// ---- simulate -------------------------------------------------------------

struct SimulateOptions {
  std::uint32_t n = 2;
  std::uint32_t k = 1;
  MessageId theta = 1;
  std::string cache;
  std::optional<std::uint64_t> length;
  std::uint64_t seed = 0;
  std::string out;
  std::string transcript;
  Format format = Format::kText;
};

struct SimulationOutcome {
  nlohmann::json report;
  Rational normalized;
  Rational theoretical;
  bool decode_ok = false;
  std::string transcript;
};

inline SimulationOutcome simulate(const SimulateOptions& o) {
  auto [ids, ratios] = parse_cache(o.cache);
  const CacheProfile profile = make_profile(o.k, ids, ratios);
  const std::uint64_t len =
      o.length ? *o.length : choose_length(profile, o.n, o.k);
  const SystemParams params{o.n, o.k, len};
  params.validate();
  if (o.theta < 1 || o.theta > o.k) {
    throw ValidationError("theta must lie in [1, K]");
  }

  const Seed master = Seed::from_u64(o.seed);
  const Seed msg_seed = master.derive("messages", 0);
  const Seed run_seed = master.derive("retrieval", 0);
  const MessageStore store = generate_messages(params, msg_seed);
  auto [canon, content] = make_cache(params, ids, ratios, store);
  std::vector<Database> dbs;
  for (std::uint32_t i = 0; i < o.n; ++i) dbs.emplace_back(store);

  SimulationOutcome out;
  RetrievalResult result;
  std::string error;
  try {
    result = retrieve(o.theta, canon, content, dbs, run_seed);
    out.decode_ok = result.message == store.message(o.theta);
  } catch (const DecodeError& e) {
    error = e.what();
  }
  out.theoretical = normalized_cost(
      {o.n, o.k, static_cast<std::uint32_t>(canon.size()), canon.ratios});
  out.normalized = result.cost.normalized;

  nlohmann::json segments = nlohmann::json::array();
  for (const auto& t : result.transcript) segments.push_back(segment_json(t));
  out.report = {
      {"version", PIRPSI_VERSION},
      {"command", "simulate"},
      {"config",
       {{"params", params}, {"theta", o.theta}, {"profile", canon},
        {"seed", o.seed}}},
      {"seeds",
       {{"master", master.hex()},
        {"messages", msg_seed.hex()},
        {"retrieval", run_seed.hex()}}},
      {"segments", segments},
      {"cost", result.cost},
      {"normalized", out.normalized},
      {"normalized_decimal", out.normalized.to_double()},
      {"theoretical", out.theoretical},
      {"cost_match", out.normalized == out.theoretical},
      {"decode_ok", out.decode_ok}};
  if (!error.empty()) out.report["error"] = error;
  if (!error.empty() || !result.transcript.empty()) {
    out.transcript = transcript_dump(result, o.n);
  }
  return out;
}

inline CommandResult cmd_simulate(const SimulateOptions& o) {
  auto sim = simulate(o);
  const bool ok = sim.decode_ok && sim.normalized == sim.theoretical;
  if (auto path = output_path(o.out, "simulate.json"); !path.empty()) {
    write_file(path, dump(sim.report));
  }
  if (!o.transcript.empty()) write_file(o.transcript, sim.transcript);

  CommandResult res;
  res.code = ok ? kExitOk : kExitDefect;
  if (o.format == Format::kJson) {
    res.text = dump(sim.report);
  } else if (o.format == Format::kCsv) {
    res.text = "normalized,theoretical,decode_ok\n" + sim.normalized.str() +
               "," + sim.theoretical.str() + "," +
               (sim.decode_ok ? "true" : "false") + "\n";
  } else {
    std::ostringstream out;
    for (const auto& s : sim.report["segments"]) {
      out << "  [" << s["start"].get<std::uint64_t>() << ", "
          << s["end"].get<std::uint64_t>() << ") "
          << s["kind"].get<std::string>() << " M_eff=" << s["m_eff"]
          << " downloaded=" << s["cost"]["total"] << "\n";
    }
    out << "normalized cost " << sim.normalized.str() << " ("
        << decimal(sim.normalized) << "), expected "
        << sim.theoretical.str() << "\n";
    out << "decode " << (sim.decode_ok ? "ok" : "FAILED") << "\n";
    res.text = out.str();
  }
  return res;
}

// ---- audit ----------------------------------------------------------------

struct AuditOptions {
  std::uint32_t n = 2;
  std::uint32_t k = 2;
  std::uint32_t m = 0;
  std::string r;  // optional ratios overriding full caching of M messages
  std::string mode = "exact";
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::string out;
  Format format = Format::kText;
};

inline CommandResult cmd_audit(const AuditOptions& o) {
  AuditConfig config = AuditConfig::full_side_info(o.n, o.k, o.m);
  if (!o.r.empty()) {
    config.ratios = parse_ratio_list(o.r);
    std::sort(config.ratios.begin(), config.ratios.end(), std::greater<>());
    if (config.m() != o.m) {
      throw ValidationError("--r must list exactly M ratios");
    }
  }
  if (o.n < 2) throw ValidationError("need at least 2 databases");
  if (o.k < 1) throw ValidationError("K must be positive");
  AuditMode mode;
  if (o.mode == "exact") {
    mode = AuditMode::kExact;
  } else if (o.mode == "sample") {
    mode = AuditMode::kSample;
  } else {
    throw ValidationError("mode must be exact or sample");
  }
  const auto report = run_audit(config, mode, o.samples, Seed::from_u64(o.seed));
  nlohmann::json j = report;
  j["version"] = PIRPSI_VERSION;
  j["command"] = "audit";
  j["seed"] = o.seed;
  if (auto path = output_path(o.out, "audit.json"); !path.empty()) {
    write_file(path, dump(j));
  }
  CommandResult res;
  res.code = report.pass ? kExitOk : kExitDefect;
  if (o.format == Format::kJson) {
    res.text = dump(j);
  } else if (o.format == Format::kCsv) {
    res.text = "mode,configurations,pairs,max_tv,threshold,pass\n" +
               std::string(to_string(mode)) + "," +
               std::to_string(report.configurations) + "," +
               std::to_string(report.pairs_tested) + "," +
               report.max_tv.str() + "," + report.threshold.str() + "," +
               (report.pass ? "true" : "false") + "\n";
  } else {
    std::ostringstream out;
    out << to_string(mode) << " audit: " << report.configurations
        << " configurations, " << report.pairs_tested << " pairs, "
        << report.observables << " observables\n"
        << "max TV " << report.max_tv.str() << " ("
        << decimal(report.max_tv) << "), threshold "
        << report.threshold.str() << "\n"
        << "answer lengths "
        << (report.answer_lengths_constant ? "constant" : "VARY") << "\n"
        << (report.pass ? "pass" : "FAIL") << "\n";
    res.text = out.str();
  }
  return res;
}

// ---- tables ---------------------------------------------------------------

struct TableRow {
  std::string id;
  std::string expected;
  std::string measured;
  bool match = false;
};

inline Rational simulated_cost(std::uint32_t n, std::uint32_t k,
                               const std::string& cache, MessageId theta,
                               bool* decode_ok = nullptr) {
  SimulateOptions o;
  o.n = n;
  o.k = k;
  o.cache = cache;
  o.theta = theta;
  o.seed = 1;
  auto sim = simulate(o);
  if (decode_ok) *decode_ok = sim.decode_ok;
  return sim.normalized;
}

inline std::vector<TableRow> reproduction_rows() {
  std::vector<TableRow> rows;
  auto add_sim = [&](std::string id, Rational expected, std::uint32_t n,
                     std::uint32_t k, const std::string& cache,
                     MessageId theta) {
    bool ok = false;
    const Rational got = simulated_cost(n, k, cache, theta, &ok);
    rows.push_back({std::move(id), expected.str(), got.str(),
                    ok && got == expected});
  };
  add_sim("ex1", Rational(59, 32), 2, 5, "1:1/2,4:1/2", 3);
  add_sim("ex2", Rational(29, 16), 2, 5, "3:1/2,2:1/4,5:1/4", 1);

  // Caching options at N = 3, K = 5, S = 1.
  const std::vector<std::pair<std::string, std::string>> options{
      {"fig1-opt1", "1:1"},
      {"fig1-opt2", "1:1/2,2:1/2"},
      {"fig1-opt3", "1:1/2,2:1/4,3:1/4"},
      {"fig1-opt4", "1:1/3,2:1/3,3:1/3"}};
  for (const auto& [id, cache] : options) {
    auto [ids, ratios] = parse_cache(cache);
    std::sort(ratios.begin(), ratios.end(), std::greater<>());
    const Rational expected = normalized_cost(
        {3, 5, static_cast<std::uint32_t>(ratios.size()), ratios});
    add_sim(id, expected, 3, 5, cache, 5);
  }

  // Uniform schemes for each feasible M, and the best M.
  for (auto [n, k] : {std::pair{2u, 5u}, std::pair{3u, 5u}}) {
    for (const char* s_text : {"1/2", "1", "3/2", "2"}) {
      const Rational s = Rational::parse(s_text);
      const auto candidates = uniform_candidates(n, k, s);
      const std::string base = "cor-n" + std::to_string(n) + "-k" +
                               std::to_string(k) + "-s" + s_text;
      for (const auto& c : candidates) {
        std::string cache;
        for (std::uint32_t i = 0; i < c.m; ++i) {
          if (i) cache += ',';
          cache += std::to_string(i + 1) + ":" + c.ratios[i].str();
        }
        add_sim(base + "-m" + std::to_string(c.m), c.cost, n, k, cache, k);
      }
      bool monotone = true;
      for (std::size_t i = 1; i < candidates.size(); ++i) {
        monotone = monotone && candidates[i].cost <= candidates[i - 1].cost;
      }
      const auto best = best_uniform(n, k, s);
      rows.push_back({base + "-best", "M=" + std::to_string(k),
                      "M=" + std::to_string(best.m),
                      monotone && best.m == k});
    }
  }
  return rows;
}

struct TablesOptions {
  std::string out;
  Format format = Format::kText;
};

inline std::string rows_csv(const std::vector<TableRow>& rows) {
  std::string csv = "id,expected,measured,status\n";
  for (const auto& r : rows) {
    csv += r.id + "," + r.expected + "," + r.measured + "," +
           (r.match ? "match" : "mismatch") + "\n";
  }
  return csv;
}

inline CommandResult cmd_tables(const TablesOptions& o) {
  const auto rows = reproduction_rows();
  const std::string csv = rows_csv(rows);
  std::string dir = o.out;
  if (dir.empty()) {
    if (const char* env = std::getenv("PIRPSI_OUT_DIR"); env && *env) dir = env;
  }
  if (!dir.empty()) {
    write_file((std::filesystem::path(dir) / "tables.csv").string(), csv);
  }
  bool all = true;
  for (const auto& r : rows) all = all && r.match;
  CommandResult res;
  res.code = all ? kExitOk : kExitDefect;
  if (o.format == Format::kJson) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
      j.push_back({{"id", r.id},
                   {"expected", r.expected},
                   {"measured", r.measured},
                   {"status", r.match ? "match" : "mismatch"}});
    }
    res.text = dump(j);
  } else {
    res.text = csv;
  }
  return res;
}

}  // namespace pirpsi::cli
