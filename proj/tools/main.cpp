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

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>

#include "commands.hpp"

namespace {

using pirpsi::ValidationError;
using pirpsi::cli::CommandResult;

// Keys accepted in a --config file, each bound to the field it overrides.
using Overrides = std::map<std::string, std::function<void(const nlohmann::json&)>>;

template <typename T>
void bind_key(Overrides& o, const std::string& key, T& field) {
  o[key] = [&field](const nlohmann::json& v) {
    if constexpr (std::is_same_v<T, std::string>) {
      field = v.is_string() ? v.get<std::string>() : v.dump();
    } else if constexpr (std::is_same_v<T, std::optional<std::uint32_t>> ||
                         std::is_same_v<T, std::optional<std::uint64_t>>) {
      field = v.get<typename T::value_type>();
    } else {
      field = v.get<T>();
    }
  };
}

void apply_config(const std::string& path, const Overrides& overrides) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    auto it = overrides.find(key);
    if (it == overrides.end()) {
      throw ValidationError("unknown config key '" + key + "'");
    }
    try {
      it->second(value);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("config key '" + key + "': " + e.what());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = pirpsi::cli;
  CLI::App app{"Private retrieval with partially cached side information"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", PIRPSI_VERSION);

  std::string format = "text";
  std::string config;
  app.add_option("--format", format, "text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--config", config, "JSON file whose keys override flags");

  cli::CapacityOptions cap;
  auto* c_cap = app.add_subcommand("capacity", "optimal normalized download cost");
  c_cap->add_option("--n", cap.n, "databases")->required();
  c_cap->add_option("--k", cap.k, "messages")->required();
  c_cap->add_option("--r", cap.r, "cached ratios, e.g. 1/2,1/4,1/4");

  cli::OptimizeOptions opt;
  std::uint32_t opt_m = 0;
  auto* c_opt = app.add_subcommand("optimize", "best uniform caching scheme");
  c_opt->add_option("--n", opt.n)->required();
  c_opt->add_option("--k", opt.k)->required();
  c_opt->add_option("--s", opt.s, "cache budget in message units")->required();
  auto* m_flag = c_opt->add_option("--m", opt_m, "fix the number of cached messages");
  c_opt->add_flag("--grid", opt.grid, "cross-check with a 1/12 grid search");

  cli::SimulateOptions sim;
  std::uint64_t sim_len = 0;
  auto* c_sim = app.add_subcommand("simulate", "end-to-end retrieval");
  c_sim->add_option("--n", sim.n)->required();
  c_sim->add_option("--k", sim.k)->required();
  c_sim->add_option("--theta", sim.theta, "desired message")->required();
  c_sim->add_option("--cache", sim.cache, "id:ratio list, e.g. 1:1/2,4:1/2");
  auto* l_flag = c_sim->add_option("--l", sim_len, "message length");
  c_sim->add_option("--seed", sim.seed);
  c_sim->add_option("--out", sim.out, "report path");
  c_sim->add_option("--transcript", sim.transcript, "query transcript path");

  cli::AuditOptions aud;
  auto* c_aud = app.add_subcommand("audit", "query privacy audit");
  c_aud->add_option("--n", aud.n)->required();
  c_aud->add_option("--k", aud.k)->required();
  c_aud->add_option("--m", aud.m);
  c_aud->add_option("--r", aud.r, "ratios of the M cached messages");
  c_aud->add_option("--mode", aud.mode)
      ->check(CLI::IsMember({"exact", "sample"}));
  c_aud->add_option("--samples", aud.samples);
  c_aud->add_option("--seed", aud.seed);
  c_aud->add_option("--out", aud.out, "report path");

  cli::TablesOptions tab;
  auto* c_tab = app.add_subcommand("tables", "reproduce reference values as CSV");
  c_tab->add_option("--out", tab.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kExitOk : cli::kExitInvalid;
  }

  try {
    Overrides ov;
    bind_key(ov, "format", format);
    if (*c_cap) {
      bind_key(ov, "n", cap.n);
      bind_key(ov, "k", cap.k);
      bind_key(ov, "r", cap.r);
    } else if (*c_opt) {
      if (*m_flag) opt.m = opt_m;
      bind_key(ov, "n", opt.n);
      bind_key(ov, "k", opt.k);
      bind_key(ov, "s", opt.s);
      bind_key(ov, "m", opt.m);
      bind_key(ov, "grid", opt.grid);
    } else if (*c_sim) {
      if (*l_flag) sim.length = sim_len;
      bind_key(ov, "n", sim.n);
      bind_key(ov, "k", sim.k);
      bind_key(ov, "theta", sim.theta);
      bind_key(ov, "cache", sim.cache);
      bind_key(ov, "l", sim.length);
      bind_key(ov, "seed", sim.seed);
      bind_key(ov, "out", sim.out);
      bind_key(ov, "transcript", sim.transcript);
    } else if (*c_aud) {
      bind_key(ov, "n", aud.n);
      bind_key(ov, "k", aud.k);
      bind_key(ov, "m", aud.m);
      bind_key(ov, "r", aud.r);
      bind_key(ov, "mode", aud.mode);
      bind_key(ov, "samples", aud.samples);
      bind_key(ov, "seed", aud.seed);
      bind_key(ov, "out", aud.out);
    } else {
      bind_key(ov, "out", tab.out);
    }
    apply_config(config, ov);
    const auto fmt = cli::parse_format(format);

    CommandResult res;
    if (*c_cap) {
      cap.format = fmt;
      res = cli::cmd_capacity(cap);
    } else if (*c_opt) {
      opt.format = fmt;
      res = cli::cmd_optimize(opt);
    } else if (*c_sim) {
      sim.format = fmt;
      res = cli::cmd_simulate(sim);
    } else if (*c_aud) {
      aud.format = fmt;
      res = cli::cmd_audit(aud);
    } else {
      tab.format = fmt;
      res = cli::cmd_tables(tab);
    }
    std::cout << res.text;
    return res.code;
  } catch (const pirpsi::ScaleError& e) {
    std::cerr << "error: " << e.what()
              << "\nexact enumeration is out of reach here; rerun with "
                 "--mode sample --samples 100000\n";
    return cli::kExitInvalid;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitInvalid;
  } catch (const pirpsi::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitInvalid;
  } catch (const pirpsi::Error& e) {
    std::cerr << "defect: " << e.what() << "\n";
    return cli::kExitDefect;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitInvalid;
  }
}
