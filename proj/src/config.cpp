// Copyright 2026 The ngcsim Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include "ngcsim/config.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ngcsim/error.hpp"

namespace ngc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) {
    throw UsageError(key, "cannot parse '" + value + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  return parse_number<double>(key, v);
}
std::size_t parse_count(const std::string& key, const std::string& v) {
  return parse_number<std::size_t>(key, v);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError(key, "expected true or false, got '" + v + "'");
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw UsageError(key, what);
}

// Shortest text that reads back to the same double.
std::string fmt_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Setting {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class Fn>
auto wrap_config_error(const std::string& key, Fn fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw UsageError(key, e.what());
  }
}

const std::map<std::string, Setting>& settings() {
  using C = ExperimentConfig;
  static const std::map<std::string, Setting> table = {
      {"algorithm",
       {[](C& c, const std::string& v) {
          c.run.algorithm = wrap_config_error("algorithm", [&] { return parse_algorithm(v); });
        },
        [](const C& c) { return to_string(c.run.algorithm); }}},
      {"agents",
       {[](C& c, const std::string& v) {
          c.run.topology.num_agents = parse_count("agents", v);
          require(c.run.topology.num_agents >= 1, "agents", "must be >= 1");
        },
        [](const C& c) { return std::to_string(c.run.topology.num_agents); }}},
      {"topology",
       {[](C& c, const std::string& v) {
          c.run.topology.kind =
              wrap_config_error("topology", [&] { return parse_topology_kind(v); });
        },
        [](const C& c) { return to_string(c.run.topology.kind); }}},
      {"torus_rows",
       {[](C& c, const std::string& v) { c.run.topology.rows = parse_count("torus_rows", v); },
        [](const C& c) { return std::to_string(c.run.topology.rows); }}},
      {"torus_cols",
       {[](C& c, const std::string& v) { c.run.topology.cols = parse_count("torus_cols", v); },
        [](const C& c) { return std::to_string(c.run.topology.cols); }}},
      {"partition",
       {[](C& c, const std::string& v) {
          c.run.partition =
              wrap_config_error("partition", [&] { return parse_partition_kind(v); });
        },
        [](const C& c) { return to_string(c.run.partition); }}},
      {"alpha",
       {[](C& c, const std::string& v) {
          c.run.hp.alpha = parse_real("alpha", v);
          require(c.run.hp.alpha >= 0.0 && c.run.hp.alpha <= 1.0, "alpha",
                  "must lie in [0, 1]");
        },
        [](const C& c) { return fmt_real(c.run.hp.alpha); }}},
      {"beta",
       {[](C& c, const std::string& v) {
          c.run.hp.beta = parse_real("beta", v);
          require(c.run.hp.beta >= 0.0 && c.run.hp.beta < 1.0, "beta", "must lie in [0, 1)");
        },
        [](const C& c) { return fmt_real(c.run.hp.beta); }}},
      {"eta",
       {[](C& c, const std::string& v) {
          c.run.hp.eta = parse_real("eta", v);
          require(c.run.hp.eta > 0.0 && std::isfinite(c.run.hp.eta), "eta", "must be positive");
        },
        [](const C& c) { return fmt_real(c.run.hp.eta); }}},
      {"gamma",
       {[](C& c, const std::string& v) {
          c.run.hp.gamma = parse_real("gamma", v);
          require(c.run.hp.gamma > 0.0 && c.run.hp.gamma <= 1.0, "gamma",
                  "must lie in (0, 1]");
        },
        [](const C& c) { return fmt_real(c.run.hp.gamma); }}},
      {"lr_decay",
       {[](C& c, const std::string& v) { c.run.hp.lr_decay = parse_bool("lr_decay", v); },
        [](const C& c) { return std::string(c.run.hp.lr_decay ? "true" : "false"); }}},
      {"gossip",
       {[](C& c, const std::string& v) {
          if (v == "pre_round") {
            c.run.hp.gossip = GossipOperand::pre_round;
          } else if (v == "post_update") {
            c.run.hp.gossip = GossipOperand::post_update;
          } else {
            throw UsageError("gossip", "expected pre_round or post_update");
          }
        },
        [](const C& c) {
          return std::string(c.run.hp.gossip == GossipOperand::pre_round ? "pre_round"
                                                                         : "post_update");
        }}},
      {"epochs",
       {[](C& c, const std::string& v) { c.run.epochs = parse_count("epochs", v); },
        [](const C& c) { return std::to_string(c.run.epochs); }}},
      {"batch_size",
       {[](C& c, const std::string& v) {
          c.run.batch_size = parse_count("batch_size", v);
          require(c.run.batch_size >= 1, "batch_size", "must be >= 1");
        },
        [](const C& c) { return std::to_string(c.run.batch_size); }}},
      {"seed",
       {[](C& c, const std::string& v) {
          c.run.seed = parse_number<std::uint64_t>("seed", v);
          c.seeds = {c.run.seed};
        },
        [](const C& c) { return std::to_string(c.run.seed); }}},
      {"seeds",
       {[](C& c, const std::string& v) {
          std::vector<std::uint64_t> seeds;
          std::stringstream ss(v);
          std::string item;
          while (std::getline(ss, item, ',')) {
            seeds.push_back(parse_number<std::uint64_t>("seeds", std::string(trim(item))));
          }
          require(!seeds.empty(), "seeds", "needs at least one seed");
          c.seeds = seeds;
          c.run.seed = seeds.front();
        },
        [](const C& c) {
          std::string out;
          for (std::size_t i = 0; i < c.seeds.size(); ++i) {
            out += (i ? "," : "") + std::to_string(c.seeds[i]);
          }
          return out;
        }}},
      {"dataset",
       {[](C& c, const std::string& v) { c.run.dataset.source = v; },
        [](const C& c) { return c.run.dataset.source; }}},
      {"test_dataset",
       {[](C& c, const std::string& v) { c.run.dataset.test_path = v; },
        [](const C& c) { return c.run.dataset.test_path; }}},
      {"classes",
       {[](C& c, const std::string& v) {
          c.run.dataset.classes = parse_count("classes", v);
          require(c.run.dataset.classes >= 2, "classes", "must be >= 2");
        },
        [](const C& c) { return std::to_string(c.run.dataset.classes); }}},
      {"dim",
       {[](C& c, const std::string& v) {
          c.run.dataset.dim = parse_count("dim", v);
          require(c.run.dataset.dim >= 1, "dim", "must be >= 1");
        },
        [](const C& c) { return std::to_string(c.run.dataset.dim); }}},
      {"per_class",
       {[](C& c, const std::string& v) {
          c.run.dataset.per_class = parse_count("per_class", v);
          require(c.run.dataset.per_class >= 1, "per_class", "must be >= 1");
        },
        [](const C& c) { return std::to_string(c.run.dataset.per_class); }}},
      {"test_per_class",
       {[](C& c, const std::string& v) {
          c.run.dataset.test_per_class = parse_count("test_per_class", v);
        },
        [](const C& c) { return std::to_string(c.run.dataset.test_per_class); }}},
      {"spread",
       {[](C& c, const std::string& v) {
          c.run.dataset.spread = parse_real("spread", v);
          require(c.run.dataset.spread > 0.0 && std::isfinite(c.run.dataset.spread), "spread",
                  "must be positive");
        },
        [](const C& c) { return fmt_real(c.run.dataset.spread); }}},
      {"data_seed",
       {[](C& c, const std::string& v) {
          c.run.dataset.data_seed = parse_number<std::uint64_t>("data_seed", v);
        },
        [](const C& c) { return std::to_string(c.run.dataset.data_seed); }}},
      {"model",
       {[](C& c, const std::string& v) {
          if (v == "mlp") {
            c.run.architecture = Architecture::mlp;
          } else if (v == "logistic") {
            c.run.architecture = Architecture::logistic;
          } else {
            throw UsageError("model", "expected mlp or logistic");
          }
        },
        [](const C& c) {
          return std::string(c.run.architecture == Architecture::mlp ? "mlp" : "logistic");
        }}},
      {"hidden",
       {[](C& c, const std::string& v) {
          c.run.hidden = parse_count("hidden", v);
          require(c.run.hidden >= 1, "hidden", "must be >= 1");
        },
        [](const C& c) { return std::to_string(c.run.hidden); }}},
      {"activation",
       {[](C& c, const std::string& v) {
          if (v == "tanh") {
            c.run.activation = Activation::tanh;
          } else if (v == "relu") {
            c.run.activation = Activation::relu;
          } else {
            throw UsageError("activation", "expected tanh or relu");
          }
        },
        [](const C& c) {
          return std::string(c.run.activation == Activation::tanh ? "tanh" : "relu");
        }}},
      {"workers",
       {[](C& c, const std::string& v) {
          auto w = parse_count("workers", v);
          require(w >= 1 && w <= 1024, "workers", "must lie in [1, 1024]");
          c.run.workers = static_cast<int>(w);
        },
        [](const C& c) { return std::to_string(c.run.workers); }}},
      {"metric_every",
       {[](C& c, const std::string& v) { c.run.metric_every = parse_count("metric_every", v); },
        [](const C& c) { return std::to_string(c.run.metric_every); }}},
      {"verbose",
       {[](C& c, const std::string& v) { c.run.verbose = parse_bool("verbose", v); },
        [](const C& c) { return std::string(c.run.verbose ? "true" : "false"); }}},
      {"compress_check",
       {[](C& c, const std::string& v) { c.compress_check = parse_bool("compress_check", v); },
        [](const C& c) { return std::string(c.compress_check ? "true" : "false"); }}},
      {"out_dir",
       {[](C& c, const std::string& v) { c.out_dir = v; },
        [](const C& c) { return c.out_dir; }}},
  };
  return table;
}

// Order in which keys are applied and echoed; `seeds` after `seed`.
const std::vector<std::string>& key_order() {
  static const std::vector<std::string> order = {
      "algorithm", "agents",     "topology",   "torus_rows", "torus_cols",   "partition",
      "alpha",     "beta",       "eta",        "gamma",      "lr_decay",     "gossip",
      "epochs",    "batch_size", "seed",       "seeds",      "dataset",      "test_dataset",
      "classes",   "dim",        "per_class",  "test_per_class", "spread",   "data_seed",
      "model",     "hidden",     "activation", "workers",    "metric_every", "verbose",
      "compress_check", "out_dir"};
  return order;
}

const std::map<std::string, std::string>& key_help() {
  static const std::map<std::string, std::string> help = {
      {"algorithm", "dpsgd | ngc | compngc"},
      {"agents", "number of agents"},
      {"topology", "ring | torus | chain | full"},
      {"torus_rows", "torus rows (0 picks the most square shape)"},
      {"torus_cols", "torus columns (0 picks the most square shape)"},
      {"partition", "iid | label_skew"},
      {"alpha", "weight on received data-variant gradients, in [0, 1]"},
      {"beta", "momentum coefficient, in [0, 1)"},
      {"eta", "learning rate"},
      {"gamma", "gossip step size, in (0, 1]"},
      {"lr_decay", "divide eta by 10 at 50% and 75% of training (true | false)"},
      {"gossip", "pre_round | post_update"},
      {"epochs", "training epochs"},
      {"batch_size", "per-agent minibatch size"},
      {"seed", "run seed"},
      {"seeds", "comma-separated run seeds, one run each"},
      {"dataset", "synthetic or a CSV path"},
      {"test_dataset", "CSV path for validation data"},
      {"classes", "synthetic classes"},
      {"dim", "synthetic feature dimension"},
      {"per_class", "synthetic training samples per class"},
      {"test_per_class", "synthetic validation samples per class"},
      {"spread", "synthetic within-class standard deviation"},
      {"data_seed", "seed for dataset generation"},
      {"model", "mlp | logistic"},
      {"hidden", "mlp hidden width"},
      {"activation", "tanh | relu"},
      {"workers", "OpenMP threads for per-agent work"},
      {"metric_every", "rounds between metric rows (0 = once per epoch)"},
      {"verbose", "echo configuration and progress to stderr"},
      {"compress_check", "print compression sizes and self-check, then exit"},
      {"out_dir", "directory for config.txt, seed_<s>.csv and summary.json"}};
  return help;
}

}  // namespace

const std::vector<std::string>& known_config_keys() { return key_order(); }

ConfigMap parse_config_text(std::string_view text) {
  ConfigMap out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("line " + std::to_string(line_no), "expected key = value");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (!settings().contains(key)) throw UsageError(key, "unknown key");
    out[key] = value;
  }
  return out;
}

ConfigMap load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

ExperimentConfig resolve_config(const ConfigMap& file, const ConfigMap& flags) {
  ConfigMap merged = file;
  for (const auto& [k, v] : flags) merged[k] = v;

  ExperimentConfig cfg;
  for (const auto& [k, v] : merged) {
    if (!settings().contains(k)) throw UsageError(k, "unknown key");
  }
  // Fixed order so that `seeds` beats `seed`.
  for (const auto& key : key_order()) {
    if (auto it = merged.find(key); it != merged.end()) settings().at(key).set(cfg, it->second);
  }

  if (cfg.run.algorithm == Algorithm::dpsgd && merged.contains("alpha")) {
    throw UsageError("alpha", "dpsgd has no NGC mixing weight; remove alpha");
  }
  try {
    cfg.run.validate();
  } catch (const ConfigError& e) {
    throw UsageError("config", e.what());
  }
  return cfg;
}

std::string format_config(const ExperimentConfig& config) {
  std::ostringstream os;
  os << "# resolved ngcsim configuration\n";
  for (const auto& key : key_order()) {
    if (key == "alpha" && config.run.algorithm == Algorithm::dpsgd) continue;
    if (key == "seed") continue;  // implied by seeds
    os << key << " = " << settings().at(key).get(config) << '\n';
  }
  return os.str();
}

ParsedArgs parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Decentralized learning simulator: D-PSGD, NGC and CompNGC", "ngcsim"};
  app.set_help_flag();  // --help handled below so that parsing never exits

  std::string config_path;
  bool help = false;
  app.add_flag("-h,--help", help, "Print this help message");
  app.add_option("--config", config_path, "key=value config file (flags override it)");

  // Every config key is also a flag; underscores become dashes.
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  for (const auto& key : key_order()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (key == "verbose" || key == "compress_check") {
      options[key] = app.add_flag(flag)->description(key_help().at(key));
    } else {
      options[key] = app.add_option(flag, values[key], key_help().at(key));
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw UsageError("arguments", e.what());
  }

  ParsedArgs out;
  if (help) {
    out.wants_help = true;
    out.help_text = app.help();
    return out;
  }

  ConfigMap flags;
  for (const auto& [key, opt] : options) {
    if (opt->count() == 0) continue;
    if (key == "verbose" || key == "compress_check") {
      flags[key] = "true";
    } else {
      flags[key] = values[key];
    }
  }
  ConfigMap file;
  if (!config_path.empty()) file = load_config_file(config_path);
  out.config = resolve_config(file, flags);
  return out;
}

}  // namespace ngc
