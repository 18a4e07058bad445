// ndsort command line: stream generation, experiment scenarios, and the
// built-in oracle checks. See README.md for file formats.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ndsort/experiments.hpp"
#include "ndsort/synth.hpp"

namespace {

using ndsort::ExperimentSpec;

// Accepts "3/16" or "0.1875".
double parse_fraction(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return std::stod(text);
  const double num = std::stod(text.substr(0, slash));
  const double den = std::stod(text.substr(slash + 1));
  if (den == 0.0) throw CLI::ValidationError("fraction has zero denominator");
  return num / den;
}

std::pair<int, int> parse_ratio(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    const int num = std::stoi(text);
    return {num, 1};
  }
  return {std::stoi(text.substr(0, slash)), std::stoi(text.substr(slash + 1))};
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  return out;
}

struct RunOptions {
  std::string scenario;
  std::string neurons;
  std::string devs;
  std::string cids;
  std::string maa;
  std::string search;
  std::string out_dir = "out";
  ExperimentSpec spec;
  int p = 0;
  int capture = 0, backoff = 0, wmax = 0, wbase = 0, radius = -1;
  bool prob_search = false;
};

void apply_run_options(RunOptions& opt, const CLI::App& cmd) {
  ExperimentSpec& spec = opt.spec;
  spec.scenario = opt.scenario;
  if (!opt.neurons.empty()) {
    for (const std::string& s : split_list(opt.neurons)) {
      spec.neuron_counts.push_back(std::stoi(s));
    }
  }
  if (opt.p > 0) spec.neuron_counts = {opt.p};
  if (!opt.devs.empty()) {
    for (const std::string& s : split_list(opt.devs)) {
      spec.instance_devs.push_back(parse_fraction(s));
    }
  }
  if (!opt.cids.empty()) {
    for (const std::string& s : split_list(opt.cids)) {
      spec.cid_counts.push_back(std::stoi(s));
    }
  }
  if (!opt.maa.empty()) {
    for (const std::string& s : split_list(opt.maa)) {
      spec.maa_levels.push_back(parse_fraction(s));
    }
  }
  if (cmd.count("--capture")) spec.nd.capture = opt.capture;
  if (cmd.count("--backoff")) spec.nd.backoff = opt.backoff;
  if (cmd.count("--wmax")) spec.nd.max_weight = opt.wmax;
  if (cmd.count("--wbase")) spec.nd.base_weight = opt.wbase;
  if (cmd.count("--radius")) spec.nd.radius = opt.radius;
  if (cmd.count("--search")) spec.nd.search = parse_ratio(opt.search);
  if (cmd.count("--prob-search")) spec.nd.prob_search = opt.prob_search;
}

void add_run_flags(CLI::App& cmd, RunOptions& opt) {
  cmd.add_option("--neurons", opt.neurons,
                 "neuron counts, comma separated (default: scenario grid)");
  cmd.add_option("--dev", opt.devs,
                 "instance deviations, e.g. 2/16 or 0.125, comma separated");
  cmd.add_option("--seeds", opt.spec.seeds, "number of rng seeds per cell");
  cmd.add_option("--master-seed", opt.spec.master_seed, "master seed");
  cmd.add_option("--out", opt.out_dir, "output directory");
  cmd.add_option("--length", opt.spec.stream_length, "spikes per stream");
  cmd.add_option("--base-dev", opt.spec.base_dev, "base neuron deviation");
  cmd.add_option("--zipf-s", opt.spec.zipf_exponent, "zipf exponent");
  cmd.add_option("--window", opt.spec.window, "windowed-accuracy step size");
  cmd.add_option("--switch-at", opt.spec.switch_at,
                 "base-neuron switch step (nd-adapt)");
  cmd.add_option("--cids", opt.cids,
                 "cluster counts for the cid sweeps, comma separated");
  cmd.add_option("--maa", opt.maa,
                 "minimum acceptable accuracies, comma separated");
  cmd.add_option("--p", opt.p, "single template count (op-count shorthand)");
  cmd.add_option("--threads", opt.spec.threads, "worker threads (0 = auto)");
  cmd.add_option("--min-convergence", opt.spec.kmeans.min_convergence,
                 "k-means stop fraction");
  cmd.add_option("--max-iters", opt.spec.kmeans.max_iters,
                 "k-means iteration cap");
  cmd.add_option("--capture", opt.capture, "winner increment override");
  cmd.add_option("--backoff", opt.backoff, "winner decrement override");
  cmd.add_option("--search", opt.search, "search amount override, e.g. 1/16");
  cmd.add_option("--wmax", opt.wmax, "max weight override");
  cmd.add_option("--wbase", opt.wbase, "search ceiling override");
  cmd.add_option("--radius", opt.radius, "similarity radius override");
  cmd.add_flag("--prob-search", opt.prob_search,
               "probabilistic search (increment 1, trigger = search ratio)");
}

int cmd_list() {
  for (const ndsort::ScenarioInfo& s : ndsort::scenario_catalog()) {
    std::printf("%-18s %s\n", s.id.c_str(), s.summary.c_str());
  }
  return 0;
}

int cmd_verify() {
  int failures = 0;
  for (const ndsort::OracleCheck& c : ndsort::run_oracle_checks()) {
    std::printf("%-32s %-10.6g expect %-10.6g %s\n", c.name.c_str(), c.value,
                c.expected, c.pass ? "PASS" : "FAIL");
    failures += !c.pass;
  }
  return failures == 0 ? 0 : 1;
}

int cmd_generate(const ExperimentSpec& proto, int neurons, double dev,
                 std::uint64_t seed, const std::string& rate,
                 std::optional<int> switch_at, const std::string& out_path) {
  ndsort::GeneratorConfig cfg;
  cfg.neuron_count = neurons;
  cfg.base_dev = proto.base_dev;
  cfg.instance_dev = dev;
  cfg.rate = rate == "zipf" ? ndsort::RateModel::kZipf
                            : ndsort::RateModel::kUniform;
  cfg.zipf_exponent = proto.zipf_exponent;
  cfg.stream_length = proto.stream_length;
  cfg.seed = ndsort::derive_seed(seed, {0x7374, static_cast<std::uint64_t>(neurons)});
  if (switch_at) {
    cfg.switch_at = switch_at;
    cfg.switch_seed = ndsort::derive_seed(seed, {0x7377});
  }
  const auto base = ndsort::gen_base_neurons(
      proto.canonical, neurons, proto.base_dev,
      ndsort::derive_seed(seed, {0x626e, static_cast<std::uint64_t>(neurons)}));
  const ndsort::LabeledStream stream =
      ndsort::gen_stream(proto.canonical, base, cfg);
  if (out_path == "-") {
    ndsort::write_stream_csv(std::cout, stream);
  } else {
    auto out = open_out(out_path);
    ndsort::write_stream_csv(out, stream);
  }
  return 0;
}

int cmd_run(const RunOptions& opt) {
  const ndsort::ScenarioResult result = ndsort::run_scenario(opt.spec);
  const std::filesystem::path dir(opt.out_dir);
  std::filesystem::create_directories(dir);
  const std::string& id = result.spec.scenario;
  {
    auto out = open_out(dir / (id + "_cells.csv"));
    ndsort::write_cells_csv(out, result);
  }
  {
    auto out = open_out(dir / (id + "_summary.csv"));
    ndsort::write_summary_csv(out, result);
  }
  {
    auto out = open_out(dir / (id + "_plot.csv"));
    ndsort::write_plot_csv(out, result);
  }
  {
    auto out = open_out(dir / (id + "_config.txt"));
    ndsort::write_resolved_spec(out, result.spec);
  }
  std::printf("wrote %s_{cells,summary,plot}.csv and %s_config.txt under %s\n",
              id.c_str(), id.c_str(), dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online dendrite clustering and its spike-sorting benchmark"};
  app.require_subcommand(1);

  app.add_subcommand("list", "list scenarios");

  app.add_subcommand("verify", "run the built-in exact oracle checks");

  auto* gen = app.add_subcommand("generate", "emit a labeled stream CSV");
  int gen_neurons = 8;
  std::string gen_dev = "2/16";
  std::uint64_t gen_seed = 1;
  std::string gen_rate = "uniform";
  int gen_switch_at = -1;
  std::string gen_out = "-";
  ExperimentSpec gen_proto;
  gen->add_option("--neurons", gen_neurons, "base neuron count");
  gen->add_option("--dev", gen_dev, "instance deviation, e.g. 2/16");
  gen->add_option("--seed", gen_seed, "stream seed");
  gen->add_option("--rate", gen_rate, "uniform | zipf")
      ->check(CLI::IsMember({"uniform", "zipf"}));
  gen->add_option("--zipf-s", gen_proto.zipf_exponent, "zipf exponent");
  gen->add_option("--length", gen_proto.stream_length, "spikes to emit");
  gen->add_option("--base-dev", gen_proto.base_dev, "base neuron deviation");
  gen->add_option("--switch-at", gen_switch_at,
                  "switch to an independent base set at this step");
  gen->add_option("--out", gen_out, "output file, or - for stdout");

  auto* run = app.add_subcommand("run", "run one experiment scenario");
  RunOptions opt;
  run->add_option("scenario", opt.scenario, "scenario id (see list)")
      ->required();
  run->set_config("--config", "", "flat key=value file of run options");
  run->allow_config_extras(CLI::config_extras_mode::error);
  add_run_flags(*run, opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list")) return cmd_list();
    if (app.got_subcommand("verify")) return cmd_verify();
    if (app.got_subcommand("generate")) {
      return cmd_generate(gen_proto, gen_neurons, parse_fraction(gen_dev),
                          gen_seed, gen_rate,
                          gen_switch_at >= 0 ? std::optional<int>(gen_switch_at)
                                             : std::nullopt,
                          gen_out);
    }
    apply_run_options(opt, *run);
    return cmd_run(opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
