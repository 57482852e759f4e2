// passim: command-line front end for the simulator and its workloads.
//
// Every subcommand writes one output document: to --out when given, else to
// $PASSIM_OUT_DIR/<subcommand default name> when that variable is set, else
// to stdout. Each document starts with a '#' header carrying the tool
// version, the command, every option value and the seed.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "passim/benchmark.hpp"
#include "passim/cal_demo.hpp"
#include "passim/cd_training.hpp"
#include "passim/delay.hpp"
#include "passim/error.hpp"
#include "passim/exact.hpp"
#include "passim/fly.hpp"
#include "passim/idx.hpp"
#include "passim/model_io.hpp"
#include "passim/sampler.hpp"
#include "passim/stats.hpp"
#include "passim/topology.hpp"
#include "passim/trace_io.hpp"

#ifndef PASSIM_VERSION
#define PASSIM_VERSION "0.0.0"
#endif

using namespace passim;

namespace {

// Options that do not change the produced bytes stay out of the header.
const std::set<std::string> kUnrecorded{"help", "out", "activation-out", "jobs", "config", "verbose"};

std::vector<std::string> header_for(const CLI::App& sub) {
  std::vector<std::string> h{std::string("passim ") + PASSIM_VERSION, "command: " + sub.get_name()};
  bool has_seed = false;
  for (const CLI::Option* opt : sub.get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || kUnrecorded.count(names.front())) continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
    } else {
      value = opt->get_default_str();
    }
    if (opt->get_expected_max() == 0) value = opt->count() > 0 ? "true" : "false";
    if (names.front() == "seed") has_seed = true;
    h.push_back(names.front() + ": " + value);
  }
  if (!has_seed) h.push_back("seed: none");
  return h;
}

std::string with_header(const std::vector<std::string>& header, const std::string& body) {
  std::string out;
  for (const auto& line : header) out += "# " + line + "\n";
  return out + body;
}

void emit(const std::string& out_path, const std::string& default_name, const std::string& text) {
  std::string path = out_path;
  if (path.empty()) {
    if (const char* dir = std::getenv("PASSIM_OUT_DIR"); dir && *dir) {
      path = (std::filesystem::path(dir) / default_name).string();
    }
  }
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open output file '" + path + "'");
  f << text;
  f.close();
  if (!f) throw IoError("write failed for '" + path + "'");
}

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput("cannot parse " + what + " '" + text + "'");
  }
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number(item, what));
  if (out.empty()) throw InvalidInput(what + " list is empty");
  return out;
}

Vec2 parse_point(const std::string& text) {
  const auto xy = parse_list(text, "coordinate");
  if (xy.size() != 2) throw InvalidInput("point '" + text + "' needs the form x,y");
  return {xy[0], xy[1]};
}

std::string bit_string(std::span<const std::uint8_t> bits) {
  std::string s;
  for (auto b : bits) s += b ? '1' : '0';
  return s;
}

/// "i=v,j=w" with v, w in {0, 1}; applied on top of `params`.
void apply_clamps(std::vector<NeuronParams>& params, const std::string& spec) {
  for (const auto& item : split(spec, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidInput("clamp '" + item + "' needs the form index=0|1");
    const double idx = parse_number(item.substr(0, eq), "clamp index");
    const std::string v = item.substr(eq + 1);
    if (idx < 0 || idx >= static_cast<double>(params.size()) || idx != std::floor(idx)) {
      throw InvalidInput("clamp index out of range in '" + item + "'");
    }
    if (v != "0" && v != "1") throw InvalidInput("clamp value must be 0 or 1 in '" + item + "'");
    params[static_cast<std::size_t>(idx)].clamp = v == "1" ? Clamp::One : Clamp::Zero;
  }
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  std::string model;
  std::string engine = "async";
  std::uint64_t events = 100000;
  double duration = 0.0;
  std::uint64_t seed = 1;
  double lambda0 = 150e6;
  double tau_circ = 0.0;
  double slope_sigma = 0.0;
  double threshold_sigma = 0.0;
  double dead_probability = 0.0;
  std::string clamp;
  std::string output = "trace";
  std::string out;
};

void add_sample(CLI::App& app, SampleArgs& a) {
  auto* s = app.add_subcommand("sample", "Run one sampler chain and write its trace or state histogram");
  s->add_option("--model", a.model, "Model file")->required();
  s->add_option("--engine", a.engine, "async | sync")->check(CLI::IsMember({"async", "sync"}));
  s->add_option("--events", a.events, "Flip events (async) or site updates (sync)");
  s->add_option("--duration", a.duration, "Simulated seconds instead of --events (async only)");
  s->add_option("--seed", a.seed);
  s->add_option("--lambda0", a.lambda0, "Neuron rate / sync clock, Hz");
  s->add_option("--tau-circ", a.tau_circ, "Circuit delay, seconds (async only)");
  s->add_option("--slope-sigma", a.slope_sigma, "Log-normal spread of sigmoid slopes");
  s->add_option("--threshold-sigma", a.threshold_sigma, "Normal spread of sigmoid thresholds");
  s->add_option("--dead-prob", a.dead_probability, "Probability that a neuron is stuck");
  s->add_option("--clamp", a.clamp, "Clamped neurons, e.g. 0=1,3=0");
  s->add_option("--output", a.output, "trace | histogram")->check(CLI::IsMember({"trace", "histogram"}));
  s->add_option("--out", a.out, "Output file");
}

void run_sample(const CLI::App& sub, const SampleArgs& a) {
  const IsingModel model = read_model(a.model);
  std::vector<NeuronParams> params;
  NeuronParams base;
  base.lambda0 = a.lambda0;
  const VariationSpec var{a.slope_sigma, a.threshold_sigma, a.dead_probability};
  if (a.slope_sigma != 0 || a.threshold_sigma != 0 || a.dead_probability != 0) {
    params = make_varied_params(model.size(), base, var, derive_seed(a.seed, {1}));
  } else {
    params = uniform_params(model.size(), a.lambda0);
  }
  apply_clamps(params, a.clamp);

  EventTrace trace;
  if (a.engine == "async") {
    AsyncConfig cfg;
    cfg.seed = derive_seed(a.seed, {0});
    cfg.circuit_delay = a.tau_circ;
    if (a.duration > 0) {
      cfg.stop = StopAtTime{a.duration};
    } else {
      cfg.stop = StopAfterEvents{a.events};
    }
    trace = run_async(model, params, cfg);
  } else {
    if (a.tau_circ != 0 || a.duration != 0) throw InvalidInput("--tau-circ and --duration apply to the async engine only");
    SyncConfig cfg;
    cfg.seed = derive_seed(a.seed, {0});
    cfg.updates = a.events;
    cfg.lambda0 = a.lambda0;
    trace = run_sync_events(model, params, cfg);
  }

  auto header = header_for(sub);
  if (a.output == "trace") {
    emit(a.out, "sample.csv", format_event_trace(trace, header));
    return;
  }
  const auto occ = occupancy_distribution(trace);
  std::string body;
  if (model.size() <= kMaxExactSpins) {
    const auto exact = condition_on_clamps(exact_distribution(model), params);
    header.push_back(fmt("tv_to_exact: %.9f", tv_distance(occ, exact.probabilities)));
    if (a.slope_sigma != 0 || a.threshold_sigma != 0 || a.dead_probability != 0) {
      header.push_back("note: exact column ignores sigmoid variation and dead neurons");
    }
    body = "state,occupancy,exact\n";
    for (std::size_t k = 0; k < occ.size(); ++k) {
      body += bit_string(bits_from_index(k, model.size())) +
              fmt(",%.17g,%.17g\n", occ[k], exact.probabilities[k]);
    }
  } else {
    body = "state,occupancy\n";
    for (std::size_t k = 0; k < occ.size(); ++k) {
      body += bit_string(bits_from_index(k, model.size())) + fmt(",%.17g\n", occ[k]);
    }
  }
  emit(a.out, "sample.csv", with_header(header, body));
}

// ---------------------------------------------------------------- optimize

struct OptimizeArgs {
  std::string model;
  double beta = 1.0;
  double max_sweeps = 1e5;
  double lambda0 = 150e6;
  std::size_t exact_limit = 20;
  std::uint64_t seed = 1;
  std::string out;
};

void add_optimize(CLI::App& app, OptimizeArgs& a) {
  auto* s = app.add_subcommand("optimize", "Time to the ground state for both engines from one start state");
  s->add_option("--model", a.model, "Problem model file")->required();
  s->add_option("--beta", a.beta, "Inverse temperature applied to the model");
  s->add_option("--max-sweeps", a.max_sweeps, "Budget in updates per neuron");
  s->add_option("--lambda0", a.lambda0);
  s->add_option("--exact-limit", a.exact_limit, "Largest size solved by enumeration");
  s->add_option("--seed", a.seed);
  s->add_option("--out", a.out);
}

void run_optimize(const CLI::App& sub, const OptimizeArgs& a) {
  const IsingModel problem = read_model(a.model);
  if (!(a.beta > 0) || !std::isfinite(a.beta)) throw InvalidInput("--beta must be positive");
  const Optimum opt = find_optimum(problem, derive_seed(a.seed, {0}), a.exact_limit);
  Rng init(derive_seed(a.seed, {1}));
  SpinState initial(problem.size());
  for (auto& v : initial) v = static_cast<std::int8_t>(init.next() >> 63 ? 1 : down_value(problem.domain()));
  const TrialTimes t = run_trial(problem.scaled(a.beta), opt.energy * a.beta, initial, a.lambda0,
                                 a.max_sweeps, derive_seed(a.seed, {2}), derive_seed(a.seed, {3}));
  auto header = header_for(sub);
  header.push_back(fmt("optimum_energy: %.17g", opt.energy));
  header.push_back(std::string("optimum_exact: ") + (opt.exact ? "true" : "false"));
  header.push_back("optimum_state: " + bit_string(bits_from_state(opt.state, problem.domain())));
  std::string body = "engine,hit,tts\n";
  const auto row = [&](const char* engine, const std::optional<double>& v) {
    body += v ? fmt("%s,1,%.17g\n", engine, *v) : fmt("%s,0,nan\n", engine);
  };
  row("async", t.async_tts);
  row("sync", t.sync_tts);
  emit(a.out, "optimize.csv", with_header(header, body));
}

// ---------------------------------------------------------------- bench-scaling

struct BenchArgs {
  std::string kind = "sk";
  std::string sizes = "10,20,30,40,50,60";
  std::size_t instances = 10;
  std::size_t trials = 100;
  double lambda0 = 150e6;
  double beta = 2.0;
  double max_sweeps = 1e5;
  std::string weights = "pm1";
  std::size_t bootstrap = 1000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string out;
};

void add_bench(CLI::App& app, BenchArgs& a) {
  auto* s = app.add_subcommand("bench-scaling", "Async vs sync time-to-solution scaling on MaxCut or SK");
  s->add_option("--kind", a.kind, "maxcut | sk")->check(CLI::IsMember({"maxcut", "sk"}));
  s->add_option("--sizes", a.sizes, "Comma-separated problem sizes");
  s->add_option("--instances", a.instances);
  s->add_option("--trials", a.trials);
  s->add_option("--lambda0", a.lambda0);
  s->add_option("--beta", a.beta, "Instances are scaled by beta / sqrt(n)");
  s->add_option("--max-sweeps", a.max_sweeps);
  s->add_option("--weights", a.weights, "MaxCut weight scheme");
  s->add_option("--bootstrap", a.bootstrap);
  s->add_option("--seed", a.seed);
  s->add_option("--jobs", a.jobs);
  s->add_option("--out", a.out);
}

void run_bench(const CLI::App& sub, const BenchArgs& a) {
  BenchmarkSuite suite;
  suite.kind = parse_problem_kind(a.kind);
  suite.sizes.clear();
  for (double v : parse_list(a.sizes, "size")) {
    if (!(v >= 1) || v != std::floor(v)) throw InvalidInput("sizes must be positive integers");
    suite.sizes.push_back(static_cast<std::size_t>(v));
  }
  suite.instances = a.instances;
  suite.trials = a.trials;
  suite.seed = a.seed;
  suite.beta = a.beta;
  suite.weights = parse_weight_scheme(a.weights);
  BenchmarkOptions opt;
  opt.lambda0 = a.lambda0;
  opt.max_sweeps = a.max_sweeps;
  opt.bootstrap = a.bootstrap;
  opt.jobs = a.jobs;
  const BenchmarkResult r = run_scaling_benchmark(suite, opt);

  auto header = header_for(sub);
  const auto fit = [&](const char* name, const ScalingReport& rep) {
    header.push_back(fmt("%s: A %.9g B %.9g B_ci95 [%.9g, %.9g]", name, rep.a, rep.b, rep.b_ci.lo, rep.b_ci.hi));
  };
  fit("async_AeB", r.async_report);
  fit("async_AoverN", r.async_over_n);
  fit("sync_AeB", r.sync_report);
  const auto am = r.async_report.median_per_size();
  const auto sm = r.sync_report.median_per_size();
  for (std::size_t k = 0; k < r.async_report.sizes.size() && k < sm.size(); ++k) {
    header.push_back(fmt("median_tts size %zu async %.9g sync %.9g", r.async_report.sizes[k], am[k], sm[k]));
  }
  header.push_back(fmt("misses: async %zu sync %zu", r.async_misses, r.sync_misses));
  header.push_back(std::string("B_async_below_sync_disjoint: ") +
                   (r.async_report.b_ci.hi < r.sync_report.b_ci.lo ? "yes" : "no"));
  for (const auto& d : r.diagnostics) header.push_back("diagnostic: " + d);
  emit(a.out, "bench_scaling.csv", format_benchmark_trials(r, header));
}

// ---------------------------------------------------------------- cal-demo

struct CalArgs {
  std::string mask;
  CalDemoConfig cfg;
  std::string out;
};

void add_cal(CLI::App& app, CalArgs& a) {
  auto* s = app.add_subcommand("cal-demo", "Sample a mask-encoded ground-state model and report occupancy");
  s->add_option("--mask", a.mask, "Binary grid file")->required();
  s->add_option("--magnitude", a.cfg.magnitude, "|J| of every coupling");
  s->add_option("--duration", a.cfg.duration, "Simulated seconds");
  s->add_option("--lambda0", a.cfg.lambda0);
  s->add_option("--sample-rate", a.cfg.sample_rate, "Snapshot clock, Hz");
  s->add_option("--tau-circ", a.cfg.circuit_delay);
  s->add_option("--energy-stride", a.cfg.energy_stride);
  s->add_option("--seed", a.cfg.seed);
  s->add_option("--out", a.out);
}

void run_cal(const CLI::App& sub, const CalArgs& a) {
  const BinaryGrid mask = read_binary_grid(a.mask);
  const CalDemoReport r = run_cal_demo(mask, a.cfg);
  emit(a.out, "cal_demo.csv", format_cal_report(r, header_for(sub)));
}

// ---------------------------------------------------------------- train-cd

struct TrainArgs {
  int digit = 0;
  std::string images;
  std::string labels;
  double threshold = 0.5;
  TrainConfig cfg;
  std::string activation_out;
  std::size_t activation_samples = 2000;
  bool verbose = false;
  std::string out;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* s = app.add_subcommand("train-cd", "Contrastive-divergence training of a 16x16 king's-move model on one digit");
  s->add_option("--digit", a.digit)->required()->check(CLI::Range(0, 9));
  s->add_option("--idx-images", a.images, "IDX image file")->required();
  s->add_option("--idx-labels", a.labels, "IDX label file")->required();
  s->add_option("--threshold", a.threshold, "Binarization threshold, fraction of 255");
  s->add_option("--epochs", a.cfg.epochs);
  s->add_option("--alpha", a.cfg.alpha, "Learning rate");
  s->add_flag("--decay", a.cfg.decay, "alpha / epoch from the second epoch on");
  s->add_option("--batch", a.cfg.batch_size);
  s->add_option("--model-samples", a.cfg.model_samples, "Snapshots per model expectation");
  s->add_option("--chains", a.cfg.chains);
  s->add_option("--lambda0", a.cfg.lambda0);
  s->add_option("--seed", a.cfg.seed);
  s->add_option("--activation-out", a.activation_out, "CSV of mean activation vs data mean");
  s->add_option("--activation-samples", a.activation_samples);
  s->add_option("--jobs", a.cfg.jobs);
  s->add_flag("-v,--verbose", a.verbose, "Per-epoch progress on stderr");
  s->add_option("--out", a.out, "Trained model file");
}

void run_train(const CLI::App& sub, const TrainArgs& a) {
  const auto data = filter_label(binarize(load_idx(a.images, a.labels), a.threshold), a.digit);
  if (data.size() == 0) throw InvalidInput("no images with label " + std::to_string(a.digit));
  const auto on_epoch = [&](const EpochStats& s) {
    if (a.verbose) {
      std::cerr << fmt("epoch %zu mean|dw| %.6g mean|gap| %.6g mean|w| %.6g\n", s.epoch, s.mean_abs_dw,
                       s.mean_abs_gap, s.mean_abs_weight);
    }
  };
  const IsingModel m = train(blank_grid_model(data.rows, data.cols), data.images, a.cfg, on_epoch);
  auto header = header_for(sub);
  header.push_back(fmt("training_images: %zu", data.size()));
  emit(a.out, "train_cd_model.txt", format_model(m, header));

  if (!a.activation_out.empty()) {
    SampleConfig sc;
    sc.samples = a.activation_samples;
    sc.lambda0 = a.cfg.lambda0;
    sc.seed = derive_seed(a.cfg.seed, {1000});
    const auto act = mean_activation(m, sc);
    const auto target = mean_image(data);
    header.push_back(fmt("pearson_r: %.9f", pearson(act, target)));
    std::string body = "row,col,activation,data_mean\n";
    for (std::size_t k = 0; k < act.size(); ++k) {
      body += fmt("%zu,%zu,%.17g,%.17g\n", k / data.cols, k % data.cols, act[k], target[k]);
    }
    emit(a.activation_out, "", with_header(header, body));
  }
}

// ---------------------------------------------------------------- reconstruct

struct ReconArgs {
  std::string model;
  std::string top_half;
  SampleConfig cfg;
  std::string out;
};

void add_recon(CLI::App& app, ReconArgs& a) {
  auto* s = app.add_subcommand("reconstruct", "Clamp the top half of an image and sample the rest");
  s->add_option("--model", a.model, "Trained grid model")->required();
  s->add_option("--clamp-top-half", a.top_half, "Binary grid image file")->required();
  s->add_option("--samples", a.cfg.samples);
  s->add_option("--lambda0", a.cfg.lambda0);
  s->add_option("--seed", a.cfg.seed);
  s->add_option("--out", a.out);
}

void run_recon(const CLI::App& sub, const ReconArgs& a) {
  const IsingModel m = read_model(a.model);
  const BinaryGrid img = read_binary_grid(a.top_half);
  if (img.cells.size() != m.size()) {
    throw InvalidInput("image has " + std::to_string(img.cells.size()) + " cells, model has " +
                       std::to_string(m.size()) + " spins");
  }
  std::vector<std::uint8_t> mask(m.size(), 0);
  for (std::size_t k = 0; k < (img.rows / 2) * img.cols; ++k) mask[k] = 1;
  const Reconstruction r = reconstruct(m, mask, img.cells, a.cfg);
  std::string body = "row,col,clamped,input,completion,p_up\n";
  for (std::size_t k = 0; k < m.size(); ++k) {
    body += fmt("%zu,%zu,%d,%d,%d,%.17g\n", k / img.cols, k % img.cols, mask[k], img.cells[k],
                r.completion[k], r.marginals[k]);
  }
  emit(a.out, "reconstruct.csv", with_header(header_for(sub), body));
}

// ---------------------------------------------------------------- fly-sim

struct FlyArgs {
  std::string targets = "0,1000;1000,1000";
  std::string start = "500,0";
  FlyWorld world;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string out;
};

void add_fly(CLI::App& app, FlyArgs& a) {
  auto* s = app.add_subcommand("fly-sim", "Ring-attractor navigation toward competing targets");
  s->add_option("--targets", a.targets, "Targets as x1,y1;x2,y2;...");
  s->add_option("--start", a.start, "Start position x,y");
  s->add_option("--eta", a.world.eta, "Angular tuning exponent");
  s->add_option("--n", a.world.neurons, "Neuron count, a multiple of the target count");
  s->add_option("--alpha-mem", a.world.alpha_mem, "Bias toward the previous step's state");
  s->add_option("--gain", a.world.gain, "Coupling gain");
  s->add_option("--v0", a.world.v0, "Step length at full aligned activity");
  s->add_option("--max-steps", a.world.max_steps);
  s->add_option("--reach-fraction", a.world.reach_fraction);
  s->add_option("--lambda0", a.world.lambda0);
  s->add_option("--step-events", a.world.step_events, "Expected updates per neuron per step");
  s->add_option("--trials", a.trials);
  s->add_option("--seed", a.seed);
  s->add_option("--jobs", a.jobs);
  s->add_option("--out", a.out);
}

void run_fly(const CLI::App& sub, const FlyArgs& a) {
  FlyWorld w = a.world;
  w.targets.clear();
  for (const auto& t : split(a.targets, ';')) w.targets.push_back(parse_point(t));
  w.start = parse_point(a.start);
  validate(w);
  const auto ens = simulate_ensemble(w, a.trials, a.seed, a.jobs);
  auto header = header_for(sub);
  const auto f = choice_fractions(w, ens);
  std::string fr;
  for (double v : f) fr += fmt(fr.empty() ? "%.6f" : " %.6f", v);
  header.push_back("choice_fractions: " + fr);
  header.push_back(fmt("decision_entropy: %.9f", decision_entropy(f)));
  std::size_t capped = 0;
  for (const auto& t : ens) capped += t.termination == Termination::StepCap;
  header.push_back(fmt("step_cap_runs: %zu", capped));
  if (ens.size() >= 2) {
    if (const auto b = find_bifurcation(w, ens)) {
      header.push_back(fmt("bifurcation: step %zu x %.6f y %.6f progress %.6f", b->step, b->centroid.x,
                           b->centroid.y, b->progress));
    } else {
      header.push_back("bifurcation: none");
    }
  }
  emit(a.out, "fly_traj.csv", format_trajectories(ens, header));
}

// ---------------------------------------------------------------- acf-fit

struct AcfArgs {
  std::string trace;
  std::size_t neuron = 0;
  double lambda0 = 150e6;
  double duration = 10e-3;
  double input = 0.0;
  double max_lag = 0.0;
  double sample_rate = 0.0;
  std::uint64_t seed = 1;
  std::string out;
};

void add_acf(CLI::App& app, AcfArgs& a) {
  auto* s = app.add_subcommand("acf-fit", "Autocorrelation rate fit and holding-time test of one neuron");
  s->add_option("--trace", a.trace, "Event trace CSV; without it a free neuron is simulated");
  s->add_option("--neuron", a.neuron);
  s->add_option("--lambda0", a.lambda0, "Rate of the simulated neuron");
  s->add_option("--duration", a.duration, "Simulated seconds");
  s->add_option("--input", a.input, "Constant activation input of the simulated neuron");
  s->add_option("--max-lag", a.max_lag, "Seconds; default 5 / lambda0");
  s->add_option("--sample-rate", a.sample_rate, "Resampling rate, Hz; default 10 lambda0");
  s->add_option("--seed", a.seed);
  s->add_option("--out", a.out);
}

void run_acf(const CLI::App& sub, const AcfArgs& a) {
  EventTrace trace;
  std::optional<double> p_up;
  if (!a.trace.empty()) {
    std::ifstream f(a.trace, std::ios::binary);
    if (!f) throw IoError("cannot open trace file '" + a.trace + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    trace = parse_event_trace(ss.str());
    if (!(trace.lambda0 > 0)) throw InvalidInput("trace has no lambda0 header");
  } else {
    // a lone {0,1} spin with bias b has activation input b
    const IsingModel m(1, {}, {a.input}, SpinDomain::ZeroOne, EnergySign::Ferromagnetic);
    AsyncConfig cfg;
    cfg.seed = a.seed;
    cfg.stop = StopAtTime{a.duration};
    trace = run_async(m, uniform_params(1, a.lambda0), cfg);
    p_up = logistic(a.input);
  }
  if (a.neuron >= trace.size()) throw InvalidInput("neuron index out of range");
  const double lam = trace.lambda0;
  const double max_lag = a.max_lag > 0 ? a.max_lag : 5.0 / lam;
  const AcfEstimate est = autocorrelation(trace, a.neuron, max_lag, a.sample_rate);

  auto header = header_for(sub);
  header.push_back(fmt("trace_lambda0: %.17g", lam));
  header.push_back(fmt("fitted_rate: %.17g", est.rate));
  header.push_back(fmt("fit_points: %zu", est.fit_points));
  if (p_up) {
    // relaxation rate of a free two-state neuron is lambda0 (p + 1 - p)
    header.push_back(fmt("rate_relative_error: %.9f", std::abs(est.rate - lam) / lam));
    std::vector<double> up_hold, down_hold;
    double last = -1;
    std::uint8_t held = 0;
    for (const auto& e : trace.events) {
      if (last >= 0) (held ? up_hold : down_hold).push_back(e.time - last);
      last = e.time;
      held = e.up;
    }
    if (!up_hold.empty()) {
      const auto ks = ks_exponential(up_hold, lam * (1 - *p_up));
      header.push_back(fmt("ks_up_hold: n %zu D %.6g p %.6g", up_hold.size(), ks.statistic, ks.p_value));
    }
    if (!down_hold.empty()) {
      const auto ks = ks_exponential(down_hold, lam * *p_up);
      header.push_back(fmt("ks_down_hold: n %zu D %.6g p %.6g", down_hold.size(), ks.statistic, ks.p_value));
    }
  }
  std::string body = "lag,acf,fit\n";
  for (std::size_t k = 0; k < est.lags.size(); ++k) {
    body += fmt("%.17g,%.17g,%.17g\n", est.lags[k], est.values[k], est.model(est.lags[k]));
  }
  emit(a.out, "acf_fit.csv", with_header(header, body));
}

// ---------------------------------------------------------------- delay-study

struct DelayArgs {
  std::string model;
  std::string ratios = "20,10,8,6,5,4,3,2,1.5,1";
  DelayStudyConfig cfg;
  std::string out;
};

void add_delay(CLI::App& app, DelayArgs& a) {
  auto* s = app.add_subcommand("delay-study", "Sampling error against the tau_acf / tau_circ ratio");
  s->add_option("--model", a.model, "Model file (n <= 20)")->required();
  s->add_option("--ratios", a.ratios, "Comma-separated tau_acf / tau_circ ratios");
  s->add_option("--lambda0", a.cfg.lambda0);
  s->add_option("--events", a.cfg.events, "Flip events per run");
  s->add_option("--replicates", a.cfg.replicates);
  s->add_option("--threshold", a.cfg.tv_threshold, "TV level marking the breakpoint");
  s->add_option("--seed", a.cfg.seed);
  s->add_option("--jobs", a.cfg.jobs);
  s->add_option("--out", a.out);
}

void run_delay(const CLI::App& sub, const DelayArgs& a) {
  DelayStudyConfig cfg = a.cfg;
  cfg.ratios = parse_list(a.ratios, "ratio");
  const DelayStudy st = run_delay_study(read_model(a.model), cfg);
  auto header = header_for(sub);
  header.push_back(fmt("tau_acf: %.17g", st.tau_acf));
  header.push_back(st.breakpoint_ratio ? fmt("breakpoint_ratio: %.6f", *st.breakpoint_ratio)
                                       : std::string("breakpoint_ratio: none"));
  header.push_back(std::string("non_decreasing: ") + (st.non_decreasing() ? "yes" : "no"));
  emit(a.out, "delay_study.csv", with_header(header, format_delay_study(st)));
}

// ---------------------------------------------------------------- oracle

struct OracleArgs {
  std::string model;
  std::string clamp;
  std::string out;
};

void add_oracle(CLI::App& app, OracleArgs& a) {
  auto* s = app.add_subcommand("oracle", "Exact Boltzmann distribution by enumeration (n <= 20)");
  s->add_option("--model", a.model, "Model file")->required();
  s->add_option("--clamp", a.clamp, "Condition on clamped neurons, e.g. 0=1");
  s->add_option("--out", a.out);
}

void run_oracle(const CLI::App& sub, const OracleArgs& a) {
  const IsingModel m = read_model(a.model);
  ExactDistribution d = exact_distribution(m);
  if (!a.clamp.empty()) {
    auto params = uniform_params(m.size(), 1.0);
    apply_clamps(params, a.clamp);
    d = condition_on_clamps(d, params);
  }
  auto header = header_for(sub);
  header.push_back(fmt("log_partition: %.17g", d.log_partition));
  std::string body = "state,energy,probability\n";
  for (std::size_t k = 0; k < d.probabilities.size(); ++k) {
    body += bit_string(bits_from_index(k, m.size())) + fmt(",%.17g,%.17g\n", d.energies[k], d.probabilities[k]);
  }
  emit(a.out, "oracle.csv", with_header(header, body));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"passim: asynchronous probabilistic Ising sampler simulator"};
  app.set_version_flag("--version", PASSIM_VERSION);
  app.set_config("--config", "", "TOML/INI file with option values");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  SampleArgs sample;
  OptimizeArgs optimize;
  BenchArgs bench;
  CalArgs cal;
  TrainArgs train_args;
  ReconArgs recon;
  FlyArgs fly;
  AcfArgs acf;
  DelayArgs delay;
  OracleArgs oracle;
  add_sample(app, sample);
  add_optimize(app, optimize);
  add_bench(app, bench);
  add_cal(app, cal);
  add_train(app, train_args);
  add_recon(app, recon);
  add_fly(app, fly);
  add_acf(app, acf);
  add_delay(app, delay);
  add_oracle(app, oracle);

  if (argc > 1 && argv[1][0] != '-') {
    bool known = false;
    for (const auto* s : app.get_subcommands({})) known |= s->get_name() == argv[1];
    if (!known) {
      std::cerr << "passim: unknown subcommand '" << argv[1] << "' (see passim --help)\n";
      return 2;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "passim: invalid arguments: " << e.what() << "\n";
    return 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    if (name == "sample") run_sample(*sub, sample);
    else if (name == "optimize") run_optimize(*sub, optimize);
    else if (name == "bench-scaling") run_bench(*sub, bench);
    else if (name == "cal-demo") run_cal(*sub, cal);
    else if (name == "train-cd") run_train(*sub, train_args);
    else if (name == "reconstruct") run_recon(*sub, recon);
    else if (name == "fly-sim") run_fly(*sub, fly);
    else if (name == "acf-fit") run_acf(*sub, acf);
    else if (name == "delay-study") run_delay(*sub, delay);
    else if (name == "oracle") run_oracle(*sub, oracle);
  } catch (const InvalidInput& e) {
    std::cerr << "passim " << name << ": invalid input: " << e.what() << "\n";
    return e.exit_code();
  } catch (const IoError& e) {
    std::cerr << "passim " << name << ": I/O error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const NumericError& e) {
    std::cerr << "passim " << name << ": numeric failure: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "passim " << name << ": internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
