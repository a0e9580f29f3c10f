#include "fedsim/runner.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fedsim/concentration.hpp"
#include "fedsim/engine.hpp"
#include "fedsim/errors.hpp"
#include "fedsim/lowerbound.hpp"
#include "fedsim/rng.hpp"

namespace fedsim {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string& value, const std::string& key, std::size_t line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": key '" + key +
                     "' expects a real number, got '" + value + "'");
  }
}

std::size_t parse_count(const std::string& value, const std::string& key,
                        std::size_t line) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size() || v < 0) throw std::invalid_argument("bad count");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": key '" + key +
                     "' expects a nonnegative integer, got '" + value + "'");
  }
}

std::uint64_t parse_seed(const std::string& value, const std::string& key,
                         std::size_t line) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("bad seed");
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": key '" + key +
                     "' expects an unsigned integer, got '" + value + "'");
  }
}

std::vector<std::size_t> parse_count_list(const std::string& value,
                                          const std::string& key, std::size_t line) {
  std::vector<std::size_t> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ParseError("line " + std::to_string(line) + ": key '" + key +
                       "' has an empty list element");
    out.push_back(parse_count(item, key, line));
  }
  if (out.empty())
    throw ParseError("line " + std::to_string(line) + ": key '" + key +
                     "' expects a comma-separated list");
  return out;
}

struct CsvWriter {
  explicit CsvWriter(const std::filesystem::path& path) : out(path, std::ios::binary) {
    if (!out) throw ParseError("cannot open output file " + path.string());
  }
  void row(const std::string& line) { out << line << '\n'; }
  std::ofstream out;
};

ordered_json resolved_config_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["kind"] = to_string(cfg.kind);
  j["d"] = cfg.sim.d;
  j["k"] = cfg.sim.k;
  j["M"] = cfg.sim.num_clients;
  j["m"] = cfg.sim.clients_per_round;
  j["tau"] = cfg.sim.tau;
  j["alpha"] = cfg.sim.alpha;
  j["T"] = cfg.sim.rounds;
  j["regime"] = cfg.sim.regime.kind == RegimeKind::population ? "population" : "finite";
  j["batch_size"] = cfg.sim.regime.batch_size;
  j["noise_sigma"] = cfg.sim.noise_sigma;
  j["seed"] = cfg.sim.seed;
  if (cfg.delta0.has_value())
    j["delta0"] = *cfg.delta0;
  else
    j["delta0"] = nullptr;
  j["c3"] = cfg.sim.monitor_constants.c3;
  j["rate_const"] = cfg.sim.monitor_constants.rate_const;
  switch (cfg.sim.monitor_level) {
    case MonitorLevel::none: j["monitor"] = "none"; break;
    case MonitorLevel::global: j["monitor"] = "global"; break;
    case MonitorLevel::full: j["monitor"] = "full"; break;
  }
  j["trials"] = cfg.trials;
  j["n_values"] = cfg.n_values;
  j["alpha_ft"] = cfg.alpha_ft;
  j["tau_prime"] = cfg.tau_prime;
  j["noise_sigma_ft"] = cfg.noise_sigma_ft;
  j["conc_d"] = cfg.conc_d;
  j["conc_d1"] = cfg.conc_d1;
  j["conc_d2"] = cfg.conc_d2;
  j["conc_b_values"] = cfg.conc_b_values;
  j["conc_m_values"] = cfg.conc_m_values;
  j["conc_b"] = cfg.conc_b;
  j["conc_trials"] = cfg.conc_trials;
  j["event_m"] = cfg.event_m;
  j["event_rounds"] = cfg.event_rounds;
  j["event_trials"] = cfg.event_trials;
  j["event_alpha"] = cfg.event_alpha;
  return j;
}

void write_summary(const ExperimentConfig& cfg, const ordered_json& results) {
  ordered_json j;
  j["config"] = resolved_config_json(cfg);
  j["results"] = results;
  std::ofstream out(std::filesystem::path(cfg.out_dir) / "summary.json",
                    std::ios::binary);
  out << j.dump(2) << '\n';
}

std::string metrics_row(const RoundMetrics& m) {
  std::string row = std::to_string(m.t);
  auto real = [&row](double v) { row += ',' + fmt_real(v); };
  auto flag = [&row](bool v) { row += v ? ",1" : ",0"; };
  real(m.dist);
  real(m.delta_norm);
  real(m.w_norm);
  real(m.grad_norm_global);
  flag(m.flags.a1);
  flag(m.flags.a2);
  flag(m.flags.a3);
  flag(m.flags.a4);
  flag(m.flags.a5);
  flag(m.flags.a1_loc);
  flag(m.flags.a2_loc);
  flag(m.flags.a3_loc);
  flag(m.flags.a4_loc);
  real(m.prior_weight_measured);
  real(m.prior_weight_predicted);
  return row;
}

constexpr const char* kMetricsHeader =
    "t,dist,delta_norm,w_norm,grad_norm_global,A1,A2,A3,A4,A5,"
    "A1_loc,A2_loc,A3_loc,A4_loc,prior_weight_measured,prior_weight_predicted";

int run_train(const ExperimentConfig& cfg) {
  const TrainResult result = run_training(cfg.sim);
  const GroundTruth gt = gen_ground_truth(cfg.sim.d, cfg.sim.k,
                                          cfg.sim.num_clients,
                                          cfg.sim.noise_sigma, cfg.sim.seed);
  const DiversityStats stats = diversity_stats(gt.heads);

  CsvWriter csv(std::filesystem::path(cfg.out_dir) / "train.csv");
  csv.row(kMetricsHeader);
  for (const RoundMetrics& m : result.metrics) csv.row(metrics_row(m));

  ordered_json res;
  res["dist0"] = result.dist0;
  res["E0"] = result.e0;
  res["rounds_completed"] = result.rounds_completed;
  res["diverged"] = result.diverged;
  if (!result.diverged && all_finite(result.state.b)) {
    res["final_dist"] = principal_angle_distance(result.state.b, gt.b_star);
    res["final_grad_norm"] = global_grad_norm(result.state, gt);
  }
  if (!result.metrics.empty()) {
    const GlobalHypothesisReport report =
        check_global_hypotheses(result.metrics, stats, cfg.sim);
    res["hypotheses"] = {
        {"A1", report.a1}, {"A2", report.a2}, {"A3", report.a3},
        {"A4", report.a4}, {"A5", report.a5}, {"applicable", report.applicable}};
  }
  res["instance"] = {{"mu", stats.mu},
                     {"L_max", stats.l_max},
                     {"gamma", stats.gamma},
                     {"H", stats.h},
                     {"kappa_max", stats.kappa_max}};
  res["csv"] = "train.csv";
  write_summary(cfg, res);
  return result.diverged ? 2 : 0;
}

struct FtOutcome {
  std::vector<std::vector<double>> traces;  // per n value
};

FtOutcome finetune_one_trial(const ExperimentConfig& cfg, std::size_t tau,
                             std::uint64_t trial_seed) {
  SimConfig sim = cfg.sim;
  sim.tau = tau;
  if (tau == 1) sim.clients_per_round = sim.num_clients;  // D-GD
  sim.seed = trial_seed;
  sim.monitor_level = MonitorLevel::none;

  const GroundTruth gt = gen_ground_truth(sim.d, sim.k, sim.num_clients,
                                          sim.noise_sigma, sim.seed);
  const ModelState init = gen_init(gt, sim.alpha, sim.delta0_target, sim.seed);
  const TrainResult trained = run_training(sim, gt, init);
  if (trained.diverged) throw SimError("finetune: training diverged");

  rng::Stream head_stream(rng::make_key(trial_seed, rng::Tag::finetune_head));
  const Vector new_head = rng::gaussian_vector(head_stream, sim.k);

  FtOutcome out;
  for (std::size_t n : cfg.n_values) {
    FineTuneParams params;
    params.tau_prime = cfg.tau_prime;
    params.alpha_ft = cfg.alpha_ft;
    params.batch_size = n;
    params.noise_sigma = cfg.noise_sigma_ft;
    params.seed = rng::derive_key({trial_seed, n});
    out.traces.push_back(finetune(trained.state, gt, new_head, params)
                             .product_error_sq);
  }
  return out;
}

ordered_json per_n_summary(const ExperimentConfig& cfg,
                           const std::vector<FtOutcome>& outcomes) {
  ordered_json arr = ordered_json::array();
  for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
    double mean = 0.0;
    for (const FtOutcome& o : outcomes) mean += o.traces[ni].back();
    mean /= static_cast<double>(outcomes.size());
    double var = 0.0;
    for (const FtOutcome& o : outcomes) {
      const double dev = o.traces[ni].back() - mean;
      var += dev * dev;
    }
    var /= static_cast<double>(outcomes.size());
    arr.push_back({{"n", cfg.n_values[ni]},
                   {"mean_final_error", mean},
                   {"std_final_error", std::sqrt(var)}});
  }
  return arr;
}

int run_finetune(const ExperimentConfig& cfg) {
  std::vector<FtOutcome> outcomes;
  outcomes.reserve(cfg.trials);
  for (std::size_t trial = 0; trial < cfg.trials; ++trial)
    outcomes.push_back(
        finetune_one_trial(cfg, cfg.sim.tau, cfg.sim.seed + trial));

  CsvWriter csv(std::filesystem::path(cfg.out_dir) / "finetune.csv");
  csv.row("trial,n,step,product_error");
  for (std::size_t trial = 0; trial < cfg.trials; ++trial)
    for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
      const std::vector<double>& trace = outcomes[trial].traces[ni];
      for (std::size_t step = 0; step < trace.size(); ++step)
        csv.row(std::to_string(trial) + ',' + std::to_string(cfg.n_values[ni]) +
                ',' + std::to_string(step) + ',' + fmt_real(trace[step]));
    }

  ordered_json res;
  res["per_n"] = per_n_summary(cfg, outcomes);
  res["csv"] = "finetune.csv";
  write_summary(cfg, res);
  return 0;
}

int run_sweep(const ExperimentConfig& cfg) {
  std::vector<FtOutcome> fedavg, dgd;
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t trial_seed = cfg.sim.seed + trial;
    fedavg.push_back(finetune_one_trial(cfg, cfg.sim.tau, trial_seed));
    dgd.push_back(finetune_one_trial(cfg, 1, trial_seed));
  }

  CsvWriter csv(std::filesystem::path(cfg.out_dir) / "sweep.csv");
  csv.row("trial,alg,n,step,product_error");
  auto emit = [&](const char* alg, const std::vector<FtOutcome>& outcomes) {
    for (std::size_t trial = 0; trial < cfg.trials; ++trial)
      for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
        const std::vector<double>& trace = outcomes[trial].traces[ni];
        for (std::size_t step = 0; step < trace.size(); ++step)
          csv.row(std::to_string(trial) + ',' + alg + ',' +
                  std::to_string(cfg.n_values[ni]) + ',' + std::to_string(step) +
                  ',' + fmt_real(trace[step]));
      }
  };
  emit("fedavg", fedavg);
  emit("dgd", dgd);

  ordered_json res;
  res["fedavg_per_n"] = per_n_summary(cfg, fedavg);
  res["dgd_per_n"] = per_n_summary(cfg, dgd);
  res["csv"] = "sweep.csv";
  write_summary(cfg, res);
  return 0;
}

int run_lowerbound(const ExperimentConfig& cfg) {
  const double delta0 = cfg.delta0.value_or(0.5);
  const GroundTruth gt = gen_ground_truth(cfg.sim.d, cfg.sim.k,
                                          cfg.sim.num_clients,
                                          cfg.sim.noise_sigma, cfg.sim.seed);
  const Matrix b0 =
      make_b0_containing_product(gt.b_star, gt.heads, delta0, cfg.sim.seed);
  const AdversarialPair pair = construct_adversarial(b0, gt.b_star, gt.heads);
  const PairedDgdReport report =
      paired_dgd_experiment(pair, gt.heads, cfg.sim.alpha, cfg.sim.rounds);

  // Distance trajectory of the shared D-GD run against both truths.
  const Vector regressor = matvec(pair.b_star, gt.mean_head());
  ModelState state;
  state.b = pair.b0;
  state.w = Vector(cfg.sim.k);
  CsvWriter csv(std::filesystem::path(cfg.out_dir) / "lowerbound.csv");
  csv.row("t,dist_to_star,dist_to_prime");
  csv.row("0," + fmt_real(principal_angle_distance(state.b, pair.b_star)) + ',' +
          fmt_real(principal_angle_distance(state.b, pair.b_star_prime)));
  for (std::size_t t = 1; t <= cfg.sim.rounds; ++t) {
    state = dgd_population_recursion(state, regressor, cfg.sim.alpha, 1);
    csv.row(std::to_string(t) + ',' +
            fmt_real(principal_angle_distance(state.b, pair.b_star)) + ',' +
            fmt_real(principal_angle_distance(state.b, pair.b_star_prime)));
  }

  // Two candidate forms of the pair-separation bound; the invariant asserts
  // the sqrt(1 - delta0^2) form and both are logged.
  const double gap_target =
      2.0 * pair.delta0 * std::sqrt(1.0 - pair.delta0 * pair.delta0);
  const double gap_alt = 2.0 * pair.delta0 * std::sqrt(1.0 - pair.delta0);
  ordered_json res;
  res["delta0"] = pair.delta0;
  res["invariant_residuals"] = {
      {"orthonormality_star",
       frobenius_norm(sub(gram(pair.b_star), Matrix::identity(cfg.sim.k)))},
      {"orthonormality_prime",
       frobenius_norm(sub(gram(pair.b_star_prime), Matrix::identity(cfg.sim.k)))},
      {"product_match", report.containment_residual},
      {"b0_distance_star",
       std::abs(principal_angle_distance(pair.b0, pair.b_star) - pair.delta0)},
      {"b0_distance_prime",
       std::abs(principal_angle_distance(pair.b0, pair.b_star_prime) - pair.delta0)},
      {"pair_distance_shortfall",
       std::max(0.0, gap_target - report.dist_between_truths)}};
  res["pair_distance"] = report.dist_between_truths;
  res["pair_bound_sqrt_one_minus_delta0_sq"] = gap_target;
  res["pair_bound_sqrt_one_minus_delta0"] = gap_alt;
  res["dist_to_star"] = report.dist_to_star;
  res["dist_to_prime"] = report.dist_to_prime;
  res["max_final_dist"] = report.max_final_dist;
  res["lower_bound_0.7_delta0"] = 0.7 * pair.delta0;
  res["trajectories_identical"] = report.trajectories_identical;
  res["failure_case"] = report.failure_case;
  res["triangle_slack"] = report.triangle_slack;
  res["csv"] = "lowerbound.csv";
  write_summary(cfg, res);
  return 0;
}

int run_concentration(const ExperimentConfig& cfg) {
  const DeviationCurve single = gram_deviation_experiment(
      cfg.conc_d, cfg.conc_d1, cfg.conc_d2, cfg.conc_b_values, cfg.conc_trials,
      cfg.sim.seed);
  const DeviationCurve averaged = averaged_gram_deviation_experiment(
      cfg.conc_d, cfg.conc_d1, cfg.conc_d2, cfg.conc_m_values, cfg.conc_b,
      cfg.conc_trials, cfg.sim.seed);

  const GroundTruth gt = gen_ground_truth(cfg.sim.d, cfg.sim.k,
                                          cfg.sim.num_clients,
                                          cfg.sim.noise_sigma, cfg.sim.seed);
  const DiversityStats stats = diversity_stats(gt.heads);
  const std::size_t threshold = head_sampling_threshold(
      stats, cfg.sim.k, cfg.sim.num_clients, cfg.event_alpha, cfg.event_rounds);
  const std::size_t event_m = cfg.event_m == 0 ? threshold : cfg.event_m;
  const double rate =
      head_sampling_event_rate(gt.heads, event_m, cfg.event_alpha,
                               cfg.event_rounds, cfg.event_trials, cfg.sim.seed);

  CsvWriter csv(std::filesystem::path(cfg.out_dir) / "concentration.csv");
  csv.row("experiment,x,mean_deviation,quantile95");
  for (std::size_t i = 0; i < single.sample_sizes.size(); ++i)
    csv.row("gram_vs_b," + std::to_string(single.sample_sizes[i]) + ',' +
            fmt_real(single.mean_deviation[i]) + ',' +
            fmt_real(single.quantile95[i]));
  for (std::size_t i = 0; i < averaged.sample_sizes.size(); ++i)
    csv.row("gram_vs_M," + std::to_string(averaged.sample_sizes[i]) + ',' +
            fmt_real(averaged.mean_deviation[i]) + ',' +
            fmt_real(averaged.quantile95[i]));

  ordered_json res;
  res["slope_vs_b"] = single.fitted_slope;
  res["slope_vs_M"] = averaged.fitted_slope;
  res["event_m"] = event_m;
  res["event_threshold"] = threshold;
  res["event_rate"] = rate;
  res["csv"] = "concentration.csv";
  write_summary(cfg, res);
  return 0;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::train: return "train";
    case ExperimentKind::finetune: return "finetune";
    case ExperimentKind::lowerbound: return "lowerbound";
    case ExperimentKind::concentration: return "concentration";
    case ExperimentKind::sweep: return "sweep";
  }
  return "train";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "train") return ExperimentKind::train;
  if (name == "finetune") return ExperimentKind::finetune;
  if (name == "lowerbound") return ExperimentKind::lowerbound;
  if (name == "concentration") return ExperimentKind::concentration;
  if (name == "sweep") return ExperimentKind::sweep;
  throw ParseError("unknown experiment kind '" + name + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  bool m_given = false;

  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::optional<std::string> regime_value;
  std::size_t regime_line = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ParseError("line " + std::to_string(line_no) + ": empty key or value");
    if (!seen.insert(key).second)
      throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" +
                       key + "'");

    if (key == "kind") {
      cfg.kind = experiment_kind_from_string(value);
    } else if (key == "d") {
      cfg.sim.d = parse_count(value, key, line_no);
    } else if (key == "k") {
      cfg.sim.k = parse_count(value, key, line_no);
    } else if (key == "M") {
      cfg.sim.num_clients = parse_count(value, key, line_no);
    } else if (key == "m") {
      cfg.sim.clients_per_round = parse_count(value, key, line_no);
      m_given = true;
    } else if (key == "tau") {
      cfg.sim.tau = parse_count(value, key, line_no);
    } else if (key == "alpha") {
      cfg.sim.alpha = parse_real(value, key, line_no);
    } else if (key == "T") {
      cfg.sim.rounds = parse_count(value, key, line_no);
    } else if (key == "regime") {
      regime_value = value;
      regime_line = line_no;
    } else if (key == "batch_size") {
      cfg.sim.regime.batch_size = parse_count(value, key, line_no);
    } else if (key == "noise_sigma") {
      cfg.sim.noise_sigma = parse_real(value, key, line_no);
    } else if (key == "seed") {
      cfg.sim.seed = parse_seed(value, key, line_no);
    } else if (key == "delta0") {
      cfg.delta0 = parse_real(value, key, line_no);
    } else if (key == "c3") {
      cfg.sim.monitor_constants.c3 = parse_real(value, key, line_no);
    } else if (key == "rate_const") {
      cfg.sim.monitor_constants.rate_const = parse_real(value, key, line_no);
    } else if (key == "monitor") {
      if (value == "none")
        cfg.sim.monitor_level = MonitorLevel::none;
      else if (value == "global")
        cfg.sim.monitor_level = MonitorLevel::global;
      else if (value == "full")
        cfg.sim.monitor_level = MonitorLevel::full;
      else
        throw ParseError("line " + std::to_string(line_no) +
                         ": monitor must be none|global|full");
    } else if (key == "trials") {
      cfg.trials = parse_count(value, key, line_no);
    } else if (key == "n_values") {
      cfg.n_values = parse_count_list(value, key, line_no);
    } else if (key == "alpha_ft") {
      cfg.alpha_ft = parse_real(value, key, line_no);
    } else if (key == "tau_prime") {
      cfg.tau_prime = parse_count(value, key, line_no);
    } else if (key == "noise_sigma_ft") {
      cfg.noise_sigma_ft = parse_real(value, key, line_no);
    } else if (key == "conc_d") {
      cfg.conc_d = parse_count(value, key, line_no);
    } else if (key == "conc_d1") {
      cfg.conc_d1 = parse_count(value, key, line_no);
    } else if (key == "conc_d2") {
      cfg.conc_d2 = parse_count(value, key, line_no);
    } else if (key == "conc_b_values") {
      cfg.conc_b_values = parse_count_list(value, key, line_no);
    } else if (key == "conc_m_values") {
      cfg.conc_m_values = parse_count_list(value, key, line_no);
    } else if (key == "conc_b") {
      cfg.conc_b = parse_count(value, key, line_no);
    } else if (key == "conc_trials") {
      cfg.conc_trials = parse_count(value, key, line_no);
    } else if (key == "event_m") {
      cfg.event_m = parse_count(value, key, line_no);
    } else if (key == "event_rounds") {
      cfg.event_rounds = parse_count(value, key, line_no);
    } else if (key == "event_trials") {
      cfg.event_trials = parse_count(value, key, line_no);
    } else if (key == "event_alpha") {
      cfg.event_alpha = parse_real(value, key, line_no);
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": unknown key '" +
                       key + "'");
    }
  }

  if (regime_value.has_value()) {
    if (*regime_value == "population")
      cfg.sim.regime.kind = RegimeKind::population;
    else if (*regime_value == "finite")
      cfg.sim.regime.kind = RegimeKind::finite_sample;
    else
      throw ParseError("line " + std::to_string(regime_line) +
                       ": regime must be population|finite");
  }
  if (!m_given) cfg.sim.clients_per_round = cfg.sim.num_clients;
  cfg.sim.delta0_target = cfg.delta0;
  return cfg;
}

int run_experiment(const ExperimentConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  switch (config.kind) {
    case ExperimentKind::train: return run_train(config);
    case ExperimentKind::finetune: return run_finetune(config);
    case ExperimentKind::sweep: return run_sweep(config);
    case ExperimentKind::lowerbound: return run_lowerbound(config);
    case ExperimentKind::concentration: return run_concentration(config);
  }
  return 1;
}

}  // namespace fedsim
