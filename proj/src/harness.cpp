#include <seqmet/harness.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include <seqmet/baselines.hpp>
#include <seqmet/estimation.hpp>
#include <seqmet/fisher.hpp>
#include <seqmet/numeric.hpp>
#include <seqmet/protocol.hpp>

namespace seqmet {

namespace {

using nlohmann::json;

// ---- parameter registry ----------------------------------------------------

struct ParamDef {
  enum Kind { Num, OptNum, Int, Seed, Bool, Str, IntList, NumPair };
  const char* key;
  Kind kind;
  json def;  // null means required (except OptNum, where null is a value)
};

const std::vector<ParamDef>& param_defs(Command cmd) {
  static const std::map<Command, std::vector<ParamDef>> defs = [] {
    std::map<Command, std::vector<ParamDef>> m;
    m[Command::qfi_curve] = {
        {"N", ParamDef::IntList, json::array({1, 2, 4})},
        {"Tmax", ParamDef::Num, two_pi},
        {"steps", ParamDef::Int, 200},
    };
    m[Command::fringe_scan] = {
        {"N", ParamDef::Int, 8},
        {"sweet", ParamDef::Bool, true},
        {"steps", ParamDef::Int, 200},
        {"xmin", ParamDef::Num, -half_pi},
        {"xmax", ParamDef::Num, 0.0},
    };
    m[Command::landscape] = {
        {"N", ParamDef::Int, 8},
        {"xhat", ParamDef::Num, 0.0},
        {"xmin", ParamDef::Num, -half_pi},
        {"xmax", ParamDef::Num, half_pi},
        {"xsteps", ParamDef::Int, 65},
        {"Tmin", ParamDef::Num, pi / 16},
        {"Tmax", ParamDef::Num, 4 * pi},
        {"Tsteps", ParamDef::Int, 64},
    };
    m[Command::shot_noise] = {
        {"T", ParamDef::Num, nullptr},
    };
    m[Command::protocol] = {
        {"xhat", ParamDef::Num, 0.0},
        {"t", ParamDef::Num, half_pi},
    };
    m[Command::bounds] = {
        {"T", ParamDef::Num, nullptr},
        {"N", ParamDef::Int, 1},
        {"n", ParamDef::Int, 50},
        {"prior", ParamDef::NumPair, json::array({0.0, half_pi})},
    };
    m[Command::adaptive_sim] = {
        {"x_true", ParamDef::OptNum, nullptr},
        {"N", ParamDef::Int, 1},
        {"t", ParamDef::Num, half_pi},
        {"n", ParamDef::Int, 50},
        {"K", ParamDef::Int, 100},
        {"iterations", ParamDef::Int, 5},
        {"batch_size", ParamDef::Int, 10},
        {"prior", ParamDef::NumPair, json::array({0.0, half_pi})},
    };
    m[Command::precision_study] = {
        {"x_true", ParamDef::OptNum, 0.0},
        {"N", ParamDef::Int, 1},
        {"t", ParamDef::Num, half_pi},
        {"n", ParamDef::Int, 50},
        {"K", ParamDef::Int, 1000},
        {"iterations", ParamDef::Int, 5},
        {"batch_size", ParamDef::Int, 10},
        {"prior", ParamDef::NumPair, json::array({0.0, half_pi})},
    };
    m[Command::figure] = {
        {"name", ParamDef::Str, nullptr},
    };
    return m;
  }();
  return defs.at(cmd);
}

bool kind_matches(ParamDef::Kind kind, const json& v) {
  switch (kind) {
    case ParamDef::Num:
      return v.is_number();
    case ParamDef::OptNum:
      return v.is_null() || v.is_number();
    case ParamDef::Int:
      return v.is_number_integer();
    case ParamDef::Seed:
      return v.is_number_unsigned() ||
             (v.is_number_integer() && v.get<long long>() >= 0);
    case ParamDef::Bool:
      return v.is_boolean();
    case ParamDef::Str:
      return v.is_string();
    case ParamDef::IntList: {
      if (!v.is_array() || v.empty()) return false;
      for (const auto& e : v)
        if (!e.is_number_integer()) return false;
      return true;
    }
    case ParamDef::NumPair:
      return v.is_array() && v.size() == 2 && v[0].is_number() &&
             v[1].is_number();
  }
  return false;
}

const char* kind_label(ParamDef::Kind kind) {
  switch (kind) {
    case ParamDef::Num:
    case ParamDef::OptNum:
      return "a number";
    case ParamDef::Int:
      return "an integer";
    case ParamDef::Seed:
      return "a nonnegative integer";
    case ParamDef::Bool:
      return "a boolean";
    case ParamDef::Str:
      return "a string";
    case ParamDef::IntList:
      return "a nonempty integer array";
    case ParamDef::NumPair:
      return "a [lo, hi] number pair";
  }
  return "a value";
}

// ---- shared numeric helpers ------------------------------------------------

json json_num(double v) {
  if (std::isnan(v))
    throw std::runtime_error("numeric failure: output value is NaN");
  if (!std::isfinite(v)) return nullptr;  // JSON has no infinity
  return std::strtod(format_number(v).c_str(), nullptr);
}

std::vector<double> uniform_grid(double lo, double hi, int points,
                                 const char* what) {
  if (points < 1)
    throw std::invalid_argument(std::string(what) + ": need at least 1 point");
  if (points > 1 && !(hi > lo))
    throw std::invalid_argument(std::string(what) + ": need min < max");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = points == 1 ? lo : lo + (hi - lo) * i / double(points - 1);
  return g;
}

double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

PrecisionStats stats_about_mean(const std::vector<double>& v, long long n) {
  PrecisionStats s;
  s.K = static_cast<int>(v.size());
  s.n = n;
  double sum = 0;
  for (double e : v) sum += e;
  s.mean = sum / s.K;
  double ss = 0;
  for (double e : v) ss += (e - s.mean) * (e - s.mean);
  s.std = std::sqrt(ss / (s.K - 1));
  s.std_err = s.std / std::sqrt(2.0 * (s.K - 1));
  s.sqrt_fisher_emp = s.std > 0
                          ? 1.0 / (s.std * std::sqrt(double(n)))
                          : std::numeric_limits<double>::infinity();
  return s;
}

void put_stats(json& rec, const PrecisionStats& s) {
  rec["K"] = s.K;
  rec["n"] = s.n;
  rec["mean"] = json_num(s.mean);
  rec["std"] = json_num(s.std);
  rec["std_err"] = json_num(s.std_err);
  rec["sqrt_fisher_emp"] = json_num(s.sqrt_fisher_emp);
}

std::string render_runs_csv(const std::vector<double>& estimates) {
  std::string out = "run,estimate\n";
  for (size_t k = 0; k < estimates.size(); ++k) {
    out += std::to_string(k);
    out += ',';
    out += format_number(estimates[k]);
    out += '\n';
  }
  return out;
}

// ---- per-command payloads --------------------------------------------------

Table qfi_curve_table(const json& p) {
  const auto Ns = p.at("N").get<std::vector<int>>();
  const double Tmax = p.at("Tmax").get<double>();
  const int steps = p.at("steps").get<int>();
  if (steps < 1) throw std::invalid_argument("qfi-curve: steps must be >= 1");
  if (!(Tmax > 0)) throw std::invalid_argument("qfi-curve: Tmax must be > 0");

  Table t;
  t.columns = {"T", "N", "sqrtJ", "sqrtJ_snl", "sqrtJ_heis"};
  for (int N : Ns) {
    if (N < 1) throw std::invalid_argument("qfi-curve: N must be >= 1");
    for (int i = 1; i <= steps; ++i) {
      const double T = Tmax * i / double(steps);
      t.rows.push_back({T, double(N), std::sqrt(qfi_controlled_closed(N, T)),
                        std::sqrt(shot_noise_limit(T).qfi),
                        std::sqrt(heisenberg_qfi(T))});
    }
  }
  return t;
}

// analyzer on the fringe extremum, the pre-fixed sweet-spot readout
ProtocolConfig extremum_protocol(int blocks, double t_evolve) {
  ProtocolConfig pc = build_protocol(0.0, blocks, half_pi, 0.0, 0.0);
  pc.t = t_evolve;  // control stays matched to t = pi/2
  return pc;
}

Table fringe_scan_table(const json& p) {
  const int N = p.at("N").get<int>();
  const bool sweet = p.at("sweet").get<bool>();
  const int steps = p.at("steps").get<int>();
  const auto xs = uniform_grid(p.at("xmin").get<double>(),
                               p.at("xmax").get<double>(), steps + 1,
                               "fringe-scan");
  Table t;
  t.columns = {"x", "p_plus", "p_minus"};
  const ProtocolConfig half = extremum_protocol(N, 0.25 * pi);
  for (double x : xs) {
    double pp;
    if (sweet) {
      pp = sweet_spot_probability(x, N).first;
    } else {
      pp = model_probability(x, half);  // same control, half the block time
    }
    t.rows.push_back({x, pp, 1.0 - pp});
  }
  return t;
}

Table landscape_table(const json& p) {
  const int N = p.at("N").get<int>();
  const double xhat = p.at("xhat").get<double>();
  const auto xs =
      uniform_grid(p.at("xmin").get<double>(), p.at("xmax").get<double>(),
                   p.at("xsteps").get<int>(), "landscape x grid");
  const auto Ts =
      uniform_grid(p.at("Tmin").get<double>(), p.at("Tmax").get<double>(),
                   p.at("Tsteps").get<int>(), "landscape T grid");
  Table t;
  t.columns = {"x", "T", "N", "qfi", "cfi", "p_plus"};
  for (const FisherPoint& fp : fisher_landscape(xs, Ts, N, xhat))
    t.rows.push_back(
        {fp.x, fp.total_time, double(fp.blocks), fp.qfi, fp.cfi, fp.p_plus});
  return t;
}

json shot_noise_record(const json& p) {
  if (p.at("T").is_null())
    throw std::invalid_argument("shot-noise: missing required parameter T");
  const double T = p.at("T").get<double>();
  const ShotNoisePoint sp = shot_noise_limit(T);
  json rec;
  rec["T"] = json_num(T);
  rec["J_shot"] = json_num(sp.qfi);
  rec["N_opt"] = sp.blocks;
  rec["J_heisenberg"] = json_num(heisenberg_qfi(T));
  return rec;
}

json protocol_record(const json& p) {
  const double xhat = p.at("xhat").get<double>();
  const double t = p.at("t").get<double>();
  const WaveplateSettings w = waveplate_settings(xhat, t);
  const WaveplateCheck chk = verify_waveplate_settings(xhat, t);

  const auto angle = [](double rad) {
    json a;
    a["radians"] = json_num(rad);
    a["degrees"] = json_num(rad * 180.0 / pi);
    return a;
  };
  json rec;
  rec["xhat"] = json_num(xhat);
  rec["t"] = json_num(t);
  json angles;
  angles["hwp1"] = angle(w.hwp1);
  angles["qwp1"] = angle(w.qwp1);
  angles["qwp2"] = angle(w.qwp2);
  angles["hwp2"] = angle(w.hwp2);
  angles["qwp3"] = angle(w.qwp3);
  angles["hwp3"] = angle(w.hwp3);
  angles["qwp4"] = angle(w.qwp4);
  rec["angles"] = angles;
  json check;
  check["preparation_error"] = json_num(chk.preparation_error);
  check["control_error"] = json_num(chk.control_error);
  check["measurement_error"] = json_num(chk.measurement_error);
  rec["check"] = check;
  return rec;
}

json bounds_record(const json& p) {
  if (p.at("T").is_null())
    throw std::invalid_argument("bounds: missing required parameter T");
  const double T = p.at("T").get<double>();
  const int N = p.at("N").get<int>();
  const long long n = p.at("n").get<long long>();
  const double lo = p.at("prior")[0].get<double>();
  const double hi = p.at("prior")[1].get<double>();
  if (N < 1) throw std::invalid_argument("bounds: N must be >= 1");
  if (n < 0) throw std::invalid_argument("bounds: n must be >= 0");

  const ShotNoisePoint sp = shot_noise_limit(T);
  const PriorDistribution prior = raised_cosine_prior(lo, hi);
  const double mid = 0.5 * (lo + hi);
  const double t = T / N;
  const auto J = [&](double x) {
    return cfi_two_outcome(x, mid, t, N, 0.0).value;
  };
  json rec;
  rec["T"] = json_num(T);
  rec["N"] = N;
  rec["n"] = n;
  rec["prior"] = json::array({json_num(lo), json_num(hi)});
  rec["J_shot"] = json_num(sp.qfi);
  rec["N_opt"] = sp.blocks;
  rec["J_heisenberg"] = json_num(heisenberg_qfi(T));
  rec["F_p"] = json_num(prior_fisher_information(prior));
  rec["van_trees_bound"] = json_num(van_trees_bound(prior, n, J));
  return rec;
}

void study_common(const json& p, int* N, double* t, double* lo, double* hi) {
  *N = p.at("N").get<int>();
  *t = p.at("t").get<double>();
  *lo = p.at("prior")[0].get<double>();
  *hi = p.at("prior")[1].get<double>();
}

Emission adaptive_sim_emission(const ExperimentSpec& spec) {
  const json& p = spec.params;
  int N;
  double t, lo, hi;
  study_common(p, &N, &t, &lo, &hi);
  const int iterations = p.at("iterations").get<int>();
  const long long batch_size = p.at("batch_size").get<long long>();
  const int K = p.at("K").get<int>();
  const bool fixed_truth = !p.at("x_true").is_null();

  std::vector<double> estimates(K);
  std::vector<double> errors(K);
  for (int k = 0; k < K; ++k) {
    const std::uint64_t run_seed = derive_seed(spec.seed, k);
    double x_true;
    if (fixed_truth) {
      x_true = p.at("x_true").get<double>();
    } else {
      std::mt19937_64 eng(run_seed);
      x_true = lo + (0.1 + 0.8 * uniform01(eng)) * (hi - lo);
    }
    const EstimationRun run =
        adaptive_run(x_true, N, t, iterations, batch_size,
                     derive_seed(run_seed, 1), lo, hi);
    estimates[k] = run.final_estimate;
    errors[k] = run.final_estimate - x_true;
  }

  // fixed truth reports the spread of the estimate; drawn truth reports the
  // root mean square error, the quantity the prior bound constrains
  PrecisionStats s;
  if (fixed_truth) {
    s = stats_about_mean(estimates, iterations * batch_size);
  } else {
    s.K = K;
    s.n = iterations * batch_size;
    double sum = 0, ss = 0;
    for (double e : errors) {
      sum += e;
      ss += e * e;
    }
    s.mean = sum / K;
    s.std = std::sqrt(ss / K);
    s.std_err = s.std / std::sqrt(2.0 * (K - 1));
    s.sqrt_fisher_emp = s.std > 0
                            ? 1.0 / (s.std * std::sqrt(double(s.n)))
                            : std::numeric_limits<double>::infinity();
  }

  Emission e;
  e.tabular = false;
  e.record["x_true"] = fixed_truth ? json_num(p.at("x_true").get<double>())
                                   : json(nullptr);
  e.record["N"] = N;
  e.record["t"] = json_num(t);
  e.record["iterations"] = iterations;
  e.record["batch_size"] = batch_size;
  e.record["prior"] = json::array({json_num(lo), json_num(hi)});
  e.record["seed"] = spec.seed;
  put_stats(e.record, s);
  if (!spec.runs_path.empty()) e.runs_csv = render_runs_csv(estimates);
  return e;
}

Emission precision_study_emission(const ExperimentSpec& spec) {
  const json& p = spec.params;
  int N;
  double t, lo, hi;
  study_common(p, &N, &t, &lo, &hi);
  if (p.at("x_true").is_null())
    throw std::invalid_argument("precision-study: x_true must be a number");
  const double x_true = p.at("x_true").get<double>();
  const long long n = p.at("n").get<long long>();
  const int K = p.at("K").get<int>();

  const ProtocolBuilder ideal = [N, t](double x) {
    return build_protocol(x, N, t, 0.0, half_pi);
  };
  const PrecisionStats s =
      precision_study(x_true, ideal, n, K, spec.seed, lo, hi);

  Emission e;
  e.tabular = false;
  e.record["x_true"] = json_num(x_true);
  e.record["N"] = N;
  e.record["t"] = json_num(t);
  e.record["prior"] = json::array({json_num(lo), json_num(hi)});
  e.record["seed"] = spec.seed;
  put_stats(e.record, s);

  if (!spec.runs_path.empty()) {
    // replays the study loop: same derived seeds, same estimates
    const ProbabilityModel model = standard_model();
    const ProtocolConfig pc = ideal(x_true);
    const double prob = model(x_true, pc);
    std::vector<double> estimates(K);
    std::vector<MeasurementBatch> one(1);
    for (int k = 0; k < K; ++k) {
      one[0] = sample_batch(prob, n, derive_seed(spec.seed, k));
      one[0].protocol = pc;
      estimates[k] = mle_estimate(one, model, lo, hi).estimate;
    }
    e.runs_csv = render_runs_csv(estimates);
  }
  return e;
}

// ---- figures ----------------------------------------------------------------

Table fig3b_table(std::uint64_t seed) {
  constexpr int kSteps = 24;
  constexpr long long kShots = 50;
  constexpr int kRuns = 120;
  const PriorDistribution prior = raised_cosine_prior(0.0, half_pi);
  const double mid = 0.25 * pi;

  Table tab;
  tab.columns = {"T", "N", "delta_qcrb", "delta_van_trees", "delta_emp"};
  std::uint64_t row = 0;
  for (int N : {1, 2, 4}) {
    for (int i = 1; i <= kSteps; ++i) {
      const double T = two_pi * i / double(kSteps);
      const double t = T / N;
      const double J_q = qfi_controlled_closed(N, T);
      const double delta_qcrb =
          J_q > 0 ? 1.0 / std::sqrt(kShots * J_q)
                  : std::numeric_limits<double>::infinity();
      const auto J = [&](double x) {
        return cfi_two_outcome(x, mid, t, N, 0.0).value;
      };
      const double delta_vt = van_trees_bound(prior, kShots, J);
      const ProtocolBuilder builder = [N, t](double x) {
        return build_protocol(x, N, t, 0.0, half_pi);
      };
      const PrecisionStats s = bayes_precision_study(
          prior, builder, kShots, kRuns, derive_seed(seed, row++));
      tab.rows.push_back({T, double(N), delta_qcrb, delta_vt, s.std});
    }
  }
  return tab;
}

Table fig4a_table() {
  Table tab;
  tab.columns = {"x", "N", "p_plus", "p_minus", "p_plus_half", "p_minus_half"};
  const auto xs = uniform_grid(-half_pi, 0.0, 201, "fig4a");
  for (int N : {1, 2, 4, 8}) {
    const ProtocolConfig half = extremum_protocol(N, 0.25 * pi);
    for (double x : xs) {
      const auto sweet = sweet_spot_probability(x, N);
      const double ph = model_probability(x, half);
      tab.rows.push_back({x, double(N), sweet.first, sweet.second, ph, 1 - ph});
    }
  }
  return tab;
}

Table fig4b_table() {
  Table tab;
  tab.columns = {"x", "sqrtF_sweet", "sqrtF_half"};
  for (double x : uniform_grid(-0.25 * pi, 0.25 * pi, 201, "fig4b")) {
    tab.rows.push_back({x, std::sqrt(cfi_two_outcome(x, 0.0, half_pi, 8, 0.0).value),
                        std::sqrt(cfi_two_outcome(x, 0.0, 0.25 * pi, 8, 0.0).value)});
  }
  return tab;
}

Table surface_table(bool probability) {
  const auto xs = uniform_grid(-half_pi, half_pi, 65, "surface x grid");
  std::vector<double> Ts(64);
  for (int j = 1; j <= 64; ++j) Ts[j - 1] = 4 * pi * j / 64.0;
  Table tab;
  tab.columns = probability ? std::vector<std::string>{"x", "T", "p_plus"}
                            : std::vector<std::string>{"x", "T", "cfi"};
  for (const FisherPoint& fp : fisher_landscape(xs, Ts, 8, 0.0))
    tab.rows.push_back({fp.x, fp.total_time, probability ? fp.p_plus : fp.cfi});
  return tab;
}

Table figS5_table() {
  Table tab;
  tab.columns = {"T", "J_shot", "N_opt", "J_shot_over_T"};
  for (int i = 1; i <= 100; ++i) {
    const double T = double(i);
    const ShotNoisePoint sp = shot_noise_limit(T);
    tab.rows.push_back({T, sp.qfi, double(sp.blocks), sp.qfi / T});
  }
  return tab;
}

Table figure_table(const json& p, std::uint64_t seed) {
  if (p.at("name").is_null())
    throw std::invalid_argument("figure: missing required parameter name");
  const std::string name = p.at("name").get<std::string>();
  if (name == "fig3a") {
    json q;
    q["N"] = json::array({1, 2, 4});
    q["Tmax"] = two_pi;
    q["steps"] = 200;
    return qfi_curve_table(q);
  }
  if (name == "fig3b") return fig3b_table(seed);
  if (name == "fig4a") return fig4a_table();
  if (name == "fig4b") return fig4b_table();
  if (name == "figS2") return surface_table(/*probability=*/true);
  if (name == "figS3") return surface_table(/*probability=*/false);
  if (name == "figS5") return figS5_table();
  throw std::invalid_argument("figure: unknown name '" + name +
                              "' (expected fig3a, fig3b, fig4a, fig4b, figS2, "
                              "figS3, figS5)");
}

// ---- output plumbing ---------------------------------------------------------

void check_finite_table(const Table& t) {
  for (const auto& row : t.rows)
    for (double v : row)
      if (std::isnan(v))
        throw std::runtime_error("numeric failure: output value is NaN");
}

int write_payload(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload;
    return std::cout ? exit_ok : exit_io;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "cannot open output file: " << path << "\n";
    return exit_io;
  }
  f << payload;
  f.flush();
  if (!f) {
    std::cerr << "failed writing output file: " << path << "\n";
    return exit_io;
  }
  return exit_ok;
}

}  // namespace

const char* command_name(Command cmd) {
  switch (cmd) {
    case Command::qfi_curve:
      return "qfi-curve";
    case Command::fringe_scan:
      return "fringe-scan";
    case Command::adaptive_sim:
      return "adaptive-sim";
    case Command::precision_study:
      return "precision-study";
    case Command::landscape:
      return "landscape";
    case Command::shot_noise:
      return "shot-noise";
    case Command::protocol:
      return "protocol";
    case Command::bounds:
      return "bounds";
    case Command::figure:
      return "figure";
  }
  return "unknown";
}

nlohmann::json merge_params(Command cmd, const nlohmann::json& config,
                            const nlohmann::json& overrides) {
  const auto& defs = param_defs(cmd);
  json merged = json::object();
  for (const ParamDef& d : defs) merged[d.key] = d.def;

  const auto overlay = [&](const json& layer, const char* origin) {
    if (layer.is_null()) return;
    if (!layer.is_object())
      throw std::invalid_argument(std::string(origin) +
                                  " must be a JSON object");
    for (const auto& [key, value] : layer.items()) {
      if (key == "seed") {
        if (!kind_matches(ParamDef::Seed, value))
          throw std::invalid_argument("seed must be a nonnegative integer");
        continue;  // routed through ExperimentSpec
      }
      const ParamDef* found = nullptr;
      for (const ParamDef& d : defs)
        if (key == d.key) found = &d;
      if (found == nullptr)
        throw std::invalid_argument("unknown key '" + key + "' for command " +
                                    command_name(cmd));
      if (!kind_matches(found->kind, value))
        throw std::invalid_argument("key '" + key + "' must be " +
                                    kind_label(found->kind));
      merged[key] = value;
    }
  };
  overlay(config, "config");
  overlay(overrides, "overrides");

  for (const ParamDef& d : defs)
    if (d.kind != ParamDef::OptNum && merged[d.key].is_null())
      throw std::invalid_argument(std::string("missing required parameter '") +
                                  d.key + "' for command " +
                                  command_name(cmd));
  return merged;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string render_csv(const Table& t) {
  std::string out;
  for (size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += t.columns[c];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string render_json(const Table& t) {
  json arr = json::array();
  for (const auto& row : t.rows) {
    json o;
    for (size_t c = 0; c < row.size(); ++c) o[t.columns[c]] = json_num(row[c]);
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

Emission compute(const ExperimentSpec& spec) {
  const json& p = spec.params;
  Emission e;
  switch (spec.command) {
    case Command::qfi_curve:
      e.tabular = true;
      e.table = qfi_curve_table(p);
      break;
    case Command::fringe_scan:
      e.tabular = true;
      e.table = fringe_scan_table(p);
      break;
    case Command::landscape:
      e.tabular = true;
      e.table = landscape_table(p);
      break;
    case Command::figure:
      e.tabular = true;
      e.table = figure_table(p, spec.seed);
      break;
    case Command::shot_noise:
      e.record = shot_noise_record(p);
      break;
    case Command::protocol:
      e.record = protocol_record(p);
      break;
    case Command::bounds:
      e.record = bounds_record(p);
      break;
    case Command::adaptive_sim:
      return adaptive_sim_emission(spec);
    case Command::precision_study:
      return precision_study_emission(spec);
  }
  return e;
}

int run(const ExperimentSpec& spec) {
  try {
    ExperimentSpec full = spec;
    full.params = merge_params(spec.command, spec.params, json::object());

    const Emission e = compute(full);
    if (!spec.runs_path.empty() && e.runs_csv.empty())
      throw std::invalid_argument(
          "per-run output is only available for adaptive-sim and "
          "precision-study");

    std::string payload;
    if (e.tabular) {
      check_finite_table(e.table);
      payload = spec.format == OutputFormat::json ? render_json(e.table)
                                                  : render_csv(e.table);
    } else {
      if (spec.format == OutputFormat::csv)
        throw std::invalid_argument(
            std::string(command_name(spec.command)) +
            " emits a JSON record; csv is not supported");
      payload = e.record.dump(2) + "\n";
    }

    const int code = write_payload(spec.output_path, payload);
    if (code != exit_ok) return code;
    if (!spec.runs_path.empty()) {
      const int rc = write_payload(spec.runs_path, e.runs_csv);
      if (rc != exit_ok) return rc;
    }
    return exit_ok;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "validation error: " << ex.what() << "\n";
    return exit_validation;
  } catch (const nlohmann::json::exception& ex) {
    std::cerr << "validation error: " << ex.what() << "\n";
    return exit_validation;
  } catch (const std::exception& ex) {
    std::cerr << "numeric failure: " << ex.what() << "\n";
    return exit_numeric;
  }
}

namespace {

struct BoundOption {
  ParamDef def{};
  CLI::Option* opt = nullptr;
  double num = 0;
  long long inum = 0;
  std::uint64_t seed = 0;
  bool flag = false;
  std::string str;
  std::vector<long long> ilist;
  std::vector<double> nlist;
};

struct SubcommandState {
  Command cmd{};
  CLI::App* sub = nullptr;
  std::vector<std::unique_ptr<BoundOption>> options;
  std::string config_path;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string out_path;
  std::string runs_path;
  std::string format = "auto";
};

json collect_overrides(const SubcommandState& st) {
  json overrides = json::object();
  for (const auto& b : st.options) {
    if (b->opt == nullptr || b->opt->count() == 0) continue;
    switch (b->def.kind) {
      case ParamDef::Num:
      case ParamDef::OptNum:
        overrides[b->def.key] = b->num;
        break;
      case ParamDef::Int:
        overrides[b->def.key] = b->inum;
        break;
      case ParamDef::Seed:
        overrides[b->def.key] = b->seed;
        break;
      case ParamDef::Bool:
        overrides[b->def.key] = b->flag;
        break;
      case ParamDef::Str:
        overrides[b->def.key] = b->str;
        break;
      case ParamDef::IntList:
        overrides[b->def.key] = b->ilist;
        break;
      case ParamDef::NumPair:
        overrides[b->def.key] = b->nlist;
        break;
    }
  }
  return overrides;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"sequential qubit estimation toolkit"};
  app.require_subcommand(1);

  std::vector<std::unique_ptr<SubcommandState>> states;
  const std::pair<Command, const char*> commands[] = {
      {Command::qfi_curve, "scan of the controlled-scheme information bound"},
      {Command::fringe_scan, "sweet-spot outcome fringes over the parameter"},
      {Command::adaptive_sim, "sequential estimation with analyzer updates"},
      {Command::precision_study, "repeated fixed-protocol estimation runs"},
      {Command::landscape, "information surface over parameter and time"},
      {Command::shot_noise, "independent-repetition precision envelope"},
      {Command::protocol, "waveplate mount angles for a working point"},
      {Command::bounds, "precision limits including the prior bound"},
      {Command::figure, "prebuilt dataset emission by figure name"},
  };

  for (const auto& [cmd, help] : commands) {
    auto st = std::make_unique<SubcommandState>();
    st->cmd = cmd;
    st->sub = app.add_subcommand(command_name(cmd), help);

    for (const ParamDef& d : param_defs(cmd)) {
      auto b = std::make_unique<BoundOption>();
      b->def = d;
      const std::string flag = std::string("--") + d.key;
      switch (d.kind) {
        case ParamDef::Num:
        case ParamDef::OptNum:
          b->opt = st->sub->add_option(flag, b->num);
          break;
        case ParamDef::Int:
          b->opt = st->sub->add_option(flag, b->inum);
          break;
        case ParamDef::Seed:
          b->opt = st->sub->add_option(flag, b->seed);
          break;
        case ParamDef::Bool:
          b->opt = st->sub->add_option(flag, b->flag);
          break;
        case ParamDef::Str:
          b->opt = st->sub->add_option(
              cmd == Command::figure && std::string(d.key) == "name"
                  ? "name,--name"
                  : flag,
              b->str);
          break;
        case ParamDef::IntList:
          b->opt = st->sub->add_option(flag, b->ilist)->delimiter(',');
          break;
        case ParamDef::NumPair:
          b->opt =
              st->sub->add_option(flag, b->nlist)->delimiter(',')->expected(2);
          break;
      }
      st->options.push_back(std::move(b));
    }

    st->sub->add_option("--config", st->config_path,
                        "JSON config file; flags override its keys");
    st->seed_opt = st->sub->add_option("--seed", st->seed, "RNG seed");
    st->sub->add_option("--out", st->out_path,
                        "output file (stdout when omitted)");
    st->sub
        ->add_option("--format", st->format,
                     "csv or json (default depends on the command)")
        ->check(CLI::IsMember({"csv", "json"}));
    if (cmd == Command::adaptive_sim || cmd == Command::precision_study)
      st->sub->add_option("--runs-out", st->runs_path,
                          "per-run CSV of the estimates");
    states.push_back(std::move(st));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_validation;
  }

  const SubcommandState* active = nullptr;
  for (const auto& st : states)
    if (st->sub->parsed()) active = st.get();
  if (active == nullptr) return exit_validation;

  json config = json::object();
  if (!active->config_path.empty()) {
    std::ifstream f(active->config_path);
    if (!f) {
      std::cerr << "cannot read config file: " << active->config_path << "\n";
      return exit_io;
    }
    try {
      f >> config;
    } catch (const json::parse_error& ex) {
      std::cerr << "validation error: config is not valid JSON: " << ex.what()
                << "\n";
      return exit_validation;
    }
  }

  ExperimentSpec spec;
  spec.command = active->cmd;
  try {
    spec.params = merge_params(active->cmd, config, collect_overrides(*active));
  } catch (const std::invalid_argument& ex) {
    std::cerr << "validation error: " << ex.what() << "\n";
    return exit_validation;
  }

  if (active->seed_opt->count() > 0) {
    spec.seed = active->seed;
  } else if (config.contains("seed")) {
    spec.seed = config["seed"].get<std::uint64_t>();
  }
  spec.output_path = active->out_path;
  spec.runs_path = active->runs_path;
  if (active->format == "csv") spec.format = OutputFormat::csv;
  if (active->format == "json") spec.format = OutputFormat::json;

  return run(spec);
}

}  // namespace seqmet
