#include "markovdyn/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "markovdyn/dilation.hpp"
#include "markovdyn/interaction.hpp"
#include "markovdyn/io.hpp"
#include "markovdyn/markov_kernel.hpp"
#include "markovdyn/randomness.hpp"
#include "markovdyn/rng.hpp"
#include "markovdyn/sde.hpp"
#include "markovdyn/semigroup.hpp"
#include "markovdyn/version.hpp"

namespace markovdyn::cli {

namespace {

using nlohmann::json;

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string out_path;
  int threads = 0;  // 0: resolve from MARKOVDYN_THREADS, default 1
  bool no_timestamp = false;
  double tol = 1e-9;
};

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MARKOVDYN_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json base_report(const std::string& command, const GlobalOptions& g) {
  json rep;
  rep["command"] = command;
  rep["inputs"] = json::object();
  rep["outputs"] = json::object();
  rep["status"] = "ok";
  rep["provenance"] = {{"seed", g.seed}, {"version", std::string(kVersion)}};
  if (!g.no_timestamp) rep["provenance"]["timestamp"] = utc_timestamp();
  return rep;
}

void write_output(const std::string& text, const GlobalOptions& g, std::ostream& out) {
  const std::string terminated = text.empty() || text.back() != '\n' ? text + "\n" : text;
  if (g.out_path.empty()) {
    out << terminated;
  } else {
    write_text_file(g.out_path, terminated);
  }
}

int emit_json(const json& rep, const GlobalOptions& g, std::ostream& out, int code) {
  write_output(rep.dump(2), g, out);
  return code;
}

int status_code(std::string_view status) {
  if (status == "pass" || status == "ok") return kExitPass;
  if (status == "inconclusive") return kExitInconclusive;
  return kExitFail;
}

// State argument: a 0-based index or a label.
int parse_state(const StateSpace& space, const std::string& text) {
  const int by_label = space.index_of(text);
  if (by_label >= 0) return by_label;
  try {
    std::size_t used = 0;
    const int idx = std::stoi(text, &used);
    if (used == text.size() && idx >= 0 && idx < space.size()) return idx;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("state \"" + text + "\" is neither a label nor a valid index");
}

std::vector<double> parse_state_vector(const std::string& text, int dim) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    throw std::invalid_argument("--x must be a number or a JSON array, got \"" + text + "\"");
  }
  std::vector<double> x;
  if (j.is_number()) {
    x.push_back(j.get<double>());
  } else if (j.is_array()) {
    for (const auto& v : j) x.push_back(v.get<double>());
  } else {
    throw std::invalid_argument("--x must be a number or a JSON array");
  }
  if (static_cast<int>(x.size()) != dim) {
    throw std::invalid_argument("--x has dimension " + std::to_string(x.size()) +
                                ", the model expects " + std::to_string(dim));
  }
  return x;
}

json measure_to_json(const FiniteMeasure& p) { return to_json(p); }

// ---------------------------------------------------------------------------
// Semigroup oracles for the registry models, where closed forms exist.
// ---------------------------------------------------------------------------

std::optional<double> semigroup_oracle(const SdeSpec& spec, const TestObservable& obs,
                                       std::span<const double> x, double t) {
  if (spec.dim_state != 1) return std::nullopt;
  if (spec.model == "ou") {
    const double lambda = spec.params.at("lambda").is_array()
                              ? spec.params.at("lambda").at(0).get<double>()
                              : spec.params.at("lambda").get<double>();
    const auto& sj = spec.params.at("sigma");
    const double sigma = sj.is_array() ? (sj.at(0).is_array() ? sj.at(0).at(0).get<double>()
                                                              : sj.at(0).get<double>())
                                       : sj.get<double>();
    if (obs.name == "x") return x[0] * std::exp(-lambda * t);
    if (obs.name == "x2") {
      return x[0] * x[0] * std::exp(-2.0 * lambda * t) +
             sigma * sigma * (1.0 - std::exp(-2.0 * lambda * t)) / (2.0 * lambda);
    }
  }
  if (spec.model == "gbm-1d") {
    const double a = spec.params.at("a").get<double>();
    const double b = spec.params.at("b").get<double>();
    if (obs.name == "x") return x[0] * std::exp(a * t);
    if (obs.name == "x2") return x[0] * x[0] * std::exp((2.0 * a + b * b) * t);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Subcommand argument bags.
// ---------------------------------------------------------------------------

struct KernelArgs {
  std::string kernel_path;
  std::string system_path;
  std::string x0_text;
  std::string x_text;
  std::uint64_t cap = kDefaultEnvCap;
  int m = 1;
  int n = 1;
  std::string mode = "exact";
  std::uint64_t samples = 100000;
};

struct SdeArgs {
  std::string model = "ou";
  std::string params_text = "{}";
  std::string x_text = "0.0";
  double t = 1.0;
  double dt = 0.001;
  int steps = 0;  // 0: derive from t/dt
  std::string check;
  int split = -1;
  std::string obs = "x";
  std::string obs_params_text = "{}";
  std::uint64_t samples = 10000;
  double s = 0.5;
  std::uint64_t inner = 10;
  std::uint64_t direct = 0;
  std::vector<double> horizons;
  bool allow_explosions = false;
};

// ---------------------------------------------------------------------------
// Handlers.
// ---------------------------------------------------------------------------

int run_reduce(const KernelArgs& a, const GlobalOptions& g, std::ostream& out) {
  const ProductDynamicalSystem sys = load_system(a.system_path, g.tol);
  const MarkovKernel k = reduce(sys);
  json rep = base_report("reduce", g);
  rep["inputs"]["system"] = a.system_path;
  rep["outputs"]["kernel"] = to_json(k);
  if (g.format == "csv") {
    std::ostringstream csv;
    kernel_to_csv(csv, k);
    write_output(csv.str(), g, out);
    return kExitPass;
  }
  return emit_json(rep, g, out, kExitPass);
}

int run_dilate(const KernelArgs& a, bool invertible, const GlobalOptions& g, std::ostream& out) {
  const MarkovKernel k = load_kernel(a.kernel_path, g.tol);
  json rep = base_report(invertible ? "dilate-invertible" : "dilate", g);
  rep["inputs"]["kernel"] = a.kernel_path;
  rep["inputs"]["cap"] = a.cap;

  ProductDynamicalSystem sys = [&] {
    if (!invertible) return dilate(k, a.cap);
    const int x0 = parse_state(k.space(), a.x0_text);
    rep["inputs"]["x0"] = k.space().label(x0);
    return dilate_invertible(k, x0, a.cap);
  }();

  rep["outputs"]["system"] = to_json(sys);
  rep["outputs"]["env_size"] = sys.env_points();
  // Round trip is guaranteed; recorded so reports are self-checking.
  const MarkovKernel back = reduce(sys);
  double max_diff = 0.0;
  for (int i = 0; i < k.size(); ++i) {
    for (int j = 0; j < k.size(); ++j) max_diff = std::max(max_diff, std::abs(k(i, j) - back(i, j)));
  }
  rep["outputs"]["round_trip_max_error"] = max_diff;
  rep["status"] = max_diff <= 1e-12 ? "pass" : "fail";
  return emit_json(rep, g, out, status_code(rep["status"].get<std::string>()));
}

int run_iterate_system(const KernelArgs& a, const GlobalOptions& g, std::ostream& out) {
  const ProductDynamicalSystem sys = load_system(a.system_path, g.tol);
  if (a.m < 1) throw std::invalid_argument("--m must be >= 1");
  const ProductDynamicalSystem iterated = iterate(sys, a.m);
  json rep = base_report("iterate", g);
  rep["inputs"]["system"] = a.system_path;
  rep["inputs"]["m"] = a.m;
  rep["outputs"]["system"] = to_json(iterated);
  rep["outputs"]["kernel"] = to_json(reduce(iterated));
  return emit_json(rep, g, out, kExitPass);
}

int run_iterate_chain(const KernelArgs& a, const GlobalOptions& g, std::ostream& out) {
  const MarkovKernel k = load_kernel(a.kernel_path, g.tol);
  const int x = parse_state(k.space(), a.x_text);
  if (a.n < 1) throw std::invalid_argument("--n must be >= 1");
  const InteractionChain chain = chain_of(k, a.n, a.cap);
  const MarkovKernel ref = power(k, a.n);

  json rep = base_report("iterate", g);
  rep["inputs"]["kernel"] = a.kernel_path;
  rep["inputs"]["x"] = k.space().label(x);
  rep["inputs"]["n"] = a.n;
  rep["inputs"]["mode"] = a.mode;
  const auto ref_row = ref.row(x);
  rep["outputs"]["reference_power_row"] = std::vector<double>(ref_row.begin(), ref_row.end());

  if (a.mode == "exact") {
    const FiniteMeasure dist = reduce_n_exact(chain, x, a.n);
    rep["outputs"]["distribution"] = measure_to_json(dist);
    double max_diff = 0.0;
    for (int j = 0; j < k.size(); ++j) max_diff = std::max(max_diff, std::abs(dist[j] - ref(x, j)));
    rep["outputs"]["max_error_vs_power"] = max_diff;
    rep["status"] = max_diff <= 1e-12 ? "pass" : "fail";
  } else if (a.mode == "mc") {
    const MonteCarloDistribution mc =
        reduce_n_monte_carlo(chain, x, a.n, a.samples, g.seed, resolve_threads(g.threads));
    rep["inputs"]["samples"] = a.samples;
    rep["outputs"]["distribution"] = measure_to_json(mc.distribution);
    rep["outputs"]["std_error"] = mc.std_error;
    bool within = true;
    for (int j = 0; j < k.size(); ++j) {
      if (std::abs(mc.distribution[j] - ref(x, j)) > 4.0 * mc.std_error[static_cast<std::size_t>(j)] + 1e-12) {
        within = false;
      }
    }
    rep["outputs"]["within_4_sigma_of_power"] = within;
    rep["status"] = within ? "pass" : "fail";
  } else {
    throw std::invalid_argument("--mode must be exact or mc");
  }
  return emit_json(rep, g, out, status_code(rep["status"].get<std::string>()));
}

int run_defect(const KernelArgs& a, const GlobalOptions& g, std::ostream& out) {
  const MarkovKernel k = load_kernel(a.kernel_path, g.tol);
  const DefectReport report = homomorphism_defect(k);
  json rep = base_report("defect", g);
  rep["inputs"]["kernel"] = a.kernel_path;
  rep["outputs"]["defect"] = report.defect;
  rep["outputs"]["witness_f"] =
      std::vector<double>(report.witness_f.values().begin(), report.witness_f.values().end());
  rep["outputs"]["witness_x"] = k.space().label(report.witness_x);
  rep["outputs"]["deterministic"] = report.defect <= g.tol;
  return emit_json(rep, g, out, kExitPass);
}

int run_classify(const KernelArgs& a, const GlobalOptions& g, std::ostream& out) {
  const MarkovKernel k = load_kernel(a.kernel_path, g.tol);
  json rep = base_report("classify", g);
  rep["inputs"]["kernel"] = a.kernel_path;
  rep["outputs"]["label"] = std::string(to_string(classify(k, g.tol)));
  return emit_json(rep, g, out, kExitPass);
}

int run_invertible(const KernelArgs& a, const GlobalOptions& g, std::ostream& out) {
  const MarkovKernel k = load_kernel(a.kernel_path, g.tol);
  const MarkovInvertibility inv = is_markov_invertible(k, g.tol);
  json rep = base_report("invertible", g);
  rep["inputs"]["kernel"] = a.kernel_path;
  rep["outputs"]["invertible"] = inv.invertible;
  rep["outputs"]["matrix_invertible"] = inv.matrix_invertible;
  if (inv.matrix_invertible) {
    const int n = k.size();
    json rows = json::array();
    for (int i = 0; i < n; ++i) {
      std::vector<double> row(inv.matrix_inverse.begin() + static_cast<std::ptrdiff_t>(i) * n,
                              inv.matrix_inverse.begin() + static_cast<std::ptrdiff_t>(i + 1) * n);
      rows.push_back(row);
    }
    rep["outputs"]["matrix_inverse"] = rows;
  }
  if (inv.inverse) rep["outputs"]["inverse_kernel"] = to_json(*inv.inverse);
  return emit_json(rep, g, out, kExitPass);
}

// One trajectory dump.
int run_sde_flow(const SdeArgs& a, const GlobalOptions& g, std::ostream& out) {
  const SdeSpec spec = make_sde(a.model, json::parse(a.params_text));
  const std::vector<double> x = parse_state_vector(a.x_text, spec.dim_state);
  int steps = a.steps;
  if (steps <= 0) {
    const double ratio = a.t / a.dt;
    steps = static_cast<int>(std::llround(ratio));
    if (steps < 1 || std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) {
      throw std::invalid_argument("--t must be a positive multiple of --dt");
    }
  }
  const NoisePath w = sample_path(spec.dim_noise, a.dt, steps, g.seed);
  const FlowResult flow = euler_flow(spec, x, w, steps);

  if (g.format == "csv") {
    std::ostringstream csv;
    csv.precision(17);
    csv << "time";
    for (int i = 0; i < spec.dim_state; ++i) csv << ",x" << i;
    csv << "\n";
    for (std::size_t k = 0; k < flow.times.size(); ++k) {
      csv << flow.times[k];
      const auto st = flow.state(static_cast<int>(k));
      for (int i = 0; i < spec.dim_state; ++i) csv << "," << st[i];
      csv << "\n";
    }
    write_output(csv.str(), g, out);
    return kExitPass;
  }

  json rep = base_report("sde-flow", g);
  rep["inputs"] = {{"model", a.model}, {"params", spec.params}, {"x", x},
                   {"t", a.t},         {"dt", a.dt},            {"steps", steps}};
  rep["outputs"]["times"] = flow.times;
  json states = json::array();
  for (std::size_t k = 0; k < flow.times.size(); ++k) {
    const auto st = flow.state(static_cast<int>(k));
    states.push_back(std::vector<double>(st.begin(), st.end()));
  }
  rep["outputs"]["states"] = states;
  rep["outputs"]["terminal"] = flow.terminal();
  return emit_json(rep, g, out, kExitPass);
}

int run_sde_check(const SdeArgs& a, const GlobalOptions& g, std::ostream& out,
                  const char* command = "sde-check") {
  const SdeSpec spec = make_sde(a.model, json::parse(a.params_text));
  const std::vector<double> x = parse_state_vector(a.x_text, spec.dim_state);
  EstimatorOptions opts;
  opts.threads = resolve_threads(g.threads);
  opts.allow_explosions = a.allow_explosions;

  json rep = base_report(command, g);
  rep["inputs"] = {{"model", a.model}, {"params", spec.params}, {"x", x},  {"t", a.t},
                   {"dt", a.dt},       {"check", a.check},      {"obs", a.obs}};

  if (a.check == "cocycle") {
    const double ratio = a.t / a.dt;
    const int steps = static_cast<int>(std::llround(ratio));
    if (steps < 2 || std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) {
      throw std::invalid_argument("--t must cover at least two --dt steps");
    }
    const int split = a.split >= 0 ? a.split : steps / 2;
    if (split > steps) throw std::invalid_argument("--split exceeds the step count");
    const NoisePath w = sample_path(spec.dim_noise, a.dt, steps, g.seed);
    const CocycleReport rc = cocycle_check(spec, x, w, split, steps - split);
    rep["inputs"]["split"] = split;
    rep["outputs"] = {{"bitwise_equal", rc.bitwise_equal},
                      {"max_abs_diff", rc.max_abs_diff},
                      {"shift_composition_ok", rc.shift_composition_ok},
                      {"unsplit_terminal", rc.unsplit_terminal},
                      {"split_terminal", rc.split_terminal}};
    rep["status"] = rc.bitwise_equal && rc.shift_composition_ok ? "pass" : "fail";
  } else if (a.check == "semigroup") {
    const TestObservable obs = make_observable(a.obs, json::parse(a.obs_params_text), spec.dim_state);
    const SemigroupEstimate est =
        estimate_semigroup(spec, obs, x, a.t, a.dt, a.samples, g.seed, opts);
    rep["inputs"]["samples"] = a.samples;
    rep["outputs"] = {{"estimate", est.estimate},
                      {"std_error", est.std_error},
                      {"samples", est.samples},
                      {"explosions", est.explosions}};
    if (const auto oracle = semigroup_oracle(spec, obs, x, a.t)) {
      const double band = 4.0 * est.std_error + 5.0 * a.dt;
      rep["outputs"]["oracle"] = *oracle;
      rep["outputs"]["band"] = band;
      rep["status"] = std::abs(est.estimate - *oracle) <= band ? "pass" : "fail";
    }
  } else if (a.check == "generator") {
    const TestObservable obs = make_observable(a.obs, json::parse(a.obs_params_text), spec.dim_state);
    std::vector<double> horizons = a.horizons;
    if (horizons.empty()) horizons = {0.2, 0.1, 0.05};
    const GeneratorConsistencyReport rc =
        generator_consistency_check(spec, obs, x, a.dt, a.samples, g.seed, horizons, opts);
    rep["inputs"]["samples"] = a.samples;
    rep["inputs"]["horizons"] = horizons;
    rep["outputs"] = {{"quotients", rc.quotients},
                      {"std_errors", rc.std_errors},
                      {"generator_value", rc.generator_value},
                      {"fitted_slope", rc.fitted_slope},
                      {"final_gap", rc.final_gap},
                      {"band", rc.tolerance_band}};
    if (!rc.note.empty()) rep["outputs"]["note"] = rc.note;
    rep["status"] = std::string(to_string(rc.status));
  } else if (a.check == "chapman") {
    const TestObservable obs = make_observable(a.obs, json::parse(a.obs_params_text), spec.dim_state);
    const ChapmanKolmogorovReport rc = chapman_kolmogorov_check(
        spec, obs, x, a.s, a.t, a.dt, a.samples, a.inner, a.direct, g.seed, opts);
    rep["inputs"]["s"] = a.s;
    rep["inputs"]["outer_samples"] = a.samples;
    rep["inputs"]["inner_samples"] = a.inner;
    rep["outputs"] = {{"nested", {{"estimate", rc.nested.estimate}, {"std_error", rc.nested.std_error}}},
                      {"direct", {{"estimate", rc.direct.estimate}, {"std_error", rc.direct.std_error}}},
                      {"difference", rc.difference},
                      {"band", rc.tolerance_band}};
    rep["status"] = std::string(to_string(rc.status));
  } else {
    throw std::invalid_argument("--check must be cocycle, semigroup, generator or chapman");
  }
  return emit_json(rep, g, out, status_code(rep["status"].get<std::string>()));
}

int run_sde_semigroup(const SdeArgs& a, const GlobalOptions& g, std::ostream& out) {
  SdeArgs args = a;
  args.check = "semigroup";
  return run_sde_check(args, g, out, "sde-semigroup");
}

void add_sde_options(CLI::App* sub, SdeArgs& a) {
  sub->add_option("--model", a.model, "registry model: ou, linear, gbm-1d, double-well-1d");
  sub->add_option("--params", a.params_text, "model parameters as a JSON object");
  sub->add_option("--x", a.x_text, "initial state (number or JSON array)");
  sub->add_option("--t", a.t, "time horizon");
  sub->add_option("--dt", a.dt, "grid step");
  sub->add_option("--steps", a.steps, "step count (overrides --t)");
  sub->add_option("--obs", a.obs, "observable: x, x2, exp-re, exp-im, box");
  sub->add_option("--obs-params", a.obs_params_text, "observable parameters (JSON)");
  sub->add_option("--samples", a.samples, "Monte-Carlo sample count");
  sub->add_option("--split", a.split, "cocycle split step (default: half)");
  sub->add_option("--s", a.s, "second horizon for the chapman check");
  sub->add_option("--inner", a.inner, "inner paths per outer endpoint (chapman)");
  sub->add_option("--direct", a.direct, "direct-estimator paths (chapman; 0 = outer*inner)");
  sub->add_option("--horizons", a.horizons, "difference-quotient horizons (generator)");
  sub->add_flag("--allow-explosions", a.allow_explosions,
                "exclude exploded paths instead of aborting");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Markov chains as reduced dynamical systems: dilation, repeated interactions, "
               "randomness diagnostics and stochastic-flow checks"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "master seed (default 0)")->capture_default_str();
  app.add_option("--format", g.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", g.out_path, "write the report to this file instead of stdout");
  app.add_option("--threads", g.threads, "worker cap (default: MARKOVDYN_THREADS or 1)");
  app.add_option("--tol", g.tol, "validation tolerance for external inputs");
  app.add_flag("--no-timestamp", g.no_timestamp, "omit the timestamp for byte-stable reports");

  KernelArgs ka;
  SdeArgs sa;

  CLI::App* reduce_cmd = app.add_subcommand("reduce", "average a product system to its kernel");
  reduce_cmd->add_option("--system", ka.system_path, "product system JSON")->required();

  CLI::App* dilate_cmd = app.add_subcommand("dilate", "canonical function-space dilation");
  dilate_cmd->add_option("--kernel", ka.kernel_path, "kernel JSON or CSV")->required();
  dilate_cmd->add_option("--cap", ka.cap, "environment size cap");

  CLI::App* dinv_cmd = app.add_subcommand("dilate-invertible", "invertible dilation");
  dinv_cmd->add_option("--kernel", ka.kernel_path, "kernel JSON or CSV")->required();
  dinv_cmd->add_option("--x0", ka.x0_text, "anchor state (label or index)")->required();
  dinv_cmd->add_option("--cap", ka.cap, "environment size cap");

  CLI::App* iterate_cmd =
      app.add_subcommand("iterate", "iterate a product system, or run the interaction chain");
  iterate_cmd->add_option("--system", ka.system_path, "product system JSON (system mode)");
  iterate_cmd->add_option("--m", ka.m, "iteration count (system mode)");
  iterate_cmd->add_option("--kernel", ka.kernel_path, "kernel JSON or CSV (chain mode)");
  iterate_cmd->add_option("--x", ka.x_text, "start state (chain mode)");
  iterate_cmd->add_option("--n", ka.n, "number of interactions (chain mode)");
  iterate_cmd->add_option("--mode", ka.mode, "exact or mc")
      ->check(CLI::IsMember({"exact", "mc"}));
  iterate_cmd->add_option("--samples", ka.samples, "Monte-Carlo samples (mc mode)");
  iterate_cmd->add_option("--cap", ka.cap, "environment size cap");

  CLI::App* defect_cmd = app.add_subcommand("defect", "homomorphism defect with witness");
  defect_cmd->add_option("--kernel", ka.kernel_path, "kernel JSON or CSV")->required();

  CLI::App* classify_cmd = app.add_subcommand("classify", "deterministic/random classification");
  classify_cmd->add_option("--kernel", ka.kernel_path, "kernel JSON or CSV")->required();

  CLI::App* inv_cmd = app.add_subcommand("invertible", "Markov-category invertibility test");
  inv_cmd->add_option("--kernel", ka.kernel_path, "kernel JSON or CSV")->required();

  CLI::App* flow_cmd = app.add_subcommand("sde-flow", "simulate one Euler path (or run a check)");
  add_sde_options(flow_cmd, sa);
  flow_cmd->add_option("--check", sa.check, "cocycle, semigroup, generator or chapman");

  CLI::App* semi_cmd = app.add_subcommand("sde-semigroup", "Monte-Carlo semigroup estimate");
  add_sde_options(semi_cmd, sa);

  CLI::App* check_cmd = app.add_subcommand("sde-check", "stochastic-flow checks");
  add_sde_options(check_cmd, sa);
  check_cmd->add_option("--check", sa.check, "cocycle, semigroup, generator or chapman")
      ->required();

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help() << "\n";
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (reduce_cmd->parsed()) return run_reduce(ka, g, out);
    if (dilate_cmd->parsed()) return run_dilate(ka, false, g, out);
    if (dinv_cmd->parsed()) return run_dilate(ka, true, g, out);
    if (iterate_cmd->parsed()) {
      const bool has_system = !ka.system_path.empty();
      const bool has_kernel = !ka.kernel_path.empty();
      if (has_system == has_kernel) {
        throw std::invalid_argument("iterate needs exactly one of --system or --kernel");
      }
      return has_system ? run_iterate_system(ka, g, out) : run_iterate_chain(ka, g, out);
    }
    if (defect_cmd->parsed()) return run_defect(ka, g, out);
    if (classify_cmd->parsed()) return run_classify(ka, g, out);
    if (inv_cmd->parsed()) return run_invertible(ka, g, out);
    if (flow_cmd->parsed()) {
      return sa.check.empty() ? run_sde_flow(sa, g, out) : run_sde_check(sa, g, out, "sde-flow");
    }
    if (semi_cmd->parsed()) return run_sde_semigroup(sa, g, out);
    if (check_cmd->parsed()) return run_sde_check(sa, g, out);
    err << "error: no subcommand\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  }
}

}  // namespace markovdyn::cli
