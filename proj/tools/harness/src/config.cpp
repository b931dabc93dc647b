#include "lpdo_harness/config.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <CLI11.hpp>

#include "lpdo_harness/csv.hpp"

namespace lpdo::harness {

namespace {

template <class E>
struct Names {
  E value;
  const char* name;
};

constexpr Names<Experiment> kExperiments[] = {
    {Experiment::gen, "gen"},       {Experiment::prune, "prune"}, {Experiment::riemann, "riemann"},
    {Experiment::inject, "inject"}, {Experiment::fit, "fit"},     {Experiment::verify, "verify"}};
constexpr Names<StateKind> kStates[] = {
    {StateKind::optimal, "optimal"}, {StateKind::pure, "pure"}, {StateKind::subopt, "subopt"}};
constexpr Names<CutoffMode> kModes[] = {{CutoffMode::relative_value, "relative_value"},
                                        {CutoffMode::truncated_weight, "truncated_weight"}};
constexpr Names<GradientMode> kGradients[] = {{GradientMode::analytic, "analytic"},
                                              {GradientMode::finite_difference, "finite_difference"}};

template <class E, std::size_t M>
std::string name_of(const Names<E> (&table)[M], E v) {
  for (const auto& n : table)
    if (n.value == v) return n.name;
  return "?";
}

template <class E, std::size_t M>
E parse_name(const Names<E> (&table)[M], const std::string& text, const char* what) {
  for (const auto& n : table)
    if (text == n.name) return n.value;
  throw UsageError(std::string("unknown ") + what + " '" + text + "'");
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

// String mirror of the config that CLI11 binds to; enums are converted
// after parsing so errors carry our own messages.
struct Raw {
  std::string experiment, kind, cutoff_mode, gradient;
  std::vector<std::string> objective;
};

void bind(CLI::App& app, ExperimentConfig& c, Raw& raw) {
  app.add_option("--experiment", raw.experiment, "gen|prune|riemann|inject|fit|verify");
  app.add_option("--kind", raw.kind, "state for gen: optimal|pure|subopt");
  app.add_option("--n,--N", c.n, "number of sites");
  app.add_option("--chi-max,--chi_max", c.chi_max, "bond cap of the random pure state");
  app.add_option("--lambda", c.lambda, "cutoff grid")->delimiter(',');
  app.add_option("--sweeps,--n_sweeps,--n-sweeps", c.n_sweeps, "sweeps per cell");
  app.add_option("--objective", raw.objective, "s_sr and/or s_vn")->delimiter(',');
  app.add_option("--n-iter,--n_iter", c.optimizer.n_iter, "optimizer iterations per bond");
  app.add_option("--gradient", raw.gradient, "analytic|finite_difference");
  app.add_option("--fd-step,--fd_step", c.optimizer.fd_step, "finite-difference step");
  app.add_option("--grad-tol,--grad_tol", c.optimizer.grad_tol, "stationarity tolerance");
  app.add_option("--initial-step,--initial_step", c.optimizer.initial_step, "line-search start");
  app.add_option("--shrink", c.optimizer.shrink, "backtracking factor");
  app.add_option("--armijo", c.optimizer.armijo, "sufficient-decrease constant");
  app.add_option("--max-backtracks,--max_backtracks", c.optimizer.max_backtracks);
  app.add_option("--bb-step,--bb_step", c.optimizer.bb_step, "Barzilai-Borwein first trial");
  app.add_option("--restarts,--random_restarts", c.optimizer.random_restarts,
                 "extra random starts per bond");
  app.add_option("--gamma-d,--gamma_d", c.gamma_d, "dephasing rate");
  app.add_option("--gamma-b,--gamma_b", c.gamma_b, "bitflip rate");
  app.add_option("--seed", c.seed, "base seed");
  app.add_option("--cutoff-mode,--cutoff_mode", raw.cutoff_mode,
                 "relative_value|truncated_weight");
  app.add_option("--bidirectional", c.bidirectional, "add a right-to-left pass");
  app.add_option("--stall-lambda,--stall_lambda", c.stall_lambda, "riemann pre-stall cutoff");
  app.add_option("--stall-sweeps,--stall_sweeps", c.stall_sweeps,
                 "max riemann pre-stall sweeps (0: none)");
  app.add_option("--u,--unitary", c.unitary,
                 "inject: identity|hadamard|cnot|swap|random1|random2");
  app.add_option("--site", c.site, "inject: first site of the unitary");
  app.add_option("--input,-i", c.input, "input bundle (verify: first)");
  app.add_option("--input-b,--input_b", c.input_b, "verify: second bundle");
  app.add_option("--output,-o", c.output, "bundle dir (gen) or CSV path");
  app.add_option("--csv", c.csv, "fit: input CSV");
  app.add_option("--x-col,--x_col", c.x_col, "fit: x column");
  app.add_option("--y-col,--y_col", c.y_col, "fit: y column");
  app.add_option("--where", c.where, "fit: row filter column=value");
  app.add_option("--threads", c.threads, "worker cap (0: LPDO_THREADS or hardware)");
}

void apply_raw(ExperimentConfig& c, const Raw& raw) {
  if (!raw.experiment.empty()) c.experiment = parse_experiment(raw.experiment);
  if (!raw.kind.empty()) c.kind = parse_state_kind(raw.kind);
  if (!raw.cutoff_mode.empty()) c.cutoff_mode = parse_cutoff_mode(raw.cutoff_mode);
  if (!raw.gradient.empty())
    c.optimizer.gradient = parse_name(kGradients, raw.gradient, "gradient mode");
  if (!raw.objective.empty()) {
    c.objective.clear();
    for (const auto& o : raw.objective) {
      try {
        c.objective.push_back(parse_objective(o));
      } catch (const PreconditionError& e) {
        throw UsageError(e.what());
      }
    }
  }
}

}  // namespace

std::string to_string(Experiment e) { return name_of(kExperiments, e); }
std::string to_string(StateKind k) { return name_of(kStates, k); }
std::string to_string(CutoffMode m) { return name_of(kModes, m); }
Experiment parse_experiment(const std::string& t) { return parse_name(kExperiments, t, "experiment"); }
StateKind parse_state_kind(const std::string& t) { return parse_name(kStates, t, "state kind"); }
CutoffMode parse_cutoff_mode(const std::string& t) {
  if (t == "relative") return CutoffMode::relative_value;
  if (t == "weight") return CutoffMode::truncated_weight;
  return parse_name(kModes, t, "cutoff mode");
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw UsageError(m); };
  if (n < 1 || n > 100000) fail("n must lie in [1, 100000]");
  if (chi_max < 1) fail("chi_max must be >= 1");
  if (lambda.empty()) fail("lambda grid is empty");
  for (double l : lambda)
    if (!(l >= 0.0 && l < 1.0)) fail("lambda values must lie in [0, 1)");
  if (n_sweeps < 0) fail("n_sweeps must be >= 0");
  if (objective.empty()) fail("objective list is empty");
  if (!(gamma_d >= 0.0 && gamma_d <= 1.0)) fail("gamma_d must lie in [0, 1]");
  if (!(gamma_b >= 0.0 && gamma_b <= 1.0)) fail("gamma_b must lie in [0, 1]");
  if (!(stall_lambda >= 0.0 && stall_lambda < 1.0)) fail("stall_lambda must lie in [0, 1)");
  if (stall_sweeps < 0) fail("stall_sweeps must be >= 0");
  if (site < 0) fail("site must be >= 0");
  if (threads < 0) fail("threads must be >= 0");
  try {
    optimizer.validate();
  } catch (const PreconditionError& e) {
    fail(e.what());
  }
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  const auto& a = optimizer;
  const auto& b = o.optimizer;
  const bool opt_eq = a.n_iter == b.n_iter && a.gradient == b.gradient &&
                      a.fd_step == b.fd_step && a.grad_tol == b.grad_tol &&
                      a.initial_step == b.initial_step && a.shrink == b.shrink &&
                      a.armijo == b.armijo &&
                      a.max_backtracks == b.max_backtracks && a.bb_step == b.bb_step &&
                      a.random_restarts == b.random_restarts;
  return opt_eq && experiment == o.experiment && kind == o.kind && n == o.n &&
         chi_max == o.chi_max && lambda == o.lambda && n_sweeps == o.n_sweeps &&
         objective == o.objective && gamma_d == o.gamma_d && gamma_b == o.gamma_b &&
         seed == o.seed && cutoff_mode == o.cutoff_mode && bidirectional == o.bidirectional &&
         stall_lambda == o.stall_lambda && stall_sweeps == o.stall_sweeps &&
         unitary == o.unitary && site == o.site && input == o.input && input_b == o.input_b &&
         output == o.output && csv == o.csv && x_col == o.x_col && y_col == o.y_col &&
         where == o.where && threads == o.threads;
}

std::string to_config_text(const ExperimentConfig& c) {
  std::ostringstream os;
  auto list = [](const auto& xs, auto fmt) {
    std::string s = "[";
    for (std::size_t j = 0; j < xs.size(); ++j) s += (j ? ", " : "") + fmt(xs[j]);
    return s + "]";
  };
  os << "experiment = " << quoted(to_string(c.experiment)) << '\n'
     << "kind = " << quoted(to_string(c.kind)) << '\n'
     << "n = " << c.n << '\n'
     << "chi_max = " << c.chi_max << '\n'
     << "lambda = " << list(c.lambda, format_double) << '\n'
     << "n_sweeps = " << c.n_sweeps << '\n'
     << "objective = "
     << list(c.objective, [](ObjectiveKind k) { return quoted(lpdo::to_string(k)); }) << '\n'
     << "n_iter = " << c.optimizer.n_iter << '\n'
     << "gradient = " << quoted(name_of(kGradients, c.optimizer.gradient)) << '\n'
     << "fd_step = " << format_double(c.optimizer.fd_step) << '\n'
     << "grad_tol = " << format_double(c.optimizer.grad_tol) << '\n'
     << "initial_step = " << format_double(c.optimizer.initial_step) << '\n'
     << "shrink = " << format_double(c.optimizer.shrink) << '\n'
     << "armijo = " << format_double(c.optimizer.armijo) << '\n'
     << "max_backtracks = " << c.optimizer.max_backtracks << '\n'
     << "bb_step = " << (c.optimizer.bb_step ? "true" : "false") << '\n'
     << "random_restarts = " << c.optimizer.random_restarts << '\n'
     << "gamma_d = " << format_double(c.gamma_d) << '\n'
     << "gamma_b = " << format_double(c.gamma_b) << '\n'
     << "seed = " << c.seed << '\n'
     << "cutoff_mode = " << quoted(to_string(c.cutoff_mode)) << '\n'
     << "bidirectional = " << (c.bidirectional ? "true" : "false") << '\n'
     << "stall_lambda = " << format_double(c.stall_lambda) << '\n'
     << "stall_sweeps = " << c.stall_sweeps << '\n'
     << "unitary = " << quoted(c.unitary) << '\n'
     << "site = " << c.site << '\n'
     << "input = " << quoted(c.input) << '\n'
     << "input_b = " << quoted(c.input_b) << '\n'
     << "output = " << quoted(c.output) << '\n'
     << "csv = " << quoted(c.csv) << '\n'
     << "x_col = " << quoted(c.x_col) << '\n'
     << "y_col = " << quoted(c.y_col) << '\n'
     << "where = " << quoted(c.where) << '\n'
     << "threads = " << c.threads << '\n';
  return os.str();
}

ParsedCommandLine parse_command_line(int argc, const char* const* argv, std::ostream& out,
                                     std::ostream& err) {
  ParsedCommandLine parsed;
  Raw raw;
  CLI::App app{"LPDO maximally mixed state pruning harness", "lpdo"};
  app.set_config("--config", "", "config file (flags override it)");
  bind(app, parsed.config, raw);
  const char* names[] = {"gen", "prune", "riemann", "inject", "fit", "verify"};
  const char* help[] = {"write an LPDO bundle",
                        "truncation schedule over a cutoff grid (CSV)",
                        "Riemannian pruning sweeps (CSV)",
                        "closed-form disentangler demo",
                        "exponential fit of a CSV column",
                        "compare two bundles"};
  std::vector<CLI::App*> subs;
  for (int j = 0; j < 6; ++j) subs.push_back(app.add_subcommand(names[j], help[j])->fallthrough());
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    parsed.exit_code = app.exit(e, out, err);
    return parsed;
  } catch (const CLI::CallForAllHelp& e) {
    parsed.exit_code = app.exit(e, out, err);
    return parsed;
  } catch (const CLI::FileError& e) {
    throw IoError(e.what());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  apply_raw(parsed.config, raw);
  for (int j = 0; j < 6; ++j)
    if (subs[j]->parsed()) parsed.config.experiment = parse_experiment(names[j]);
  if (subs.end() == std::find_if(subs.begin(), subs.end(), [](auto* s) { return s->parsed(); }) &&
      raw.experiment.empty())
    throw UsageError("no command given (gen|prune|riemann|inject|fit|verify)");
  parsed.config.validate();
  return parsed;
}

ExperimentConfig load_config(const std::string& path) {
  const std::string flag = "--config";
  const char* argv[] = {"lpdo", flag.c_str(), path.c_str()};
  std::ostringstream sink;
  auto parsed = parse_command_line(3, argv, sink, sink);
  return parsed.config;
}

}  // namespace lpdo::harness
