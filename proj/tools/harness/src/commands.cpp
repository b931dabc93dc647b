#include "lpdo_harness/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include "lpdo/bundle.hpp"
#include "lpdo/channel.hpp"
#include "lpdo/dense_oracle.hpp"
#include "lpdo/injectivity.hpp"
#include "lpdo/measures.hpp"
#include "lpdo/prune.hpp"
#include "lpdo/riemann.hpp"
#include "lpdo_harness/csv.hpp"
#include "lpdo_harness/fit.hpp"
#include "lpdo_harness/pool.hpp"

namespace lpdo::harness {

const std::vector<std::string> kPruneColumns{
    "run_id", "N",     "chi_max",    "lambda",           "sweep",
    "chi_mean", "chi_max_bond", "fidelity_vs_initial", "trace_dev", "wall_ms"};

const std::vector<std::string> kRiemannColumns = [] {
  auto c = kPruneColumns;
  for (const char* extra : {"objective_kind", "objective_before", "objective_after", "optimizer_iters"})
    c.emplace_back(extra);
  return c;
}();

const std::vector<std::string> kFitColumns{"alpha",       "beta",        "gamma",
                                           "sigma_alpha", "sigma_beta",  "sigma_gamma",
                                           "residual_norm", "converged"};

namespace {

// Budgets every CSV row must meet.
constexpr double kPruneFidelityTol = 1e-8;
constexpr double kPruneTraceTol = 1e-10;
constexpr double kRiemannFidelityTol = 1e-4;
constexpr double kRiemannTraceTol = 1e-8;
constexpr double kExactTol = 1e-10;

std::string join(const std::vector<std::int64_t>& xs) {
  std::string s;
  for (std::size_t j = 0; j < xs.size(); ++j) s += (j ? " " : "") + std::to_string(xs[j]);
  return s;
}

LpdoChain load_input(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string(what) + " bundle path is required (--input)");
  return load_bundle(path);
}

// CSV target: a file when --output is set, else `fallback`.
class CsvTarget {
 public:
  CsvTarget(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      os_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::trunc);
      if (!*file_) throw IoError("cannot write " + path);
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

CsvRow base_row(std::size_t run_id, const LpdoChain& input, double lambda,
                const SweepStats& s) {
  return {std::to_string(run_id),
          std::to_string(input.size()),
          std::to_string(input.chi_max()),
          format_double(lambda),
          std::to_string(s.sweep_index),
          format_double(s.chi_mean),
          std::to_string(s.chi_max),
          format_double(s.fidelity_vs_initial),
          format_double(s.trace_deviation),
          format_double(std::round(s.wall_ms * 1000.0) / 1000.0)};
}

Matrix unitary_from_name(const std::string& name, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  if (name == "identity") return Matrix::Identity(4, 4);
  if (name == "hadamard") {
    Matrix h(2, 2);
    h << 1.0, 1.0, 1.0, -1.0;
    return h / std::sqrt(2.0);
  }
  if (name == "cnot" || name == "swap") {
    Matrix u = Matrix::Zero(4, 4);
    u(0, 0) = u(3, 3) = 1.0;
    if (name == "cnot") {
      u(1, 1) = u(2, 3) = u(3, 2) = 1.0;
      u(3, 3) = 0.0;
    } else {
      u(1, 2) = u(2, 1) = 1.0;
    }
    return u;
  }
  if (name == "random1") return random_unitary(2, rng);
  if (name == "random2") return random_unitary(4, rng);
  throw UsageError("unknown unitary '" + name +
                   "' (identity|hadamard|cnot|swap|random1|random2)");
}

}  // namespace

int cmd_gen(const ExperimentConfig& c, std::ostream& out) {
  if (c.output.empty()) throw UsageError("gen: output bundle path is required (--output)");
  const auto n = static_cast<std::size_t>(c.n);
  LpdoChain chain;
  switch (c.kind) {
    case StateKind::optimal: chain = build_optimal_lpmm(n); break;
    case StateKind::pure: chain = build_random_pure(n, c.chi_max, c.seed); break;
    case StateKind::subopt:
      chain = depolarize_to_lpmm(build_random_pure(n, c.chi_max, c.seed), c.gamma_d, c.gamma_b);
      break;
  }
  try {
    save_bundle(chain, c.output);
  } catch (const BundleError& e) {
    throw IoError(e.what());
  }
  out << "kind: " << to_string(c.kind) << '\n'
      << "chi: " << join(chain.bond_dims()) << '\n'
      << "kappa: " << join(chain.kraus_dims()) << '\n'
      << "trace: " << format_double(trace(chain)) << '\n';
  if (c.kind == StateKind::subopt)
    out << "F_P vs optimal: "
        << format_double(fidelity_p(chain, build_optimal_lpmm(n)).fidelity) << '\n';
  return kExitPass;
}

int cmd_prune(const ExperimentConfig& c, std::ostream& out) {
  const LpdoChain input = load_input(c.input, "prune");
  CsvTarget target(c.output, out);
  CsvWriter writer(target.stream(), kPruneColumns);
  OrderedSink sink(writer);
  SweepOptions opts;
  opts.cutoff_mode = c.cutoff_mode;
  opts.bidirectional = c.bidirectional;
  std::atomic<bool> violated{false};
  run_cells(c.lambda.size(), worker_count(c.lambda.size(), c.threads), [&](std::size_t cell) {
    const double lambda = c.lambda[cell];
    const auto sched = run_truncation_schedule(input, lambda, c.n_sweeps, opts);
    std::vector<CsvRow> rows;
    for (std::size_t k = 0; k < sched.series.size(); ++k) {
      const auto& s = sched.series[k];
      if (!(std::abs(s.fidelity_vs_initial - 1.0) <= kPruneFidelityTol) ||
          !(s.trace_deviation <= kPruneTraceTol))
        violated = true;
      if (k > 0 && s.chi_mean > sched.series[k - 1].chi_mean) violated = true;
      rows.push_back(base_row(cell, input, lambda, s));
    }
    sink.submit(cell, std::move(rows));
  });
  return violated ? kExitInvariant : kExitPass;
}

int cmd_riemann(const ExperimentConfig& c, std::ostream& out) {
  LpdoChain input = load_input(c.input, "riemann");
  SweepOptions opts;
  opts.cutoff_mode = c.cutoff_mode;
  opts.bidirectional = c.bidirectional;
  if (c.stall_sweeps > 0) {
    // Plain truncation until chi_mean stops moving.
    SweepOptions plain = opts;
    plain.measure_fidelity = false;
    for (int k = 0; k < c.stall_sweeps; ++k) {
      const double before = input.chi_mean();
      input = sweep_truncate(input, c.stall_lambda, nullptr, k + 1, plain).chain;
      if (input.chi_mean() == before) break;
    }
  }
  CsvTarget target(c.output, out);
  CsvWriter writer(target.stream(), kRiemannColumns);
  OrderedSink sink(writer);
  const std::size_t n_cells = c.objective.size() * c.lambda.size();
  std::atomic<bool> violated{false};
  run_cells(n_cells, worker_count(n_cells, c.threads), [&](std::size_t cell) {
    const ObjectiveKind kind = c.objective[cell / c.lambda.size()];
    const double lambda = c.lambda[cell % c.lambda.size()];
    OptimizerConfig oc = c.optimizer;
    oc.objective = kind;
    oc.seed = c.seed ^ static_cast<std::uint64_t>(cell);
    const auto res = riemann_sweep(input, lambda, oc, c.n_sweeps, opts);
    std::vector<CsvRow> rows;
    for (const auto& s : res.series) {
      if (!(std::abs(s.fidelity_vs_initial - 1.0) <= kRiemannFidelityTol) ||
          !(s.trace_deviation <= kRiemannTraceTol) || !s.monotone ||
          s.objective_after > s.objective_before + 1e-12)
        violated = true;
      CsvRow row = base_row(cell, input, lambda, s);
      row.push_back(lpdo::to_string(kind));
      row.push_back(format_double(s.objective_before));
      row.push_back(format_double(s.objective_after));
      row.push_back(std::to_string(s.optimizer_iters));
      rows.push_back(std::move(row));
    }
    sink.submit(cell, std::move(rows));
  });
  return violated ? kExitInvariant : kExitPass;
}

int cmd_inject(const ExperimentConfig& c, std::ostream& out) {
  const Matrix u = unitary_from_name(c.unitary, c.seed);
  const std::size_t m = u.rows() == 2 ? 1 : 2;
  if (static_cast<std::size_t>(c.n) < m) throw UsageError("inject: N is smaller than the unitary");
  if (static_cast<std::size_t>(c.site) + m > static_cast<std::size_t>(c.n))
    throw UsageError("inject: unitary does not fit at --site");
  const LpdoChain chain =
      c.input.empty() ? build_optimal_lpmm(static_cast<std::size_t>(c.n)) : load_bundle(c.input);
  const double lambda = c.lambda.front();
  const auto run = prune_via_injectivity(chain, u, static_cast<std::size_t>(c.site), lambda);
  const bool back_to_one =
      std::all_of(run.chi_final.begin(), run.chi_final.end(), [](auto x) { return x == 1; });
  const bool pass = back_to_one && run.witness.residual <= kExactTol &&
                    std::abs(run.fidelity - 1.0) <= kExactTol;
  out << "unitary: " << c.unitary << " at site " << c.site << '\n'
      << "chi initial: " << join(run.chi_initial) << '\n'
      << "chi after U: " << join(run.chi_after_unitary) << '\n'
      << "chi after V^dagger: " << join(run.chi_final) << '\n'
      << "witness residual: " << format_double(run.witness.residual) << '\n'
      << "F_P: " << format_double(run.fidelity) << '\n'
      << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitPass : kExitInvariant;
}

int cmd_fit(const ExperimentConfig& c, std::ostream& out) {
  if (c.csv.empty()) throw UsageError("fit: input CSV is required (--csv)");
  CsvTable table = read_csv(c.csv);
  if (!c.where.empty()) {
    const auto eq = c.where.find('=');
    if (eq == std::string::npos) throw UsageError("fit: --where expects column=value");
    double value = 0.0;
    try {
      value = std::stod(c.where.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("fit: --where value is not numeric");
    }
    table = table.filtered(c.where.substr(0, eq), value);
  }
  const auto x = table.numeric_column(c.x_col);
  const auto y = table.numeric_column(c.y_col);
  const FitResult f = fit_exponential(x, y);
  CsvTarget target(c.output, out);
  CsvWriter writer(target.stream(), kFitColumns);
  writer.write({format_double(f.alpha), format_double(f.beta), format_double(f.gamma),
                format_double(f.sigma_alpha), format_double(f.sigma_beta),
                format_double(f.sigma_gamma), format_double(f.residual_norm),
                f.converged ? "1" : "0"});
  return f.converged ? kExitPass : kExitInvariant;
}

int cmd_verify(const ExperimentConfig& c, std::ostream& out) {
  const LpdoChain a = load_input(c.input, "verify");
  if (c.input_b.empty()) throw UsageError("verify: second bundle path is required (--input-b)");
  const LpdoChain b = load_bundle(c.input_b);
  if (a.size() != b.size()) throw DimensionError("verify: bundles differ in length");
  const auto f = fidelity_p(a, b);
  const double tr_a = trace(a), tr_b = trace(b);
  bool pass = std::abs(tr_a - 1.0) <= kExactTol && std::abs(tr_b - 1.0) <= kExactTol &&
              std::abs(f.fidelity - 1.0) <= kExactTol;
  out << "transfer: F_P " << format_double(f.fidelity) << " |Tr a - 1| "
      << format_double(std::abs(tr_a - 1.0)) << " |Tr b - 1| "
      << format_double(std::abs(tr_b - 1.0)) << " purity a " << format_double(f.purity_f)
      << " purity b " << format_double(f.purity_i) << '\n';
  if (a.size() <= oracle::kMaxQubits) {
    const auto m = oracle::dense_measures(oracle::lpdo_to_dense(a), oracle::lpdo_to_dense(b));
    const double dev = std::max({std::abs(m.fidelity - f.fidelity),
                                 std::abs(m.trace_a - tr_a), std::abs(m.trace_b - tr_b),
                                 std::abs(m.purity_a - f.purity_f),
                                 std::abs(m.purity_b - f.purity_i)});
    pass = pass && dev <= kExactTol;
    out << "oracle: F_P " << format_double(m.fidelity) << " |Tr a - 1| "
        << format_double(std::abs(m.trace_a - 1.0)) << " |Tr b - 1| "
        << format_double(std::abs(m.trace_b - 1.0)) << " purity a "
        << format_double(m.purity_a) << " purity b " << format_double(m.purity_b)
        << " max deviation from transfer " << format_double(dev) << '\n';
  }
  out << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitPass : kExitInvariant;
}

int dispatch(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    switch (config.experiment) {
      case Experiment::gen: return cmd_gen(config, out);
      case Experiment::prune: return cmd_prune(config, out);
      case Experiment::riemann: return cmd_riemann(config, out);
      case Experiment::inject: return cmd_inject(config, out);
      case Experiment::fit: return cmd_fit(config, out);
      case Experiment::verify: return cmd_verify(config, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const BundleError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FitError& e) {
    err << "fit error: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const DimensionError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ParsedCommandLine parsed;
  try {
    parsed = parse_command_line(argc, argv, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun 'lpdo --help' for the flag list\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  if (parsed.exit_code) return *parsed.exit_code;
  return dispatch(parsed.config, out, err);
}

}  // namespace lpdo::harness
