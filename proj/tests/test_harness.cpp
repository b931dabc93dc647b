#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lpdo/bundle.hpp"
#include "lpdo/channel.hpp"
#include "lpdo/measures.hpp"
#include "lpdo_harness/commands.hpp"
#include "lpdo_harness/config.hpp"
#include "lpdo_harness/csv.hpp"
#include "lpdo_harness/fit.hpp"
#include "lpdo_harness/pool.hpp"

using namespace lpdo;
using namespace lpdo::harness;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lpdo");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("lpdo_harness_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

// Drops the trailing wall_ms column (and anything after it) from prune rows.
std::string without_wall(const std::string& csv) {
  std::string out;
  for (const auto& l : lines(csv)) {
    auto cells = std::vector<std::string>{};
    std::stringstream ss(l);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    for (std::size_t j = 0; j < cells.size(); ++j)
      if (j != 9) out += cells[j] + ";";
    out += "\n";
  }
  return out;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("config text round trip") {
    ExperimentConfig c;
    c.experiment = Experiment::riemann;
    c.kind = StateKind::pure;
    c.n = 12;
    c.chi_max = 16;
    c.lambda = {0.05, 0.1, 1.0 / 3.0};
    c.n_sweeps = 7;
    c.objective = {ObjectiveKind::s_vn, ObjectiveKind::s_sr};
    c.optimizer.n_iter = 33;
    c.optimizer.fd_step = 1.234e-7;
    c.optimizer.gradient = GradientMode::finite_difference;
    c.optimizer.bb_step = false;
    c.gamma_d = 0.25;
    c.seed = 0xdeadbeefULL;
    c.cutoff_mode = CutoffMode::truncated_weight;
    c.bidirectional = true;
    c.stall_sweeps = 4;
    c.unitary = "random2";
    c.site = 2;
    c.input = "in dir";
    c.output = "out.csv";
    c.where = "lambda=0.3";
    c.threads = 3;
    const auto dir = scratch("config");
    std::ofstream(dir / "run.toml") << to_config_text(c);
    const auto back = load_config((dir / "run.toml").string());
    CHECK(back == c);
    CHECK(to_config_text(back) == to_config_text(c));
    CHECK(load_config((dir / "run.toml").string()).lambda[2] == 1.0 / 3.0);
  }

  TEST_CASE("flags override the config file") {
    const auto dir = scratch("override");
    std::ofstream(dir / "run.toml") << "n = 5\nchi_max = 3\nlambda = [0.2, 0.4]\n";
    const std::string path = (dir / "run.toml").string();
    const char* argv[] = {"lpdo", "prune", "--config", path.c_str(), "--n", "7"};
    std::ostringstream sink;
    const auto parsed = parse_command_line(6, argv, sink, sink);
    CHECK(parsed.config.experiment == Experiment::prune);
    CHECK(parsed.config.n == 7);
    CHECK(parsed.config.chi_max == 3);
    CHECK(parsed.config.lambda == std::vector<double>{0.2, 0.4});
  }

  TEST_CASE("usage errors") {
    CHECK(cli({"prune", "--lambda", "1.5"}).code == kExitUsage);
    CHECK(cli({"riemann", "--objective", "renyi"}).code == kExitUsage);
    CHECK(cli({"prune", "--n-iter", "0"}).code == kExitUsage);
    CHECK(cli({"riemann", "--gradient", "autodiff"}).code == kExitUsage);
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"gen"}).code == kExitUsage);
    CHECK(cli({"prune", "--config", "/nonexistent/run.toml"}).code == kExitIo);
    CHECK(cli({"--help"}).code == 0);
    const auto e = cli({"inject", "--u", "toffoli"});
    CHECK(e.code == kExitUsage);
    CHECK(e.err.find("toffoli") != std::string::npos);
  }

  TEST_CASE("exponential fit") {
    std::vector<double> x, y;
    for (int i = 0; i < 20; ++i) {
      x.push_back(i);
      y.push_back(1.0 + 5.0 * std::exp(-0.4 * i));
    }
    const auto exact = fit_exponential(x, y);
    CHECK(exact.converged);
    CHECK(std::abs(exact.alpha - 1.0) < 1e-9);
    CHECK(std::abs(exact.beta - 5.0) < 1e-9);
    CHECK(std::abs(exact.gamma - 0.4) < 1e-9);
    CHECK(exact.sigma_alpha >= 0.0);

    std::mt19937_64 rng(11);
    std::normal_distribution<double> noise(0.0, 1e-3);
    auto yn = y;
    for (auto& v : yn) v += noise(rng);
    const auto noisy = fit_exponential(x, yn);
    CHECK(noisy.converged);
    CHECK(std::abs(noisy.alpha - 1.0) < 1e-2);
    CHECK(std::abs(noisy.beta - 5.0) < 1e-2);
    CHECK(std::abs(noisy.gamma - 0.4) < 1e-2);
    CHECK(noisy.sigma_alpha > 0.0);
    CHECK(noisy.sigma_beta > 0.0);
    CHECK(noisy.sigma_gamma > 0.0);
    CHECK(std::isfinite(noisy.residual_norm));

    // gamma = 0: y = alpha + beta is constant
    CHECK_THROWS_AS(fit_exponential(x, std::vector<double>(20, 6.0)), FitError);
    CHECK_THROWS_AS(fit_exponential({0, 1, 2}, {3, 2, 1}), FitError);

    // A decreasing series with a rising start still fits.
    const auto up = fit_exponential(x, [&] {
      std::vector<double> z;
      for (double xi : x) z.push_back(2.0 - 3.0 * std::exp(-0.7 * xi));
      return z;
    }());
    CHECK(std::abs(up.gamma - 0.7) < 1e-9);
  }

  TEST_CASE("csv helpers") {
    std::ostringstream os;
    {
      CsvWriter w(os, {"a", "b"});
      OrderedSink sink(w);
      sink.submit(2, {{"2", "x"}});
      sink.submit(0, {{"0", "x"}, {"0", "y"}});
      sink.submit(1, {});
      CHECK_THROWS(w.write({"too", "many", "cells"}));
    }
    CHECK(os.str() == "a,b\n0,x\n0,y\n2,x\n");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(std::nan("")) == "nan");

    const auto dir = scratch("csv");
    std::ofstream(dir / "t.csv") << "x,y\n1,2\n3,4\n";
    const auto t = read_csv((dir / "t.csv").string());
    CHECK(t.numeric_column("y") == std::vector<double>{2, 4});
    CHECK(t.filtered("x", 3).rows.size() == 1);
    try {
      t.column_index("zeta");
      FAIL("expected an error");
    } catch (const UsageError& e) {
      CHECK(std::string(e.what()).find("zeta") != std::string::npos);
    }
    CHECK_THROWS_AS(read_csv((dir / "missing.csv").string()), IoError);
  }

  TEST_CASE("worker pool") {
    CHECK(worker_count(3, 8) == 3);
    CHECK(worker_count(10, 2) == 2);
    CHECK(worker_count(0, 0) == 1);
    ::setenv("LPDO_THREADS", "2", 1);
    CHECK(worker_count(10) == 2);
    ::setenv("LPDO_THREADS", "junk", 1);
    CHECK(worker_count(10) >= 1);
    ::unsetenv("LPDO_THREADS");

    std::vector<int> hits(50, 0);
    run_cells(50, 4, [&](std::size_t c) { hits[c] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS_WITH(run_cells(10, 3,
                                [](std::size_t c) {
                                  if (c == 4 || c == 7) throw std::runtime_error(std::to_string(c));
                                }),
                      "4");
  }

  TEST_CASE("gen") {
    const auto dir = scratch("gen");
    const auto opt = cli({"gen", "--kind", "optimal", "--n", "10", "-o", (dir / "opt").string()});
    CHECK(opt.code == 0);
    const auto o = load_bundle(dir / "opt");
    CHECK(o.bond_dims() == std::vector<std::int64_t>(9, 1));
    CHECK(o.kraus_dims() == std::vector<std::int64_t>(10, 2));

    const std::vector<std::string> sub{"gen", "--kind", "subopt", "--n", "20",
                                       "--chi-max", "16", "--seed", "3"};
    auto a = sub, b = sub;
    a.insert(a.end(), {"-o", (dir / "a").string()});
    b.insert(b.end(), {"-o", (dir / "b").string()});
    CHECK(cli(a).code == 0);
    CHECK(cli(b).code == 0);
    CHECK(slurp(dir / "a" / "sites.bin") == slurp(dir / "b" / "sites.bin"));
    CHECK(slurp(dir / "a" / "manifest.json") == slurp(dir / "b" / "manifest.json"));
    const auto s = load_bundle(dir / "a");
    CHECK(s.bond_dims() == build_random_pure(20, 16, 3).bond_dims());
    CHECK(std::abs(fidelity_p(s, build_optimal_lpmm(20)).fidelity - 1.0) < 1e-10);

    CHECK(cli({"gen", "--kind", "optimal", "-o", "/proc/forbidden/x"}).code == kExitIo);
  }

  TEST_CASE("prune CSV") {
    const auto dir = scratch("prune");
    REQUIRE(cli({"gen", "--n", "8", "--chi-max", "8", "--seed", "2", "-o", (dir / "s").string()})
                .code == 0);
    const auto none = cli({"prune", "-i", (dir / "s").string(), "--sweeps", "0"});
    CHECK(none.code == 0);
    CHECK(none.out == "run_id,N,chi_max,lambda,sweep,chi_mean,chi_max_bond,fidelity_vs_initial,"
                      "trace_dev,wall_ms\n");

    const std::vector<std::string> grid{"prune", "-i", (dir / "s").string(), "--lambda",
                                        "0.05,0.1,0.2,0.3,0.4,0.5", "--sweeps", "4"};
    auto serial = grid, parallel = grid;
    serial.insert(serial.end(), {"--threads", "1"});
    parallel.insert(parallel.end(), {"--threads", "4", "-o", (dir / "p.csv").string()});
    const auto s = cli(serial);
    CHECK(s.code == 0);
    CHECK(cli(parallel).code == 0);
    const auto rows = lines(s.out);
    REQUIRE(rows.size() == 1 + 6 * 4);
    CHECK(rows[1].rfind("0,8,8,0.050000000000000003,1,", 0) == 0);
    CHECK(rows[24].rfind("5,8,8,0.5,4,", 0) == 0);
    CHECK(without_wall(s.out) == without_wall(slurp(dir / "p.csv")));

    const auto table = read_csv((dir / "p.csv").string());
    for (double f : table.numeric_column("fidelity_vs_initial")) CHECK(std::abs(f - 1.0) <= 1e-8);

    CHECK(cli({"prune", "-i", (dir / "absent").string()}).code == kExitIo);
    // A pure state loses fidelity under truncation: budget violation.
    REQUIRE(cli({"gen", "--kind", "pure", "--n", "8", "-o", (dir / "pure").string()}).code == 0);
    CHECK(cli({"prune", "-i", (dir / "pure").string(), "--lambda", "0.3", "--sweeps", "1"}).code ==
          kExitInvariant);
  }

  TEST_CASE("riemann CSV") {
    const auto dir = scratch("riemann");
    REQUIRE(cli({"gen", "--n", "6", "--chi-max", "4", "--seed", "1", "-o", (dir / "s").string()})
                .code == 0);
    const auto r = cli({"riemann", "-i", (dir / "s").string(), "--stall-sweeps", "5",
                        "--lambda", "0.1", "--objective", "s_sr,s_vn", "--sweeps", "2",
                        "--n-iter", "1"});
    CHECK(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].find("objective_kind,objective_before,objective_after,optimizer_iters") !=
          std::string::npos);
    CHECK(rows[1].find(",s_sr,") != std::string::npos);
    CHECK(rows[4].find(",s_vn,") != std::string::npos);
    const auto again = cli({"riemann", "-i", (dir / "s").string(), "--stall-sweeps", "5",
                            "--lambda", "0.1", "--objective", "s_sr,s_vn", "--sweeps", "2",
                            "--n-iter", "1", "--threads", "2"});
    CHECK(without_wall(again.out) == without_wall(r.out));
  }

  TEST_CASE("inject") {
    const auto cn = cli({"inject", "--n", "4", "--u", "cnot", "--lambda", "1e-8"});
    CHECK(cn.code == 0);
    CHECK(cn.out.find("chi after U: 2 1 1") != std::string::npos);
    CHECK(cn.out.find("chi after V^dagger: 1 1 1") != std::string::npos);
    const auto rnd = cli({"inject", "--n", "4", "--u", "random2", "--seed", "5", "--site", "1"});
    CHECK(rnd.code == 0);
    CHECK(rnd.out.find("chi after V^dagger: 1 1 1") != std::string::npos);
    const auto id = cli({"inject", "--n", "4", "--u", "identity"});
    CHECK(id.code == 0);
    CHECK(id.out.find("chi after U: 1 1 1") != std::string::npos);
    CHECK(cli({"inject", "--n", "4", "--u", "cnot", "--site", "3"}).code == kExitUsage);
  }

  TEST_CASE("verify") {
    const auto dir = scratch("verify");
    const auto d = [&](const char* n) { return (dir / n).string(); };
    REQUIRE(cli({"gen", "--kind", "optimal", "--n", "6", "-o", d("opt")}).code == 0);
    REQUIRE(cli({"gen", "--kind", "subopt", "--n", "6", "--chi-max", "4", "-o", d("sub")}).code == 0);
    REQUIRE(cli({"gen", "--kind", "optimal", "--n", "1", "-o", d("mm1")}).code == 0);
    save_bundle(build_random_pure(1, 1, 4), dir / "pure1");

    const auto same = cli({"verify", "-i", d("opt"), "--input-b", d("sub")});
    CHECK(same.code == 0);
    CHECK(same.out.find("PASS") != std::string::npos);
    CHECK(cli({"verify", "-i", d("sub"), "--input-b", d("sub")}).code == 0);

    const auto half = cli({"verify", "-i", d("pure1"), "--input-b", d("mm1")});
    CHECK(half.code == kExitInvariant);
    const auto at = half.out.find("F_P ");
    REQUIRE(at != std::string::npos);
    CHECK(std::abs(std::stod(half.out.substr(at + 4)) - 0.5) < 1e-12);

    CHECK(cli({"verify", "-i", d("opt"), "--input-b", d("mm1")}).code == kExitUsage);
    CHECK(cli({"verify", "-i", d("opt"), "--input-b", d("nothing")}).code == kExitIo);
  }

  TEST_CASE("fit command") {
    const auto dir = scratch("fit");
    {
      std::ofstream f(dir / "d.csv");
      f << "lambda,sweep,chi_mean\n";
      for (int i = 0; i < 12; ++i) {
        f << "0.1," << i << "," << format_double(2.0 + 4.0 * std::exp(-0.5 * i)) << "\n";
        f << "0.3," << i << ",7\n";
      }
    }
    const auto r = cli({"fit", "--csv", (dir / "d.csv").string(), "--where", "lambda=0.1"});
    CHECK(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "alpha,beta,gamma,sigma_alpha,sigma_beta,sigma_gamma,residual_norm,converged");
    CHECK(rows[1].rfind("2", 0) == 0);
    CHECK(cli({"fit", "--csv", (dir / "d.csv").string(), "--where", "lambda=0.3"}).code ==
          kExitInvariant);
    CHECK(cli({"fit", "--csv", (dir / "d.csv").string(), "--y-col", "nope"}).code == kExitUsage);
  }
}
