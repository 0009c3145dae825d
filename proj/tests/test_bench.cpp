#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gsm/bench/config.hpp"
#include "gsm/bench/datagen.hpp"
#include "gsm/bench/experiments.hpp"
#include "gsm/bench/io.hpp"
#include "gsm/bench/metrics.hpp"
#include "gsm/bench/rng.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

using namespace gsm;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("gsm_test_bench_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

RecoverySpec tiny_spec() {
  RecoverySpec s;
  s.n = 20;
  s.d = 40;
  s.ks = {3};
  s.trials = 1;
  s.gsm.grid_size = 5;
  s.lp_p_grid = {0.5};
  s.lp_lambda_count = 10;
  return s;
}

}  // namespace

TEST_CASE("counter rng is a pure function of key and counter") {
  CounterRng a(derive_key(5, StreamTag::Matrix, 3)), b(derive_key(5, StreamTag::Matrix, 3));
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(derive_key(5, StreamTag::Matrix, 3) != derive_key(5, StreamTag::Signal, 3));
  CHECK(derive_key(5, StreamTag::Matrix, 3) != derive_key(5, StreamTag::Matrix, 4));
  CHECK(derive_key(5, StreamTag::Matrix, 3) != derive_key(6, StreamTag::Matrix, 3));
  CHECK(instance_seed(1, 16, 0) != instance_seed(1, 24, 0));
  CHECK(instance_seed(1, 16, 0) != instance_seed(1, 16, 1));
}

TEST_CASE("counter rng moments") {
  CounterRng r(derive_key(1, StreamTag::MonteCarlo));
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double g = r.normal();
    sn += g;
    sn2 += g * g;
  }
  CHECK(std::abs(su / n - 0.5) < 0.005);
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(std::abs(sn2 / n - 1.0) < 0.02);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) ++hist[r.below(7)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
}

TEST_CASE("matrices have unit columns and are reproducible") {
  for (MatrixKind kind : {MatrixKind::Uncorrelated, MatrixKind::Correlated}) {
    const Matrix A = gen_matrix(kind, 30, 70, 0.8, 9);
    for (Index j = 0; j < A.cols(); ++j) CHECK(std::abs(A.col(j).norm() - 1.0) <= 1e-12);
    CHECK(A == gen_matrix(kind, 30, 70, 0.8, 9));
    CHECK(A != gen_matrix(kind, 30, 70, 0.8, 10));
  }
}

TEST_CASE("matrix row covariance") {
  for (double rho : {0.0, 0.5, 0.8}) {
    const MatrixKind kind = rho == 0.0 ? MatrixKind::Uncorrelated : MatrixKind::Correlated;
    const Matrix A = gen_matrix(kind, 2000, 5, rho, 3, false);
    const Matrix S = A.transpose() * A / 2000.0;
    for (Index i = 0; i < 5; ++i)
      for (Index j = 0; j < 5; ++j)
        CHECK(std::abs(S(i, j) - std::pow(rho, std::abs(i - j))) <= 0.1);
  }
}

TEST_CASE("signals have exactly k nonzeros") {
  for (SignalKind kind : {SignalKind::Gaussian, SignalKind::EquispacedLinear, SignalKind::EquispacedPm1}) {
    const Vector x = gen_signal(kind, 100, 7, 4);
    Index nnz = 0;
    for (Index i = 0; i < x.size(); ++i) nnz += x[i] != 0.0;
    CHECK(nnz == 7);
    CHECK(x == gen_signal(kind, 100, 7, 4));
  }
}

TEST_CASE("equispaced signals") {
  const Index d = 100, k = 7;
  const Vector lin = gen_signal(SignalKind::EquispacedLinear, d, k, 2);
  const Vector pm = gen_signal(SignalKind::EquispacedPm1, d, k, 2);
  std::set<double> mags;
  for (Index i = 0; i < k; ++i) {
    const Index pos = i * d / k;
    CHECK(lin[pos] != 0.0);
    CHECK(std::abs(pm[pos]) == 1.0);
    mags.insert(std::abs(lin[pos]));
  }
  std::set<double> expect;
  for (Index i = 0; i < k; ++i) expect.insert(1.0 + static_cast<double>(i) / (k - 1) * 29.0);
  CHECK(mags.size() == expect.size());
  for (double m : expect) {
    bool found = false;
    for (double v : mags) found = found || std::abs(v - m) < 1e-12;
    CHECK(found);
  }
}

TEST_CASE("noise") {
  const Matrix A = gen_matrix(MatrixKind::Uncorrelated, 50, 100, 0.0, 1);
  CHECK(gen_noise(A, SignalKind::Gaussian, 5, 0.0, 7).norm() == 0.0);
  const double nu = 0.1;
  const double energy = expected_signal_energy(A, SignalKind::Gaussian, 5, 99, 20000);
  double mean = 0.0;
  for (int t = 0; t < 200; ++t) mean += gen_noise(A, SignalKind::Gaussian, 5, nu, 1000 + t).squaredNorm();
  mean /= 200;
  CHECK(std::abs(mean / (nu * nu * energy) - 1.0) < 0.1);
  const Vector s = A * gen_signal(SignalKind::Gaussian, 100, 5, 3);
  CHECK(std::abs(gen_relative_noise(s, 0.01, 8).norm() - 0.01 * s.norm()) <= 1e-14 * s.norm());
}

TEST_CASE("recovery metrics") {
  Matrix A = Matrix::Identity(4, 4);
  Vector x0(4), y(4), xh(4);
  x0 << 1, 0, -2, 0;
  y << 1, 0.1, -2, 0;
  auto m = evaluate_recovery(A, y, x0, x0, 1e-6);
  CHECK(m.norm_obj == doctest::Approx(1.0));
  CHECK(m.rec_err == 0.0);
  CHECK(m.supp_prec == 1.0);
  CHECK(m.success_obj);
  CHECK(m.success_rec);

  xh << 1, 0.1, 0, 0;
  m = evaluate_recovery(A, y, xh, x0, 1e-6);
  CHECK(m.norm_obj == doctest::Approx(2.0 / 0.1));
  CHECK(m.rec_err == doctest::Approx(2.1 / 3.0));
  CHECK(m.supp_prec == 0.5);
  CHECK_FALSE(m.success_obj);
  CHECK_FALSE(m.success_rec);

  xh << 1.0005, 0, -2, 0;
  m = evaluate_recovery(A, y, xh, x0, 0.0);
  CHECK(m.rec_err == doctest::Approx(0.0005 / 3.0));
  CHECK(m.success_rec);
  CHECK(m.norm_obj > 1.0);

  const Vector yexact = A * x0;
  CHECK(evaluate_recovery(A, yexact, x0, x0, 0.0).norm_obj == 1.0);
  CHECK(evaluate_recovery(A, yexact, xh, x0, 0.0).norm_obj == std::numeric_limits<double>::infinity());
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e308, 5e-324, 123456789.0}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("plain") == "plain");
}

TEST_CASE("matrix files round trip") {
  const fs::path dir = temp_dir("io");
  Matrix A(3, 4);
  A << 0.1, -0.0, 5e-324, 1e308, 1.0 / 3.0, -7, 2.5, 1e-17, 0, 4, -1e-300, 6;
  write_matrix((dir / "A.csv").string(), A);
  write_matrix((dir / "A.bin").string(), A);
  const Matrix B = read_matrix((dir / "A.csv").string());
  const Matrix C = read_matrix((dir / "A.bin").string());
  CHECK(B == A);
  CHECK(C == A);
  CHECK(std::signbit(C(0, 1)));

  std::ofstream((dir / "row.csv").string()) << "1,2,3\n";
  std::ofstream((dir / "col.csv").string()) << "1\n2\n\n3\n";
  const Vector r = read_vector((dir / "row.csv").string());
  const Vector c = read_vector((dir / "col.csv").string());
  CHECK(r.size() == 3);
  CHECK(r == c);
  std::ofstream((dir / "bad.csv").string()) << "1,2\n3\n";
  CHECK_THROWS_AS(read_matrix((dir / "bad.csv").string()), ConfigError);
  std::ofstream((dir / "nan.csv").string()) << "1,x\n";
  CHECK_THROWS_AS(read_matrix((dir / "nan.csv").string()), ConfigError);
  CHECK_THROWS_AS(read_matrix((dir / "missing.bin").string()), ConfigError);
}

TEST_CASE("parallel_for visits every index and rethrows") {
  std::vector<std::atomic<int>> seen(50);
  parallel_for(50, 3, [&](std::size_t i) { seen[i]++; });
  for (auto& s : seen) CHECK(s.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 2,
                               [](std::size_t i) {
                                 if (i == 4) throw NumericError("boom");
                               }),
                  NumericError);
}

TEST_CASE("recovery run writes one row per method") {
  RecoverySpec spec = tiny_spec();
  spec.methods = recovery_methods();
  const RecoveryReport rep = run_recovery(spec);
  REQUIRE(rep.rows.size() == spec.methods.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    CHECK(rep.rows[i].method == spec.methods[i]);
    CHECK(rep.rows[i].metrics.supp_prec >= 0.0);
    CHECK(rep.rows[i].metrics.supp_prec <= 1.0);
  }
  const fs::path dir = temp_dir("recovery");
  write_recovery(rep, dir.string());
  const auto rows = read_lines(dir / "rows.csv");
  REQUIRE(rows.size() == 1 + spec.methods.size());
  CHECK(rows[0] == "k,trial,method,lambda,norm_obj,rec_err,supp_prec,success_obj,success_rec,seconds");
  const auto summary = read_lines(dir / "summary.csv");
  CHECK(summary.size() == 1 + spec.methods.size());
}

TEST_CASE("summary rates are means of the per-trial flags") {
  RecoverySpec spec = tiny_spec();
  spec.ks = {2, 4};
  spec.trials = 3;
  const RecoveryReport rep = run_recovery(spec);
  REQUIRE(rep.rows.size() == 2 * 3 * spec.methods.size());
  for (const auto& s : rep.summary) {
    double obj = 0, rec = 0, err = 0;
    int count = 0;
    for (const auto& r : rep.rows) {
      if (r.k != s.k || r.method != s.method) continue;
      obj += r.metrics.success_obj;
      rec += r.metrics.success_rec;
      err += r.metrics.rec_err;
      ++count;
    }
    CHECK(s.trials == count);
    CHECK(s.success_obj_rate == doctest::Approx(obj / count));
    CHECK(s.success_rec_rate == doctest::Approx(rec / count));
    CHECK(s.mean_rec_err == doctest::Approx(err / count));
  }
}

TEST_CASE("recovery is deterministic across runs and thread counts") {
  RecoverySpec spec = tiny_spec();
  spec.trials = 2;
  const RecoveryReport a = run_recovery(spec);
  spec.threads = 2;
  const RecoveryReport b = run_recovery(spec);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(format_double(a.rows[i].lambda) == format_double(b.rows[i].lambda));
    CHECK(format_double(a.rows[i].metrics.norm_obj) == format_double(b.rows[i].metrics.norm_obj));
    CHECK(format_double(a.rows[i].metrics.rec_err) == format_double(b.rows[i].metrics.rec_err));
    CHECK(a.rows[i].metrics.supp_prec == b.rows[i].metrics.supp_prec);
  }
  const RecoveryInstance i1 = make_recovery_instance(spec, 3, 1), i2 = make_recovery_instance(spec, 3, 1);
  CHECK(i1.A == i2.A);
  CHECK(i1.y == i2.y);
}

TEST_CASE("recovery spec validation") {
  RecoverySpec s = tiny_spec();
  s.methods = {"nope"};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = tiny_spec();
  s.ks = {21};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = tiny_spec();
  s.trials = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = tiny_spec();
  s.full_scale = true;
  CHECK(s.effective().trials == 200);
  CHECK(s.effective().gsm.grid_size == 50);
}

TEST_CASE("config parse and dump") {
  const RecoverySpec s = parse_recovery_spec(
      R"({"matrix": "correlated", "rho": 0.5, "signal": "equispaced_pm1", "n": 30, "d": 60, "k": [2, 5],
          "trials": 4, "seed": 9, "methods": ["gsm1", "irls"], "gsm": {"grid_size": 7,
          "homotopy": {"delta0": 0.001, "postprocess": "none"}}, "lp": {"p_grid": [0.5]}, "dc": {"eta": 0.01}})");
  CHECK(s.matrix == MatrixKind::Correlated);
  CHECK(s.rho == 0.5);
  CHECK(s.signal == SignalKind::EquispacedPm1);
  CHECK(s.ks == std::vector<Index>{2, 5});
  CHECK(s.seed == 9);
  CHECK(s.gsm.grid_size == 7);
  CHECK(s.gsm.homotopy.delta0 == 0.001);
  CHECK(s.gsm.homotopy.postprocess == PostprocessMode::None);
  CHECK(s.lp_p_grid == std::vector<double>{0.5});
  CHECK(s.dc_eta == 0.01);
  const std::string dumped = dump_recovery_spec(s);
  CHECK(dump_recovery_spec(parse_recovery_spec(dumped)) == dumped);
  CHECK(parse_recovery_spec(R"({"k": 4})").ks == std::vector<Index>{4});

  const HomotopyConfig h = parse_homotopy_config(R"({"power": 1, "eps_x": 1e-7})");
  CHECK(h.power == Power::One);
  CHECK(h.eps_x == 1e-7);
  CHECK(dump_homotopy_config(parse_homotopy_config(dump_homotopy_config(h))) == dump_homotopy_config(h));
  CHECK(default_config_json().find("\"kernel_timing\"") != std::string::npos);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_recovery_spec(R"({"bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_recovery_spec(R"({"gsm": {"homotopy": {"bogus": 1}}})"), ConfigError);
  CHECK_THROWS_AS(parse_recovery_spec(R"({"n": "ten"})"), ConfigError);
  CHECK_THROWS_AS(parse_recovery_spec(R"({"matrix": "weird"})"), ConfigError);
  CHECK_THROWS_AS(parse_recovery_spec("{"), ConfigError);
  CHECK_THROWS_AS(parse_homotopy_config(R"({"power": 3})"), ConfigError);
  CHECK_THROWS_AS(parse_homotopy_config(R"({"delta0": -1})"), ConfigError);
  CHECK_THROWS_AS(load_recovery_spec("/nonexistent/spec.json"), ConfigError);
}

TEST_CASE("kernel gamma grid") {
  const auto g = kernel_gamma_grid();
  CHECK(g.size() == 18);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(g.front() == 1e-20);
  CHECK(g.back() == 1e20);
}

TEST_CASE("kernel accuracy on a small grid") {
  KernelAccuracySpec s;
  s.dims = {60};
  s.ks = {3, 30};
  s.gammas = {1e-5, 1.0, 1e5};
  s.trials = 2;
  const auto rows = run_kernel_accuracy(s);
  CHECK(rows.size() == 2 * 3 * 2);
  for (const auto& r : rows) {
    CHECK(r.max_mu_err <= 1e-12);
    CHECK(r.max_theta_err <= 1e-11);
    CHECK(r.theta_in_unit);
  }
  const fs::path dir = temp_dir("kernel");
  write_kernel_accuracy(rows, (dir / "acc.csv").string());
  CHECK(read_lines(dir / "acc.csv").size() == rows.size() + 1);
}

TEST_CASE("kernel timing rows") {
  KernelTimingSpec s;
  s.cells = {{200, 10}, {400, 10}};
  s.trials = 2;
  const auto rows = run_kernel_timing(s);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.min_seconds > 0.0);
    CHECK(r.min_seconds <= r.mean_seconds);
  }
}
