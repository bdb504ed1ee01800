// End-to-end acceptance checks; prints one PASS/FAIL line per criterion.
#include "bsvgd/assignment.hpp"
#include "bsvgd/experiment.hpp"
#include "bsvgd/snapshot_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <unistd.h>

using namespace bsvgd;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double v, int prec = 6) {
  std::ostringstream o;
  o.precision(prec);
  o << v;
  return o.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Positions random_cloud(Eigen::Index d, Eigen::Index n, SeededRng& r, double scale = 1.0) {
  Positions x(d, n);
  for (Eigen::Index j = 0; j < n; ++j) x.col(j) = scale * r.normal_vector(d);
  return x;
}

// 1. Hungarian solver vs exhaustive search
Outcome assignment_oracle() {
  const auto start = Clock::now();
  SeededRng r(101);
  int mismatches = 0, total = 0;
  for (int n = 2; n <= 7; ++n) {
    for (int t = 0; t < 100; ++t) {
      Eigen::MatrixXd c(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(i, j) = std::floor(r.uniform01() * 1000.0) / 8.0;  // exact sums, many ties
      std::vector<int> p(static_cast<std::size_t>(n));
      std::iota(p.begin(), p.end(), 0);
      double best = std::numeric_limits<double>::infinity();
      do {
        double s = 0;
        for (int i = 0; i < n; ++i) s += c(i, p[static_cast<std::size_t>(i)]);
        best = std::min(best, s);
      } while (std::next_permutation(p.begin(), p.end()));
      ++total;
      if (solve_assignment(c).total_cost != best) ++mismatches;
    }
  }
  const double secs = seconds_since(start);
  return {mismatches == 0 && secs < 10.0,
          std::to_string(total - mismatches) + "/" + std::to_string(total) + " exact, " + fmt(secs, 3) + " s"};
}

// 2. Wasserstein metric axioms
Outcome wasserstein_axioms() {
  SeededRng r(202);
  int sym = 0, perm = 0, tri = 0, scale = 0;
  double worst_tri = 0, worst_scale = 0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(r.uniform_index(3));
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(r.uniform_index(50));
    const Positions a = random_cloud(d, n, r, 3.0), b = random_cloud(d, n, r, 3.0), c = random_cloud(d, n, r, 3.0);
    const double ab = wasserstein2(a, b), ba = wasserstein2(b, a);
    sym += ab == ba;

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (Eigen::Index k = n - 1; k > 0; --k)
      std::swap(idx[static_cast<std::size_t>(k)], idx[r.uniform_index(static_cast<std::size_t>(k + 1))]);
    Positions ap(d, n);
    for (Eigen::Index k = 0; k < n; ++k) ap.col(k) = a.col(idx[static_cast<std::size_t>(k)]);
    perm += wasserstein2(ap, b) == ab;

    const double excess = ab - (wasserstein2(a, c) + wasserstein2(c, b));
    worst_tri = std::max(worst_tri, excess);
    tri += excess <= 1e-9;

    const double f = 0.1 + 5.0 * r.uniform01();
    const double dev = std::abs(wasserstein2(f * a, f * b) - f * ab) / std::max(1.0, f * ab);
    worst_scale = std::max(worst_scale, dev);
    scale += dev <= 1e-12;
  }
  const bool ok = sym == 100 && perm == 100 && tri == 100 && scale == 100;
  return {ok, "symmetry " + std::to_string(sym) + "/100, permutation " + std::to_string(perm) + "/100, triangle " +
                  std::to_string(tri) + "/100 (max excess " + fmt(worst_tri, 3) + "), scaling " +
                  std::to_string(scale) + "/100 (max rel dev " + fmt(worst_scale, 3) + ")"};
}

// 3. analytic scores vs central differences
Outcome score_check() {
  SeededRng r(303);
  double worst = 0;
  int bad = 0;
  auto run = [&](const ScoreModel& m, const Position& center, const Position& spread) {
    for (int t = 0; t < 100; ++t) {
      const Position x = center + spread.cwiseProduct(r.normal_vector(2));
      const Position s = m.score(x), fd = finite_difference_score_oracle(m, x, 1e-5);
      const double rel = (s - fd).norm() / std::max(s.norm(), 1e-8);
      worst = std::max(worst, rel);
      bad += !(rel <= 1e-4);
    }
  };
  run(paper_gauss25(), make_position({4, 4}), make_position({4, 4}));
  run(paper_banana3(), make_position({5, 5}), make_position({10, 8}));
  return {bad == 0, "200 points, max relative error " + fmt(worst, 3)};
}

// 4 + 8. SVGD on a single Gaussian, then the atom diagnostic on its output
Positions g_svgd_final;
Outcome svgd_sanity() {
  const auto start = Clock::now();
  const GaussianMixture target({make_position({2, 2})}, 1.0, {1.0});
  SeededRng r(404);
  const Positions x0 = random_cloud(2, 100, r);
  SvgdConfig cfg;
  cfg.schedule = StepSchedule::sigmoid(1.0, 0.01, 2000);
  cfg.max_iterations = 2000;
  cfg.threshold = 1e-3;
  cfg.kernel = std::make_shared<GaussianKernel>(1.0, 2);
  const auto rep = svgd_iterate(x0, target, cfg);
  g_svgd_final = rep.final_positions;
  const Position mean = g_svgd_final.rowwise().mean();
  const Eigen::ArrayXd var = (g_svgd_final.colwise() - mean).array().square().rowwise().sum() / 99.0;
  const double secs = seconds_since(start);
  const bool ok = (mean - make_position({2, 2})).cwiseAbs().maxCoeff() <= 0.1 && (var >= 0.5).all() &&
                  (var <= 1.5).all() && secs < 60.0;
  return {ok, "mean (" + fmt(mean(0)) + ", " + fmt(mean(1)) + "), variance (" + fmt(var(0)) + ", " + fmt(var(1)) +
                  "), " + std::to_string(rep.iterations_used) + " iterations, " + fmt(secs, 3) + " s"};
}

Outcome atoms() {
  const double a = atom_diagnostic(g_svgd_final, 1e-8);
  return {a == 0.0, "atom fraction " + fmt(a) + " at tol 1e-8 over " + std::to_string(g_svgd_final.cols()) +
                        " particles"};
}

// 5. branching invariants over 20000 steps
Outcome branching_laws() {
  const auto laws = OffspringLaws::paper_defaults(2.0);
  SeededRng r(505);
  long steps = 0, violations = 0;
  double e_sum = 0, s_sum = 0;
  long e_n = 0, s_n = 0;
  while (steps < 20000) {
    Positions p(2, 1);
    p.col(0) = r.normal_vector(2);
    ParticleCloud c(p, {Color::Spine});
    for (int k = 0; k < 25 && steps < 20000; ++k, ++steps) {
      const auto out = branch_step(c, laws, r);
      const Eigen::Index n = c.size();
      if (out.cloud.count(Color::Spine) != 1) ++violations;
      if (!(out.cloud.positions().leftCols(n) == c.positions())) ++violations;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int g = out.offspring_counts[static_cast<std::size_t>(i)];
        switch (c.color(i)) {
          case Color::Optimizer: violations += g != 0; break;
          case Color::Explorer: e_sum += g; ++e_n; break;
          case Color::Spine: s_sum += g; ++s_n; break;
        }
      }
      c = out.cloud;
    }
  }
  const double me = e_sum / static_cast<double>(e_n), ms = s_sum / static_cast<double>(s_n);
  const bool ok = violations == 0 && std::abs(me - 0.8) <= 0.02 && std::abs(ms - 2.0) <= 0.02;
  return {ok, std::to_string(steps) + " steps, " + std::to_string(violations) + " violations, mean q_E " + fmt(me) +
                  " (" + std::to_string(e_n) + " draws), mean q_S " + fmt(ms) + " (" + std::to_string(s_n) +
                  " draws)"};
}

// 6 + 7. seeded BSVGD run on the 25-Gaussian benchmark, executed twice
fs::path g_work;
Outcome bsvgd_end_to_end(bool& second_run_ok) {
  const auto start = Clock::now();
  auto run = [&](const fs::path& out) {
    RunCommandOptions o;
    o.config = "paper-gauss25";
    o.seed = 7;
    o.out = out.string();
    o.algorithm = "bsvgd";
    o.clock = "work";
    o.overrides = {"bsvgd.max_population=500", "metrics.replicates=10"};
    std::ostringstream sink, err;
    const int code = cmd_run(o, sink, err);
    if (code != 0) std::cerr << err.str();
    return code == 0;
  };
  const bool ok_a = run(g_work / "run_a");
  second_run_ok = run(g_work / "run_b");
  if (!ok_a) return {false, "run failed"};

  const auto trace = read_trace_csv(g_work / "run_a" / "trace.csv");
  const auto metrics = read_metrics_csv(g_work / "run_a" / "metrics.csv");
  bool monotone = true;
  for (std::size_t k = 1; k < trace.size(); ++k) monotone &= trace[k].sample_size >= trace[k - 1].sample_size;
  const long final_pop = trace.back().sample_size;
  const double w_first = metrics.front().w_mean, w_final = metrics.back().w_mean;
  const ParticleCloud last = read_snapshot_csv(g_work / "run_a" / trace.back().snapshot_file);
  const int coverage = mode_coverage(last, paper_gauss25().means(), std::sqrt(5.0));
  const double secs = seconds_since(start);
  const bool ok = monotone && final_pop > 500 && w_final < w_first && coverage >= 15 && secs < 900.0;
  return {ok, std::string("population ") + (monotone ? "non-decreasing" : "DECREASES") + " to " +
                  std::to_string(final_pop) + ", W first " + fmt(w_first) + " -> final " + fmt(w_final) +
                  ", coverage " + std::to_string(coverage) + "/25, " + std::to_string(metrics.front().replicates.size()) +
                  " replicates, " + fmt(secs, 4) + " s for two runs"};
}

Outcome determinism(bool second_run_ok) {
  if (!second_run_ok) return {false, "second run failed"};
  const bool trace_same = slurp(g_work / "run_a" / "trace.csv") == slurp(g_work / "run_b" / "trace.csv");
  const bool metrics_same = slurp(g_work / "run_a" / "metrics.csv") == slurp(g_work / "run_b" / "metrics.csv");
  return {trace_same && metrics_same, std::string("trace.csv ") + (trace_same ? "identical" : "DIFFERS") +
                                          ", metrics.csv " + (metrics_same ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
  g_work = fs::temp_directory_path() / ("bsvgd_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(g_work);
  fs::create_directories(g_work);

  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << name << " -- " << o.detail << std::endl;
  };

  bool second_run_ok = false;
  report(1, "assignment equals exhaustive minimum", assignment_oracle);
  report(2, "Wasserstein metric axioms", wasserstein_axioms);
  report(3, "analytic score vs finite differences", score_check);
  report(4, "SVGD on a single Gaussian", svgd_sanity);
  report(5, "branching law invariants", branching_laws);
  report(6, "BSVGD end-to-end on paper-gauss25", [&] { return bsvgd_end_to_end(second_run_ok); });
  report(7, "byte-identical reruns", [&] { return determinism(second_run_ok); });
  report(8, "no atoms after SVGD", atoms);

  fs::remove_all(g_work);
  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
