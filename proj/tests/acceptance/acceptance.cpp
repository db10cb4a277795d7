// Acceptance checks. `acceptance N` runs criterion N, no argument runs all.
// Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "smoothcop/bandwidth.hpp"
#include "smoothcop/bootstrap.hpp"
#include "smoothcop/copula.hpp"
#include "smoothcop/distortion.hpp"
#include "smoothcop/elliptical.hpp"
#include "smoothcop/functionals.hpp"
#include "smoothcop/generator.hpp"
#include "smoothcop/io.hpp"
#include "smoothcop/kernel.hpp"
#include "smoothcop/linalg.hpp"
#include "smoothcop/parallel.hpp"
#include "smoothcop/simulation.hpp"
#include "smoothcop/stats.hpp"

using namespace smoothcop;

namespace {

struct Outcome
{
  bool pass;
  std::string detail;
};

std::string
fmt(const char* pattern, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

// Returns a failure note when the elapsed time exceeds the budget.
struct Timer
{
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const
  {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

Outcome
generator_closure()
{
  Timer timer;
  auto grid = arithmetic_grid(0.1, 20.0, 0.1);
  double worst = 0.0;
  for (double c : { 0.1, 1.0, 10.0 }) {
    worst = std::max(worst, closure_defect(CharGenerator::gauss(), c, grid).defect);
    for (double alpha : { 0.5, 1.0, 1.5, 2.0 })
      worst = std::max(worst, closure_defect(CharGenerator::stable(alpha), c, grid).defect);
  }
  double t3 = closure_defect(CharGenerator::student_t(3.0), 0.5, grid).defect;
  double secs = timer.seconds();
  bool ok = worst <= 1e-10 && t3 > 1e-3 && secs < 1.0;
  return { ok, fmt("max closed-family defect %.3e (<= 1e-10), student_t(3) defect %.3e (> 1e-3), %.2fs (< 1s)",
                   worst, t3, secs) };
}

Outcome
cv_expectation()
{
  Timer timer;
  Eigen::Vector2d mu(-1.0, 1.0);
  Eigen::Matrix2d sigma;
  sigma << 1.0, 1.05, 1.05, 1.96;
  GaussianOracle truth(mu, sigma);
  WeightFunction w{ mu };
  auto q = QuadratureRule::gauss_hermite(25, 2);
  const auto kernel = KernelSpec::gauss();
  const std::size_t threads = default_thread_count();
  RandomStream rng(20240611);
  McEstimate d = d_constant_mc(truth, w, q, 10000, rng);
  bool ok = std::abs(d.mean - 0.629732) <= 0.02;
  std::string detail = fmt("D_X %.6f (0.629732 +- 0.02)", d.mean);
  for (double h : { 0.25, 0.75, 1.5 }) {
    BandwidthMatrix H = h * sigma;
    std::vector<double> cv(100);
    const std::uint64_t base = rng.next_u64();
    parallel_for(cv.size(), threads, [&](std::size_t r) {
      auto local = RandomStream::derive(base, r);
      cv[r] = cv_objective(truth.sample(25, local), H, w, q, kernel);
    });
    McEstimate mise = mise_mc(truth, 24, H, w, q, kernel, 200, rng, threads);
    double diff = mean(cv) - (mise.mean + d.mean);
    double se = std::sqrt(std::pow(standard_error(cv), 2) + mise.se * mise.se + d.se * d.se);
    bool cell = std::abs(diff) <= 3.0 * se;
    ok = ok && cell;
    detail += fmt("; h=%.2f E[CV]=%.6f MISE+D=%.6f |diff|/se=%.2f", h, mean(cv), mise.mean + d.mean,
                  std::abs(diff) / se);
  }
  double secs = timer.seconds();
  ok = ok && secs < 600.0;
  return { ok, detail + fmt(" (<= 3), %.1fs (< 600s)", secs) };
}

Outcome
silverman()
{
  double a = silverman_h(2, 25), b = silverman_h(2, 100);
  bool ok = std::abs(a - 0.341995) <= 1e-6 && std::abs(b - 0.215443) <= 1e-6;
  return { ok, fmt("h(2,25)=%.7f (0.341995), h(2,100)=%.7f (0.215443), tol 1e-6", a, b) };
}

Outcome
bootstrap_margins()
{
  Timer timer;
  RandomStream rng(4);
  SampleMatrix data = sample_copula(CopulaSpec::clayton(2.0), 25, rng);
  BootstrapConfig cfg;
  cfg.m = 10000;
  cfg.seed = 4;
  SampleMatrix u = smooth_bootstrap_copula_sample(data, cfg, rng);
  bool ok = true;
  std::string detail;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    std::vector<double> col(u.col(j).data(), u.col(j).data() + u.rows());
    auto ks = ks_test_uniform(col);
    ok = ok && ks.p_value > 0.01;
    detail += fmt("column %d KS D=%.4f p=%.3f; ", int(j + 1), ks.statistic, ks.p_value);
  }
  double secs = timer.seconds();
  ok = ok && secs < 5.0;
  return { ok, detail + fmt("level 0.01, %.2fs (< 5s)", secs) };
}

Outcome
tau_preservation()
{
  Timer timer;
  EllipticalSpec spec{ Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity(), CharGenerator::gauss() };
  spec.sigma(0, 1) = spec.sigma(1, 0) = 0.75;
  RandomStream rng(5);
  auto report = correlation_preservation_check(spec, CharGenerator::gauss(), 0.5, 1000000, rng,
                                               default_thread_count());
  double diff = std::abs(report.tau_x - report.tau_z);
  double secs = timer.seconds();
  bool ok = diff <= 3.0 * report.tau_diff_se && secs < 60.0;
  return { ok, fmt("tau(X)=%.5f tau(Z)=%.5f |diff|=%.2e, 3 se=%.2e, %.1fs (< 60s)", report.tau_x,
                   report.tau_z, diff, 3.0 * report.tau_diff_se, secs) };
}

PolygonChain
random_polygon(RandomStream& rng, std::size_t vertices)
{
  PolygonChain p;
  p.closed = true;
  for (std::size_t k = 0; k < vertices; ++k)
    p.vertices.push_back({ rng.uniform(), rng.uniform() });
  return p;
}

Outcome
hausdorff_oracle()
{
  Timer timer;
  RandomStream rng(6);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    auto a = random_polygon(rng, 20);
    auto b = random_polygon(rng, 20);
    worst = std::max(worst, std::abs(hausdorff_distance(a, b) - hausdorff_brute_force(a, b)));
  }
  double secs = timer.seconds();
  bool ok = worst <= 1e-12 && secs < 5.0;
  return { ok, fmt("max |early-break - brute force| = %.3e (<= 1e-12), %.2fs (< 5s)", worst, secs) };
}

Outcome
levelset_improvement()
{
  Timer timer;
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::levelset_hausdorff;
  cfg.tau_targets = { 0.5 };
  cfg.t_list = { 0.3 };
  cfg.n_list = { 25 };
  cfg.m = 2000;
  cfg.reps = 200;
  cfg.seed = 7;
  cfg.threads = default_thread_count();
  auto result = run_levelset_experiment(cfg);
  const auto* raw = find_summary(result, "hausdorff", 25, "raw", 0.3);
  const auto* smooth = find_summary(result, "hausdorff", 25, "smooth", 0.3);
  double secs = timer.seconds();
  bool ok = raw && smooth && std::isfinite(raw->median) && std::isfinite(smooth->median) &&
            smooth->median < raw->median && secs < 900.0;
  return { ok, fmt("median Hausdorff smooth=%.4f raw=%.4f (smooth < raw), missing %zu/%zu, %.1fs (< 900s)",
                   smooth ? smooth->median : NAN, raw ? raw->median : NAN,
                   smooth ? smooth->missing : 0, raw ? raw->missing : 0, secs) };
}

Outcome
depmeasure_mse()
{
  Timer timer;
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::depmeasure_mse;
  cfg.copulas = { CopulaSpec::clayton(4.0) };
  cfg.n_list = { 10, 75 };
  cfg.m = 2000;
  cfg.reps = 200;
  cfg.seed = 8;
  cfg.threads = default_thread_count();
  auto result = run_depmeasure_experiment(cfg);
  bool ok = true;
  std::string detail;
  for (const char* stat : { "tau", "rho_s" }) {
    const auto* raw10 = find_summary(result, stat, 10, "raw");
    const auto* smooth10 = find_summary(result, stat, 10, "smooth");
    const auto* raw75 = find_summary(result, stat, 75, "raw");
    const auto* smooth75 = find_summary(result, stat, 75, "smooth");
    double ratio = smooth75->mse / raw75->mse;
    ok = ok && smooth10->mse <= raw10->mse && ratio >= 0.8 && ratio <= 1.25;
    detail += fmt("%s: n=10 MSE smooth=%.5f raw=%.5f (smooth <= raw), n=75 ratio=%.3f ([0.8, 1.25]); ",
                  stat, smooth10->mse, raw10->mse, ratio);
  }
  double secs = timer.seconds();
  ok = ok && secs < 1200.0;
  return { ok, detail + fmt("%.1fs (< 1200s)", secs) };
}

Outcome
distortion_rates()
{
  Timer timer;
  double gauss = fit_rate_exponent(CharGenerator::gauss());
  double laplace = fit_rate_exponent(CharGenerator::laplace());
  double cauchy = fit_rate_exponent(CharGenerator::cauchy());
  bool ok = std::abs(gauss - 1.0) <= 0.05 && std::abs(laplace - 1.0) <= 0.05 &&
            std::abs(cauchy - 0.5) <= 0.05;
  const double M = laplace_default_M(1.0);
  double worst_residual = 0.0, lo = INFINITY, hi = 0.0;
  for (double c : { 1e-4, 1e-3, 1e-2, 1e-1 }) {
    auto b = laplace_uniform_bound(c, 1.0, M);
    worst_residual = std::max(worst_residual, b.foc_residual);
    double scaled = b.bound / std::cbrt(c);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  double secs = timer.seconds();
  ok = ok && worst_residual < 1e-8 && hi / lo <= 2.0 && secs < 1.0;
  return { ok, fmt("exponents gauss=%.4f laplace=%.4f (1 +- 0.05) cauchy=%.4f (0.5 +- 0.05); "
                   "FOC residual %.2e (< 1e-8); bound/c^(1/3) spread %.3f (<= 2), %.3fs (< 1s)",
                   gauss, laplace, cauchy, worst_residual, hi / lo, secs) };
}

Outcome
quantile_roundtrip()
{
  Timer timer;
  double worst = 0.0;
  for (std::uint64_t model = 0; model < 50; ++model) {
    auto rng = RandomStream::derive(10, model);
    std::size_t n = 5 + rng.index(46);
    auto truth = CopulaSpec::clayton(0.5 + 4.0 * rng.uniform());
    SampleMatrix data = sample_copula(truth, n, rng);
    for (Eigen::Index i = 0; i < data.rows(); ++i)
      data(i, 1) = 3.0 * data(i, 1) - 1.0;
    Eigen::Matrix2d h = silverman_h(2, int(n)) * sample_covariance(data);
    KernelSpec kernel = model % 2 == 0 ? KernelSpec::gauss() : KernelSpec::laplace();
    SmoothedModel fitted(data, kernel, h);
    for (std::size_t j = 0; j < 2; ++j)
      for (double p : { 0.001, 0.01, 0.5, 0.99, 0.999 })
        worst = std::max(worst, std::abs(marginal_cdf(fitted, j, marginal_quantile(fitted, j, p)) - p));
  }
  double secs = timer.seconds();
  bool ok = worst < 1e-10 && secs < 5.0;
  return { ok, fmt("max |F(F^-1(p)) - p| = %.3e (< 1e-10) over 50 models, %.2fs (< 5s)", worst, secs) };
}

const std::array<std::pair<const char*, std::function<Outcome()>>, 10> criteria{ {
  { "generator closure", generator_closure },
  { "cross-validation expectation", cv_expectation },
  { "silverman rule", silverman },
  { "bootstrap margins uniform", bootstrap_margins },
  { "kendall tau preserved under smoothing", tau_preservation },
  { "hausdorff early-break oracle", hausdorff_oracle },
  { "level-set improvement", levelset_improvement },
  { "dependence-measure MSE", depmeasure_mse },
  { "distortion rates", distortion_rates },
  { "quantile inversion", quantile_roundtrip },
} };

bool
run(std::size_t index)
{
  const auto& [name, fn] = criteria[index - 1];
  Outcome outcome;
  try {
    outcome = fn();
  } catch (const std::exception& e) {
    outcome = { false, std::string("exception: ") + e.what() };
  }
  std::printf("%s criterion %zu (%s): %s\n", outcome.pass ? "PASS" : "FAIL", index, name,
              outcome.detail.c_str());
  std::fflush(stdout);
  return outcome.pass;
}

} // namespace

int
main(int argc, char** argv)
{
  bool ok = true;
  if (argc > 1) {
    for (int a = 1; a < argc; ++a) {
      long k = std::strtol(argv[a], nullptr, 10);
      if (k < 1 || k > long(criteria.size())) {
        std::fprintf(stderr, "unknown criterion '%s'\n", argv[a]);
        return 2;
      }
      ok = run(std::size_t(k)) && ok;
    }
  } else {
    for (std::size_t k = 1; k <= criteria.size(); ++k)
      ok = run(k) && ok;
  }
  return ok ? 0 : 1;
}
