#include "cli.hpp"

#include <fstream>
#include <iomanip>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "smoothcop/bandwidth.hpp"
#include "smoothcop/bootstrap.hpp"
#include "smoothcop/copula.hpp"
#include "smoothcop/distortion.hpp"
#include "smoothcop/functionals.hpp"
#include "smoothcop/io.hpp"
#include "smoothcop/parallel.hpp"
#include "smoothcop/simulation.hpp"

namespace smoothcop::cli {

namespace {

using json = nlohmann::json;

// Writes to the file when a path is given, otherwise to `fallback`.
class Sink
{
public:
  Sink(const std::string& path, std::ostream& fallback)
  {
    if (!path.empty()) {
      file_.open(path);
      if (!file_)
        throw std::runtime_error("cannot write '" + path + "'");
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& operator*() { return *stream_; }

private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::vector<double>
row_major(const Eigen::MatrixXd& m)
{
  std::vector<double> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out.push_back(m(i, j));
  return out;
}

BandwidthMatrix
parse_matrix(const std::string& text, Eigen::Index d)
{
  auto items = split(text, ',');
  if (Eigen::Index(items.size()) != d * d)
    throw std::invalid_argument("bandwidth matrix needs d*d comma separated entries");
  BandwidthMatrix h(d, d);
  for (Eigen::Index k = 0; k < d * d; ++k)
    h(k / d, k % d) = parse_double(trim(items[std::size_t(k)]));
  return h;
}

struct BandwidthArgs
{
  std::string method = "cv";
  std::string grid = "0.01:2.5:0.01";
  int gh_order = 25;
  std::size_t bootstrap_reps = 0;
  std::uint64_t seed = 0;
  std::string kernel = "gauss";
  std::string data;
  std::string out;
  std::size_t threads = default_thread_count();
};

void
run_bandwidth(const BandwidthArgs& a, std::ostream& out)
{
  SampleMatrix x = read_csv_matrix(a.data);
  const auto d = std::size_t(x.cols());
  json report;
  Eigen::MatrixXd sigma_hat = sample_covariance(x);
  if (a.method == "silverman") {
    double h = silverman_h(int(d), int(x.rows()));
    report["h_star"] = h;
    report["H_star"] = row_major(h * sigma_hat);
    report["sigma_hat"] = row_major(sigma_hat);
  } else if (a.method == "cv") {
    auto grid = parse_grid(a.grid);
    RandomStream rng(a.seed);
    auto result = select_bandwidth_cv(x, grid, WeightFunction{ column_means(x) },
                                      QuadratureRule::gauss_hermite(a.gh_order, d),
                                      KernelSpec::parse(a.kernel), a.bootstrap_reps, rng, a.threads);
    report["h_grid"] = result.h_grid;
    report["cv_values"] = result.cv_values;
    report["h_star"] = result.h_star;
    report["H_star"] = row_major(result.H_star);
    report["sigma_hat"] = row_major(result.sigma_hat);
    report["at_boundary"] = result.at_boundary;
  } else {
    throw std::invalid_argument("unknown bandwidth method '" + a.method + "'");
  }
  Sink sink(a.out, out);
  *sink << std::setw(2) << report << '\n';
}

struct BootstrapArgs
{
  std::string in;
  std::size_t m = 1000;
  std::size_t B = 1;
  std::string kernel = "gauss";
  std::string bandwidth = "silverman";
  std::string fixed_h;
  std::string transform = "normal_scores";
  std::uint64_t seed = 0;
  std::string out;
};

void
run_bootstrap(const BootstrapArgs& a, std::ostream& out)
{
  SampleMatrix data = read_csv_matrix(a.in);
  BootstrapConfig cfg;
  cfg.m = a.m;
  cfg.B = a.B;
  cfg.kernel = KernelSpec::parse(a.kernel);
  cfg.bandwidth_rule = parse_bandwidth_rule(a.bandwidth);
  if (cfg.bandwidth_rule == BandwidthRule::fixed)
    cfg.fixed_H = parse_matrix(a.fixed_h, data.cols());
  if (a.transform == "none")
    cfg.transform = Transform::none;
  else if (a.transform != "normal_scores")
    throw std::invalid_argument("unknown transform '" + a.transform + "'");
  cfg.seed = a.seed;
  RandomStream rng(a.seed);
  SmoothedModel model = fit_smoothed_model(data, cfg, rng);
  Sink sink(a.out, out);
  if (cfg.B == 1) {
    write_sample_csv(*sink, draw_copula_sample(model, cfg.m, rng));
    return;
  }
  // replicate b uses the same stream as functional_distribution
  *sink << "replicate";
  for (Eigen::Index j = 0; j < data.cols(); ++j)
    *sink << ",u" << j + 1;
  *sink << '\n' << std::setprecision(17);
  for (std::size_t b = 0; b < cfg.B; ++b) {
    auto local = RandomStream::derive(cfg.seed, b);
    SampleMatrix u = draw_copula_sample(model, cfg.m, local);
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      *sink << b;
      for (Eigen::Index j = 0; j < u.cols(); ++j)
        *sink << ',' << u(i, j);
      *sink << '\n';
    }
  }
}

struct LevelsetArgs
{
  std::string in;
  double t = 0.3;
  std::size_t grid = 200;
  std::string truth;
  std::size_t truth_points = 2000;
  std::string out;
};

void
run_levelset(const LevelsetArgs& a, std::ostream& out, std::ostream& err)
{
  SampleMatrix data = read_csv_matrix(a.in);
  PolygonChain boundary = estimate_level_boundary(data, a.t, a.grid);
  {
    Sink sink(a.out, out);
    *sink << "u,v\n" << std::setprecision(17);
    for (const auto& p : boundary.vertices)
      *sink << p.u << ',' << p.v << '\n';
  }
  if (!a.truth.empty()) {
    auto spec = CopulaSpec::parse(a.truth);
    if (spec.family != CopulaFamily::clayton)
      throw std::invalid_argument("levelset: closed-form truth is available for clayton only");
    double dist = hausdorff_distance(boundary, clayton_level_boundary(spec.theta, a.t, a.truth_points));
    (a.out.empty() ? err : out) << "hausdorff," << std::setprecision(12) << dist << '\n';
  }
}

struct DistortionArgs
{
  std::string gx = "gauss";
  std::string gy = "gauss";
  double c = 0.01;
  std::string u_grid = "0:10:0.1";
  std::string out;
  double sigma2 = 1.0;
  std::optional<double> laplace_M;
  bool laplace_bound = false;
};

void
run_distortion(const DistortionArgs& a, std::ostream& out, std::ostream& err)
{
  auto gx = CharGenerator::parse(a.gx);
  auto gy = CharGenerator::parse(a.gy);
  auto grid = parse_grid(a.u_grid);
  auto report = relative_error_curve(gy, a.c, grid);
  auto gz = product_generator(gx, gy, a.c);
  {
    Sink sink(a.out, out);
    *sink << "u,rel_error,psi_x,psi_z\n" << std::setprecision(15);
    for (std::size_t k = 0; k < grid.size(); ++k)
      *sink << grid[k] << ',' << report.rel_error[k] << ',' << gx(grid[k]) << ',' << gz(grid[k]) << '\n';
  }
  std::ostream& info = a.out.empty() ? err : out;
  info << "rate_exponent," << std::setprecision(8) << report.rate_exponent << '\n';
  if (a.laplace_bound) {
    double M = a.laplace_M.value_or(laplace_default_M(a.sigma2));
    auto b = laplace_uniform_bound(a.c, a.sigma2, M);
    info << "laplace_T_star," << b.T_star << "\nlaplace_bound," << b.bound << "\nfoc_residual,"
         << b.foc_residual << '\n';
  }
}

struct SimulateArgs
{
  std::string config;
  std::string out;
  std::string summary;
  std::optional<std::size_t> threads;
};

void
run_simulate(const SimulateArgs& a, std::ostream& out)
{
  auto cfg = ExperimentConfig::load(a.config);
  if (a.threads)
    cfg.threads = *a.threads;
  auto result = run_experiment(cfg);
  {
    Sink sink(a.out, out);
    write_results_csv(*sink, result.rows);
  }
  if (!a.summary.empty()) {
    Sink sink(a.summary, out);
    write_summary_csv(*sink, result.summary);
  }
}

struct SampleArgs
{
  std::string copula = "clayton:2";
  std::size_t n = 100;
  std::size_t dim = 2;
  std::uint64_t seed = 0;
  std::string out;
};

} // namespace

int
run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "Smooth bootstrap for copula functionals", "smoothcop" };
  app.require_subcommand(1);

  BandwidthArgs bw;
  auto* bandwidth = app.add_subcommand("bandwidth", "Select a bandwidth matrix");
  bandwidth->add_option("--method", bw.method, "cv or silverman")->capture_default_str();
  bandwidth->add_option("--grid", bw.grid, "h grid a:b:step")->capture_default_str();
  bandwidth->add_option("--gh-order", bw.gh_order)->capture_default_str();
  bandwidth->add_option("--bootstrap-reps", bw.bootstrap_reps)->capture_default_str();
  bandwidth->add_option("--seed", bw.seed);
  bandwidth->add_option("--kernel", bw.kernel)->capture_default_str();
  bandwidth->add_option("--data", bw.data)->required();
  bandwidth->add_option("--out", bw.out, "JSON output (default stdout)");
  bandwidth->add_option("--threads", bw.threads);

  BootstrapArgs bs;
  auto* bootstrap = app.add_subcommand("bootstrap", "Draw a smooth bootstrap copula sample");
  bootstrap->add_option("--in", bs.in)->required();
  bootstrap->add_option("--m", bs.m)->capture_default_str();
  bootstrap->add_option("--B", bs.B)->capture_default_str();
  bootstrap->add_option("--kernel", bs.kernel)->capture_default_str();
  bootstrap->add_option("--bandwidth", bs.bandwidth, "silverman, cv or fixed")->capture_default_str();
  bootstrap->add_option("--H", bs.fixed_h, "row-major entries for --bandwidth fixed");
  bootstrap->add_option("--transform", bs.transform, "normal_scores or none")->capture_default_str();
  bootstrap->add_option("--seed", bs.seed);
  bootstrap->add_option("--out", bs.out);

  LevelsetArgs ls;
  auto* levelset = app.add_subcommand("levelset", "Estimate a level-set boundary");
  levelset->add_option("--in", ls.in)->required();
  levelset->add_option("--t", ls.t)->capture_default_str();
  levelset->add_option("--grid", ls.grid)->capture_default_str();
  levelset->add_option("--truth", ls.truth, "e.g. clayton:2");
  levelset->add_option("--truth-points", ls.truth_points)->capture_default_str();
  levelset->add_option("--out", ls.out);

  std::string dep_in, dep_stat = "tau";
  auto* depmeasure = app.add_subcommand("depmeasure", "Kendall tau or Spearman rho of a sample");
  depmeasure->add_option("--in", dep_in)->required();
  depmeasure->add_option("--stat", dep_stat, "tau or rho")->capture_default_str();

  DistortionArgs ds;
  auto* distortion = app.add_subcommand("distortion", "Relative error of smoothed generators");
  distortion->add_option("--gx", ds.gx)->capture_default_str();
  distortion->add_option("--gy", ds.gy)->capture_default_str();
  distortion->add_option("--c", ds.c)->capture_default_str();
  distortion->add_option("--u-grid", ds.u_grid)->capture_default_str();
  distortion->add_option("--out", ds.out);
  distortion->add_flag("--laplace-bound", ds.laplace_bound, "also report the 1-D Laplace bound");
  distortion->add_option("--sigma2", ds.sigma2)->capture_default_str();
  distortion->add_option("--M", ds.laplace_M);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a configured experiment");
  simulate->add_option("--config", sim.config)->required();
  simulate->add_option("--out", sim.out);
  simulate->add_option("--summary", sim.summary);
  simulate->add_option("--threads", sim.threads);

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Draw from a parametric copula");
  sample->add_option("--copula", sa.copula)->capture_default_str();
  sample->add_option("--n", sa.n)->capture_default_str();
  sample->add_option("--dim", sa.dim)->capture_default_str();
  sample->add_option("--seed", sa.seed);
  sample->add_option("--out", sa.out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*bandwidth)
      run_bandwidth(bw, out);
    else if (*bootstrap)
      run_bootstrap(bs, out);
    else if (*levelset)
      run_levelset(ls, out, err);
    else if (*depmeasure) {
      SampleMatrix data = read_csv_matrix(dep_in);
      out << std::setprecision(12) << evaluate_functional(parse_functional(dep_stat), data) << '\n';
    } else if (*distortion)
      run_distortion(ds, out, err);
    else if (*simulate)
      run_simulate(sim, out);
    else if (*sample) {
      RandomStream rng(sa.seed);
      Sink sink(sa.out, out);
      write_sample_csv(*sink, sample_copula(CopulaSpec::parse(sa.copula, sa.dim), sa.n, rng));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

} // namespace smoothcop::cli
