#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smoothcop/simulation.hpp"

using namespace smoothcop;
using Catch::Matchers::WithinAbs;

namespace {

ExperimentConfig
parse_text(const std::string& text)
{
  std::istringstream in(text);
  return ExperimentConfig::parse(in);
}

bool
same_values(const ExperimentResult& a, const ExperimentResult& b)
{
  if (a.rows.size() != b.rows.size())
    return false;
  for (std::size_t k = 0; k < a.rows.size(); ++k)
    if (a.rows[k].value != b.rows[k].value || a.rows[k].rep != b.rows[k].rep)
      return false;
  return true;
}

} // namespace

TEST_CASE("config parsing")
{
  auto cfg = parse_text(R"(
[experiment]
experiment = "levelset"   # short name
copulas = clayton:2; gumbel:1.5
tau_targets = [0.2, 0.5]
n_list = 25, 50
t_list = 0.3
M_reps = 7
seed = 11
kernel = laplace
bandwidth = silverman
u_grid = 0:1:0.5
)");
  CHECK(cfg.experiment == ExperimentKind::levelset_hausdorff);
  REQUIRE(cfg.copulas.size() == 2);
  CHECK(cfg.copulas[1].label() == CopulaSpec::gumbel(1.5).label());
  CHECK(cfg.n_list == std::vector<std::size_t>{ 25, 50 });
  CHECK(cfg.reps == 7);
  CHECK(cfg.seed == 11);
  CHECK(cfg.u_grid == std::vector<double>{ 0.0, 0.5, 1.0 });
  auto all = cfg.resolved_copulas();
  REQUIRE(all.size() == 4);
  CHECK_THAT(all[3].theta, WithinAbs(2.0, 1e-12)); // tau 0.5
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument); // gumbel has no level boundary oracle

  CHECK_THROWS_AS(parse_text("colour = red\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_text("experiment = other\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_text("just text\n"), std::invalid_argument);
  auto tiny = parse_text("experiment = depmeasure\ncopula = clayton:1\nn_list = 4\n");
  CHECK_THROWS_AS(tiny.validate(), std::invalid_argument);
}

TEST_CASE("levelset experiment layout and determinism")
{
  ExperimentConfig cfg;
  cfg.copulas = { CopulaSpec::clayton(2.0) };
  cfg.n_list = { 20, 40 };
  cfg.t_list = { 0.2, 0.5 };
  cfg.m = 300;
  cfg.reps = 3;
  cfg.grid = 60;
  cfg.truth_points = 300;
  cfg.seed = 5;
  auto result = run_experiment(cfg);
  // cells x methods x reps
  std::size_t missing = 0;
  for (const auto& s : result.summary)
    missing += s.missing;
  CHECK(result.rows.size() + missing == 2 * 2 * 2 * 3);
  CHECK(result.summary.size() == 8);
  for (const auto& s : result.summary) {
    CHECK(s.count + s.missing == 3);
    CHECK(s.truth == 0.0);
    CHECK(s.q1 <= s.median);
    CHECK(s.median <= s.q3);
  }
  for (const auto& r : result.rows)
    CHECK(r.value >= 0.0);

  auto again = run_experiment(cfg);
  CHECK(same_values(result, again));
  cfg.threads = 3;
  CHECK(same_values(result, run_experiment(cfg)));
  cfg.seed = 6;
  CHECK_FALSE(same_values(result, run_experiment(cfg)));
}

TEST_CASE("a single replicate and the smallest sample size")
{
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::depmeasure_mse;
  cfg.copulas = { CopulaSpec::clayton(1.0) };
  cfg.n_list = { 5 };
  cfg.m = 50;
  cfg.reps = 1;
  auto result = run_experiment(cfg);
  CHECK(result.rows.size() + result.summary[0].missing + result.summary[1].missing +
          result.summary[2].missing + result.summary[3].missing ==
        4);
  for (const auto& s : result.summary)
    if (s.count == 1) {
      CHECK(s.median == s.mean);
      CHECK_THAT(s.mse, WithinAbs(s.bias * s.bias, 1e-15));
    }
}

TEST_CASE("depmeasure summary statistics")
{
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::depmeasure_mse;
  cfg.copulas = { CopulaSpec::gaussian(0.5) };
  cfg.n_list = { 30 };
  cfg.m = 200;
  cfg.reps = 40;
  cfg.seed = 9;
  auto result = run_experiment(cfg);
  const SummaryRow* raw = find_summary(result, "tau", 30, "raw");
  REQUIRE(raw != nullptr);
  CHECK_THAT(raw->truth, WithinAbs(1.0 / 3.0, 1e-12));
  std::vector<double> values;
  for (const auto& r : result.rows)
    if (r.stat == "tau" && r.method == "raw")
      values.push_back(r.value);
  REQUIRE(values.size() == raw->count);
  double m = 0.0, mse = 0.0;
  for (double v : values) {
    m += v / double(values.size());
    mse += (v - raw->truth) * (v - raw->truth) / double(values.size());
  }
  CHECK_THAT(raw->mean, WithinAbs(m, 1e-12));
  CHECK_THAT(raw->bias, WithinAbs(m - raw->truth, 1e-12));
  CHECK_THAT(raw->mse, WithinAbs(mse, 1e-12));
  CHECK(find_summary(result, "rho_s", 30, "smooth") != nullptr);
  CHECK(find_summary(result, "rho_s", 31, "smooth") == nullptr);
}

TEST_CASE("diagonal experiment")
{
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::diagonal;
  cfg.copulas = { CopulaSpec::independence() };
  cfg.n_list = { 10000 };
  cfg.m = 10000;
  cfg.reps = 2;
  cfg.seed = 10;
  auto result = run_experiment(cfg);
  for (const auto& r : result.rows)
    CHECK(r.value < 0.05);

  ExperimentConfig high;
  high.experiment = ExperimentKind::diagonal;
  high.dim = 12;
  high.copulas = { CopulaSpec::clayton(5.0, 12) };
  high.n_list = { 10 };
  high.m = 10000;
  high.reps = 20;
  high.seed = 11;
  auto hr = run_experiment(high);
  const SummaryRow* raw = find_summary(hr, "sup_gap", 10, "raw");
  const SummaryRow* smooth = find_summary(hr, "sup_gap", 10, "smooth");
  REQUIRE(raw != nullptr);
  REQUIRE(smooth != nullptr);
  CHECK(smooth->mean < raw->mean);
}

TEST_CASE("csv writers")
{
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::depmeasure_mse;
  cfg.copulas = { CopulaSpec::clayton(1.0) };
  cfg.n_list = { 10 };
  cfg.m = 20;
  cfg.reps = 2;
  auto result = run_experiment(cfg);
  std::ostringstream rows, summary;
  write_results_csv(rows, result.rows);
  write_summary_csv(summary, result.summary);
  std::string r = rows.str(), s = summary.str();
  CHECK(r.rfind("experiment,family,param,stat,n,t,method,rep,value\n", 0) == 0);
  CHECK(s.rfind("experiment,family,param,stat,n,t,method,count,missing,truth,median,q1,q3,mean,bias,mse\n", 0) == 0);
  CHECK(std::count(r.begin(), r.end(), '\n') == std::ptrdiff_t(result.rows.size() + 1));
  CHECK(std::count(s.begin(), s.end(), '\n') == std::ptrdiff_t(result.summary.size() + 1));
}
