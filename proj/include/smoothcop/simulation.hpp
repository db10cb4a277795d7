#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "smoothcop/bootstrap.hpp"
#include "smoothcop/copula.hpp"
#include "smoothcop/functionals.hpp"
#include "smoothcop/kernel.hpp"

namespace smoothcop {

enum class ExperimentKind
{
  levelset_hausdorff,
  depmeasure_mse,
  diagonal
};

ExperimentKind parse_experiment_kind(std::string_view name);
const char* experiment_name(ExperimentKind kind);

struct ExperimentConfig
{
  ExperimentKind experiment = ExperimentKind::levelset_hausdorff;
  std::vector<CopulaSpec> copulas;
  //! Each entry adds a Clayton copula with this Kendall tau.
  std::vector<double> tau_targets;
  std::vector<std::size_t> n_list;
  std::size_t m = 2000;
  std::vector<double> t_list;
  std::size_t reps = 200;
  std::uint64_t seed = 0;
  BandwidthRule bandwidth = BandwidthRule::silverman;
  KernelSpec kernel = KernelSpec::gauss();
  std::size_t grid = 200;
  std::size_t dim = 2;
  //! Points on the true level boundary used as the reference polyline.
  std::size_t truth_points = 2000;
  //! u grid for the diagonal experiment; empty means 0, 0.01, ..., 1.
  std::vector<double> u_grid;
  std::size_t threads = 1;

  //! Flat "key = value" lines; '#' starts a comment. Lists are comma
  //! separated, copula lists are separated by ';'.
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::filesystem::path& path);

  //! Copulas plus the Clayton copulas implied by tau_targets.
  std::vector<CopulaSpec> resolved_copulas() const;
  void validate() const;
};

struct ResultRow
{
  std::string experiment;
  std::string family;
  std::string param;
  std::string stat;
  std::size_t n = 0;
  double t = 0.0; // NaN when the experiment has no level
  std::string method;
  std::size_t rep = 0;
  double value = 0.0;
};

struct SummaryRow
{
  std::string experiment;
  std::string family;
  std::string param;
  std::string stat;
  std::size_t n = 0;
  double t = 0.0;
  std::string method;
  std::size_t count = 0;
  std::size_t missing = 0;
  //! Target value: true functional for estimates, 0 for distances.
  double truth = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double mean = 0.0;
  double bias = 0.0;
  double mse = 0.0;
};

struct ExperimentResult
{
  //! Replicate values in cell order, then rep order. Missing replicates
  //! are absent here and counted in the summary.
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summary;
};

ExperimentResult run_levelset_experiment(const ExperimentConfig& cfg);
ExperimentResult run_depmeasure_experiment(const ExperimentConfig& cfg);
ExperimentResult run_diagonal_experiment(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

//! Sup over the grid of |estimate - truth|.
double sup_gap(const DiagonalCurve& estimate, const CopulaSpec& truth);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

const SummaryRow* find_summary(const ExperimentResult& result,
                               std::string_view stat,
                               std::size_t n,
                               std::string_view method,
                               double t = std::numeric_limits<double>::quiet_NaN());

} // namespace smoothcop
