#include "smoothcop/simulation.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include "smoothcop/errors.hpp"
#include "smoothcop/io.hpp"
#include "smoothcop/parallel.hpp"
#include "smoothcop/stats.hpp"

namespace smoothcop {

namespace {

constexpr double no_level = std::numeric_limits<double>::quiet_NaN();

std::string
strip_value(std::string_view raw)
{
  std::string v = trim(raw);
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '[' && v.back() == ']')))
    v = trim(std::string_view(v).substr(1, v.size() - 2));
  return v;
}

std::vector<double>
parse_double_list(std::string_view text)
{
  std::vector<double> out;
  for (const auto& item : split(text, ','))
    if (!trim(item).empty())
      out.push_back(parse_double(trim(item)));
  return out;
}

std::vector<std::size_t>
parse_size_list(std::string_view text)
{
  std::vector<std::size_t> out;
  for (const auto& item : split(text, ','))
    if (!trim(item).empty())
      out.push_back(std::size_t(parse_int(trim(item))));
  return out;
}

std::size_t
parse_count(std::string_view text)
{
  long long v = parse_int(text);
  if (v < 0)
    throw std::invalid_argument("negative count '" + std::string(text) + "'");
  return std::size_t(v);
}

// Replicate failures that count as missing rather than aborting the run.
template<class Fn>
double
or_missing(Fn&& fn)
{
  try {
    return fn();
  } catch (const EmptyContour&) {
  } catch (const ConvergenceError&) {
  } catch (const std::domain_error&) {
  }
  return std::numeric_limits<double>::quiet_NaN();
}

BootstrapConfig
bootstrap_settings(const ExperimentConfig& cfg)
{
  BootstrapConfig b;
  b.m = cfg.m;
  b.kernel = cfg.kernel;
  b.bandwidth_rule = cfg.bandwidth;
  b.seed = cfg.seed;
  return b;
}

std::uint64_t
cell_seed(const ExperimentConfig& cfg, std::size_t copula_index, std::size_t n_index)
{
  return mix_seed(mix_seed(cfg.seed, copula_index), n_index);
}

bool
same_level(double a, double b)
{
  return (std::isnan(a) && std::isnan(b)) || std::abs(a - b) < 1e-12;
}

// Appends replicate rows and one summary row for a single cell.
void
emit_cell(ExperimentResult& out,
          const ExperimentConfig& cfg,
          const CopulaSpec& spec,
          std::string_view stat,
          std::size_t n,
          double t,
          std::string_view method,
          const std::vector<double>& values,
          double truth)
{
  SummaryRow s{ experiment_name(cfg.experiment), spec.family_name(), spec.parameter_label(),
                std::string(stat), n, t, std::string(method) };
  s.truth = truth;
  std::vector<double> kept;
  for (std::size_t rep = 0; rep < values.size(); ++rep) {
    if (std::isnan(values[rep])) {
      ++s.missing;
      continue;
    }
    kept.push_back(values[rep]);
    out.rows.push_back({ s.experiment, s.family, s.param, s.stat, n, t, s.method, rep, values[rep] });
  }
  s.count = kept.size();
  if (kept.empty()) {
    s.median = s.q1 = s.q3 = s.mean = s.bias = s.mse = std::numeric_limits<double>::quiet_NaN();
  } else {
    s.median = median(kept);
    s.q1 = quantile(kept, 0.25);
    s.q3 = quantile(kept, 0.75);
    s.mean = mean(kept);
    s.bias = s.mean - truth;
    double sq = 0.0;
    for (double v : kept)
      sq += (v - truth) * (v - truth);
    s.mse = sq / double(kept.size());
  }
  out.summary.push_back(std::move(s));
}

std::string
format_level(double t)
{
  return std::isnan(t) ? std::string() : format_number(t);
}

} // namespace

ExperimentKind
parse_experiment_kind(std::string_view name)
{
  if (name == "levelset_hausdorff" || name == "levelset")
    return ExperimentKind::levelset_hausdorff;
  if (name == "depmeasure_mse" || name == "depmeasure")
    return ExperimentKind::depmeasure_mse;
  if (name == "diagonal")
    return ExperimentKind::diagonal;
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

const char*
experiment_name(ExperimentKind kind)
{
  switch (kind) {
    case ExperimentKind::levelset_hausdorff:
      return "levelset_hausdorff";
    case ExperimentKind::depmeasure_mse:
      return "depmeasure_mse";
    case ExperimentKind::diagonal:
      return "diagonal";
  }
  return "";
}

ExperimentConfig
ExperimentConfig::parse(std::istream& in)
{
  ExperimentConfig cfg;
  std::vector<std::string> copula_texts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::string text = trim(line);
    if (text.empty() || text.front() == '[')
      continue;
    auto eq = text.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(std::string_view(text).substr(0, eq));
    std::string value = strip_value(std::string_view(text).substr(eq + 1));
    if (key == "experiment")
      cfg.experiment = parse_experiment_kind(value);
    else if (key == "copula" || key == "copulas")
      for (const auto& item : split(value, ';'))
        copula_texts.push_back(trim(item));
    else if (key == "tau_targets")
      cfg.tau_targets = parse_double_list(value);
    else if (key == "n_list")
      cfg.n_list = parse_size_list(value);
    else if (key == "m")
      cfg.m = parse_count(value);
    else if (key == "t_list")
      cfg.t_list = parse_double_list(value);
    else if (key == "reps" || key == "M_reps")
      cfg.reps = parse_count(value);
    else if (key == "seed")
      cfg.seed = std::uint64_t(parse_int(value));
    else if (key == "bandwidth")
      cfg.bandwidth = parse_bandwidth_rule(value);
    else if (key == "kernel")
      cfg.kernel = KernelSpec::parse(value);
    else if (key == "grid")
      cfg.grid = parse_count(value);
    else if (key == "dim")
      cfg.dim = parse_count(value);
    else if (key == "truth_points")
      cfg.truth_points = parse_count(value);
    else if (key == "u_grid")
      cfg.u_grid = value.find(':') != std::string::npos ? parse_grid(value) : parse_double_list(value);
    else if (key == "threads")
      cfg.threads = parse_count(value);
    else
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  // dim may appear after the copula lines
  for (const auto& text : copula_texts)
    if (!text.empty())
      cfg.copulas.push_back(CopulaSpec::parse(text, cfg.dim));
  return cfg;
}

ExperimentConfig
ExperimentConfig::load(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open config '" + path.string() + "'");
  return parse(in);
}

std::vector<CopulaSpec>
ExperimentConfig::resolved_copulas() const
{
  std::vector<CopulaSpec> out = copulas;
  for (double tau : tau_targets)
    out.push_back(CopulaSpec::clayton(clayton_theta_from_tau(tau), dim));
  return out;
}

void
ExperimentConfig::validate() const
{
  if (reps < 1)
    throw std::invalid_argument("config: reps must be at least 1");
  if (n_list.empty())
    throw std::invalid_argument("config: n_list is empty");
  for (auto n : n_list)
    if (n < 5)
      throw std::invalid_argument("config: every n must be at least 5");
  if (m < 1)
    throw std::invalid_argument("config: m must be positive");
  if (copulas.empty() && tau_targets.empty())
    throw std::invalid_argument("config: no copula or tau target given");
  for (const auto& c : resolved_copulas())
    c.validate();
  if (experiment == ExperimentKind::levelset_hausdorff) {
    if (t_list.empty())
      throw std::invalid_argument("config: levelset experiment needs t_list");
    for (double t : t_list)
      if (!(t > 0.0 && t < 1.0))
        throw std::invalid_argument("config: levels must lie in (0, 1)");
    if (grid < 2 || truth_points < 2)
      throw std::invalid_argument("config: grid and truth_points must be at least 2");
    for (const auto& c : resolved_copulas())
      if (c.family != CopulaFamily::clayton || c.dim != 2)
        throw std::invalid_argument("config: levelset experiment needs bivariate Clayton copulas");
  }
  if (experiment == ExperimentKind::depmeasure_mse)
    for (const auto& c : resolved_copulas())
      if (c.dim != 2)
        throw std::invalid_argument("config: depmeasure experiment needs bivariate copulas");
  if (experiment == ExperimentKind::diagonal && dim < 2)
    throw std::invalid_argument("config: diagonal experiment needs dim >= 2");
}

ExperimentResult
run_levelset_experiment(const ExperimentConfig& cfg)
{
  cfg.validate();
  const auto specs = cfg.resolved_copulas();
  const auto bcfg = bootstrap_settings(cfg);
  const std::size_t levels = cfg.t_list.size();
  ExperimentResult result;
  for (std::size_t ci = 0; ci < specs.size(); ++ci) {
    const auto& spec = specs[ci];
    std::vector<PolygonChain> truth;
    for (double t : cfg.t_list)
      truth.push_back(clayton_level_boundary(spec.theta, t, cfg.truth_points));
    // values[ni][rep][2 * level + method]
    std::vector<std::vector<std::vector<double>>> values(cfg.n_list.size());
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      auto& cell = values[ni];
      cell.assign(cfg.reps, std::vector<double>(2 * levels));
      const std::uint64_t base = cell_seed(cfg, ci, ni);
      parallel_for(cfg.reps, cfg.threads, [&](std::size_t rep) {
        auto rng = RandomStream::derive(base, rep);
        SampleMatrix sample = sample_copula(spec, cfg.n_list[ni], rng);
        SampleMatrix smooth;
        bool have_smooth = true;
        try {
          smooth = smooth_bootstrap_copula_sample(sample, bcfg, rng);
        } catch (const ConvergenceError&) {
          have_smooth = false;
        } catch (const std::domain_error&) {
          have_smooth = false;
        }
        for (std::size_t k = 0; k < levels; ++k) {
          double t = cfg.t_list[k];
          cell[rep][2 * k] = or_missing([&] {
            return hausdorff_distance(estimate_level_boundary(sample, t, cfg.grid), truth[k]);
          });
          cell[rep][2 * k + 1] = have_smooth ? or_missing([&] {
            return hausdorff_distance(estimate_level_boundary(smooth, t, cfg.grid), truth[k]);
          })
                                             : std::numeric_limits<double>::quiet_NaN();
        }
      });
    }
    for (std::size_t k = 0; k < levels; ++k)
      for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni)
        for (std::size_t method = 0; method < 2; ++method) {
          std::vector<double> column(cfg.reps);
          for (std::size_t rep = 0; rep < cfg.reps; ++rep)
            column[rep] = values[ni][rep][2 * k + method];
          emit_cell(result, cfg, spec, "hausdorff", cfg.n_list[ni], cfg.t_list[k],
                    method == 0 ? "raw" : "smooth", column, 0.0);
        }
  }
  return result;
}

ExperimentResult
run_depmeasure_experiment(const ExperimentConfig& cfg)
{
  cfg.validate();
  const auto specs = cfg.resolved_copulas();
  const auto bcfg = bootstrap_settings(cfg);
  ExperimentResult result;
  for (std::size_t ci = 0; ci < specs.size(); ++ci) {
    const auto& spec = specs[ci];
    const double truth[2] = { true_tau(spec), true_rho_s(spec) };
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      // per rep: raw tau, smooth tau, raw rho, smooth rho
      std::vector<std::array<double, 4>> cell(cfg.reps);
      const std::uint64_t base = cell_seed(cfg, ci, ni);
      parallel_for(cfg.reps, cfg.threads, [&](std::size_t rep) {
        auto rng = RandomStream::derive(base, rep);
        SampleMatrix sample = sample_copula(spec, cfg.n_list[ni], rng);
        cell[rep][0] = or_missing([&] { return sample_tau(sample); });
        cell[rep][2] = or_missing([&] { return sample_rho_s(sample); });
        SampleMatrix smooth;
        try {
          smooth = smooth_bootstrap_copula_sample(sample, bcfg, rng);
          cell[rep][1] = or_missing([&] { return sample_tau(smooth); });
          cell[rep][3] = or_missing([&] { return sample_rho_s(smooth); });
        } catch (const ConvergenceError&) {
          cell[rep][1] = cell[rep][3] = std::numeric_limits<double>::quiet_NaN();
        } catch (const std::domain_error&) {
          cell[rep][1] = cell[rep][3] = std::numeric_limits<double>::quiet_NaN();
        }
      });
      for (std::size_t stat = 0; stat < 2; ++stat)
        for (std::size_t method = 0; method < 2; ++method) {
          std::vector<double> column(cfg.reps);
          for (std::size_t rep = 0; rep < cfg.reps; ++rep)
            column[rep] = cell[rep][2 * stat + method];
          emit_cell(result, cfg, spec, stat == 0 ? "tau" : "rho_s", cfg.n_list[ni], no_level,
                    method == 0 ? "raw" : "smooth", column, truth[stat]);
        }
    }
  }
  return result;
}

double
sup_gap(const DiagonalCurve& estimate, const CopulaSpec& truth)
{
  double gap = 0.0;
  std::vector<double> point(truth.dim);
  for (std::size_t k = 0; k < estimate.u_grid.size(); ++k) {
    std::fill(point.begin(), point.end(), estimate.u_grid[k]);
    gap = std::max(gap, std::abs(estimate.values[k] - copula_cdf(truth, point)));
  }
  return gap;
}

ExperimentResult
run_diagonal_experiment(const ExperimentConfig& cfg)
{
  cfg.validate();
  auto specs = cfg.resolved_copulas();
  const auto bcfg = bootstrap_settings(cfg);
  const std::vector<double> u_grid = cfg.u_grid.empty() ? arithmetic_grid(0.0, 1.0, 0.01) : cfg.u_grid;
  ExperimentResult result;
  for (std::size_t ci = 0; ci < specs.size(); ++ci) {
    const auto& spec = specs[ci];
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      std::vector<std::array<double, 2>> cell(cfg.reps);
      const std::uint64_t base = cell_seed(cfg, ci, ni);
      parallel_for(cfg.reps, cfg.threads, [&](std::size_t rep) {
        auto rng = RandomStream::derive(base, rep);
        SampleMatrix sample = sample_copula(spec, cfg.n_list[ni], rng);
        cell[rep][0] = or_missing([&] { return sup_gap(empirical_diagonal(sample, u_grid), spec); });
        cell[rep][1] = or_missing([&] {
          SampleMatrix smooth = smooth_bootstrap_copula_sample(sample, bcfg, rng);
          return sup_gap(empirical_diagonal(smooth, u_grid), spec);
        });
      });
      for (std::size_t method = 0; method < 2; ++method) {
        std::vector<double> column(cfg.reps);
        for (std::size_t rep = 0; rep < cfg.reps; ++rep)
          column[rep] = cell[rep][method];
        emit_cell(result, cfg, spec, "sup_gap", cfg.n_list[ni], no_level,
                  method == 0 ? "raw" : "smooth", column, 0.0);
      }
    }
  }
  return result;
}

ExperimentResult
run_experiment(const ExperimentConfig& cfg)
{
  switch (cfg.experiment) {
    case ExperimentKind::levelset_hausdorff:
      return run_levelset_experiment(cfg);
    case ExperimentKind::depmeasure_mse:
      return run_depmeasure_experiment(cfg);
    case ExperimentKind::diagonal:
      return run_diagonal_experiment(cfg);
  }
  throw std::invalid_argument("unknown experiment");
}

void
write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows)
{
  out << "experiment,family,param,stat,n,t,method,rep,value\n";
  out << std::setprecision(12);
  for (const auto& r : rows)
    out << r.experiment << ',' << r.family << ',' << r.param << ',' << r.stat << ',' << r.n
        << ',' << format_level(r.t) << ',' << r.method << ',' << r.rep << ',' << r.value << '\n';
}

void
write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows)
{
  out << "experiment,family,param,stat,n,t,method,count,missing,truth,median,q1,q3,mean,bias,mse\n";
  out << std::setprecision(12);
  for (const auto& s : rows)
    out << s.experiment << ',' << s.family << ',' << s.param << ',' << s.stat << ',' << s.n
        << ',' << format_level(s.t) << ',' << s.method << ',' << s.count << ',' << s.missing << ','
        << s.truth << ',' << s.median << ',' << s.q1 << ',' << s.q3 << ',' << s.mean << ','
        << s.bias << ',' << s.mse << '\n';
}

const SummaryRow*
find_summary(const ExperimentResult& result,
             std::string_view stat,
             std::size_t n,
             std::string_view method,
             double t)
{
  for (const auto& s : result.summary)
    if (s.stat == stat && s.n == n && s.method == method && same_level(s.t, t))
      return &s;
  return nullptr;
}

} // namespace smoothcop
