#include "smoothcop/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "smoothcop/copula.hpp"
#include "smoothcop/errors.hpp"
#include "smoothcop/stats.hpp"

namespace smoothcop {

namespace {

void
require_bivariate(const SampleMatrix& data, std::size_t min_rows)
{
  if (data.cols() < 2)
    throw std::invalid_argument("need at least two columns");
  if (std::size_t(data.rows()) < min_rows)
    throw std::invalid_argument("need at least " + std::to_string(min_rows) + " rows");
}

std::vector<double>
column(const SampleMatrix& data, Eigen::Index j)
{
  return { data.col(j).data(), data.col(j).data() + data.rows() };
}

int
sign(double x)
{
  return (x > 0.0) - (x < 0.0);
}

// Counts inversions (strict) of v while merge-sorting it.
std::uint64_t
merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi)
{
  if (hi - lo < 2)
    return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += mid - i;
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid)
    buf[k++] = v[i++];
  while (j < hi)
    buf[k++] = v[j++];
  std::copy(buf.begin() + std::ptrdiff_t(lo), buf.begin() + std::ptrdiff_t(hi),
            v.begin() + std::ptrdiff_t(lo));
  return swaps;
}

template<class Eq>
std::uint64_t
tied_pairs(const std::vector<std::size_t>& order, Eq&& equal)
{
  std::uint64_t total = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && equal(order[i], order[j]))
      ++j;
    std::uint64_t t = j - i;
    total += t * (t - 1) / 2;
    i = j;
  }
  return total;
}

class Fenwick
{
public:
  explicit Fenwick(std::size_t n)
    : tree_(n + 1, 0)
  {}
  void add(std::size_t i)
  {
    for (++i; i < tree_.size(); i += i & (~i + 1))
      ++tree_[i];
  }
  // number of inserted positions < i
  std::int64_t prefix(std::size_t i) const
  {
    std::int64_t s = 0;
    for (; i > 0; i -= i & (~i + 1))
      s += tree_[i];
    return s;
  }

private:
  std::vector<std::int64_t> tree_;
};

} // namespace

double
sample_rho_s(const SampleMatrix& data)
{
  require_bivariate(data, 2);
  auto rx = average_ranks(column(data, 0));
  auto ry = average_ranks(column(data, 1));
  double mx = mean(rx), my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::domain_error("sample_rho_s: constant column, correlation undefined");
  return sxy / std::sqrt(sxx * syy);
}

double
kendall_tau_pairwise(std::span<const double> x, std::span<const double> y)
{
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n)
    throw std::invalid_argument("kendall tau: need two equal-length columns with n >= 2");
  std::int64_t s = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      s += sign(x[i] - x[j]) * sign(y[i] - y[j]);
  return double(s) / (0.5 * double(n) * double(n - 1));
}

double
kendall_tau_merge(std::span<const double> x, std::span<const double> y)
{
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n)
    throw std::invalid_argument("kendall tau: need two equal-length columns with n >= 2");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{ 0 });
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });
  std::uint64_t tied_x = tied_pairs(order, [&](auto a, auto b) { return x[a] == x[b]; });
  std::uint64_t tied_xy = tied_pairs(
    order, [&](auto a, auto b) { return x[a] == x[b] && y[a] == y[b]; });
  std::vector<double> ys(n), buf(n);
  for (std::size_t k = 0; k < n; ++k)
    ys[k] = y[order[k]];
  std::uint64_t discordant = merge_count(ys, buf, 0, n);
  // ys is now sorted
  std::uint64_t tied_y = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && ys[j] == ys[i])
      ++j;
    std::uint64_t t = j - i;
    tied_y += t * (t - 1) / 2;
    i = j;
  }
  std::uint64_t pairs = std::uint64_t(n) * (n - 1) / 2;
  double diff = double(pairs) - double(tied_x) - double(tied_y) + double(tied_xy) -
                2.0 * double(discordant);
  return diff / double(pairs);
}

std::vector<double>
kendall_influence(std::span<const double> x, std::span<const double> y)
{
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n)
    throw std::invalid_argument("kendall_influence: need two equal-length columns with n >= 2");
  std::vector<double> ylevels(y.begin(), y.end());
  std::sort(ylevels.begin(), ylevels.end());
  ylevels.erase(std::unique(ylevels.begin(), ylevels.end()), ylevels.end());
  std::vector<std::size_t> yrank(n);
  for (std::size_t i = 0; i < n; ++i)
    yrank[i] = std::size_t(std::lower_bound(ylevels.begin(), ylevels.end(), y[i]) -
                           ylevels.begin());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{ 0 });
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });

  std::vector<std::int64_t> score(n, 0);
  auto sweep = [&](bool forward) {
    Fenwick tree(ylevels.size());
    std::int64_t inserted = 0;
    std::size_t k = 0;
    while (k < n) {
      std::size_t end = k + 1;
      auto at = [&](std::size_t pos) { return forward ? order[pos] : order[n - 1 - pos]; };
      while (end < n && x[at(end)] == x[at(k)])
        ++end;
      for (std::size_t p = k; p < end; ++p) {
        std::size_t i = at(p);
        std::int64_t below = tree.prefix(yrank[i]);
        std::int64_t above = inserted - tree.prefix(yrank[i] + 1);
        // earlier x: concordant when y is below; later x: when y is above
        score[i] += forward ? below - above : above - below;
      }
      for (std::size_t p = k; p < end; ++p) {
        tree.add(yrank[at(p)]);
        ++inserted;
      }
      k = end;
    }
  };
  sweep(true);
  sweep(false);
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i)
    h[i] = double(score[i]) / double(n - 1);
  return h;
}

double
sample_tau(const SampleMatrix& data)
{
  require_bivariate(data, 2);
  auto x = column(data, 0);
  auto y = column(data, 1);
  return x.size() > 5000 ? kendall_tau_merge(x, y) : kendall_tau_pairwise(x, y);
}

std::vector<PolygonChain>
contour_lines(const Eigen::MatrixXd& field, std::span<const double> grid, double level)
{
  const auto g = Eigen::Index(grid.size());
  if (field.rows() != g || field.cols() != g || g < 2)
    throw std::invalid_argument("contour_lines: field must be grid x grid with grid >= 2");

  struct Segment
  {
    std::int64_t e0, e1;
  };
  std::unordered_map<std::int64_t, Point2> points;
  std::vector<Segment> segments;

  auto above = [&](Eigen::Index a, Eigen::Index b) { return field(a, b) > level; };
  auto interp = [&](Eigen::Index a0, Eigen::Index b0, Eigen::Index a1, Eigen::Index b1) {
    double f0 = field(a0, b0), f1 = field(a1, b1);
    double s = (level - f0) / (f1 - f0);
    return Point2{ grid[std::size_t(a0)] + s * (grid[std::size_t(a1)] - grid[std::size_t(a0)]),
                   grid[std::size_t(b0)] + s * (grid[std::size_t(b1)] - grid[std::size_t(b0)]) };
  };
  // horizontal edge (a,b)-(a+1,b) and vertical edge (a,b)-(a,b+1)
  auto h_edge = [&](Eigen::Index a, Eigen::Index b) {
    std::int64_t id = (std::int64_t(a) * g + b) * 2;
    points.try_emplace(id, interp(a, b, a + 1, b));
    return id;
  };
  auto v_edge = [&](Eigen::Index a, Eigen::Index b) {
    std::int64_t id = (std::int64_t(a) * g + b) * 2 + 1;
    points.try_emplace(id, interp(a, b, a, b + 1));
    return id;
  };

  for (Eigen::Index a = 0; a + 1 < g; ++a) {
    for (Eigen::Index b = 0; b + 1 < g; ++b) {
      int code = (above(a, b) ? 1 : 0) | (above(a + 1, b) ? 2 : 0) |
                 (above(a + 1, b + 1) ? 4 : 0) | (above(a, b + 1) ? 8 : 0);
      if (code == 0 || code == 15)
        continue;
      auto bottom = [&] { return h_edge(a, b); };
      auto top = [&] { return h_edge(a, b + 1); };
      auto left = [&] { return v_edge(a, b); };
      auto right = [&] { return v_edge(a + 1, b); };
      if (code == 5 || code == 10) {
        double center =
          0.25 * (field(a, b) + field(a + 1, b) + field(a + 1, b + 1) + field(a, b + 1));
        bool center_above = center > level;
        // keep the centre connected to the corners on its own side
        bool isolate_10_corners = (code == 5) == center_above;
        if (isolate_10_corners) {
          segments.push_back({ bottom(), right() });
          segments.push_back({ top(), left() });
        } else {
          segments.push_back({ left(), bottom() });
          segments.push_back({ right(), top() });
        }
        continue;
      }
      std::vector<std::int64_t> crossings;
      if (((code & 1) != 0) != ((code & 2) != 0))
        crossings.push_back(bottom());
      if (((code & 2) != 0) != ((code & 4) != 0))
        crossings.push_back(right());
      if (((code & 4) != 0) != ((code & 8) != 0))
        crossings.push_back(top());
      if (((code & 8) != 0) != ((code & 1) != 0))
        crossings.push_back(left());
      segments.push_back({ crossings[0], crossings[1] });
    }
  }

  std::unordered_map<std::int64_t, std::vector<std::size_t>> incident;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    incident[segments[s].e0].push_back(s);
    incident[segments[s].e1].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<PolygonChain> chains;
  auto walk = [&](std::size_t first, std::int64_t start) {
    PolygonChain chain;
    chain.vertices.push_back(points.at(start));
    std::int64_t current = start;
    std::size_t s = first;
    while (true) {
      used[s] = true;
      std::int64_t next = segments[s].e0 == current ? segments[s].e1 : segments[s].e0;
      chain.vertices.push_back(points.at(next));
      current = next;
      std::size_t follow = segments.size();
      for (std::size_t cand : incident[current])
        if (!used[cand])
          follow = cand;
      if (follow == segments.size())
        break;
      s = follow;
    }
    if (chain.vertices.size() > 2 && current == start) {
      chain.closed = true;
      chain.vertices.pop_back();
    }
    chains.push_back(std::move(chain));
  };
  // open chains start at edges with a single incident segment
  for (auto& [edge, segs] : incident)
    if (segs.size() == 1 && !used[segs[0]])
      walk(segs[0], edge);
  for (std::size_t s = 0; s < segments.size(); ++s)
    if (!used[s])
      walk(s, segments[s].e0);
  return chains;
}

PolygonChain
estimate_level_boundary(const SampleMatrix& data_u, double t, std::size_t grid_n)
{
  if (!(t > 0.0 && t < 1.0))
    throw std::domain_error("estimate_level_boundary: t must lie in (0, 1)");
  if (data_u.cols() != 2)
    throw std::invalid_argument("estimate_level_boundary: bivariate data required");
  if (grid_n < 2)
    throw std::invalid_argument("estimate_level_boundary: grid_n must be at least 2");
  std::vector<double> grid(grid_n);
  for (std::size_t k = 0; k < grid_n; ++k)
    grid[k] = double(k) / double(grid_n - 1);
  EmpiricalCopula ec(data_u);
  Eigen::MatrixXd values = ec.grid_values(grid);
  if (!(values.maxCoeff() > t))
    throw EmptyContour("estimate_level_boundary: no contour at the requested level");
  auto chains = contour_lines(values, grid, t);
  if (chains.empty())
    throw EmptyContour("estimate_level_boundary: no contour at the requested level");
  auto longest = std::max_element(chains.begin(), chains.end(), [](auto& a, auto& b) {
    return a.vertices.size() < b.vertices.size();
  });
  PolygonChain chain = std::move(*longest);
  chain.closed = false;
  if (chain.vertices.front().u > chain.vertices.back().u)
    std::reverse(chain.vertices.begin(), chain.vertices.end());
  for (auto& p : chain.vertices) {
    p.u = std::max(p.u, t);
    p.v = std::max(p.v, t);
  }
  const Point2 start{ t, 1.0 }, end{ 1.0, t };
  if (chain.vertices.front() != start)
    chain.vertices.insert(chain.vertices.begin(), start);
  if (chain.vertices.back() != end)
    chain.vertices.push_back(end);
  return chain;
}

double
point_segment_distance(const Point2& p, const Point2& s0, const Point2& s1)
{
  double du = s1.u - s0.u, dv = s1.v - s0.v;
  double len2 = du * du + dv * dv;
  double s = 0.0;
  if (len2 > 0.0)
    s = std::clamp(((p.u - s0.u) * du + (p.v - s0.v) * dv) / len2, 0.0, 1.0);
  return std::hypot(p.u - (s0.u + s * du), p.v - (s0.v + s * dv));
}

namespace {

struct SegmentRef
{
  Point2 a, b;
};

std::vector<SegmentRef>
segments_of(const PolygonChain& c)
{
  if (c.vertices.empty())
    throw std::invalid_argument("hausdorff: empty chain");
  std::vector<SegmentRef> segs;
  const auto& v = c.vertices;
  if (v.size() == 1) {
    segs.push_back({ v[0], v[0] });
    return segs;
  }
  for (std::size_t k = 0; k + 1 < v.size(); ++k)
    segs.push_back({ v[k], v[k + 1] });
  if (c.closed && v.size() > 2)
    segs.push_back({ v.back(), v.front() });
  return segs;
}

double
directed_brute(const std::vector<Point2>& pts, const std::vector<SegmentRef>& segs)
{
  double worst = 0.0;
  for (const auto& p : pts) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : segs)
      best = std::min(best, point_segment_distance(p, s.a, s.b));
    worst = std::max(worst, best);
  }
  return worst;
}

} // namespace

double
directed_hausdorff(const PolygonChain& a, const PolygonChain& b, std::uint64_t seed)
{
  if (a.vertices.empty())
    throw std::invalid_argument("hausdorff: empty chain");
  auto segs = segments_of(b);
  std::vector<Point2> pts = a.vertices;
  if (pts.size() * segs.size() <= 64)
    return directed_brute(pts, segs);
  // random order makes the early exit effective on ordered polylines
  std::mt19937_64 engine(seed);
  std::shuffle(pts.begin(), pts.end(), engine);
  std::shuffle(segs.begin(), segs.end(), engine);
  double cmax = 0.0;
  for (const auto& p : pts) {
    double cmin = std::numeric_limits<double>::infinity();
    bool skipped = false;
    for (const auto& s : segs) {
      double d = point_segment_distance(p, s.a, s.b);
      if (d < cmax) {
        skipped = true;
        break;
      }
      cmin = std::min(cmin, d);
    }
    if (!skipped && cmin > cmax)
      cmax = cmin;
  }
  return cmax;
}

double
hausdorff_distance(const PolygonChain& a, const PolygonChain& b)
{
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double
hausdorff_brute_force(const PolygonChain& a, const PolygonChain& b)
{
  if (a.vertices.empty() || b.vertices.empty())
    throw std::invalid_argument("hausdorff: empty chain");
  return std::max(directed_brute(a.vertices, segments_of(b)),
                  directed_brute(b.vertices, segments_of(a)));
}

DiagonalCurve
empirical_diagonal(const SampleMatrix& data_u, std::span<const double> u_grid)
{
  if (data_u.cols() < 2)
    throw std::invalid_argument("empirical_diagonal: need d >= 2");
  if (data_u.rows() < 1)
    throw std::invalid_argument("empirical_diagonal: empty sample");
  SampleMatrix u = pseudo_observations(data_u);
  std::vector<double> row_max(std::size_t(u.rows()));
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    row_max[std::size_t(i)] = u.row(i).maxCoeff();
  std::sort(row_max.begin(), row_max.end());
  DiagonalCurve curve;
  curve.u_grid.assign(u_grid.begin(), u_grid.end());
  curve.values.reserve(u_grid.size());
  for (double x : u_grid) {
    auto count = std::upper_bound(row_max.begin(), row_max.end(), x) - row_max.begin();
    curve.values.push_back(double(count) / double(row_max.size()));
  }
  return curve;
}

} // namespace smoothcop
