#pragma once

#include <vector>

namespace smoothcop {

struct Point2
{
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

//! Ordered vertices in the unit square. Open chains are compared as
//! polylines; closed chains add the segment from the last vertex back to
//! the first.
struct PolygonChain
{
  std::vector<Point2> vertices;
  bool closed = false;

  std::size_t segment_count() const;
};

} // namespace smoothcop
