#include "smoothcop/polygon.hpp"

namespace smoothcop {

std::size_t
PolygonChain::segment_count() const
{
  if (vertices.size() < 2)
    return 0;
  return closed ? vertices.size() : vertices.size() - 1;
}

} // namespace smoothcop
