#include "smoothcop/parallel.hpp"

namespace smoothcop {

std::size_t
default_thread_count()
{
  return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace smoothcop
