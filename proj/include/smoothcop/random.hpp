#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace smoothcop {

//! Seeded pseudo-random source. Each worker owns its own instance; child
//! streams are derived deterministically from (seed, stream id).
class RandomStream
{
public:
  explicit RandomStream(std::uint64_t seed = 0);

  static RandomStream derive(std::uint64_t seed, std::uint64_t stream);

  //! Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double exponential();
  double gamma(double shape);
  double chi_squared(double dof);
  //! Uniform index in {0, ..., n - 1}.
  std::size_t index(std::size_t n);
  std::uint64_t next_u64();

  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{ 0.0, 1.0 };
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace smoothcop
