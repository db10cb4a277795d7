#include "smoothcop/random.hpp"

#include <cmath>

namespace smoothcop {

namespace {

std::uint64_t
splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

} // namespace

std::uint64_t
mix_seed(std::uint64_t seed, std::uint64_t stream)
{
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

RandomStream::RandomStream(std::uint64_t seed)
  : engine_(splitmix64(seed))
{}

RandomStream
RandomStream::derive(std::uint64_t seed, std::uint64_t stream)
{
  return RandomStream(mix_seed(seed, stream));
}

double
RandomStream::uniform()
{
  // 53 random bits, shifted by half an ulp so 0 and 1 never occur
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double
RandomStream::normal()
{
  return normal_(engine_);
}

double
RandomStream::exponential()
{
  return -std::log(uniform());
}

double
RandomStream::gamma(double shape)
{
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

double
RandomStream::chi_squared(double dof)
{
  return 2.0 * gamma(0.5 * dof);
}

std::size_t
RandomStream::index(std::size_t n)
{
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

std::uint64_t
RandomStream::next_u64()
{
  return engine_();
}

} // namespace smoothcop
