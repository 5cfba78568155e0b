// Apache License, Version 2.0, refer to LICENSE.txt

#include "dpmix/rng.hpp"

#include <boost/random/beta_distribution.hpp>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "dpmix/error.hpp"

namespace dpmix {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

RngStream RngStream::fork(std::uint64_t child) const {
  return RngStream(seed_, splitmix64(stream_id_ ^ splitmix64(child + 1)));
}

double RngStream::uniform() {
  return boost::random::uniform_01<double>()(engine_);
}

double RngStream::uniform_open() {
  double u = 0.0;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

double RngStream::beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) fail(ErrorCategory::domain, "beta shape parameters must be positive");
  return boost::random::beta_distribution<double>(a, b)(engine_);
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) fail(ErrorCategory::domain, "gamma shape must be positive");
  return boost::random::gamma_distribution<double>(shape)(engine_);
}

double RngStream::normal() {
  return boost::random::normal_distribution<double>()(engine_);
}

int RngStream::binomial(int trials, double p) {
  return boost::random::binomial_distribution<int, double>(trials, p)(engine_);
}

}  // namespace dpmix
