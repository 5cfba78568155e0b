// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <random>

namespace dpmix {

// An explicitly seeded random stream. Equal (seed, stream_id) pairs replay the
// same draws; distinct stream ids get independently seeded engines. A stream is
// owned by one chain at a time and is never shared between threads.
//
// Distributions come from Boost.Random so that draw sequences do not depend on
// the standard library vendor.
class RngStream {
 public:
  using engine_type = std::mt19937_64;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // Derive a child stream. Forking does not consume draws from this stream.
  RngStream fork(std::uint64_t child) const;

  // Uniform on [0, 1).
  double uniform();
  // Uniform on the open interval (0, 1).
  double uniform_open();
  double beta(double a, double b);
  double gamma(double shape);
  double normal();
  int binomial(int trials, double p);

  engine_type& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  engine_type engine_;
};

}  // namespace dpmix
