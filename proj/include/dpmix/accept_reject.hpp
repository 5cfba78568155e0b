// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "dpmix/encodings.hpp"
#include "dpmix/rng.hpp"

namespace dpmix {

// Accept-reject transcoders. Each proposes r from its prior and accepts when
// the proposal's partition is compatible with s:
//   exact_pattern   r_to_s(r) == s
//   ordered_sizes   cluster sizes in order of appearance match
//   sorted_sizes    sorted cluster sizes match
// Accepted proposals are realigned so the returned r reproduces s's pattern.
enum class ArMethod { exact_pattern = 1, ordered_sizes = 2, sorted_sizes = 3 };

ArMethod ar_method_from_int(int id);

struct ArResult {
  SbLabels r;
  std::uint64_t attempts = 0;
};

inline constexpr std::uint64_t kDefaultMaxAttempts = 100'000'000;

// Called every 10^6 attempts with the running attempt count.
using ArProgress = std::function<void(std::uint64_t)>;

// Throws AttemptsExhausted when no proposal is accepted within max_attempts.
ArResult ar_transcode(const OoaLabels& s, double alpha, ArMethod method, RngStream& rng,
                      std::uint64_t max_attempts = kDefaultMaxAttempts,
                      const ArProgress& progress = {});

// Number of accepted proposals out of `proposals` draws, for rate estimation.
std::uint64_t ar_count_acceptances(const OoaLabels& s, double alpha, ArMethod method,
                                   std::uint64_t proposals, RngStream& rng);

double log_ar_acceptance_rate(std::span<const int> sizes_ooa, double alpha, ArMethod method);
double ar_acceptance_rate(std::span<const int> sizes_ooa, double alpha, ArMethod method);

}  // namespace dpmix
