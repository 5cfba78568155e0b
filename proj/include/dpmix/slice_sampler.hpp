// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dpmix/encodings.hpp"
#include "dpmix/model.hpp"
#include "dpmix/rng.hpp"
#include "dpmix/weights.hpp"

namespace dpmix {

// Stick-breaking chain state. m[h] and v.v[h] belong to stick h + 1; u holds the
// slice variables used by the most recent allocation step.
struct SliceState {
  SbLabels r;
  BreakFractions v;
  WeightState w{WeightOrder::stick};
  std::vector<double> m;
  std::vector<double> u;
};

// Label-switching Metropolis moves.
//   swap_labels           exchange the data and atoms of two occupied sticks;
//                         the weights stay in place
//   swap_adjacent         exchange everything attached to sticks h and h+1
//                         (break fraction, atom, data)
//   swap_adjacent_refresh exchange data and atoms of sticks h and h+1 and redraw
//                         v_h, v_{h+1} from their conditionals given the swap
enum class LabelMove { swap_labels = 1, swap_adjacent = 2, swap_adjacent_refresh = 3 };

LabelMove label_move_from_int(int id);

struct MoveSet {
  bool swap_labels = false;
  bool swap_adjacent = false;
  bool swap_adjacent_refresh = false;

  bool enabled(LabelMove mv) const noexcept;
  static MoveSet none() { return {}; }
  static MoveSet only(LabelMove mv);
};

struct MoveCounters {
  std::array<std::uint64_t, 3> attempted{};
  std::array<std::uint64_t, 3> accepted{};
};

struct SliceOptions {
  MoveSet moves;
  // The stick prefix may not grow beyond this many sticks.
  std::size_t max_sticks = 10'000;
};

// log p(r, v, m | y) up to a constant, over the materialized stick prefix.
double log_slice_joint(const SliceState& state, const Dataset& data, const ModelSpec& model);

struct LabelMoveProposal {
  SliceState proposed;
  // log of (target ratio x proposal ratio); -inf when the reverse move is
  // impossible.
  double log_acceptance = 0.0;
  bool valid = false;  // false when the state admits no proposal
};

// Proposal for a move. For swap_labels the pair is drawn among occupied sticks;
// for the adjacent moves h is drawn uniformly from 1..M, M the largest occupied
// stick, and the proposal ratio M / M' enters the acceptance.
LabelMoveProposal propose_label_move(const SliceState& state, LabelMove move,
                                     const Dataset& data, const ModelSpec& model,
                                     RngStream& rng);

// Slice sampler with stick-breaking labels. One sweep:
//   v | r        v_h ~ Beta(1 + n_h, alpha + sum_{l>h} n_l)
//   u | w, r     u_i ~ U(0, w_{r_i}); sticks extended until the residual mass
//                is below min u
//   m | r, y     conjugate posterior, prior for empty sticks
//   r | u, w, m  p(r_i = h) proportional to 1[w_h > u_i] p(y_i | m_h)
//   enabled label-switching moves, one attempt each
class SliceSampler {
 public:
  SliceSampler(const Dataset& data, const ModelSpec& model, SliceState init,
               SliceOptions options = {});

  void sweep(RngStream& rng);

  void update_breaks(RngStream& rng);
  void update_slices(RngStream& rng);
  void update_atoms(RngStream& rng);
  void update_allocations(RngStream& rng);
  bool apply_move(LabelMove move, RngStream& rng);

  const SliceState& state() const noexcept { return state_; }
  const MoveCounters& counters() const noexcept { return counters_; }
  // Per-stick statistics of the current allocation (index h for stick h + 1).
  const std::vector<ClusterSuffStats>& stick_stats() const noexcept { return stats_; }
  int occupied_count() const noexcept;

 private:
  void recount();
  void rebuild_weights();

  Dataset data_;
  ModelSpec model_;
  BetaBinomial family_;
  SliceOptions options_;
  SliceState state_;
  std::vector<int> r_;  // 0-based working copy of state_.r
  std::vector<ClusterSuffStats> stats_;
  MoveCounters counters_;
  std::vector<double> logw_;
};

// All observations on stick 1, v_1 drawn from its conditional and m_1 from its
// posterior.
SliceState initial_slice_state(const Dataset& data, const ModelSpec& model, RngStream& rng);

SliceState slice_sweep(const SliceState& state, const Dataset& data, const ModelSpec& model,
                       MoveSet moves, RngStream& rng);

// One Metropolis-Hastings step of the given move; returns the resulting state.
SliceState metropolis_label_move(const SliceState& state, LabelMove move, const Dataset& data,
                                 const ModelSpec& model, RngStream& rng);

}  // namespace dpmix
