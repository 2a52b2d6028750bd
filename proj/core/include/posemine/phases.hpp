/**
 * Copyright 2026 the posemine authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "posemine/distance.hpp"
#include "posemine/types.hpp"

namespace posemine {

/// The five long jump phases, in fixed label order.
enum class Phase : int {
  jump = 0,
  airtime = 1,
  landing = 2,
  flight = 3,
  final_landing = 4,
};

inline constexpr std::size_t kPhaseCount = 5;

const char* phase_name(Phase phase);
std::optional<Phase> parse_phase(std::string_view name);

/// The phase state graph: self-loops everywhere, the run-up cycle
/// jump -> airtime -> landing -> jump, take-off into flight from airtime or
/// landing, flight -> final_landing, final_landing absorbing.
bool transition_allowed(Phase from, Phase to);

/// A pose sequence with one phase label per pose entry.
struct LabeledSequence {
  PoseSequence seq;
  std::vector<Phase> labels;
};

/// k-Medoids pose vocabulary; medoids are training poses, not averages.
struct Codebook {
  double s_ref = kDefaultRefScale;
  std::vector<Pose> medoids;

  std::size_t size() const noexcept { return medoids.size(); }
};

/**
 * @brief k-Medoids under the normalized pose distance: greedy farthest-point
 * initialization from a seeded random start, then alternating assignment and
 * per-cluster medoid updates until the medoid set is stable.  Total cost is
 * non-increasing; ties resolve to the lowest index.  Deterministic.
 *
 * @throws InvalidSpecError unless 1 <= k <= items.
 */
Codebook kmedoids(const std::vector<Pose>& items, std::size_t k,
                  std::uint64_t seed, double s_ref = kDefaultRefScale);

/// Index of the nearest medoid (lowest index on ties).
std::size_t assign(const Codebook& codebook, const Pose& pose);

/// Batch assignment, parallel over poses.
std::vector<std::size_t> assign_all(const Codebook& codebook,
                                    const std::vector<Pose>& poses);

struct PhaseModelConfig {
  std::size_t k = 60;
  std::uint64_t seed = 1;
  double smoothing = 1.0;  ///< pseudo-count; add-one by default
  double s_ref = kDefaultRefScale;
  /// Clustering cost is quadratic; larger corpora are deterministically
  /// subsampled to this many poses for the codebook (counting still uses
  /// everything).
  std::size_t max_codebook_items = 1500;
};

/**
 * @brief Pose-codebook HMM over the five phases.  Emission columns are
 * P(cluster | phase); rows of the transition matrix are P(to | from) with
 * exact zeros on forbidden edges.
 */
struct PhaseModel {
  Codebook codebook;
  std::array<double, kPhaseCount> prior{};  ///< smoothed first-frame labels
  /// emission[c][h] = P(cluster c | phase h); each column over c sums to 1.
  std::vector<std::array<double, kPhaseCount>> emission;
  std::array<std::array<double, kPhaseCount>, kPhaseCount> transition{};
  std::vector<double> cluster_occupancy;  ///< fraction of poses per cluster
  /// Unsmoothed per-cluster phase fractions (counting estimate); rows of
  /// empty clusters are all zero.
  std::vector<std::array<double, kPhaseCount>> phase_given_cluster;
  /// Median training event length per phase, in frames; the confidence
  /// normalizer for event-level evaluation.
  std::array<double, kPhaseCount> median_event_frames{};
  double smoothing = 1.0;
};

/**
 * @brief Fits codebook and probability tables by counting over fully
 * labeled sequences, with add-`smoothing` regularization on emissions,
 * allowed transitions and the prior.  Observed transitions that violate the
 * state graph (possible across detector gaps) are ignored.
 *
 * @throws EmptyPhaseError if any phase has zero training frames.
 */
PhaseModel fit_model(const std::vector<LabeledSequence>& train,
                     const PhaseModelConfig& config = {});

struct PhasePrediction {
  std::vector<std::int64_t> frames;
  std::vector<Phase> labels;
  double log_likelihood = 0.0;
};

/**
 * @brief Exact Viterbi decoding in log space; score ties prefer the lower
 * phase index.  @throws InsufficientDataError on an empty sequence,
 * ImpossibleObservationError if every path has probability zero.
 */
PhasePrediction viterbi(const PhaseModel& model, const PoseSequence& seq);

/// Decoding from precomputed cluster codes (frames become 0..T-1).
PhasePrediction viterbi_codes(const PhaseModel& model,
                              const std::vector<std::size_t>& codes);

/// A maximal run of one phase label, inclusive frame interval.
struct PhaseEvent {
  Phase label = Phase::jump;
  std::int64_t t1 = 0;
  std::int64_t t2 = 0;
};

std::vector<PhaseEvent> to_events(const std::vector<std::int64_t>& frames,
                                  const std::vector<Phase>& labels);

inline std::vector<PhaseEvent> to_events(const PhasePrediction& pred) {
  return to_events(pred.frames, pred.labels);
}

/// Which run-up event type counts as a step.
enum class StepEvent { jump, landing };

struct Kinematics {
  int step_count = 0;
  double runup_duration_s = 0.0;
};

/**
 * @brief Step count (run-up events of the chosen type strictly before the
 * flight phase) and run-up duration (first run-up event start to flight
 * start).  @throws NoFlightPhaseError without a flight event.
 */
Kinematics derive_kinematics(const PhasePrediction& pred, double fps,
                             StepEvent step_event = StepEvent::jump);

}  // namespace posemine
