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

#include <cstdint>
#include <vector>

#include "posemine/distance.hpp"
#include "posemine/types.hpp"

namespace posemine {

struct SaliencyScore {
  std::int64_t frame = 0;
  double value = 0.0;  ///< mean directed alignment residual over the window
};

struct SaliencyConfig {
  int w_l = 4;  ///< half-width of the frame window the score averages over
  int w_s = 4;  ///< half-width of the temporal shifts applied per frame
  /// Swap the directed residual for the scale-normalized distance; useful
  /// when pose scale varies within one sequence (e.g. camera zoom).
  bool use_normalized = false;
  double s_ref = kDefaultRefScale;
};

/**
 * @brief Temporal saliency: how quickly the pose changes around each frame.
 *
 * value(r) averages the directed residual between every pose in the window
 * r +- w_l and its temporal shifts up to +- w_s frames.  Scores exist only
 * where poses are present at all required offsets; a fast, hard-to-miss
 * transition produces a local maximum.
 */
std::vector<SaliencyScore> saliency_profile(const PoseSequence& seq,
                                            const SaliencyConfig& config = {});

struct APConfig {
  double damping = 0.9;
  int max_iter = 500;
  int stable_iterations = 50;  ///< unchanged exemplar set => converged
  double s_ref = kDefaultRefScale;
  /// Deterministic tie-breaking jitter on the similarity matrix.
  std::uint64_t jitter_seed = 0x9e3779b97f4a7c15ull;
};

struct APCluster {
  std::size_t exemplar = 0;
  std::vector<std::size_t> members;  ///< includes the exemplar, ascending
};

struct APResult {
  std::vector<APCluster> clusters;  ///< ordered by exemplar index
  bool converged = false;
  int iterations = 0;
};

/**
 * @brief Affinity propagation exemplar clustering under the negated
 * normalized pose distance; self-preference is the median pairwise
 * similarity.  Deterministic given inputs and config.  When no exemplar
 * emerges within max_iter, the single best net-similarity exemplar is
 * returned with converged = false.
 */
APResult affinity_propagation(const std::vector<Pose>& items,
                              const APConfig& config = {});

/// Same algorithm on a caller-supplied similarity matrix (row-major n*n,
/// diagonal ignored).
APResult affinity_propagation_similarity(std::vector<double> similarity,
                                         std::size_t n,
                                         const APConfig& config = {});

struct StrikingPose {
  std::int64_t frame = 0;
  Pose pose;
  std::size_t cluster_size = 0;
  double saliency = 0.0;
};

struct StrikingPoseSet {
  std::vector<StrikingPose> representatives;  ///< cluster size descending
  bool converged = true;
};

struct StrikingConfig {
  SaliencyConfig saliency;
  APConfig ap;
};

/**
 * @brief The k most salient distinct poses: the top_n highest-saliency
 * frames are clustered with affinity propagation and the exemplars of the k
 * largest clusters returned (size ties: lower mean member distance, then
 * earlier frame).  Detector glitches produce high saliency but land in
 * small clusters, which suppresses them.
 *
 * @throws InsufficientDataError if fewer than top_n frames score > 0, or
 * fewer than k clusters emerge.
 */
StrikingPoseSet striking_poses(const PoseSequence& seq, std::size_t top_n = 20,
                               std::size_t k = 1,
                               const StrikingConfig& config = {});

}  // namespace posemine
