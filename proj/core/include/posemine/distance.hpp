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

#include <vector>

#include "posemine/types.hpp"

namespace posemine {

/// Reference scale all normalized pose distances are expressed at.
inline constexpr double kDefaultRefScale = 100.0;

struct AlignResult {
  SimilarityTransform transform;
  /// Mean alignment residual: sum of squared joint distances after applying
  /// the optimal transform to `pose`, divided by twice the joint count.
  double mse = 0.0;
};

/**
 * @brief Least-squares similarity alignment of `pose` onto `reference`.
 *
 * Finds scale, rotation and translation minimizing the summed squared joint
 * distances between the transformed `pose` and `reference`.  The normal
 * equations of the linear system decouple once both point sets are centered,
 * which yields the closed form used here.
 *
 * Directed: the residual is measured in the coordinate frame of `reference`
 * and therefore grows quadratically with the reference's spatial extent.
 *
 * @throws DimensionMismatchError if joint counts differ or are < 2.
 * @throws DegeneratePoseError if all joints of `pose` coincide.
 */
AlignResult align(const Pose& reference, const Pose& pose);

/// Alignment residual only; same contract as align().
double mse_directed(const Pose& reference, const Pose& pose);

struct ScaleResult {
  Point2 center;
  /// Mean joint distance from the center of mass.
  double scale = 0.0;
};

/// Center of mass and mean joint distance from it.  Scale 0 means the pose
/// is degenerate.  @throws DimensionMismatchError on fewer than 2 joints.
ScaleResult pose_scale(const Pose& pose);

/**
 * @brief Symmetric, scale-normalized pose distance.
 *
 * Both directed residuals are rescaled as if each reference pose had spatial
 * extent `s_ref`, then averaged:
 *
 *   s_ref^2/(2 s1^2) * mse(p1, p2)  +  s_ref^2/(2 s2^2) * mse(p2, p1)
 *
 * Invariant under similarity transforms of either argument; grows with
 * s_ref^2.
 *
 * @throws DegeneratePoseError if either pose has zero scale.
 */
double mse_norm(const Pose& p1, const Pose& p2,
                double s_ref = kDefaultRefScale);

/**
 * @brief Cached per-pose terms for the batch distance computations: centered
 * joints, the centered sum of squares and the pose scale.
 *
 * mse_norm over two caches touches each joint once, which is what makes the
 * all-pairs matching stages affordable.
 */
struct PoseMoments {
  Point2 center;
  double q = 0.0;      ///< sum of squared centered joint norms
  double scale = 0.0;  ///< mean centered joint norm
  std::vector<Point2> centered;

  static PoseMoments of(const Pose& pose);
};

/// mse_norm over precomputed moments; same contract as the Pose overload.
double mse_norm(const PoseMoments& m1, const PoseMoments& m2,
                double s_ref = kDefaultRefScale);

/**
 * @brief New pose containing the selected joints, in subset order.
 * @throws IndexOutOfRangeError if an index exceeds the joint count.
 */
Pose restrict_joints(const Pose& pose, const JointSubset& subset);

/// Restrict every pose of a sequence; frames and metadata are kept.
PoseSequence restrict_joints(const PoseSequence& seq, const JointSubset& subset);

}  // namespace posemine
