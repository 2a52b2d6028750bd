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
#include "posemine/distance.hpp"

#include <algorithm>
#include <cmath>

namespace posemine {
namespace {

void check_pair(const Pose& reference, const Pose& pose) {
  if (reference.size() < 2 || pose.size() < 2) {
    throw DimensionMismatchError("poses need at least two joints");
  }
  if (reference.size() != pose.size()) {
    throw DimensionMismatchError("poses have different joint counts (" +
                                 std::to_string(reference.size()) + " vs " +
                                 std::to_string(pose.size()) + ")");
  }
}

struct PairSums {
  double c1 = 0.0;  ///< sum of x_p*x_r + y_p*y_r over centered joints
  double c2 = 0.0;  ///< sum of x_p*y_r - y_p*x_r over centered joints
};

PairSums pair_sums(const PoseMoments& ref, const PoseMoments& pose) {
  PairSums s;
  const std::size_t n = pose.centered.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = pose.centered[i];
    const Point2 r = ref.centered[i];
    s.c1 += p.x * r.x + p.y * r.y;
    s.c2 += p.x * r.y - p.y * r.x;
  }
  return s;
}

/// Directed residual from the centered sums; the cross terms are shared
/// between both directions of a pair.
double residual(double q_ref, double q_pose, const PairSums& s,
                std::size_t n) {
  const double fit = (s.c1 * s.c1 + s.c2 * s.c2) / q_pose;
  return std::max(0.0, q_ref - fit) / (2.0 * static_cast<double>(n));
}

}  // namespace

PoseMoments PoseMoments::of(const Pose& pose) {
  PoseMoments m;
  const std::size_t n = pose.size();
  if (n == 0) return m;
  double cx = 0.0, cy = 0.0;
  for (const Point2& p : pose.joints) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(n);
  cy /= static_cast<double>(n);
  m.center = {cx, cy};
  m.centered.reserve(n);
  double norm_sum = 0.0;
  for (const Point2& p : pose.joints) {
    const Point2 c{p.x - cx, p.y - cy};
    m.centered.push_back(c);
    m.q += c.x * c.x + c.y * c.y;
    norm_sum += c.norm();
  }
  m.scale = norm_sum / static_cast<double>(n);
  return m;
}

AlignResult align(const Pose& reference, const Pose& pose) {
  check_pair(reference, pose);
  const PoseMoments ref = PoseMoments::of(reference);
  const PoseMoments mov = PoseMoments::of(pose);
  if (mov.q <= 0.0) {
    throw DegeneratePoseError("cannot align a pose whose joints coincide");
  }
  const PairSums s = pair_sums(ref, mov);

  AlignResult result;
  result.transform.a = s.c1 / mov.q;
  result.transform.b = s.c2 / mov.q;
  // Translation maps the pose centroid onto the reference centroid.
  result.transform.tx = ref.center.x - (result.transform.a * mov.center.x -
                                        result.transform.b * mov.center.y);
  result.transform.ty = ref.center.y - (result.transform.b * mov.center.x +
                                        result.transform.a * mov.center.y);
  result.mse = residual(ref.q, mov.q, s, pose.size());
  return result;
}

double mse_directed(const Pose& reference, const Pose& pose) {
  check_pair(reference, pose);
  const PoseMoments ref = PoseMoments::of(reference);
  const PoseMoments mov = PoseMoments::of(pose);
  if (mov.q <= 0.0) {
    throw DegeneratePoseError("cannot align a pose whose joints coincide");
  }
  return residual(ref.q, mov.q, pair_sums(ref, mov), pose.size());
}

ScaleResult pose_scale(const Pose& pose) {
  if (pose.size() < 2) {
    throw DimensionMismatchError("pose scale needs at least two joints");
  }
  const PoseMoments m = PoseMoments::of(pose);
  return {m.center, m.scale};
}

double mse_norm(const PoseMoments& m1, const PoseMoments& m2, double s_ref) {
  if (m1.centered.size() != m2.centered.size()) {
    throw DimensionMismatchError("poses have different joint counts");
  }
  if (m1.scale <= 0.0 || m2.scale <= 0.0) {
    throw DegeneratePoseError("normalized distance undefined for a pose "
                              "whose joints coincide");
  }
  const std::size_t n = m1.centered.size();
  const PairSums s = pair_sums(m1, m2);  // cross sums are direction agnostic
  const double mse12 = residual(m1.q, m2.q, s, n);  // p1 as reference
  const double mse21 = residual(m2.q, m1.q, s, n);  // p2 as reference
  const double f1 = s_ref / m1.scale;
  const double f2 = s_ref / m2.scale;
  return 0.5 * (f1 * f1 * mse12 + f2 * f2 * mse21);
}

double mse_norm(const Pose& p1, const Pose& p2, double s_ref) {
  check_pair(p1, p2);
  return mse_norm(PoseMoments::of(p1), PoseMoments::of(p2), s_ref);
}

Pose restrict_joints(const Pose& pose, const JointSubset& subset) {
  Pose out;
  out.joints.reserve(subset.indices.size());
  for (std::size_t idx : subset.indices) {
    if (idx >= pose.size()) {
      throw IndexOutOfRangeError("joint index " + std::to_string(idx) +
                                 " out of range for a pose with " +
                                 std::to_string(pose.size()) + " joints");
    }
    out.joints.push_back(pose.joints[idx]);
  }
  return out;
}

PoseSequence restrict_joints(const PoseSequence& seq,
                             const JointSubset& subset) {
  PoseSequence out;
  out.video_id = seq.video_id;
  out.fps = seq.fps;
  out.poses.reserve(seq.size());
  for (const TimedPose& tp : seq.poses) {
    out.poses.push_back({tp.frame, restrict_joints(tp.pose, subset)});
  }
  return out;
}

}  // namespace posemine
