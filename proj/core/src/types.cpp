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
#include "posemine/types.hpp"

#include <algorithm>

namespace posemine {

const std::array<const char*, kModelJointCount> kModelJointNames = {
    "head",       "neck",       "r_shoulder", "r_elbow", "r_wrist",
    "l_shoulder", "l_elbow",    "l_wrist",    "r_hip",   "r_knee",
    "r_ankle",    "l_hip",      "l_knee",     "l_ankle"};

JointSubset lower_body_subset() {
  return JointSubset::of({8, 9, 10, 11, 12, 13});
}

JointSubset JointSubset::of(std::vector<std::size_t> indices) {
  if (indices.size() < 2) {
    throw InvalidSpecError("joint subset needs at least two indices");
  }
  for (std::size_t i = 1; i < indices.size(); ++i) {
    if (indices[i] <= indices[i - 1]) {
      throw InvalidSpecError("joint subset indices must strictly increase");
    }
  }
  JointSubset s;
  s.indices = std::move(indices);
  return s;
}

std::size_t PoseSequence::find_frame(std::int64_t frame) const noexcept {
  auto it = std::lower_bound(
      poses.begin(), poses.end(), frame,
      [](const TimedPose& p, std::int64_t f) { return p.frame < f; });
  if (it == poses.end() || it->frame != frame) return npos;
  return static_cast<std::size_t>(it - poses.begin());
}

void PoseSequence::validate() const {
  if (!(fps > 0.0)) {
    throw SchemaError("sequence '" + video_id + "': fps must be positive");
  }
  for (std::size_t i = 0; i < poses.size(); ++i) {
    if (i > 0 && poses[i].frame <= poses[i - 1].frame) {
      throw SchemaError("sequence '" + video_id +
                        "': frames must strictly increase (frame " +
                        std::to_string(poses[i].frame) + ")");
    }
    if (poses[i].pose.size() != poses.front().pose.size()) {
      throw SchemaError("sequence '" + video_id +
                        "': inconsistent joint count at frame " +
                        std::to_string(poses[i].frame));
    }
  }
}

}  // namespace posemine
