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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "posemine/cycles.hpp"
#include "posemine/eval.hpp"
#include "posemine/phases.hpp"
#include "posemine/types.hpp"

namespace posemine::tools {

/// Frame column of a sequence, in pose order.
std::vector<std::int64_t> frames_of(const PoseSequence& seq);

/// Pose column of a sequence, in pose order.
std::vector<Pose> poses_of(const PoseSequence& seq);

/**
 * @brief Per-pose phase labels looked up in an event table: the first event
 * of the same video whose interval contains the frame wins.
 * @throws InvalidSpecError when a frame is covered by no event.
 */
std::vector<Phase> labels_from_events(const PoseSequence& seq,
                                      const std::vector<TruthEvent>& events);

/**
 * @brief The poses of `seq` whose frame lies in [from, to]; an unset bound
 * is open.  @throws InvalidSpecError when fewer than two poses remain.
 */
std::vector<Pose> clip_poses(const PoseSequence& seq,
                             std::optional<std::int64_t> from,
                             std::optional<std::int64_t> to);

/// Detection table with confidences, one CSV row per event.
void write_detections_csv(const std::vector<DetectedEvent>& detections,
                          const std::filesystem::path& path);
std::vector<DetectedEvent> read_detections_csv(
    const std::filesystem::path& path);

/// Static scatter-and-curve plot of a mining result: raw cycle-length
/// samples (kept and rejected) plus the fitted curve over its ranges.
std::string curve_svg(const CycleMiningResult& result);

}  // namespace posemine::tools
