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
#include <optional>
#include <string>
#include <vector>

#include "posemine/phases.hpp"
#include "posemine/types.hpp"

namespace posemine {

enum class SynthKind { cyclic, longjump };

/**
 * @brief Parameters of the synthetic pose generator.  The cyclic kind drives
 * a 14-joint stick figure with limb-angle oscillators whose cycle length
 * follows a slow sinusoidal profile; the longjump kind concatenates
 * phase-stamped run-up step cycles, a flight and a final landing.  Both
 * kinds emit ground truth alongside the poses.
 */
struct SynthSpec {
  SynthKind kind = SynthKind::cyclic;
  std::string video_id = "synth";
  double fps = 50.0;
  double duration_s = 30.0;  ///< cyclic kind; longjump length follows phases

  // Cycle-length profile, in frames: base + amplitude * sin(2*pi*t/period).
  double base_cycle_frames = 60.0;
  double modulation_amplitude = 0.0;
  double modulation_period_s = 20.0;

  /// Fast-transition shaping: the phase advances unevenly within a cycle,
  /// with `transitions_per_cycle` sharp instants per cycle whose strength is
  /// `transition_sharpness` in [0, 1).  0 keeps uniform motion.
  int transitions_per_cycle = 1;
  double transition_sharpness = 0.0;

  /// Frames with cyclic motion; outside, the figure moves aperiodically.
  /// Unset means the whole sequence is cyclic.
  std::optional<FrameInterval> active_interval;
  /// Optional stretch of frozen (near-constant) poses inside the motion.
  std::optional<FrameInterval> glide_interval;
  double drift_px_per_frame = 0.0;  ///< rigid translation, cyclic kind

  // Degradation model, applied per emitted frame.
  double noise_sigma = 0.0;    ///< px, per coordinate
  double dropout_prob = 0.0;   ///< frame omitted entirely
  double outlier_prob = 0.0;   ///< pose replaced by a heavily corrupted one

  /// Selects limb proportions, oscillator timing and transition placement;
  /// two sequences with the same signature show the same athlete.
  std::uint64_t athlete_signature = 0;

  // Long jump timeline, durations in frames before per-instance jitter.
  int runup_cycles = 12;
  double jump_frames = 6.0;
  double airtime_frames = 10.0;
  double landing_frames = 5.0;
  double flight_frames = 40.0;
  double final_landing_frames = 30.0;
  double phase_jitter = 0.15;       ///< relative duration jitter
  double pan_px_per_frame = 3.0;    ///< camera pan drift on translation

  /// @throws InvalidSpecError on out-of-range values (probabilities outside
  /// [0,1], base cycle below 4 frames, sharpness outside [0,1), ...).
  void validate() const;
};

/// Generator output: the pose sequence plus ground truth aligned with it.
struct SynthResult {
  PoseSequence seq;

  /// Cyclic kind: true cycle length in frames per emitted pose, NaN where
  /// no cycle completes (outside the active interval, inside a glide, or
  /// too close to the end).  Same length as seq.poses.
  std::vector<double> cycle_length;
  /// Cyclic kind with transition_sharpness > 0: the frames of the fast
  /// transition instants (including dropped frames).
  std::vector<std::int64_t> striking_frames;

  /// Longjump kind: phase label per emitted pose.  Same length as seq.poses.
  std::vector<Phase> labels;
  int true_step_count = 0;
  std::int64_t flight_start = -1;
  std::int64_t first_runup_frame = -1;

  std::vector<std::int64_t> dropped_frames;
  std::vector<std::int64_t> outlier_frames;
};

/**
 * @brief Deterministic synthesis: one seeded generator drives every random
 * choice, and the per-frame draw layout is fixed, so changing one knob (for
 * example the noise level) leaves all other randomness identical.  With
 * zero noise, an integer constant cycle length T and no glide, the pose at
 * frame f+T is bit-identical to the pose at frame f.
 */
SynthResult synthesize(const SynthSpec& spec, std::uint64_t seed);

}  // namespace posemine
