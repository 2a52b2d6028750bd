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
#include "posemine/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace posemine {

namespace {

constexpr double kQuietNan = std::numeric_limits<double>::quiet_NaN();
/// Outlier poses get per-coordinate displacement at this sigma, far beyond
/// any match threshold.
constexpr double kOutlierSigma = 30.0;
constexpr double kRootX = 300.0;
constexpr double kRootY = 320.0;

/// Uniform in [0, 1) from the top 53 bits; bit-stable across platforms,
/// unlike the distribution adapters in <random>.
double draw_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct GaussPair {
  double z0 = 0.0;
  double z1 = 0.0;
};

GaussPair draw_gauss_pair(std::mt19937_64& rng) {
  const double u1 = 1.0 - draw_uniform(rng);  // (0, 1], keeps log finite
  const double u2 = draw_uniform(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  return GaussPair{r * std::cos(a), r * std::sin(a)};
}

/// Everything that characterizes one athlete: limb proportions, oscillator
/// amplitudes and timing offsets, transition placement and a small pose
/// style delta for the long jump prototypes.  Derived from the signature
/// alone, so the athlete looks the same under any seed.
struct AthleteParams {
  std::array<double, 8> bone{};
  std::array<double, 6> amp{};
  std::array<double, 6> off{};
  std::array<double, 6> proto_delta{};
  double transition_anchor = 0.0;
};

AthleteParams athlete_params(std::uint64_t signature) {
  std::mt19937_64 rng(signature * 0x9e3779b97f4a7c15ull +
                      0x2545f4914f6cdd1dull);
  AthleteParams p;
  for (double& b : p.bone) b = 0.85 + 0.30 * draw_uniform(rng);
  for (double& a : p.amp) a = 0.80 + 0.40 * draw_uniform(rng);
  // Channel timing is staggered so the pose path is a loop in joint space
  // rather than a back-and-forth line; a line retraces its own poses on the
  // return pass and would fake a second recurrence per cycle.  The athlete
  // jitter on top is small enough to keep the stagger.
  constexpr std::array<double, 6> kBaseOffset{0.00, 0.22, 0.41,
                                              0.64, 0.13, 0.31};
  for (std::size_t j = 0; j < p.off.size(); ++j) {
    p.off[j] = kBaseOffset[j] + 0.08 * (draw_uniform(rng) - 0.5);
  }
  for (double& d : p.proto_delta) d = 0.12 * (draw_uniform(rng) - 0.5);
  p.transition_anchor = draw_uniform(rng);
  return p;
}

/**
 * Forward kinematics of the 14-joint stick figure from six drive channels
 * in roughly [-1, 1]: 0 thigh swing, 1 knee bend, 2 arm swing, 3 elbow
 * bend, 4 torso lean, 5 head bob.  The left side mirrors the right with
 * opposite channel sign.  Nominal figure spread gives a pose scale near
 * 100 px.
 */
Pose build_pose(const AthleteParams& ap, const std::array<double, 6>& c,
                double tx, double ty) {
  const double torso = 112.0 * ap.bone[0];
  const double head = 41.0 * ap.bone[1];
  const double shoulder_w = 47.0 * ap.bone[2];
  const double hip_w = 33.0 * ap.bone[3];
  const double upper_arm = 65.0 * ap.bone[4];
  const double forearm = 57.0 * ap.bone[5];
  const double thigh = 92.0 * ap.bone[6];
  const double shank = 85.0 * ap.bone[7];

  const double lean = 0.10 * ap.amp[4] * c[4];
  const double head_bob = 3.0 * ap.amp[5] * c[5];

  Pose pose;
  pose.joints.resize(kModelJointCount);
  const Point2 neck{tx - torso * std::sin(lean), ty - torso * std::cos(lean)};
  pose.joints[1] = neck;
  pose.joints[0] = Point2{neck.x - head * std::sin(lean),
                          neck.y - head * std::cos(lean) + head_bob};
  pose.joints[2] = Point2{neck.x + shoulder_w, neck.y + 3.0};
  pose.joints[5] = Point2{neck.x - shoulder_w, neck.y + 3.0};
  pose.joints[8] = Point2{tx + hip_w, ty};
  pose.joints[11] = Point2{tx - hip_w, ty};

  const double swing = 0.55 * ap.amp[0];
  const double bend_amp = 0.45 * ap.amp[1];
  const double arm_amp = 0.60 * ap.amp[2];
  const double elbow_amp = 0.50 * ap.amp[3];

  for (int side = 0; side < 2; ++side) {
    const double s = side == 0 ? 1.0 : -1.0;
    const std::size_t hip = side == 0 ? 8 : 11;
    const std::size_t knee = side == 0 ? 9 : 12;
    const std::size_t ankle = side == 0 ? 10 : 13;
    const double th = lean + swing * (s * c[0]);
    const double kb = 0.50 + bend_amp * (s * c[1]);
    pose.joints[knee] =
        pose.joints[hip] + Point2{thigh * std::sin(th), thigh * std::cos(th)};
    const double sh = th + kb;
    pose.joints[ankle] = pose.joints[knee] +
                         Point2{shank * std::sin(sh), shank * std::cos(sh)};

    const std::size_t shoulder = side == 0 ? 2 : 5;
    const std::size_t elbow = side == 0 ? 3 : 6;
    const std::size_t wrist = side == 0 ? 4 : 7;
    const double ua = arm_amp * (s * c[2]);
    pose.joints[elbow] =
        pose.joints[shoulder] +
        Point2{upper_arm * std::sin(ua), upper_arm * std::cos(ua)};
    const double eb = 0.60 + elbow_amp * (s * c[3]);
    pose.joints[wrist] =
        pose.joints[elbow] +
        Point2{forearm * std::sin(ua - eb), forearm * std::cos(ua - eb)};
  }
  return pose;
}

/// Drive for the frames outside the cyclic interval: a schedule of held
/// rest postures, one per block of 45 to 75 frames, with a short morph
/// between blocks.  Postures are quantized to a coarse grid in the leg and
/// arm channels, which makes pose distances bimodal: frames of the same
/// block sit far below the match threshold and frames of different cells
/// sit far above it, never near the boundary.  A resting frame therefore
/// matches its whole block as one wide run and nothing else, and the
/// forward lean shared by every rest posture keeps all of them far from
/// any pose the cyclic oscillators can produce.
struct RestSchedule {
  static constexpr std::int64_t kRampFrames = 6;

  std::vector<std::int64_t> start;
  std::vector<std::array<double, 6>> cell;
  std::vector<double> sway_phase;

  std::array<double, 6> channels(std::int64_t f) const {
    const auto it = std::upper_bound(start.begin(), start.end(), f);
    const std::size_t idx = static_cast<std::size_t>(it - start.begin()) - 1;
    std::array<double, 6> c = cell[idx];
    const std::int64_t into = f - start[idx];
    if (idx > 0 && into < kRampFrames) {
      const double t = static_cast<double>(into + 1) /
                       static_cast<double>(kRampFrames + 1);
      const double s = 0.5 - 0.5 * std::cos(M_PI * t);
      for (std::size_t j = 0; j < 6; ++j) {
        c[j] = cell[idx - 1][j] + s * (cell[idx][j] - cell[idx - 1][j]);
      }
    }
    const double sway =
        0.02 * std::sin(2.0 * M_PI * static_cast<double>(into) / 180.0 +
                        sway_phase[idx]);
    c[0] += sway;
    c[2] += sway;
    return c;
  }
};

RestSchedule build_rest_schedule(std::uint64_t seed, std::int64_t total) {
  // Derived engine, so the rest schedule never consumes from the per-frame
  // noise stream and varies per video rather than per athlete.
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 0x14057b7ef767814full);
  constexpr std::array<double, 6> kRestBase{0.0, 2.0, 0.0, -2.0, 7.0, 0.0};
  RestSchedule sched;
  std::int64_t cursor = 0;
  while (cursor < total) {
    sched.start.push_back(cursor);
    cursor += 45 + static_cast<std::int64_t>(draw_uniform(rng) * 31.0);
    std::array<double, 6> c = kRestBase;
    c[0] += 0.5 * (std::floor(draw_uniform(rng) * 5.0) - 2.0);
    c[2] += 0.5 * (std::floor(draw_uniform(rng) * 5.0) - 2.0);
    sched.cell.push_back(c);
    sched.sway_phase.push_back(2.0 * M_PI * draw_uniform(rng));
  }
  return sched;
}

/// Per-frame randomness has a fixed layout (dropout gate, outlier gate, one
/// normal per coordinate), so altering one knob never shifts the stream
/// that feeds the others.
struct FrameDraws {
  double u_drop = 0.0;
  double u_out = 0.0;
  std::array<double, 2 * kModelJointCount> normal{};
};

FrameDraws draw_frame(std::mt19937_64& rng) {
  FrameDraws d;
  d.u_drop = draw_uniform(rng);
  d.u_out = draw_uniform(rng);
  for (std::size_t j = 0; j < kModelJointCount; ++j) {
    const GaussPair g = draw_gauss_pair(rng);
    d.normal[2 * j] = g.z0;
    d.normal[2 * j + 1] = g.z1;
  }
  return d;
}

void apply_noise(Pose& pose, const FrameDraws& draws, double sigma) {
  for (std::size_t j = 0; j < kModelJointCount; ++j) {
    pose.joints[j].x += draws.normal[2 * j] * sigma;
    pose.joints[j].y += draws.normal[2 * j + 1] * sigma;
  }
}

/// Phase warp: identity plus a zero-mean ripple with `n` sharp instants per
/// cycle; monotone for sharpness < 1 and advancing exactly one unit per
/// cycle.  Normalized so w(0) = 0.
double warp_phase(double phi, double sharpness, int n, double anchor) {
  if (sharpness <= 0.0) return phi;
  const double k = 2.0 * M_PI * static_cast<double>(n);
  return phi + sharpness / k *
                   (std::sin(k * (phi - anchor)) + std::sin(k * anchor));
}

FrameInterval clamp_interval(const FrameInterval& interval, std::int64_t lo,
                             std::int64_t hi) {
  return FrameInterval{std::max(interval.first, lo),
                       std::min(interval.last, hi)};
}

SynthResult synth_cyclic(const SynthSpec& spec, std::uint64_t seed,
                         const AthleteParams& ap) {
  const std::int64_t total = std::llround(spec.duration_s * spec.fps);
  FrameInterval active{0, total - 1};
  if (spec.active_interval) {
    active = clamp_interval(*spec.active_interval, 0, total - 1);
    if (active.first > active.last) {
      throw InvalidSpecError("active interval lies outside the sequence");
    }
  }
  std::optional<FrameInterval> glide;
  if (spec.glide_interval) {
    const FrameInterval g =
        clamp_interval(*spec.glide_interval, active.first, active.last);
    if (g.first <= g.last) glide = g;
  }
  const auto in_glide = [&](std::int64_t f) {
    return glide && glide->contains(f);
  };

  std::mt19937_64 rng(seed);
  const bool has_outside = active.first > 0 || active.last < total - 1;
  const RestSchedule rest =
      has_outside ? build_rest_schedule(seed, total) : RestSchedule{};

  // Accumulated cycle phase over the active interval; frozen inside the
  // glide.  phi[i] belongs to frame active.first + i.
  const std::int64_t n_active = active.last - active.first + 1;
  std::vector<double> phi(static_cast<std::size_t>(n_active) + 1, 0.0);
  const double mod_omega = 2.0 * M_PI / (spec.modulation_period_s * spec.fps);
  for (std::int64_t i = 0; i < n_active; ++i) {
    const std::int64_t f = active.first + i;
    const double cycle_len =
        spec.base_cycle_frames +
        spec.modulation_amplitude * std::sin(mod_omega * static_cast<double>(f));
    const double step = in_glide(f) ? 0.0 : 1.0 / cycle_len;
    phi[static_cast<std::size_t>(i) + 1] = phi[static_cast<std::size_t>(i)] + step;
  }

  // Bit-exact periodicity path: with a constant integer cycle length and no
  // glide the phase comes from integer arithmetic, so frame f and frame f+T
  // produce the same channel inputs to the last bit.
  const bool exact_period = spec.modulation_amplitude == 0.0 && !glide &&
                            std::floor(spec.base_cycle_frames) ==
                                spec.base_cycle_frames;
  const std::int64_t exact_t =
      exact_period ? static_cast<std::int64_t>(spec.base_cycle_frames) : 0;

  SynthResult result;
  result.seq.video_id = spec.video_id;
  result.seq.fps = spec.fps;

  // Fast-transition instants: the phase values anchor + m / n, located on
  // the phi grid.
  if (spec.transition_sharpness > 0.0) {
    const double n = static_cast<double>(spec.transitions_per_cycle);
    const double anchor = ap.transition_anchor;
    std::int64_t m = static_cast<std::int64_t>(
        std::ceil(-anchor * n - 1e-9));
    for (;; ++m) {
      const double target = anchor + static_cast<double>(m) / n;
      if (target < 0.0) continue;
      if (target > phi.back()) break;
      const auto it = std::lower_bound(phi.begin(), phi.end(), target);
      double x;
      if (it == phi.begin()) {
        x = 0.0;
      } else {
        const std::size_t j = static_cast<std::size_t>(it - phi.begin());
        if (it == phi.end()) break;
        const double denom = phi[j] - phi[j - 1];
        x = static_cast<double>(j - 1) +
            (denom > 0.0 ? (target - phi[j - 1]) / denom : 0.0);
      }
      const std::int64_t frame = active.first + std::llround(x);
      if (frame > active.last) break;
      if (result.striking_frames.empty() ||
          result.striking_frames.back() != frame) {
        result.striking_frames.push_back(frame);
      }
    }
  }

  for (std::int64_t f = 0; f < total; ++f) {
    const FrameDraws draws = draw_frame(rng);

    std::array<double, 6> c{};
    if (active.contains(f)) {
      double psi;
      if (exact_period) {
        const std::int64_t f_rel = f - active.first;
        const double frac = static_cast<double>(f_rel % exact_t) /
                            spec.base_cycle_frames;
        psi = warp_phase(frac, spec.transition_sharpness,
                         spec.transitions_per_cycle, ap.transition_anchor);
      } else {
        psi = warp_phase(phi[static_cast<std::size_t>(f - active.first)],
                         spec.transition_sharpness,
                         spec.transitions_per_cycle, ap.transition_anchor);
      }
      for (std::size_t j = 0; j < 5; ++j) {
        c[j] = std::sin(2.0 * M_PI * (psi + ap.off[j]));
      }
      c[5] = std::sin(4.0 * M_PI * (psi + ap.off[5]));
    } else {
      c = rest.channels(f);
    }

    Pose pose = build_pose(
        ap, c, kRootX + spec.drift_px_per_frame * static_cast<double>(f),
        kRootY);
    const bool outlier = draws.u_out < spec.outlier_prob;
    apply_noise(pose, draws, outlier ? kOutlierSigma : spec.noise_sigma);

    if (draws.u_drop < spec.dropout_prob) {
      result.dropped_frames.push_back(f);
      continue;
    }
    if (outlier) result.outlier_frames.push_back(f);

    result.seq.poses.push_back(TimedPose{f, std::move(pose)});

    double truth = kQuietNan;
    if (active.contains(f) && !in_glide(f)) {
      const std::size_t i = static_cast<std::size_t>(f - active.first);
      const double target = phi[i] + 1.0;
      const auto it = std::lower_bound(phi.begin(), phi.end(), target);
      if (it != phi.end()) {
        const std::size_t j = static_cast<std::size_t>(it - phi.begin());
        if (j > 0) {
          const double denom = phi[j] - phi[j - 1];
          const double x = static_cast<double>(j - 1) +
                           (denom > 0.0 ? (target - phi[j - 1]) / denom : 0.0);
          truth = x - static_cast<double>(i);
        }
      }
    }
    result.cycle_length.push_back(truth);
  }
  return result;
}

struct TimelineSegment {
  Phase label = Phase::jump;
  std::int64_t start = 0;
  std::int64_t length = 0;
};

SynthResult synth_longjump(const SynthSpec& spec, std::uint64_t seed,
                           const AthleteParams& ap) {
  std::mt19937_64 rng(seed);

  const auto jittered = [&](double base) {
    const double u = draw_uniform(rng);
    const double scaled = base * (1.0 + spec.phase_jitter * (2.0 * u - 1.0));
    return std::max<std::int64_t>(2, std::llround(scaled));
  };

  std::vector<TimelineSegment> timeline;
  std::int64_t cursor = 0;
  const auto push = [&](Phase label, std::int64_t length) {
    timeline.push_back(TimelineSegment{label, cursor, length});
    cursor += length;
  };
  for (int cycle = 0; cycle < spec.runup_cycles; ++cycle) {
    push(Phase::jump, jittered(spec.jump_frames));
    push(Phase::airtime, jittered(spec.airtime_frames));
    push(Phase::landing, jittered(spec.landing_frames));
  }
  push(Phase::flight, jittered(spec.flight_frames));
  push(Phase::final_landing, jittered(spec.final_landing_frames));
  const std::int64_t total = cursor;

  // Distinct drive-channel prototypes per phase; the athlete delta shifts
  // them slightly without closing the gaps between classes.
  static constexpr std::array<std::array<double, 6>, kPhaseCount> kProto{{
      {0.90, -0.60, 0.80, -0.50, 0.40, 0.20},
      {-0.80, 0.90, -0.70, 0.60, -0.30, -0.50},
      {0.20, -0.90, -0.20, 0.90, 0.80, 0.60},
      {-0.30, 0.20, 0.95, 0.10, -0.90, 0.90},
      {0.60, 0.65, -0.90, -0.80, 0.10, -0.90},
  }};

  SynthResult result;
  result.seq.video_id = spec.video_id;
  result.seq.fps = spec.fps;
  result.true_step_count = spec.runup_cycles;
  result.first_runup_frame = 0;
  for (const TimelineSegment& seg : timeline) {
    if (seg.label == Phase::flight) {
      result.flight_start = seg.start;
      break;
    }
  }

  std::size_t seg_index = 0;
  for (std::int64_t f = 0; f < total; ++f) {
    while (seg_index + 1 < timeline.size() &&
           f >= timeline[seg_index].start + timeline[seg_index].length) {
      ++seg_index;
    }
    const TimelineSegment& seg = timeline[seg_index];
    const double u = static_cast<double>(f - seg.start) /
                     static_cast<double>(seg.length);

    const FrameDraws draws = draw_frame(rng);

    std::array<double, 6> c{};
    for (std::size_t j = 0; j < 6; ++j) {
      const double sway =
          0.08 * std::sin(2.0 * M_PI * (u + 0.15 * static_cast<double>(j)));
      c[j] = kProto[static_cast<std::size_t>(seg.label)][j] +
             ap.proto_delta[j] + sway;
    }

    const double tx = kRootX + spec.pan_px_per_frame * static_cast<double>(f) +
                      2.0 * std::sin(2.0 * M_PI * static_cast<double>(f) /
                                     (3.0 * spec.fps));
    Pose pose = build_pose(ap, c, tx, kRootY);
    const bool outlier = draws.u_out < spec.outlier_prob;
    apply_noise(pose, draws, outlier ? kOutlierSigma : spec.noise_sigma);

    if (draws.u_drop < spec.dropout_prob) {
      result.dropped_frames.push_back(f);
      continue;
    }
    if (outlier) result.outlier_frames.push_back(f);

    result.seq.poses.push_back(TimedPose{f, std::move(pose)});
    result.labels.push_back(seg.label);
  }
  return result;
}

}  // namespace

void SynthSpec::validate() const {
  if (video_id.empty()) {
    throw InvalidSpecError("video_id must not be empty");
  }
  if (!(fps > 0.0)) {
    throw InvalidSpecError("fps must be positive");
  }
  if (!(noise_sigma >= 0.0)) {
    throw InvalidSpecError("noise sigma must be non-negative");
  }
  if (!(dropout_prob >= 0.0 && dropout_prob <= 1.0) ||
      !(outlier_prob >= 0.0 && outlier_prob <= 1.0)) {
    throw InvalidSpecError("probabilities must lie in [0, 1]");
  }
  if (kind == SynthKind::cyclic) {
    if (!(duration_s > 0.0)) {
      throw InvalidSpecError("duration must be positive");
    }
    if (!(base_cycle_frames >= 4.0)) {
      throw InvalidSpecError("base cycle length must be at least 4 frames");
    }
    if (!(modulation_amplitude >= 0.0) ||
        modulation_amplitude > base_cycle_frames - 2.0) {
      throw InvalidSpecError("modulation amplitude out of range");
    }
    if (!(modulation_period_s > 0.0)) {
      throw InvalidSpecError("modulation period must be positive");
    }
    if (transitions_per_cycle < 1) {
      throw InvalidSpecError("transitions per cycle must be at least 1");
    }
    if (!(transition_sharpness >= 0.0 && transition_sharpness < 1.0)) {
      throw InvalidSpecError("transition sharpness must lie in [0, 1)");
    }
    if (active_interval && active_interval->first > active_interval->last) {
      throw InvalidSpecError("active interval is empty");
    }
    if (glide_interval && glide_interval->first > glide_interval->last) {
      throw InvalidSpecError("glide interval is empty");
    }
  } else {
    if (runup_cycles < 1) {
      throw InvalidSpecError("long jump needs at least one run-up cycle");
    }
    for (double frames : {jump_frames, airtime_frames, landing_frames,
                          flight_frames, final_landing_frames}) {
      if (!(frames >= 2.0)) {
        throw InvalidSpecError("phase durations must be at least 2 frames");
      }
    }
    if (!(phase_jitter >= 0.0 && phase_jitter < 1.0)) {
      throw InvalidSpecError("phase jitter must lie in [0, 1)");
    }
  }
}

SynthResult synthesize(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  const AthleteParams ap = athlete_params(spec.athlete_signature);
  if (spec.kind == SynthKind::cyclic) {
    return synth_cyclic(spec, seed, ap);
  }
  return synth_longjump(spec, seed, ap);
}

}  // namespace posemine
