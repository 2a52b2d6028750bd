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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace posemine {

/**
 * @brief Base class for every error thrown by the library.
 */
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pose whose joints coincide (zero spatial extent); alignment and
/// normalization are undefined for it.
class DegeneratePoseError : public Error {
 public:
  using Error::Error;
};

/// Two poses (or containers) that were expected to have the same size do not.
class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// A query outside the domain of a fitted curve or model.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// Not enough data to produce the requested result.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// A matching query produced no match at all.
class NoMatchesError : public Error {
 public:
  using Error::Error;
};

/// A decoded phase sequence contains no flight phase.
class NoFlightPhaseError : public Error {
 public:
  using Error::Error;
};

/// A training corpus is missing one of the phase labels entirely.
class EmptyPhaseError : public Error {
 public:
  using Error::Error;
};

/// Every decoding path has probability zero (only possible without
/// smoothing).
class ImpossibleObservationError : public Error {
 public:
  using Error::Error;
};

/// An invalid generator or configuration description.
class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

/// A malformed line in an input file.  Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A structurally invalid input file: wrong magic, inconsistent joint count,
/// frames out of order, missing header fields.
class SchemaError : public Error {
 public:
  using Error::Error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 p, Point2 q) { return {p.x + q.x, p.y + q.y}; }
  friend Point2 operator-(Point2 p, Point2 q) { return {p.x - q.x, p.y - q.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  double norm() const { return std::hypot(x, y); }
};

/**
 * @brief A 2d body pose: an ordered list of joint positions in image
 * coordinates.  All poses compared against each other must use the same
 * joint order.
 */
struct Pose {
  std::vector<Point2> joints;

  std::size_t size() const noexcept { return joints.size(); }
  bool empty() const noexcept { return joints.empty(); }
};

/// A pose attached to a video frame index.
struct TimedPose {
  std::int64_t frame = 0;
  Pose pose;
};

/**
 * @brief A pose track for one video: frames are strictly increasing but not
 * necessarily contiguous (detector dropouts leave holes).
 */
struct PoseSequence {
  std::string video_id;
  double fps = 50.0;
  std::vector<TimedPose> poses;

  std::size_t size() const noexcept { return poses.size(); }

  /// Index of the entry with the given frame, or npos.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t find_frame(std::int64_t frame) const noexcept;

  /// Throws SchemaError unless fps > 0, frames strictly increase and all
  /// poses share one joint count.
  void validate() const;
};

/**
 * @brief Direct similarity transform q = s R(theta) p + t, stored as the
 * four linear parameters (a, b, tx, ty) with a = s cos(theta),
 * b = s sin(theta).
 */
struct SimilarityTransform {
  double a = 1.0;
  double b = 0.0;
  double tx = 0.0;
  double ty = 0.0;

  double scale() const { return std::hypot(a, b); }
  double rotation() const { return std::atan2(b, a); }

  Point2 apply(Point2 p) const {
    return {a * p.x - b * p.y + tx, b * p.x + a * p.y + ty};
  }

  Pose apply(const Pose& pose) const {
    Pose out;
    out.joints.reserve(pose.size());
    for (Point2 p : pose.joints) out.joints.push_back(apply(p));
    return out;
  }

  static SimilarityTransform from_scale_rotation(double s, double theta,
                                                 double tx = 0.0,
                                                 double ty = 0.0) {
    return {s * std::cos(theta), s * std::sin(theta), tx, ty};
  }
};

/**
 * @brief A strictly increasing selection of joint indices, used to run the
 * mining pipeline on a body part (e.g. the legs only).
 */
struct JointSubset {
  std::vector<std::size_t> indices;

  /// Throws InvalidSpecError unless there are at least two strictly
  /// increasing indices.
  static JointSubset of(std::vector<std::size_t> indices);
};

/// Inclusive frame interval [first, last].
struct FrameInterval {
  std::int64_t first = 0;
  std::int64_t last = 0;

  std::int64_t length() const { return last - first + 1; }
  bool contains(std::int64_t f) const { return f >= first && f <= last; }
};

/// Joint order used by the bundled pose model and the synthetic generator.
inline constexpr std::size_t kModelJointCount = 14;
extern const std::array<const char*, kModelJointCount> kModelJointNames;

/// Hips, knees and ankles of the 14 joint model; the subset used when mining
/// leg motion separately from full body motion.
JointSubset lower_body_subset();

}  // namespace posemine
