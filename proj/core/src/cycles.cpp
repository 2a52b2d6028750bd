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
#include "posemine/cycles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "parallel.hpp"

namespace posemine {
namespace {

/// Midpoint-rule median of an unsorted list.
double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool point_order(const DifferencePoint& a, const DifferencePoint& b) {
  if (a.frame != b.frame) return a.frame < b.frame;
  return a.diff < b.diff;
}

/// Median of the diffs of all points within +-window frames of `frame`.
/// `points` must be sorted by frame.
double local_median(const std::vector<DifferencePoint>& points,
                    std::int64_t frame, std::int64_t window) {
  auto lo = std::lower_bound(
      points.begin(), points.end(), frame - window,
      [](const DifferencePoint& p, std::int64_t f) { return p.frame < f; });
  auto hi = std::upper_bound(
      points.begin(), points.end(), frame + window,
      [](std::int64_t f, const DifferencePoint& p) { return f < p.frame; });
  std::vector<double> diffs;
  diffs.reserve(static_cast<std::size_t>(hi - lo));
  for (auto it = lo; it != hi; ++it) diffs.push_back(double(it->diff));
  return median_of(std::move(diffs));
}

double eval_poly(const std::array<double, 6>& c, double u) {
  double v = 0.0;
  for (int p = 5; p >= 0; --p) v = v * u + c[p];
  return v;
}

}  // namespace

bool CycleSpeedCurve::covers(std::int64_t frame) const noexcept {
  auto it = std::upper_bound(
      ranges.begin(), ranges.end(), frame,
      [](std::int64_t f, const FrameInterval& r) { return f < r.first; });
  if (it == ranges.begin()) return false;
  return (it - 1)->contains(frame);
}

double CycleSpeedCurve::value_at(double frame) const {
  auto it = std::upper_bound(
      segments.begin(), segments.end(), frame,
      [](double f, const Segment& s) { return f < s.from_frame; });
  if (it == segments.begin()) {
    throw OutOfRangeError("frame " + std::to_string(frame) +
                          " is before the covered range");
  }
  const Segment& seg = *(it - 1);
  if (frame > seg.to_frame + 1e-9) {
    throw OutOfRangeError("frame " + std::to_string(frame) +
                          " is outside the covered ranges");
  }
  const double u = (frame - seg.center) / seg.half_width;
  return eval_poly(seg.coeffs, u);
}

double CycleSpeedCurve::value_at(std::int64_t frame) const {
  if (!covers(frame)) {
    throw OutOfRangeError("frame " + std::to_string(frame) +
                          " is outside the detected cyclic ranges");
  }
  return value_at(static_cast<double>(frame));
}

double cycle_rate(const CycleSpeedCurve& curve, std::int64_t frame) {
  const double frames_per_cycle = curve.value_at(frame);
  return curve.fps * 60.0 / frames_per_cycle;
}

std::vector<MatchList> build_match_lists(const PoseSequence& seq,
                                         double match_threshold,
                                         double s_ref) {
  seq.validate();
  const std::size_t n = seq.size();
  std::vector<PoseMoments> moments(n);
  detail::parallel_for(n, [&](std::size_t i) {
    moments[i] = PoseMoments::of(seq.poses[i].pose);
  });

  // Degenerate (collapsed) poses have no usable shape; they match nothing
  // rather than poisoning the run with exceptions.
  std::vector<MatchList> lists(n);
  detail::parallel_for(n, [&](std::size_t i) {
    MatchList& list = lists[i];
    list.anchor_frame = seq.poses[i].frame;
    if (moments[i].scale <= 0.0) return;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || moments[j].scale <= 0.0) continue;
      const double d = mse_norm(moments[i], moments[j], s_ref);
      if (d < match_threshold) {
        list.entries.push_back({seq.poses[j].frame, d});
      }
    }
  });
  return lists;
}

ReoccurrenceSequence consolidate(const MatchList& list,
                                 std::int64_t gap_threshold) {
  ReoccurrenceSequence out;
  out.anchor_frame = list.anchor_frame;
  const auto& e = list.entries;
  std::size_t i = 0;
  while (i < e.size()) {
    std::size_t j = i + 1;
    while (j < e.size() && e[j].frame - e[j - 1].frame <= gap_threshold) ++j;

    std::size_t best = i;  // strict < keeps the earlier frame on ties
    for (std::size_t t = i + 1; t < j; ++t) {
      if (e[t].mse_norm < e[best].mse_norm) best = t;
    }
    std::int64_t spread = 0;
    for (std::size_t t = i; t < j; ++t) {
      spread = std::max(spread, std::abs(e[t].frame - e[best].frame));
    }
    out.occurrences.push_back({e[best].frame, e[best].mse_norm, spread});
    i = j;
  }
  return out;
}

std::vector<ReoccurrenceSequence> filter_sequences(
    std::vector<ReoccurrenceSequence> sequences,
    std::int64_t spread_threshold) {
  for (auto& s : sequences) {
    std::erase_if(s.occurrences, [&](const Reoccurrence& r) {
      return r.spread >= spread_threshold;
    });
  }
  std::vector<double> lengths;
  lengths.reserve(sequences.size());
  for (const auto& s : sequences) {
    lengths.push_back(static_cast<double>(s.occurrences.size()));
  }
  const double median_len = median_of(std::move(lengths));

  std::vector<ReoccurrenceSequence> out;
  for (auto& s : sequences) {
    if (static_cast<double>(s.occurrences.size()) >= median_len) {
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<DifferencePoint> extract_differences(
    const std::vector<ReoccurrenceSequence>& sequences, bool include_anchor) {
  std::vector<DifferencePoint> out;
  for (const auto& s : sequences) {
    std::vector<std::int64_t> timeline;
    timeline.reserve(s.occurrences.size() + 1);
    for (const auto& r : s.occurrences) timeline.push_back(r.frame);
    if (include_anchor) {
      auto it =
          std::lower_bound(timeline.begin(), timeline.end(), s.anchor_frame);
      if (it == timeline.end() || *it != s.anchor_frame) {
        timeline.insert(it, s.anchor_frame);
      }
    }
    for (std::size_t i = 1; i < timeline.size(); ++i) {
      out.push_back({timeline[i - 1], timeline[i] - timeline[i - 1]});
    }
  }
  std::sort(out.begin(), out.end(), point_order);
  return out;
}

std::vector<DifferencePoint> median_filter(
    const std::vector<DifferencePoint>& points, double fps,
    double window_seconds, double rel_tol) {
  std::vector<DifferencePoint> sorted = points;
  std::sort(sorted.begin(), sorted.end(), point_order);
  const std::int64_t window = std::llround(window_seconds * fps);

  std::vector<DifferencePoint> out;
  out.reserve(sorted.size());
  std::int64_t cached_frame = 0;
  double cached_median = 0.0;
  bool have_cache = false;
  for (const DifferencePoint& p : sorted) {
    if (!have_cache || p.frame != cached_frame) {
      cached_frame = p.frame;
      cached_median = local_median(sorted, p.frame, window);
      have_cache = true;
    }
    if (std::abs(static_cast<double>(p.diff) - cached_median) <=
        rel_tol * cached_median) {
      out.push_back(p);
    }
  }
  return out;
}

CurveFitResult fit_curve(const std::vector<DifferencePoint>& points,
                         double fps, const CurveFitConfig& config) {
  CurveFitResult result;
  result.curve.fps = fps;
  if (points.empty()) return result;

  const int degree = std::clamp(config.degree, 1, 5);
  std::vector<DifferencePoint> sorted = points;
  std::sort(sorted.begin(), sorted.end(), point_order);
  const std::int64_t window =
      std::llround(config.median_window_seconds * fps);

  // Regions break wherever the data gap exceeds one local cycle length:
  // separate bouts of cyclic motion must not be bridged by the fit.
  std::vector<std::pair<std::size_t, std::size_t>> regions;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    bool split = (i == sorted.size());
    if (!split) {
      const double gap =
          static_cast<double>(sorted[i].frame - sorted[i - 1].frame);
      const double cycle =
          std::max(1.0, local_median(sorted, sorted[i - 1].frame, window));
      split = gap > cycle;
    }
    if (split) {
      regions.emplace_back(start, i);
      start = i;
    }
  }

  for (const auto& [lo, hi] : regions) {
    const std::size_t count = hi - lo;
    const std::int64_t first = sorted[lo].frame;
    const std::int64_t last = sorted[hi - 1].frame;
    if (count < config.min_region_points) {
      result.skipped_regions.push_back({first, last});
      continue;
    }

    std::vector<double> region_diffs;
    region_diffs.reserve(count);
    for (std::size_t i = lo; i < hi; ++i) {
      region_diffs.push_back(static_cast<double>(sorted[i].diff));
    }
    const double cycle = std::max(1.0, median_of(std::move(region_diffs)));
    const double span = static_cast<double>(last - first);

    // Pick the segment count, then shrink it until every segment holds
    // enough points for a stable polynomial.
    std::size_t num_segments = static_cast<std::size_t>(std::clamp<double>(
        std::llround(span / (config.segment_cycles * cycle)), 1, 1000));
    std::vector<double> bounds;
    std::vector<std::size_t> seg_of_point(count);
    for (;; --num_segments) {
      bounds.assign(num_segments + 1, 0.0);
      for (std::size_t s = 0; s <= num_segments; ++s) {
        bounds[s] = first + span * static_cast<double>(s) /
                                static_cast<double>(num_segments);
      }
      std::vector<std::size_t> seg_count(num_segments, 0);
      for (std::size_t i = 0; i < count; ++i) {
        const double f = static_cast<double>(sorted[lo + i].frame);
        std::size_t s = static_cast<std::size_t>(
            std::upper_bound(bounds.begin(), bounds.end(), f) -
            bounds.begin());
        s = (s == 0) ? 0 : std::min(s - 1, num_segments - 1);
        seg_of_point[i] = s;
        ++seg_count[s];
      }
      const std::size_t min_count =
          *std::min_element(seg_count.begin(), seg_count.end());
      if (min_count >= config.min_segment_points || num_segments == 1) break;
    }

    // Joint constrained least squares over all segments of the region.
    const int terms = degree + 1;
    const std::size_t unknowns = num_segments * terms;
    const std::size_t constraints = 2 * (num_segments - 1);
    Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(unknowns, unknowns);
    Eigen::VectorXd aty = Eigen::VectorXd::Zero(unknowns);

    std::vector<double> centers(num_segments), halves(num_segments);
    for (std::size_t s = 0; s < num_segments; ++s) {
      centers[s] = 0.5 * (bounds[s] + bounds[s + 1]);
      halves[s] = std::max(0.5 * (bounds[s + 1] - bounds[s]), 1e-9);
    }

    Eigen::VectorXd row(terms);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t s = seg_of_point[i];
      const double u =
          (static_cast<double>(sorted[lo + i].frame) - centers[s]) / halves[s];
      double up = 1.0;
      for (int p = 0; p < terms; ++p) {
        row(p) = up;
        up *= u;
      }
      const std::size_t base = s * terms;
      ata.block(base, base, terms, terms).noalias() += row * row.transpose();
      aty.segment(base, terms).noalias() +=
          row * static_cast<double>(sorted[lo + i].diff);
    }

    Eigen::MatrixXd cons = Eigen::MatrixXd::Zero(constraints, unknowns);
    for (std::size_t s = 0; s + 1 < num_segments; ++s) {
      const std::size_t left = s * terms, right = (s + 1) * terms;
      // Value continuity: poly_s(1) == poly_{s+1}(-1).
      for (int p = 0; p < terms; ++p) {
        cons(2 * s, left + p) = 1.0;
        cons(2 * s, right + p) = (p % 2 == 0) ? -1.0 : 1.0;
      }
      // First-derivative continuity, with the per-segment scaling applied.
      for (int p = 1; p < terms; ++p) {
        cons(2 * s + 1, left + p) = p / halves[s];
        cons(2 * s + 1, right + p) =
            ((p % 2 == 1) ? -1.0 : 1.0) * p / halves[s + 1];
      }
    }

    const std::size_t dim = unknowns + constraints;
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    kkt.topLeftCorner(unknowns, unknowns) = ata;
    if (constraints > 0) {
      kkt.topRightCorner(unknowns, constraints) = cons.transpose();
      kkt.bottomLeftCorner(constraints, unknowns) = cons;
    }
    rhs.head(unknowns) = aty;
    const Eigen::VectorXd solution = kkt.fullPivLu().solve(rhs);

    std::vector<CycleSpeedCurve::Segment> segments(num_segments);
    for (std::size_t s = 0; s < num_segments; ++s) {
      CycleSpeedCurve::Segment& seg = segments[s];
      seg.from_frame = bounds[s];
      seg.to_frame = bounds[s + 1];
      seg.center = centers[s];
      seg.half_width = halves[s];
      for (int p = 0; p < terms; ++p) {
        seg.coeffs[static_cast<std::size_t>(p)] = solution(s * terms + p);
      }
    }

    // A cycle length must stay positive everywhere it is reported.
    bool positive = true;
    for (std::int64_t f = first; f <= last && positive; ++f) {
      const double fd = static_cast<double>(f);
      for (std::size_t s = 0; s < num_segments; ++s) {
        if (fd >= segments[s].from_frame - 1e-9 &&
            fd <= segments[s].to_frame + 1e-9) {
          const double u = (fd - segments[s].center) / segments[s].half_width;
          // A NaN from a rank-deficient fit must also fail this check.
          if (!(eval_poly(segments[s].coeffs, u) > 0.0)) positive = false;
          break;
        }
      }
    }
    if (!positive) {
      result.skipped_regions.push_back({first, last});
      continue;
    }

    for (auto& seg : segments) {
      result.curve.segments.push_back(seg);
    }
    result.curve.ranges.push_back({first, last});
  }
  return result;
}

CycleMiningResult mine_cycles(const PoseSequence& seq,
                              const CycleConfig& config) {
  const PoseSequence* working = &seq;
  PoseSequence restricted;
  if (config.joints) {
    restricted = restrict_joints(seq, *config.joints);
    working = &restricted;
  }

  CycleMiningResult result;
  const std::vector<MatchList> lists =
      build_match_lists(*working, config.match_threshold, config.s_ref);
  std::vector<ReoccurrenceSequence> sequences;
  sequences.reserve(lists.size());
  for (const MatchList& list : lists) {
    sequences.push_back(consolidate(list, config.gap_threshold));
  }
  result.anchors_total = sequences.size();
  std::vector<ReoccurrenceSequence> survivors =
      filter_sequences(std::move(sequences), config.spread_threshold);
  result.anchors_kept = survivors.size();

  result.raw_points = extract_differences(survivors, config.include_anchor);
  const std::vector<DifferencePoint> filtered =
      median_filter(result.raw_points, working->fps,
                    config.median_window_seconds, config.median_rel_tol);

  // Survival mask over the raw points; both lists share the sort order.
  result.kept.assign(result.raw_points.size(), 0);
  std::size_t fi = 0;
  for (std::size_t i = 0;
       i < result.raw_points.size() && fi < filtered.size(); ++i) {
    if (result.raw_points[i].frame == filtered[fi].frame &&
        result.raw_points[i].diff == filtered[fi].diff) {
      result.kept[i] = 1;
      ++fi;
    }
  }

  CurveFitResult fit = fit_curve(filtered, working->fps, config.fit);
  result.curve = std::move(fit.curve);
  result.skipped_regions = std::move(fit.skipped_regions);
  result.detected_ranges = result.curve.ranges;
  return result;
}

}  // namespace posemine
