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
#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "posemine/cycles.hpp"
#include "posemine/eval.hpp"
#include "posemine/phases.hpp"
#include "posemine/types.hpp"
#include "support/oracles.hpp"

using namespace posemine;

namespace {

DetectedEvent det(std::string video, Phase label, std::int64_t first,
                  std::int64_t last, double confidence) {
  return DetectedEvent{std::move(video), label, {first, last}, confidence};
}

TruthEvent truth(std::string video, Phase label, std::int64_t first,
                 std::int64_t last) {
  return TruthEvent{std::move(video), label, {first, last}};
}

/// A straight-line cycle curve: value(f) = 60 + (f - 50) / 5 on one segment
/// spanning frames 0..100, with integer coverage restricted to 10..90.
CycleSpeedCurve line_curve() {
  CycleSpeedCurve curve;
  CycleSpeedCurve::Segment seg;
  seg.from_frame = 0.0;
  seg.to_frame = 100.0;
  seg.center = 50.0;
  seg.half_width = 50.0;
  seg.coeffs = {60.0, 10.0, 0.0, 0.0, 0.0, 0.0};
  curve.segments.push_back(seg);
  curve.ranges.push_back({10, 90});
  return curve;
}

}  // namespace

TEST_CASE("interval overlap is counted in inclusive frames") {
  CHECK(interval_iou({0, 10}, {5, 15}) == doctest::Approx(6.0 / 16));
  CHECK(interval_iou({5, 15}, {0, 10}) == doctest::Approx(6.0 / 16));
  CHECK(interval_iou({0, 9}, {20, 29}) == 0.0);
  CHECK(interval_iou({0, 9}, {0, 9}) == 1.0);
  CHECK(interval_iou({0, 9}, {0, 19}) == doctest::Approx(0.5));
  CHECK(interval_iou({0, 10}, {10, 20}) == doctest::Approx(1.0 / 21));
  CHECK(interval_iou({3, 3}, {3, 3}) == 1.0);
}

TEST_CASE("every matched detection in rank order gives full precision") {
  std::vector<TruthEvent> truths;
  std::vector<DetectedEvent> dets;
  for (int k = 0; k < 4; ++k) {
    truths.push_back(truth("v", Phase::jump, 100 * k, 100 * k + 9));
    dets.push_back(det("v", Phase::jump, 100 * k, 100 * k + 9, 0.9 - 0.1 * k));
  }
  CHECK(event_ap(dets, truths) == doctest::Approx(1.0));
}

TEST_CASE("a frozen ranking with one miss and one false alarm") {
  std::vector<TruthEvent> truths;
  for (int k = 0; k < 6; ++k) {
    truths.push_back(truth("v", Phase::jump, 100 * k, 100 * k + 9));
  }
  // Ranks 1-4 hit the first four truths, rank 5 fires in empty space,
  // rank 6 hits the fifth truth; the sixth truth is never detected.
  std::vector<DetectedEvent> dets = {
      det("v", Phase::jump, 0, 9, 0.9),
      det("v", Phase::jump, 100, 109, 0.8),
      det("v", Phase::jump, 200, 209, 0.7),
      det("v", Phase::jump, 300, 309, 0.6),
      det("v", Phase::jump, 600, 609, 0.5),
      det("v", Phase::jump, 400, 409, 0.4),
  };
  const double expected =
      oracle::ap_from_ranking({true, true, true, true, false, true}, 6);
  CHECK(expected == doctest::Approx(29.0 / 36));
  CHECK(event_ap(dets, truths) == doctest::Approx(expected));

  // Shuffling the input changes nothing; the ranking is by confidence.
  std::mt19937_64 rng(5);
  std::shuffle(dets.begin(), dets.end(), rng);
  CHECK(event_ap(dets, truths) == doctest::Approx(expected));
}

TEST_CASE("overlap exactly at the threshold does not count") {
  const std::vector<TruthEvent> truths = {truth("v", Phase::flight, 0, 9)};
  const std::vector<DetectedEvent> dets = {det("v", Phase::flight, 0, 4, 1.0)};
  CHECK(interval_iou({0, 4}, {0, 9}) == doctest::Approx(0.5));
  CHECK(event_ap(dets, truths, 0.5) == 0.0);
  CHECK(event_ap(dets, truths, 0.49) == doctest::Approx(1.0));
}

TEST_CASE("each truth event is claimed at most once") {
  const std::vector<TruthEvent> truths = {truth("v", Phase::jump, 0, 9)};
  const std::vector<DetectedEvent> dets = {
      det("v", Phase::jump, 0, 9, 0.9),
      det("v", Phase::jump, 0, 9, 0.5),
  };
  // The duplicate becomes a false positive after the true positive, which
  // leaves the precision envelope at the recall of 1 untouched.
  CHECK(event_ap(dets, truths) == doctest::Approx(1.0));
}

TEST_CASE("a detection claims the truth it overlaps most") {
  const std::vector<TruthEvent> truths = {
      truth("v", Phase::jump, 0, 9),
      truth("v", Phase::jump, 8, 17),
  };
  // The first ranked detection overlaps both truths but the second one more
  // strongly; only by claiming the second does the later detection still
  // find its own truth unclaimed.
  const std::vector<DetectedEvent> dets = {
      det("v", Phase::jump, 5, 14, 0.9),
      det("v", Phase::jump, 0, 9, 0.5),
  };
  CHECK(event_ap(dets, truths, 0.3) == doctest::Approx(1.0));
}

TEST_CASE("confidence ties rank by position for reproducibility") {
  const std::vector<TruthEvent> truths = {truth("v", Phase::jump, 0, 9)};
  std::vector<DetectedEvent> dets = {
      det("v", Phase::jump, 50, 59, 0.5),
      det("v", Phase::jump, 0, 9, 0.5),
  };
  // The earlier-starting detection ranks first, so the true positive
  // precedes the false alarm regardless of input order.
  CHECK(event_ap(dets, truths) == doctest::Approx(1.0));
  std::swap(dets[0], dets[1]);
  CHECK(event_ap(dets, truths) == doctest::Approx(1.0));
}

TEST_CASE("matches never cross videos or labels") {
  const std::vector<TruthEvent> truths = {truth("v", Phase::jump, 0, 9)};
  CHECK(event_ap({det("w", Phase::jump, 0, 9, 1.0)}, truths) == 0.0);
  CHECK(event_ap({det("v", Phase::airtime, 0, 9, 1.0)}, truths) == 0.0);
  CHECK(event_ap({}, truths) == 0.0);
  CHECK_THROWS_AS(event_ap({det("v", Phase::jump, 0, 9, 1.0)}, {}),
                  InsufficientDataError);
}

TEST_CASE("average precision matches the curve definition on random data") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  for (int instance = 0; instance < 50; ++instance) {
    CAPTURE(instance);
    std::uniform_int_distribution<int> truth_count(3, 8);
    const int n_truth = truth_count(rng);
    std::vector<TruthEvent> truths;
    for (int k = 0; k < n_truth; ++k) {
      truths.push_back(truth("v", Phase::jump, 100 * k, 100 * k + 9));
    }

    // Detections either hover over one truth (overlap well above the
    // threshold) or land in the empty space between truths.
    std::uniform_int_distribution<int> det_count(2, 12);
    std::uniform_int_distribution<int> target(0, n_truth - 1);
    std::uniform_int_distribution<int> jitter(-2, 2);
    std::bernoulli_distribution miss(0.3);
    const int n_det = det_count(rng);
    std::vector<DetectedEvent> dets;
    std::vector<int> aim(static_cast<std::size_t>(n_det));
    for (int d = 0; d < n_det; ++d) {
      const int k = target(rng);
      if (miss(rng)) {
        aim[static_cast<std::size_t>(d)] = -1;
        dets.push_back(det("v", Phase::jump, 100 * k + 40, 100 * k + 49,
                           conf(rng)));
      } else {
        aim[static_cast<std::size_t>(d)] = k;
        const std::int64_t start = 100 * k + jitter(rng);
        dets.push_back(det("v", Phase::jump, start, start + 9, conf(rng)));
      }
    }

    // Independent scoring: in this layout each detection overlaps at most
    // one truth, so greedy matching is first-come-first-claimed in rank
    // order and the AP follows from the ranked hit flags alone.
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return dets[a].confidence > dets[b].confidence;
    });
    std::vector<bool> claimed(truths.size(), false);
    std::vector<bool> is_tp;
    for (std::size_t rank : order) {
      const int k = aim[rank];
      if (k >= 0 && !claimed[static_cast<std::size_t>(k)]) {
        claimed[static_cast<std::size_t>(k)] = true;
        is_tp.push_back(true);
      } else {
        is_tp.push_back(false);
      }
    }
    const double expected =
        oracle::ap_from_ranking(is_tp, truths.size());
    CHECK(event_ap(dets, truths) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("decoded label runs become scored detections") {
  PhasePrediction pred;
  pred.labels.insert(pred.labels.end(), 4, Phase::jump);
  pred.labels.insert(pred.labels.end(), 2, Phase::airtime);
  pred.labels.insert(pred.labels.end(), 3, Phase::flight);
  pred.labels.insert(pred.labels.end(), 1, Phase::final_landing);
  pred.frames.resize(pred.labels.size());
  std::iota(pred.frames.begin(), pred.frames.end(), std::int64_t{0});

  const std::array<double, kPhaseCount> medians = {2.0, 4.0, 5.0, 1.0, 0.0};
  const auto dets = score_events("clip7", pred, medians);
  REQUIRE(dets.size() == 4);
  CHECK(dets[0].video_id == "clip7");
  CHECK(dets[0].label == Phase::jump);
  CHECK(dets[0].span.first == 0);
  CHECK(dets[0].span.last == 3);
  CHECK(dets[0].confidence == doctest::Approx(2.0));
  CHECK(dets[1].label == Phase::airtime);
  CHECK(dets[1].confidence == doctest::Approx(0.5));
  CHECK(dets[2].label == Phase::flight);
  CHECK(dets[2].span.first == 6);
  CHECK(dets[2].span.last == 8);
  CHECK(dets[2].confidence == doctest::Approx(3.0));
  // A class that never occurred in training has no length prior.
  CHECK(dets[3].label == Phase::final_landing);
  CHECK(dets[3].confidence == 0.0);
}

TEST_CASE("mean average precision over phases") {
  std::vector<TruthEvent> truths;
  std::vector<DetectedEvent> dets;
  const std::array<Phase, 4> classes = {Phase::jump, Phase::airtime,
                                        Phase::landing, Phase::flight};
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (int k = 0; k < 2; ++k) {
      const std::int64_t start = 1000 * static_cast<std::int64_t>(c) + 100 * k;
      truths.push_back(truth("v", classes[c], start, start + 9));
      dets.push_back(det("v", classes[c], start, start + 9, 0.8));
    }
  }

  SUBCASE("perfect detections score one") {
    const PhaseMapResult result = phase_map(dets, truths);
    CHECK(result.map == doctest::Approx(1.0));
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const auto h = static_cast<std::size_t>(classes[c]);
      REQUIRE(result.per_class_ap[h].has_value());
      CHECK(*result.per_class_ap[h] == doctest::Approx(1.0));
      CHECK(result.truth_counts[h] == 2);
      CHECK(result.detection_counts[h] == 2);
    }
    // No final landing ground truth: the class stays out of the mean.
    CHECK(!result.per_class_ap[4].has_value());
    CHECK(result.truth_counts[4] == 0);
  }

  SUBCASE("permuting labels destroys every class") {
    for (DetectedEvent& d : dets) {
      d.label = static_cast<Phase>((static_cast<int>(d.label) + 1) % 5);
    }
    const PhaseMapResult result = phase_map(dets, truths);
    CHECK(result.map == 0.0);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const auto h = static_cast<std::size_t>(classes[c]);
      REQUIRE(result.per_class_ap[h].has_value());
      CHECK(*result.per_class_ap[h] == 0.0);
    }
  }

  SUBCASE("detections outside any truth class are still counted") {
    dets.push_back(det("v", Phase::final_landing, 9000, 9009, 0.5));
    const PhaseMapResult result = phase_map(dets, truths);
    CHECK(result.detection_counts[4] == 1);
    CHECK(!result.per_class_ap[4].has_value());
    CHECK(result.map == doctest::Approx(1.0));
  }
}

TEST_CASE("no ground truth at all yields a zero mean") {
  const PhaseMapResult result = phase_map({}, {});
  CHECK(result.map == 0.0);
  for (std::size_t h = 0; h < kPhaseCount; ++h) {
    CHECK(!result.per_class_ap[h].has_value());
  }
}

TEST_CASE("frame confusion counts truth rows against predicted columns") {
  const std::vector<Phase> truth_labels = {Phase::jump, Phase::jump,
                                           Phase::airtime, Phase::flight,
                                           Phase::flight, Phase::flight};
  const std::vector<Phase> predicted = {Phase::jump, Phase::airtime,
                                        Phase::airtime, Phase::flight,
                                        Phase::flight, Phase::final_landing};
  const ConfusionMatrix m = confusion_matrix(truth_labels, predicted);
  CHECK(m[0][0] == 1);
  CHECK(m[0][1] == 1);
  CHECK(m[1][1] == 1);
  CHECK(m[3][3] == 2);
  CHECK(m[3][4] == 1);
  std::size_t total = 0;
  for (const auto& row : m) {
    for (std::size_t v : row) total += v;
  }
  CHECK(total == truth_labels.size());
  CHECK_THROWS_AS(confusion_matrix({Phase::jump}, {}), InvalidSpecError);
}

TEST_CASE("cycle measurements split into hits, outliers and misses") {
  std::map<std::string, CycleSpeedCurve> curves;
  curves["swim"] = line_curve();

  const std::vector<StrokeTruth> truth = {
      {"swim", 50, 59.0},   // curve value 60, error 1
      {"swim", 25, 54.5},   // curve value 55, error 0.5
      {"swim", 40, 56.0},   // curve value 58, error 2 == tolerance
      {"swim", 60, 70.0},   // curve value 62, error 8: outlier
      {"swim", 5, 60.0},    // outside the covered range
      {"other", 50, 60.0},  // no curve for this video
  };
  const StrokeEvalResult result = stroke_eval(curves, truth);
  CHECK(result.evaluated == 3);
  CHECK(result.outliers == 1);
  CHECK(result.undetected == 2);
  CHECK(result.mean_abs_error == doctest::Approx(3.5 / 3));
  CHECK(result.tolerance == 2.0);

  const StrokeEvalResult none = stroke_eval(curves, {});
  CHECK(none.evaluated == 0);
  CHECK(none.mean_abs_error == 0.0);
}

TEST_CASE("coverage and over-detection of an activity interval") {
  SUBCASE("touching detections merge before counting") {
    const RangeEvalResult r = range_eval({{10, 19}, {20, 29}}, {15, 24});
    CHECK(r.coverage_pct == doctest::Approx(100.0));
    CHECK(r.overdetect_pct == doctest::Approx(100.0));
  }
  SUBCASE("overlapping detections are not double counted") {
    const RangeEvalResult r = range_eval({{0, 9}, {5, 14}}, {0, 9});
    CHECK(r.coverage_pct == doctest::Approx(100.0));
    CHECK(r.overdetect_pct == doctest::Approx(50.0));
  }
  SUBCASE("partial coverage with no spill") {
    const RangeEvalResult r = range_eval({{0, 4}, {10, 14}}, {0, 19});
    CHECK(r.coverage_pct == doctest::Approx(50.0));
    CHECK(r.overdetect_pct == 0.0);
  }
  SUBCASE("inverted detections are ignored") {
    const RangeEvalResult r = range_eval({{9, 0}, {0, 9}}, {0, 9});
    CHECK(r.coverage_pct == doctest::Approx(100.0));
    CHECK(r.overdetect_pct == 0.0);
  }
  SUBCASE("no detections at all") {
    const RangeEvalResult r = range_eval({}, {0, 9});
    CHECK(r.coverage_pct == 0.0);
    CHECK(r.overdetect_pct == 0.0);
  }
  SUBCASE("an empty ground truth interval is rejected") {
    CHECK_THROWS_AS(range_eval({{0, 9}}, {9, 0}), InvalidSpecError);
  }
}
