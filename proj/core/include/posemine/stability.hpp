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
#include <string>
#include <vector>

#include "posemine/distance.hpp"
#include "posemine/types.hpp"

namespace posemine {

/// Parameters of the bounded inter-pose cost used by the matching DP.
struct BoundedDistParams {
  double th_same = 49.0;   ///< at or below: cost 0
  double th_diff = 400.0;  ///< at or above: cost 1
  double s_ref = kDefaultRefScale;
};

/**
 * @brief Bounded pose cost in [0, 1]: 0 up to th_same, 1 from th_diff on,
 * linear in between.
 * @throws propagated from the underlying normalized distance.
 */
double dist_fct(const Pose& p1, const Pose& p2,
                const BoundedDistParams& params = {});

enum class EditOp : std::uint8_t { none = 0, sub = 1, ins = 2, del = 3 };

/**
 * @brief Accumulated-cost and operation-count matrices of the substring
 * matching DP, (len(pat)+1) x (len(text)+1).  Row 0 is all zeros: a match
 * may start anywhere in the text.  Column 0 charges one full-cost deletion
 * per skipped pattern element.
 */
class EditMatrices {
 public:
  EditMatrices(std::size_t pat_len, std::size_t text_len)
      : pat_len_(pat_len),
        text_len_(text_len),
        cost_((pat_len + 1) * (text_len + 1), 0.0),
        oplen_((pat_len + 1) * (text_len + 1), 0),
        op_((pat_len + 1) * (text_len + 1),
            static_cast<std::uint8_t>(EditOp::none)) {}

  std::size_t pat_len() const noexcept { return pat_len_; }
  std::size_t text_len() const noexcept { return text_len_; }

  double& d(std::size_t i, std::size_t j) { return cost_[idx(i, j)]; }
  double d(std::size_t i, std::size_t j) const { return cost_[idx(i, j)]; }
  std::int32_t& oplen(std::size_t i, std::size_t j) { return oplen_[idx(i, j)]; }
  std::int32_t oplen(std::size_t i, std::size_t j) const {
    return oplen_[idx(i, j)];
  }
  EditOp op(std::size_t i, std::size_t j) const {
    return static_cast<EditOp>(op_[idx(i, j)]);
  }
  void set_op(std::size_t i, std::size_t j, EditOp op) {
    op_[idx(i, j)] = static_cast<std::uint8_t>(op);
  }

 private:
  std::size_t idx(std::size_t i, std::size_t j) const {
    return i * (text_len_ + 1) + j;
  }
  std::size_t pat_len_, text_len_;
  std::vector<double> cost_;
  std::vector<std::int32_t> oplen_;
  std::vector<std::uint8_t> op_;
};

/**
 * @brief Generic substring-matching DP over caller-supplied elementary
 * costs; the cost functors receive 1-based pattern/text positions.
 *
 * Recurrence: d[i,j] = min(d[i-1,j-1] + sub(i,j), d[i-1,j] + del(i,j),
 * d[i,j-1] + ins(i,j)), ties resolved sub first, then ins, then del.
 * oplen counts every step of the optimal path, zero-cost matches included
 * (the virtual matching length used for score normalization).
 */
template <class SubCost, class DelCost, class InsCost>
EditMatrices edit_matrix(std::size_t m, std::size_t n, SubCost&& sub,
                         DelCost&& del, InsCost&& ins) {
  EditMatrices mats(m, n);
  for (std::size_t i = 1; i <= m; ++i) {
    mats.d(i, 0) = static_cast<double>(i);
    mats.oplen(i, 0) = static_cast<std::int32_t>(i);
    mats.set_op(i, 0, EditOp::del);
  }
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const double c_sub = mats.d(i - 1, j - 1) + sub(i, j);
      const double c_ins = mats.d(i, j - 1) + ins(i, j);
      const double c_del = mats.d(i - 1, j) + del(i, j);
      double best = c_sub;
      EditOp op = EditOp::sub;
      std::int32_t len = mats.oplen(i - 1, j - 1);
      if (c_ins < best) {
        best = c_ins;
        op = EditOp::ins;
        len = mats.oplen(i, j - 1);
      }
      if (c_del < best) {
        best = c_del;
        op = EditOp::del;
        len = mats.oplen(i - 1, j);
      }
      mats.d(i, j) = best;
      mats.oplen(i, j) = len + 1;
      mats.set_op(i, j, op);
    }
  }
  return mats;
}

struct EditResult {
  EditMatrices matrices;
  /// scores[j] = d[m, j+1] / oplen[m, j+1]: normalized match score for a
  /// match ending at text position j (0-based).  All entries in [0, 1].
  std::vector<double> scores;
};

/**
 * @brief Pose substring matching: every elementary operation costs
 * dist_fct(pat_i, text_j) at the current cell, so inserting or skipping a
 * pose that resembles the current pattern pose is nearly free (an athlete
 * holding a position longer or shorter is not penalized).
 *
 * @throws DimensionMismatchError on inconsistent joint counts.
 * @throws InsufficientDataError unless len(pat) >= 2 and len(text) >
 * len(pat).
 */
EditResult edit_match(const std::vector<Pose>& pat,
                      const std::vector<Pose>& text,
                      const BoundedDistParams& params = {});

struct AlignmentStep {
  std::size_t pat_index = 0;   ///< 0-based pattern position the op consumed
  std::size_t text_index = 0;  ///< 0-based text position; npos for column-0
  EditOp op = EditOp::none;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct ClipMatch {
  std::size_t start = 0;  ///< first text position consumed (0-based)
  std::size_t end = 0;    ///< last text position consumed (0-based)
  double score = 0.0;
  std::vector<AlignmentStep> alignment;  ///< pattern order, start to end
};

/**
 * @brief Match end points: score below th_match and a clear minimum within
 * +- ceil(m/2) neighboring end points; each backtracked to its start.
 * Clear means strictly below every other score in the window, where a
 * maximal run of equal scores counts as one candidate represented by its
 * central end point (the bounded cost flattens valley bottoms to exact
 * ties).  Clear minima make non-maximum suppression unnecessary.
 */
std::vector<ClipMatch> extract_matches(const EditResult& result,
                                       double th_match = 0.3);

struct StabilityParams {
  BoundedDistParams dist;
  double th_match = 0.3;
};

struct MatchRecord {
  std::string video_id;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;
  double score = 0.0;
};

struct StabilityResult {
  double mean_score = 0.0;  ///< lower = more stable
  std::vector<MatchRecord> matches;
};

/**
 * @brief Mean matched-minimum score of a reference cycle clip against one or
 * more long sequences; the per-match series supports score-over-time plots.
 * @throws NoMatchesError if every sequence yields zero matches.
 */
StabilityResult stability_score(const std::vector<Pose>& reference,
                                const std::vector<PoseSequence>& sequences,
                                const StabilityParams& params = {});

struct MatchRatioParams {
  BoundedDistParams dist;
  /// Relaxed on purpose: both sequences must produce comparable minima.
  double th_match = 0.9;
};

struct MatchRatioResult {
  double ratio = 0.0;  ///< mean other-sequence score / mean own score
  double own_mean = 0.0;
  double other_mean = 0.0;
};

/**
 * @brief Athlete separation: how much worse a reference cycle matches
 * somebody else's sequence than its owner's.  Ratios well above 1 indicate
 * different athletes.
 * @throws NoMatchesError if either sequence yields no matches.
 */
MatchRatioResult athlete_match_ratio(const std::vector<Pose>& reference,
                                     const PoseSequence& own_seq,
                                     const PoseSequence& other_seq,
                                     const MatchRatioParams& params = {});

}  // namespace posemine
