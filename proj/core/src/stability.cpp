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
#include "posemine/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace posemine {
namespace {

double bounded_cost(double distance, const BoundedDistParams& params) {
  if (distance <= params.th_same) return 0.0;
  if (distance >= params.th_diff) return 1.0;
  return (distance - params.th_same) / (params.th_diff - params.th_same);
}

}  // namespace

double dist_fct(const Pose& p1, const Pose& p2,
                const BoundedDistParams& params) {
  if (!(params.th_same >= 0.0) || !(params.th_diff > params.th_same)) {
    throw InvalidSpecError("need 0 <= th_same < th_diff");
  }
  return bounded_cost(mse_norm(p1, p2, params.s_ref), params);
}

EditResult edit_match(const std::vector<Pose>& pat,
                      const std::vector<Pose>& text,
                      const BoundedDistParams& params) {
  if (!(params.th_same >= 0.0) || !(params.th_diff > params.th_same)) {
    throw InvalidSpecError("need 0 <= th_same < th_diff");
  }
  if (pat.size() < 2) {
    throw InsufficientDataError("pattern needs at least two poses");
  }
  if (text.size() <= pat.size()) {
    throw InsufficientDataError("text must be longer than the pattern");
  }
  const std::size_t m = pat.size(), n = text.size();

  std::vector<PoseMoments> pat_m(m), text_m(n);
  for (std::size_t i = 0; i < m; ++i) pat_m[i] = PoseMoments::of(pat[i]);
  for (std::size_t j = 0; j < n; ++j) text_m[j] = PoseMoments::of(text[j]);
  for (std::size_t i = 0; i < m; ++i) {
    if (pat_m[i].centered.size() != pat_m[0].centered.size()) {
      throw DimensionMismatchError("pattern joint counts are inconsistent");
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (text_m[j].centered.size() != pat_m[0].centered.size()) {
      throw DimensionMismatchError(
          "text joint count differs from the pattern");
    }
  }

  // One shared cost per cell: the DP consults dist(i, j) up to three times.
  std::vector<double> cell(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cell[i * n + j] =
          bounded_cost(mse_norm(pat_m[i], text_m[j], params.s_ref), params);
    }
  }
  auto cost = [&cell, n](std::size_t i, std::size_t j) {
    return cell[(i - 1) * n + (j - 1)];
  };

  EditResult result{edit_matrix(m, n, cost, cost, cost), {}};
  result.scores.resize(n);
  for (std::size_t j = 1; j <= n; ++j) {
    result.scores[j - 1] = result.matrices.d(m, j) /
                           static_cast<double>(result.matrices.oplen(m, j));
  }
  return result;
}

std::vector<ClipMatch> extract_matches(const EditResult& result,
                                       double th_match) {
  if (!(th_match > 0.0) || !(th_match < 1.0)) {
    throw InvalidSpecError("th_match must lie in (0, 1)");
  }
  const EditMatrices& mats = result.matrices;
  const std::size_t m = mats.pat_len();
  const std::size_t n = mats.text_len();
  const std::size_t window = (m + 1) / 2;

  // The bounded cost maps every distance below th_same to exactly 0, so the
  // bottom of a match valley is typically a short run of equal scores: a
  // perfect occurrence shifted by one frame still costs nothing.  A run of
  // equal scores therefore counts as a single candidate, represented by its
  // central end point, and strictness is required against everything else
  // in the window.  Runs of length one reduce to the plain strict minimum.
  std::vector<ClipMatch> matches;
  for (std::size_t run_begin = 0; run_begin < n;) {
    std::size_t run_end = run_begin;
    while (run_end + 1 < n &&
           result.scores[run_end + 1] == result.scores[run_begin]) {
      ++run_end;
    }
    const double score = result.scores[run_begin];
    const std::size_t j0 = run_begin + (run_end - run_begin) / 2;
    const std::size_t next = run_end + 1;
    if (!(score < th_match)) {
      run_begin = next;
      continue;
    }

    bool clear_min = true;
    const std::size_t lo = (j0 >= window) ? j0 - window : 0;
    const std::size_t hi = std::min(n - 1, j0 + window);
    for (std::size_t j = lo; j <= hi && clear_min; ++j) {
      if (j >= run_begin && j <= run_end) continue;
      if (!(score < result.scores[j])) clear_min = false;
    }
    run_begin = next;
    if (!clear_min) continue;

    ClipMatch match;
    match.end = j0;
    match.score = score;
    std::size_t i = m, j = j0 + 1;
    while (i > 0) {
      const EditOp op = mats.op(i, j);
      switch (op) {
        case EditOp::sub:
          match.alignment.push_back({i - 1, j - 1, EditOp::sub});
          --i;
          --j;
          break;
        case EditOp::ins:
          match.alignment.push_back({i - 1, j - 1, EditOp::ins});
          --j;
          break;
        case EditOp::del:
          match.alignment.push_back(
              {i - 1, j == 0 ? AlignmentStep::npos : j - 1, EditOp::del});
          --i;
          break;
        case EditOp::none:
          i = 0;  // row 0 reached through a zero-length column
          break;
      }
    }
    std::reverse(match.alignment.begin(), match.alignment.end());
    match.start = j;  // text consumed from position j (0-based) onward
    if (match.start > match.end) continue;  // no text consumed at all
    matches.push_back(std::move(match));
  }
  return matches;
}

namespace {

std::vector<ClipMatch> matches_against(const std::vector<Pose>& reference,
                                       const PoseSequence& seq,
                                       const BoundedDistParams& dist,
                                       double th_match) {
  std::vector<Pose> text;
  text.reserve(seq.size());
  for (const TimedPose& tp : seq.poses) text.push_back(tp.pose);
  const EditResult result = edit_match(reference, text, dist);
  return extract_matches(result, th_match);
}

double mean_score(const std::vector<ClipMatch>& matches) {
  double sum = 0.0;
  for (const ClipMatch& m : matches) sum += m.score;
  return sum / static_cast<double>(matches.size());
}

}  // namespace

StabilityResult stability_score(const std::vector<Pose>& reference,
                                const std::vector<PoseSequence>& sequences,
                                const StabilityParams& params) {
  StabilityResult result;
  double sum = 0.0;
  std::size_t count = 0;
  for (const PoseSequence& seq : sequences) {
    for (const ClipMatch& m :
         matches_against(reference, seq, params.dist, params.th_match)) {
      result.matches.push_back({seq.video_id, seq.poses[m.start].frame,
                                seq.poses[m.end].frame, m.score});
      sum += m.score;
      ++count;
    }
  }
  if (count == 0) {
    throw NoMatchesError("reference clip matched nowhere");
  }
  result.mean_score = sum / static_cast<double>(count);
  return result;
}

MatchRatioResult athlete_match_ratio(const std::vector<Pose>& reference,
                                     const PoseSequence& own_seq,
                                     const PoseSequence& other_seq,
                                     const MatchRatioParams& params) {
  const std::vector<ClipMatch> own =
      matches_against(reference, own_seq, params.dist, params.th_match);
  if (own.empty()) {
    throw NoMatchesError("no matches in the athlete's own sequence");
  }
  const std::vector<ClipMatch> other =
      matches_against(reference, other_seq, params.dist, params.th_match);
  if (other.empty()) {
    throw NoMatchesError("no matches in the compared sequence");
  }

  MatchRatioResult result;
  result.own_mean = mean_score(own);
  result.other_mean = mean_score(other);
  if (result.own_mean == 0.0) {
    // Identical data on both sides still deserves a finite answer.
    result.ratio = (result.other_mean == 0.0)
                       ? 1.0
                       : std::numeric_limits<double>::infinity();
  } else {
    result.ratio = result.other_mean / result.own_mean;
  }
  return result;
}

}  // namespace posemine
