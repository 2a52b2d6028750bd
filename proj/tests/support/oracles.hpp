// Test-side reference implementations, kept deliberately independent of the
// library internals: brute force, exhaustive enumeration and zoomed grid
// search.  Slow on purpose; correctness anchors for the fast code paths.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "posemine/types.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Similarity alignment by zoomed grid search.
// ---------------------------------------------------------------------------

struct AlignParams {
  double s = 1.0;
  double theta = 0.0;
  double tx = 0.0;
  double ty = 0.0;
};

/// Objective evaluated from the raw definition: transform `pose` by
/// (s, theta, t), sum squared joint distances to `reference`, divide by 2N.
inline double objective(const posemine::Pose& reference,
                        const posemine::Pose& pose, const AlignParams& p) {
  const double a = p.s * std::cos(p.theta);
  const double b = p.s * std::sin(p.theta);
  double sum = 0.0;
  for (std::size_t i = 0; i < pose.size(); ++i) {
    const double x = a * pose.joints[i].x - b * pose.joints[i].y + p.tx;
    const double y = b * pose.joints[i].x + a * pose.joints[i].y + p.ty;
    const double dx = reference.joints[i].x - x;
    const double dy = reference.joints[i].y - y;
    sum += dx * dx + dy * dy;
  }
  return sum / (2.0 * static_cast<double>(pose.size()));
}

struct GridAlignResult {
  AlignParams params;
  double mse = std::numeric_limits<double>::infinity();
};

namespace detail {

inline void zoom_refine(const posemine::Pose& reference,
                        const posemine::Pose& pose, GridAlignResult& best,
                        AlignParams center, std::array<double, 4> half_range) {
  // Pattern search on a 5^4 grid.  A dimension shrinks only while its best
  // probe is interior; a best probe on the box edge re-expands the range so
  // an optimum outside the initial box is still reached.
  constexpr int kPoints = 5;
  constexpr double kShrink = 2.5;
  constexpr int kMaxStages = 200;
  const std::array<double, 4> initial = half_range;
  const std::array<double, 4> tol = {1e-8, 1e-8, 1e-7, 1e-7};
  for (int stage = 0; stage < kMaxStages; ++stage) {
    GridAlignResult stage_best;
    std::array<int, 4> best_idx{};
    for (int is = 0; is < kPoints; ++is) {
      for (int it = 0; it < kPoints; ++it) {
        for (int ix = 0; ix < kPoints; ++ix) {
          for (int iy = 0; iy < kPoints; ++iy) {
            AlignParams p;
            auto offset = [&](int idx, int dim) {
              return (idx - kPoints / 2) * half_range[dim] / (kPoints / 2);
            };
            p.s = center.s + offset(is, 0);
            p.theta = center.theta + offset(it, 1);
            p.tx = center.tx + offset(ix, 2);
            p.ty = center.ty + offset(iy, 3);
            if (p.s <= 0.0) continue;
            const double v = objective(reference, pose, p);
            if (v < stage_best.mse) {
              stage_best.mse = v;
              stage_best.params = p;
              best_idx = {is, it, ix, iy};
            }
          }
        }
      }
    }
    center = stage_best.params;
    if (stage_best.mse < best.mse) best = stage_best;
    bool done = true;
    for (int dim = 0; dim < 4; ++dim) {
      if (best_idx[dim] == 0 || best_idx[dim] == kPoints - 1) {
        half_range[dim] = std::min(half_range[dim] * kShrink, initial[dim]);
      } else {
        half_range[dim] /= kShrink;
      }
      if (half_range[dim] > tol[dim]) done = false;
    }
    if (done) break;
  }
}

}  // namespace detail

/// Dense coarse grid over (s, theta, tx, ty) followed by iterated local
/// refinement around the most promising coarse cells.
inline GridAlignResult grid_align(const posemine::Pose& reference,
                                  const posemine::Pose& pose) {
  double ref_lo_x = 1e300, ref_hi_x = -1e300, ref_lo_y = 1e300,
         ref_hi_y = -1e300;
  for (const auto& j : reference.joints) {
    ref_lo_x = std::min(ref_lo_x, j.x);
    ref_hi_x = std::max(ref_hi_x, j.x);
    ref_lo_y = std::min(ref_lo_y, j.y);
    ref_hi_y = std::max(ref_hi_y, j.y);
  }
  const double span_x = std::max(1.0, ref_hi_x - ref_lo_x);
  const double span_y = std::max(1.0, ref_hi_y - ref_lo_y);

  constexpr int kScaleSteps = 16;
  constexpr int kThetaSteps = 24;
  constexpr int kTransSteps = 11;
  const double s_min = 0.02, s_max = 20.0;

  std::vector<GridAlignResult> coarse;
  for (int is = 0; is < kScaleSteps; ++is) {
    const double s = s_min * std::pow(s_max / s_min,
                                      is / double(kScaleSteps - 1));
    for (int it = 0; it < kThetaSteps; ++it) {
      const double theta = -M_PI + 2.0 * M_PI * it / kThetaSteps;
      for (int ix = 0; ix < kTransSteps; ++ix) {
        const double tx = ref_lo_x - span_x +
                          (2.0 * span_x + span_x) * ix / (kTransSteps - 1);
        for (int iy = 0; iy < kTransSteps; ++iy) {
          const double ty = ref_lo_y - span_y +
                            (2.0 * span_y + span_y) * iy / (kTransSteps - 1);
          AlignParams p{s, theta, tx, ty};
          const double v = objective(reference, pose, p);
          coarse.push_back({p, v});
        }
      }
    }
  }
  std::partial_sort(coarse.begin(), coarse.begin() + 8, coarse.end(),
                    [](const GridAlignResult& a, const GridAlignResult& b) {
                      return a.mse < b.mse;
                    });

  GridAlignResult best;
  const double s_half = 1.0, theta_half = 0.5;
  for (int c = 0; c < 8; ++c) {
    detail::zoom_refine(reference, pose, best, coarse[c].params,
                        {s_half, theta_half, span_x / 2.0, span_y / 2.0});
  }
  return best;
}

// ---------------------------------------------------------------------------
// Random pose helpers shared by the test suites.
// ---------------------------------------------------------------------------

inline posemine::Pose random_pose(std::mt19937_64& rng, std::size_t joints,
                                  double extent = 100.0) {
  std::uniform_real_distribution<double> u(0.0, extent);
  posemine::Pose p;
  p.joints.reserve(joints);
  for (std::size_t i = 0; i < joints; ++i) p.joints.push_back({u(rng), u(rng)});
  return p;
}

inline posemine::SimilarityTransform random_transform(std::mt19937_64& rng,
                                                      double s_lo = 0.1,
                                                      double s_hi = 10.0,
                                                      double t_extent = 50.0) {
  std::uniform_real_distribution<double> us(s_lo, s_hi);
  std::uniform_real_distribution<double> ut(-M_PI, M_PI);
  std::uniform_real_distribution<double> ux(-t_extent, t_extent);
  return posemine::SimilarityTransform::from_scale_rotation(us(rng), ut(rng),
                                                            ux(rng), ux(rng));
}

// ---------------------------------------------------------------------------
// Substring-matching DPs on plain strings.
// ---------------------------------------------------------------------------

/// The generalized recurrence on characters: every elementary operation at
/// cell (i, j) costs the mismatch indicator of (pat[i-1], text[j-1]).  Row 0
/// is zero (a match may start anywhere); column 0 charges one unit per
/// skipped pattern character.
inline std::vector<std::vector<double>> generalized_string_dp(
    const std::string& pat, const std::string& text) {
  const std::size_t m = pat.size(), n = text.size();
  std::vector<std::vector<double>> d(m + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 1; i <= m; ++i) d[i][0] = double(i);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const double c = pat[i - 1] != text[j - 1] ? 1.0 : 0.0;
      d[i][j] = std::min({d[i - 1][j - 1] + c, d[i][j - 1] + c,
                          d[i - 1][j] + c});
    }
  }
  return d;
}

/// Textbook substring matching: substitution costs the mismatch indicator,
/// insertion and deletion always cost one.
inline std::vector<std::vector<double>> classic_string_dp(
    const std::string& pat, const std::string& text) {
  const std::size_t m = pat.size(), n = text.size();
  std::vector<std::vector<double>> d(m + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 1; i <= m; ++i) d[i][0] = double(i);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const double c = pat[i - 1] != text[j - 1] ? 1.0 : 0.0;
      d[i][j] = std::min({d[i - 1][j - 1] + c, d[i][j - 1] + 1.0,
                          d[i - 1][j] + 1.0});
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Exemplar clustering energy by subset enumeration.
// ---------------------------------------------------------------------------

/// Net similarity of choosing the exemplar set encoded in `mask`: every
/// non-exemplar contributes its best similarity to an exemplar, every
/// exemplar contributes the preference.
inline double net_similarity(const std::vector<double>& sim, std::size_t n,
                             double preference, unsigned mask) {
  double net = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask & (1u << i)) {
      net += preference;
      continue;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (1u << k)) best = std::max(best, sim[i * n + k]);
    }
    net += best;
  }
  return net;
}

/// Globally optimal net similarity over all non-empty exemplar subsets;
/// exponential, for n <= ~16 only.
inline double best_net_similarity(const std::vector<double>& sim,
                                  std::size_t n, double preference) {
  double best = -std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    best = std::max(best, net_similarity(sim, n, preference, mask));
  }
  return best;
}

/// The same self-preference rule the clustering uses: the median pairwise
/// (off-diagonal) similarity, midpoint rule.
inline double median_preference(const std::vector<double>& sim,
                                std::size_t n) {
  std::vector<double> off;
  off.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (i != k) off.push_back(sim[i * n + k]);
    }
  }
  std::sort(off.begin(), off.end());
  const std::size_t s = off.size();
  return s % 2 == 1 ? off[s / 2] : 0.5 * (off[s / 2 - 1] + off[s / 2]);
}

// ---------------------------------------------------------------------------
// Decoding by exhaustive path enumeration.
// ---------------------------------------------------------------------------

struct BrutePath {
  std::vector<std::size_t> states;
  double log_prob = -std::numeric_limits<double>::infinity();
};

/// Best state path by enumerating all num_states^T paths in lexicographic
/// order; strictly better paths replace, so the first optimum wins ties.
/// emission[code][state] = P(code | state).
inline BrutePath brute_force_decode(
    const std::vector<double>& prior,
    const std::vector<std::vector<double>>& transition,
    const std::vector<std::vector<double>>& emission,
    const std::vector<std::size_t>& codes) {
  const std::size_t num_states = prior.size();
  const std::size_t t_len = codes.size();
  const auto log_or_inf = [](double p) {
    return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
  };

  BrutePath best;
  std::vector<std::size_t> path(t_len, 0);
  for (;;) {
    double lp = log_or_inf(prior[path[0]]) +
                log_or_inf(emission[codes[0]][path[0]]);
    for (std::size_t t = 1; t < t_len; ++t) {
      lp += log_or_inf(transition[path[t - 1]][path[t]]) +
            log_or_inf(emission[codes[t]][path[t]]);
    }
    if (lp > best.log_prob) {
      best.log_prob = lp;
      best.states = path;
    }
    // Advance the path like an odometer, most significant digit first so the
    // enumeration order is lexicographic.
    std::size_t pos = t_len;
    while (pos-- > 0) {
      if (++path[pos] < num_states) break;
      path[pos] = 0;
      if (pos == 0) return best;
    }
  }
}

// ---------------------------------------------------------------------------
// k-Medoids cost by subset enumeration.
// ---------------------------------------------------------------------------

/// Total assignment cost of the best medoid subset of size k; exhaustive
/// over all C(n, k) subsets.
inline double best_kmedoids_cost(const std::vector<double>& dist,
                                 std::size_t n, std::size_t k) {
  std::vector<std::size_t> subset(k);
  std::vector<bool> select(n, false);
  std::fill(select.begin(), select.begin() + static_cast<std::ptrdiff_t>(k),
            true);
  double best = std::numeric_limits<double>::infinity();
  // prev_permutation walks all subsets of the sorted selection mask.
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m < n; ++m) {
        if (select[m]) nearest = std::min(nearest, dist[i * n + m]);
      }
      cost += nearest;
    }
    best = std::min(best, cost);
  } while (std::prev_permutation(select.begin(), select.end()));
  return best;
}

// ---------------------------------------------------------------------------
// All-point interpolated average precision from a ranked result list.
// ---------------------------------------------------------------------------

/// AP computed from the precision-recall curve definition: walk the ranked
/// list, and at every recall increase add (delta recall) times the maximum
/// precision at or beyond that recall.
inline double ap_from_ranking(const std::vector<bool>& is_tp,
                              std::size_t positives) {
  if (positives == 0) return 0.0;
  const std::size_t m = is_tp.size();
  std::vector<double> precision(m);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (is_tp[i]) ++tp;
    precision[i] = double(tp) / double(i + 1);
  }
  double ap = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!is_tp[i]) continue;
    double best = 0.0;
    for (std::size_t j = i; j < m; ++j) best = std::max(best, precision[j]);
    ap += best / double(positives);
  }
  return ap;
}

}  // namespace oracle
