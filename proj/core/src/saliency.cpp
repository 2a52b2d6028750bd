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
#include "posemine/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "parallel.hpp"

namespace posemine {
namespace {

double pair_value(const PoseMoments& ref, const PoseMoments& mov,
                  const SaliencyConfig& config) {
  if (config.use_normalized) return mse_norm(ref, mov, config.s_ref);
  // Directed residual, recomputed from the shared centered sums.
  double c1 = 0.0, c2 = 0.0;
  for (std::size_t i = 0; i < mov.centered.size(); ++i) {
    const Point2 p = mov.centered[i];
    const Point2 r = ref.centered[i];
    c1 += p.x * r.x + p.y * r.y;
    c2 += p.x * r.y - p.y * r.x;
  }
  const double fit = (c1 * c1 + c2 * c2) / mov.q;
  return std::max(0.0, ref.q - fit) /
         (2.0 * static_cast<double>(mov.centered.size()));
}

}  // namespace

std::vector<SaliencyScore> saliency_profile(const PoseSequence& seq,
                                            const SaliencyConfig& config) {
  if (config.w_l < 0 || config.w_s < 0) {
    throw InvalidSpecError("saliency window widths must be non-negative");
  }
  seq.validate();
  const std::size_t n = seq.size();
  if (n == 0) return {};

  std::vector<PoseMoments> moments(n);
  detail::parallel_for(n, [&](std::size_t i) {
    moments[i] = PoseMoments::of(seq.poses[i].pose);
  });

  // Windows address poses by frame offset; a frame is scored only when all
  // shifted poses it needs exist.  Offsets are checked through the residual
  // cache below (a missing or degenerate pose leaves NaN).
  auto index_of = [&](std::int64_t frame) -> std::size_t {
    return seq.find_frame(frame);
  };

  // Directed residuals are shared between overlapping windows; cache one row
  // per reference frame over the shift range.
  const int shifts = 2 * config.w_s + 1;
  std::vector<double> cache(n * static_cast<std::size_t>(shifts),
                            std::numeric_limits<double>::quiet_NaN());
  detail::parallel_for(n, [&](std::size_t i) {
    if (moments[i].scale <= 0.0) return;
    for (int ds = -config.w_s; ds <= config.w_s; ++ds) {
      const std::size_t j = index_of(seq.poses[i].frame + ds);
      if (j == PoseSequence::npos || moments[j].scale <= 0.0) continue;
      cache[i * shifts + static_cast<std::size_t>(ds + config.w_s)] =
          pair_value(moments[i], moments[j], config);
    }
  });

  std::vector<SaliencyScore> profile;
  for (std::size_t r = 0; r < n; ++r) {
    const std::int64_t frame = seq.poses[r].frame;
    double sum = 0.0;
    bool complete = true;
    for (std::int64_t dl = -config.w_l; dl <= config.w_l && complete; ++dl) {
      const std::size_t i = index_of(frame + dl);
      if (i == PoseSequence::npos) {
        complete = false;
        break;
      }
      for (int ds = -config.w_s; ds <= config.w_s; ++ds) {
        const double v =
            cache[i * shifts + static_cast<std::size_t>(ds + config.w_s)];
        if (std::isnan(v)) {
          complete = false;
          break;
        }
        sum += v;
      }
    }
    if (!complete) continue;
    const double denom =
        static_cast<double>((2 * config.w_l + 1) * (2 * config.w_s + 1));
    profile.push_back({frame, sum / denom});
  }
  return profile;
}

APResult affinity_propagation_similarity(std::vector<double> similarity,
                                         std::size_t n,
                                         const APConfig& config) {
  if (similarity.size() != n * n) {
    throw DimensionMismatchError("similarity matrix size mismatch");
  }
  APResult result;
  if (n == 0) return result;
  if (n == 1) {
    result.clusters.push_back({0, {0}});
    result.converged = true;
    return result;
  }

  auto at = [n](std::vector<double>& m, std::size_t i, std::size_t k)
      -> double& { return m[i * n + k]; };

  // Self-preference: median of the pairwise similarities.
  std::vector<double> off;
  off.reserve(n * (n - 1));
  double max_abs_off = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (i == k) continue;
      off.push_back(at(similarity, i, k));
      max_abs_off = std::max(max_abs_off, std::abs(at(similarity, i, k)));
    }
  }
  std::sort(off.begin(), off.end());
  const double preference = (off.size() % 2 == 1)
                                ? off[off.size() / 2]
                                : 0.5 * (off[off.size() / 2 - 1] +
                                         off[off.size() / 2]);
  for (std::size_t k = 0; k < n; ++k) at(similarity, k, k) = preference;

  // All items effectively identical: the update rules admit no exemplar, so
  // answer directly with one cluster.
  if (max_abs_off <= 1e-12) {
    APCluster cluster;
    cluster.exemplar = 0;
    for (std::size_t i = 0; i < n; ++i) cluster.members.push_back(i);
    result.clusters.push_back(std::move(cluster));
    result.converged = true;
    return result;
  }

  // Small deterministic jitter to break symmetric ties.  Scaled by the
  // largest similarity magnitude, not per entry: groups of identical items
  // produce exact zeros whose per-entry jitter would vanish against the
  // other message magnitudes, leaving the group symmetry unbroken.  The
  // scale matters too: under damping the symmetric part of the messages
  // decays slowly, and members of a group become exemplars only once the
  // decay reaches the jitter amplitude.  A vanishing amplitude spreads
  // those tipping points over more iterations than the stability window,
  // so the iteration can stop between them with a degenerate exemplar set.
  // 1e-6 relative is still far below any meaningful pose distance.
  {
    std::mt19937_64 rng(config.jitter_seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double tiny = std::numeric_limits<double>::min() * 100.0;
    const double magnitude = 1e-6 * max_abs_off + tiny;
    for (double& s : similarity) {
      s += magnitude * noise(rng);
    }
  }

  std::vector<double> r(n * n, 0.0), a(n * n, 0.0);
  std::vector<std::size_t> exemplars, prev_exemplars;
  int stable = 0;
  const double keep = config.damping, fresh = 1.0 - config.damping;

  for (result.iterations = 0; result.iterations < config.max_iter;
       ++result.iterations) {
    // Responsibilities.
    for (std::size_t i = 0; i < n; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      double second = best;
      std::size_t best_k = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const double v = at(a, i, k) + at(similarity, i, k);
        if (v > best) {
          second = best;
          best = v;
          best_k = k;
        } else if (v > second) {
          second = v;
        }
      }
      for (std::size_t k = 0; k < n; ++k) {
        const double cap = (k == best_k) ? second : best;
        at(r, i, k) = keep * at(r, i, k) +
                      fresh * (at(similarity, i, k) - cap);
      }
    }
    // Availabilities.
    for (std::size_t k = 0; k < n; ++k) {
      double pos_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i != k) pos_sum += std::max(0.0, at(r, i, k));
      }
      for (std::size_t i = 0; i < n; ++i) {
        double value;
        if (i == k) {
          value = pos_sum;
        } else {
          value = std::min(0.0, at(r, k, k) + pos_sum -
                                    std::max(0.0, at(r, i, k)));
        }
        at(a, i, k) = keep * at(a, i, k) + fresh * value;
      }
    }

    exemplars.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if (at(r, k, k) + at(a, k, k) > 0.0) exemplars.push_back(k);
    }
    if (!exemplars.empty() && exemplars == prev_exemplars) {
      if (++stable >= config.stable_iterations) {
        result.converged = true;
        ++result.iterations;
        break;
      }
    } else {
      stable = 0;
      prev_exemplars = exemplars;
    }
  }

  if (exemplars.empty()) {
    // No exemplar emerged; fall back to the best single-exemplar solution
    // and report the failure through the converged flag.
    double best_net = -std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < n; ++k) {
      double net = at(similarity, k, k);
      for (std::size_t i = 0; i < n; ++i) {
        if (i != k) net += at(similarity, i, k);
      }
      if (net > best_net) {
        best_net = net;
        best_k = k;
      }
    }
    exemplars = {best_k};
    result.converged = false;
  }

  // Assign every item to its best exemplar; exemplars stay their own.
  std::vector<std::vector<std::size_t>> members(exemplars.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best_e = 0;
    double best_sim = -std::numeric_limits<double>::infinity();
    bool is_exemplar = false;
    for (std::size_t e = 0; e < exemplars.size(); ++e) {
      if (exemplars[e] == i) {
        best_e = e;
        is_exemplar = true;
        break;
      }
      if (at(similarity, i, exemplars[e]) > best_sim) {
        best_sim = at(similarity, i, exemplars[e]);
        best_e = e;
      }
    }
    (void)is_exemplar;
    members[best_e].push_back(i);
  }
  for (std::size_t e = 0; e < exemplars.size(); ++e) {
    APCluster cluster;
    cluster.exemplar = exemplars[e];
    cluster.members = std::move(members[e]);
    result.clusters.push_back(std::move(cluster));
  }
  return result;
}

APResult affinity_propagation(const std::vector<Pose>& items,
                              const APConfig& config) {
  const std::size_t n = items.size();
  std::vector<PoseMoments> moments(n);
  for (std::size_t i = 0; i < n; ++i) moments[i] = PoseMoments::of(items[i]);
  std::vector<double> sim(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const double s = -mse_norm(moments[i], moments[k], config.s_ref);
      sim[i * n + k] = s;
      sim[k * n + i] = s;
    }
  }
  return affinity_propagation_similarity(std::move(sim), n, config);
}

StrikingPoseSet striking_poses(const PoseSequence& seq, std::size_t top_n,
                               std::size_t k, const StrikingConfig& config) {
  if (top_n == 0 || k == 0) {
    throw InvalidSpecError("top_n and k must be positive");
  }
  std::vector<SaliencyScore> profile =
      saliency_profile(seq, config.saliency);
  std::erase_if(profile,
                [](const SaliencyScore& s) { return !(s.value > 0.0); });
  if (profile.size() < top_n) {
    throw InsufficientDataError(
        "only " + std::to_string(profile.size()) +
        " frames carry positive saliency, need " + std::to_string(top_n));
  }
  // Highest saliency first; earlier frame on ties.
  std::stable_sort(profile.begin(), profile.end(),
                   [](const SaliencyScore& a, const SaliencyScore& b) {
                     if (a.value != b.value) return a.value > b.value;
                     return a.frame < b.frame;
                   });
  profile.resize(top_n);
  std::sort(profile.begin(), profile.end(),
            [](const SaliencyScore& a, const SaliencyScore& b) {
              return a.frame < b.frame;
            });

  std::vector<Pose> items;
  items.reserve(top_n);
  for (const auto& s : profile) {
    items.push_back(seq.poses[seq.find_frame(s.frame)].pose);
  }
  APConfig ap_config = config.ap;
  ap_config.s_ref = config.saliency.s_ref;
  const APResult ap = affinity_propagation(items, ap_config);
  if (ap.clusters.size() < k) {
    throw InsufficientDataError(
        "clustering produced " + std::to_string(ap.clusters.size()) +
        " clusters, need " + std::to_string(k));
  }

  // Order clusters by size, then by mean exemplar-to-member distance, then
  // by exemplar frame.
  std::vector<PoseMoments> moments(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    moments[i] = PoseMoments::of(items[i]);
  }
  struct Ranked {
    std::size_t cluster_index;
    std::size_t size;
    double mean_distance;
    std::int64_t frame;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(ap.clusters.size());
  for (std::size_t c = 0; c < ap.clusters.size(); ++c) {
    const APCluster& cluster = ap.clusters[c];
    double mean = 0.0;
    for (std::size_t m : cluster.members) {
      if (m != cluster.exemplar) {
        mean += mse_norm(moments[cluster.exemplar], moments[m],
                         ap_config.s_ref);
      }
    }
    if (cluster.members.size() > 1) {
      mean /= static_cast<double>(cluster.members.size() - 1);
    }
    ranked.push_back({c, cluster.members.size(), mean,
                      profile[cluster.exemplar].frame});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.size != b.size) return a.size > b.size;
    if (a.mean_distance != b.mean_distance) {
      return a.mean_distance < b.mean_distance;
    }
    return a.frame < b.frame;
  });

  StrikingPoseSet out;
  out.converged = ap.converged;
  for (std::size_t i = 0; i < k; ++i) {
    const APCluster& cluster = ap.clusters[ranked[i].cluster_index];
    const std::size_t e = cluster.exemplar;
    out.representatives.push_back({profile[e].frame, items[e],
                                   cluster.members.size(),
                                   profile[e].value});
  }
  return out;
}

}  // namespace posemine
