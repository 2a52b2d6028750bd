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
#include "posemine/phases.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "parallel.hpp"

namespace posemine {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<PoseMoments> moments_of(const std::vector<Pose>& poses) {
  std::vector<PoseMoments> moments(poses.size());
  detail::parallel_for(poses.size(), [&](std::size_t i) {
    moments[i] = PoseMoments::of(poses[i]);
  });
  return moments;
}

std::size_t nearest_medoid(const std::vector<PoseMoments>& medoid_moments,
                           const PoseMoments& pose, double s_ref) {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < medoid_moments.size(); ++m) {
    const double d = mse_norm(medoid_moments[m], pose, s_ref);
    if (d < best_dist) {
      best_dist = d;
      best = m;
    }
  }
  return best;
}

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

struct DecodeResult {
  std::vector<Phase> labels;
  double log_likelihood = 0.0;
};

DecodeResult decode_codes(const PhaseModel& model,
                          const std::vector<std::size_t>& codes) {
  const std::size_t t_len = codes.size();
  if (t_len == 0) {
    throw InsufficientDataError("cannot decode an empty observation sequence");
  }
  const std::size_t k = model.codebook.size();
  for (std::size_t code : codes) {
    if (code >= k) {
      throw InvalidSpecError("observation code exceeds the codebook size");
    }
  }

  std::array<std::array<double, kPhaseCount>, kPhaseCount> log_trans{};
  for (std::size_t from = 0; from < kPhaseCount; ++from) {
    for (std::size_t to = 0; to < kPhaseCount; ++to) {
      log_trans[from][to] = safe_log(model.transition[from][to]);
    }
  }

  std::vector<std::array<double, kPhaseCount>> delta(t_len);
  std::vector<std::array<std::size_t, kPhaseCount>> back(t_len);
  for (std::size_t h = 0; h < kPhaseCount; ++h) {
    delta[0][h] =
        safe_log(model.prior[h]) + safe_log(model.emission[codes[0]][h]);
    back[0][h] = h;
  }
  for (std::size_t t = 1; t < t_len; ++t) {
    for (std::size_t h = 0; h < kPhaseCount; ++h) {
      double best = kNegInf;
      std::size_t best_from = 0;
      for (std::size_t g = 0; g < kPhaseCount; ++g) {
        const double cand = delta[t - 1][g] + log_trans[g][h];
        if (cand > best) {
          best = cand;
          best_from = g;
        }
      }
      delta[t][h] = best + safe_log(model.emission[codes[t]][h]);
      back[t][h] = best_from;
    }
  }

  double best_final = kNegInf;
  std::size_t best_state = 0;
  for (std::size_t h = 0; h < kPhaseCount; ++h) {
    if (delta[t_len - 1][h] > best_final) {
      best_final = delta[t_len - 1][h];
      best_state = h;
    }
  }
  if (best_final == kNegInf) {
    throw ImpossibleObservationError(
        "every state path has probability zero for this observation "
        "sequence");
  }

  DecodeResult result;
  result.log_likelihood = best_final;
  result.labels.resize(t_len);
  std::size_t state = best_state;
  for (std::size_t t = t_len; t-- > 0;) {
    result.labels[t] = static_cast<Phase>(static_cast<int>(state));
    state = back[t][state];
  }
  return result;
}

}  // namespace

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::jump:
      return "jump";
    case Phase::airtime:
      return "airtime";
    case Phase::landing:
      return "landing";
    case Phase::flight:
      return "flight";
    case Phase::final_landing:
      return "final_landing";
  }
  return "unknown";
}

std::optional<Phase> parse_phase(std::string_view name) {
  for (int p = 0; p < static_cast<int>(kPhaseCount); ++p) {
    if (name == phase_name(static_cast<Phase>(p))) {
      return static_cast<Phase>(p);
    }
  }
  return std::nullopt;
}

bool transition_allowed(Phase from, Phase to) {
  if (from == to) return true;
  switch (from) {
    case Phase::jump:
      return to == Phase::airtime;
    case Phase::airtime:
      return to == Phase::landing || to == Phase::flight;
    case Phase::landing:
      return to == Phase::jump || to == Phase::flight;
    case Phase::flight:
      return to == Phase::final_landing;
    case Phase::final_landing:
      return false;
  }
  return false;
}

Codebook kmedoids(const std::vector<Pose>& items, std::size_t k,
                  std::uint64_t seed, double s_ref) {
  const std::size_t n = items.size();
  if (k == 0 || k > n) {
    throw InvalidSpecError("k must satisfy 1 <= k <= number of items");
  }

  const std::vector<PoseMoments> moments = moments_of(items);

  // Dense symmetric distance matrix; clustering cost is O(n^2) regardless,
  // and callers cap n via PhaseModelConfig::max_codebook_items.
  std::vector<double> dist(n * n, 0.0);
  detail::parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = mse_norm(moments[i], moments[j], s_ref);
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  });
  const auto d_at = [&](std::size_t i, std::size_t j) {
    return dist[i * n + j];
  };

  // Greedy farthest-point seeding from one random item.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> medoids;
  medoids.reserve(k);
  medoids.push_back(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (medoids.size() < k) {
    const std::size_t last = medoids.back();
    std::size_t far = 0;
    double far_dist = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], d_at(i, last));
      if (nearest[i] > far_dist) {
        far_dist = nearest[i];
        far = i;
      }
    }
    medoids.push_back(far);
  }
  std::sort(medoids.begin(), medoids.end());

  // Voronoi alternation: assign to the nearest medoid, then re-centre each
  // cluster on its own cost minimizer.  Both halves only ever lower the
  // total cost, so the medoid set converges.
  std::vector<std::size_t> owner(n, 0);
  constexpr std::size_t kMaxRounds = 100;
  for (std::size_t round = 0; round < kMaxRounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m < k; ++m) {
        const double d = d_at(i, medoids[m]);
        if (d < best_dist) {
          best_dist = d;
          best = m;
        }
      }
      owner[i] = best;
    }

    std::vector<std::size_t> updated(k);
    for (std::size_t m = 0; m < k; ++m) {
      std::size_t best_item = medoids[m];
      double best_cost = std::numeric_limits<double>::infinity();
      for (std::size_t cand = 0; cand < n; ++cand) {
        if (owner[cand] != m) continue;
        double cost = 0.0;
        for (std::size_t other = 0; other < n; ++other) {
          if (owner[other] == m) cost += d_at(cand, other);
        }
        if (cost < best_cost) {
          best_cost = cost;
          best_item = cand;
        }
      }
      updated[m] = best_item;
    }
    std::sort(updated.begin(), updated.end());
    if (updated == medoids) break;
    medoids = std::move(updated);
  }

  Codebook codebook;
  codebook.s_ref = s_ref;
  codebook.medoids.reserve(k);
  for (std::size_t m : medoids) codebook.medoids.push_back(items[m]);
  return codebook;
}

std::size_t assign(const Codebook& codebook, const Pose& pose) {
  if (codebook.medoids.empty()) {
    throw InvalidSpecError("cannot assign against an empty codebook");
  }
  const std::vector<PoseMoments> medoid_moments = moments_of(codebook.medoids);
  return nearest_medoid(medoid_moments, PoseMoments::of(pose), codebook.s_ref);
}

std::vector<std::size_t> assign_all(const Codebook& codebook,
                                    const std::vector<Pose>& poses) {
  if (codebook.medoids.empty()) {
    throw InvalidSpecError("cannot assign against an empty codebook");
  }
  const std::vector<PoseMoments> medoid_moments = moments_of(codebook.medoids);
  std::vector<std::size_t> codes(poses.size());
  detail::parallel_for(poses.size(), [&](std::size_t i) {
    codes[i] = nearest_medoid(medoid_moments, PoseMoments::of(poses[i]),
                              codebook.s_ref);
  });
  return codes;
}

PhaseModel fit_model(const std::vector<LabeledSequence>& train,
                     const PhaseModelConfig& config) {
  if (train.empty()) {
    throw InsufficientDataError("no training sequences");
  }

  std::vector<const Pose*> all_poses;
  std::vector<Phase> all_labels;
  for (const LabeledSequence& item : train) {
    if (item.labels.size() != item.seq.poses.size()) {
      throw InvalidSpecError("label count does not match pose count");
    }
    for (std::size_t i = 0; i < item.seq.poses.size(); ++i) {
      all_poses.push_back(&item.seq.poses[i].pose);
      all_labels.push_back(item.labels[i]);
    }
  }
  const std::size_t total = all_poses.size();

  std::array<std::size_t, kPhaseCount> phase_frames{};
  for (Phase label : all_labels) {
    ++phase_frames[static_cast<std::size_t>(label)];
  }
  for (std::size_t h = 0; h < kPhaseCount; ++h) {
    if (phase_frames[h] == 0) {
      throw EmptyPhaseError(std::string("no training frames for phase ") +
                            phase_name(static_cast<Phase>(h)));
    }
  }

  // Deterministic subsample for the quadratic clustering step.
  std::vector<std::size_t> chosen(total);
  std::iota(chosen.begin(), chosen.end(), std::size_t{0});
  if (total > config.max_codebook_items) {
    std::mt19937_64 rng(config.seed);
    std::shuffle(chosen.begin(), chosen.end(), rng);
    chosen.resize(config.max_codebook_items);
    std::sort(chosen.begin(), chosen.end());
  }
  std::vector<Pose> codebook_items;
  codebook_items.reserve(chosen.size());
  for (std::size_t i : chosen) codebook_items.push_back(*all_poses[i]);

  const std::size_t k = std::min(config.k, codebook_items.size());
  PhaseModel model;
  model.smoothing = config.smoothing;
  model.codebook = kmedoids(codebook_items, k, config.seed, config.s_ref);

  std::vector<Pose> pose_values;
  pose_values.reserve(total);
  for (const Pose* p : all_poses) pose_values.push_back(*p);
  const std::vector<std::size_t> codes =
      assign_all(model.codebook, pose_values);

  // Joint cluster/phase counts over every training frame.
  std::vector<std::array<std::size_t, kPhaseCount>> joint(
      k, std::array<std::size_t, kPhaseCount>{});
  for (std::size_t i = 0; i < total; ++i) {
    ++joint[codes[i]][static_cast<std::size_t>(all_labels[i])];
  }

  const double s = config.smoothing;
  model.emission.assign(k, std::array<double, kPhaseCount>{});
  for (std::size_t h = 0; h < kPhaseCount; ++h) {
    const double denom =
        static_cast<double>(phase_frames[h]) + s * static_cast<double>(k);
    for (std::size_t c = 0; c < k; ++c) {
      model.emission[c][h] = (static_cast<double>(joint[c][h]) + s) / denom;
    }
  }

  model.cluster_occupancy.assign(k, 0.0);
  model.phase_given_cluster.assign(k, std::array<double, kPhaseCount>{});
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t in_cluster = 0;
    for (std::size_t h = 0; h < kPhaseCount; ++h) in_cluster += joint[c][h];
    model.cluster_occupancy[c] =
        static_cast<double>(in_cluster) / static_cast<double>(total);
    if (in_cluster > 0) {
      for (std::size_t h = 0; h < kPhaseCount; ++h) {
        model.phase_given_cluster[c][h] = static_cast<double>(joint[c][h]) /
                                          static_cast<double>(in_cluster);
      }
    }
  }

  // Transition counts over consecutive labels within each sequence; pairs
  // that violate the state graph (label noise, detector gaps) are dropped
  // rather than loosening the graph.
  std::array<std::array<std::size_t, kPhaseCount>, kPhaseCount> trans_count{};
  std::array<std::size_t, kPhaseCount> first_count{};
  for (const LabeledSequence& item : train) {
    if (item.labels.empty()) continue;
    ++first_count[static_cast<std::size_t>(item.labels.front())];
    for (std::size_t i = 0; i + 1 < item.labels.size(); ++i) {
      const Phase from = item.labels[i];
      const Phase to = item.labels[i + 1];
      if (transition_allowed(from, to)) {
        ++trans_count[static_cast<std::size_t>(from)]
                     [static_cast<std::size_t>(to)];
      }
    }
  }
  for (std::size_t from = 0; from < kPhaseCount; ++from) {
    double denom = 0.0;
    for (std::size_t to = 0; to < kPhaseCount; ++to) {
      if (transition_allowed(static_cast<Phase>(from),
                             static_cast<Phase>(to))) {
        denom += static_cast<double>(trans_count[from][to]) + s;
      }
    }
    for (std::size_t to = 0; to < kPhaseCount; ++to) {
      if (transition_allowed(static_cast<Phase>(from),
                             static_cast<Phase>(to))) {
        model.transition[from][to] =
            (static_cast<double>(trans_count[from][to]) + s) / denom;
      } else {
        model.transition[from][to] = 0.0;
      }
    }
  }

  const double prior_denom = static_cast<double>(train.size()) +
                             s * static_cast<double>(kPhaseCount);
  for (std::size_t h = 0; h < kPhaseCount; ++h) {
    model.prior[h] = (static_cast<double>(first_count[h]) + s) / prior_denom;
  }

  // Median event length per phase across the training corpus, for event
  // confidence scoring downstream.
  std::array<std::vector<double>, kPhaseCount> event_lengths;
  for (const LabeledSequence& item : train) {
    std::vector<std::int64_t> frames;
    frames.reserve(item.seq.poses.size());
    for (const TimedPose& tp : item.seq.poses) frames.push_back(tp.frame);
    for (const PhaseEvent& ev : to_events(frames, item.labels)) {
      event_lengths[static_cast<std::size_t>(ev.label)].push_back(
          static_cast<double>(ev.t2 - ev.t1 + 1));
    }
  }
  for (std::size_t h = 0; h < kPhaseCount; ++h) {
    model.median_event_frames[h] =
        event_lengths[h].empty() ? 0.0 : median_of(event_lengths[h]);
  }

  return model;
}

PhasePrediction viterbi(const PhaseModel& model, const PoseSequence& seq) {
  seq.validate();
  if (seq.poses.empty()) {
    throw InsufficientDataError("cannot decode an empty pose sequence");
  }
  std::vector<Pose> poses;
  poses.reserve(seq.poses.size());
  for (const TimedPose& tp : seq.poses) poses.push_back(tp.pose);
  const std::vector<std::size_t> codes = assign_all(model.codebook, poses);

  DecodeResult decoded = decode_codes(model, codes);
  PhasePrediction pred;
  pred.frames.reserve(seq.poses.size());
  for (const TimedPose& tp : seq.poses) pred.frames.push_back(tp.frame);
  pred.labels = std::move(decoded.labels);
  pred.log_likelihood = decoded.log_likelihood;
  return pred;
}

PhasePrediction viterbi_codes(const PhaseModel& model,
                              const std::vector<std::size_t>& codes) {
  DecodeResult decoded = decode_codes(model, codes);
  PhasePrediction pred;
  pred.frames.resize(codes.size());
  std::iota(pred.frames.begin(), pred.frames.end(), std::int64_t{0});
  pred.labels = std::move(decoded.labels);
  pred.log_likelihood = decoded.log_likelihood;
  return pred;
}

std::vector<PhaseEvent> to_events(const std::vector<std::int64_t>& frames,
                                  const std::vector<Phase>& labels) {
  if (frames.size() != labels.size()) {
    throw InvalidSpecError("frame count does not match label count");
  }
  std::vector<PhaseEvent> events;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!events.empty() && events.back().label == labels[i]) {
      events.back().t2 = frames[i];
    } else {
      events.push_back(PhaseEvent{labels[i], frames[i], frames[i]});
    }
  }
  return events;
}

Kinematics derive_kinematics(const PhasePrediction& pred, double fps,
                             StepEvent step_event) {
  if (!(fps > 0.0)) {
    throw InvalidSpecError("fps must be positive");
  }
  const std::vector<PhaseEvent> events = to_events(pred);

  std::int64_t flight_start = 0;
  bool has_flight = false;
  for (const PhaseEvent& ev : events) {
    if (ev.label == Phase::flight) {
      flight_start = ev.t1;
      has_flight = true;
      break;
    }
  }
  if (!has_flight) {
    throw NoFlightPhaseError("no flight phase in the decoded sequence");
  }

  const Phase step_label =
      step_event == StepEvent::jump ? Phase::jump : Phase::landing;
  Kinematics result;
  bool have_first = false;
  std::int64_t first_runup = 0;
  for (const PhaseEvent& ev : events) {
    if (ev.t1 >= flight_start) break;
    if (ev.label == step_label) ++result.step_count;
    const bool runup_phase = ev.label == Phase::jump ||
                             ev.label == Phase::airtime ||
                             ev.label == Phase::landing;
    if (runup_phase && !have_first) {
      first_runup = ev.t1;
      have_first = true;
    }
  }
  if (have_first) {
    result.runup_duration_s =
        static_cast<double>(flight_start - first_runup) / fps;
  }
  return result;
}

}  // namespace posemine
