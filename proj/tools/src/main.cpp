// Copyright 2026 The posemine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include <posemine/cycles.hpp>
#include <posemine/eval.hpp>
#include <posemine/phases.hpp>
#include <posemine/pose_io.hpp>
#include <posemine/saliency.hpp>
#include <posemine/stability.hpp>
#include <posemine/synth.hpp>
#include <posemine/types.hpp>

#include "artifacts.hpp"

#ifndef POSEMINE_VERSION
#define POSEMINE_VERSION "dev"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace posemine;
using posemine::tools::clip_poses;
using posemine::tools::frames_of;
using posemine::tools::labels_from_events;
using posemine::tools::poses_of;
using posemine::tools::write_detections_csv;

namespace {

/**
 * Config-file support: a JSON object whose keys are long option names;
 * subcommand options live in nested objects keyed by the subcommand name,
 * e.g. {"seed": 7, "cycles": {"gap": 2}}.  Values given on the command
 * line always win over the file.
 */
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool,
                        std::string) const override {
    return app_to_json(app, default_also).dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json parsed;
    try {
      parsed = json::parse(input);
    } catch (const json::exception& e) {
      throw CLI::ConfigError(std::string("config file is not valid JSON: ") +
                             e.what());
    }
    if (!parsed.is_object()) {
      throw CLI::ConfigError("config file must hold a JSON object");
    }
    std::vector<CLI::ConfigItem> items;
    flatten(parsed, {}, items);
    return items;
  }

 private:
  static void flatten(const json& node, std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : node.items()) {
      if (value.is_object()) {
        auto deeper = parents;
        deeper.push_back(key);
        flatten(value, std::move(deeper), out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& element : value) item.inputs.push_back(scalar(element));
      } else {
        item.inputs.push_back(scalar(value));
      }
      out.push_back(std::move(item));
    }
  }

  static std::string scalar(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    if (value.is_null()) return "";
    return value.dump();
  }

  static json app_to_json(const CLI::App* app, bool default_also) {
    json out = json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
      const std::string& name = opt->get_lnames()[0];
      if (opt->count() > 0) {
        const auto& results = opt->results();
        if (results.size() == 1) {
          out[name] = results[0];
        } else {
          out[name] = results;
        }
      } else if (default_also) {
        out[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands([](const CLI::App*) {
           return true;
         })) {
      json nested = app_to_json(sub, default_also);
      if (!nested.empty()) out[sub->get_name()] = nested;
    }
    return out;
  }
};

struct GlobalOptions {
  double s_ref = kDefaultRefScale;
  std::optional<double> fps;  ///< overrides the fps stored in pose files
  std::uint64_t seed = 1;
  fs::path out_dir = "out";
};

json global_json(const GlobalOptions& g) {
  json j;
  j["s-ref"] = g.s_ref;
  if (g.fps) {
    j["fps"] = *g.fps;
  } else {
    j["fps"] = nullptr;
  }
  j["seed"] = g.seed;
  j["out-dir"] = g.out_dir.string();
  return j;
}

/// Every run records the options it actually used, so an artifact directory
/// is self-describing and the run can be repeated from the file alone.
void echo_config(const GlobalOptions& g, const std::string& command,
                 const json& options) {
  json root = global_json(g);
  root["command"] = command;
  json* slot = &root;
  std::istringstream parts(command);
  std::string part;
  while (parts >> part) slot = &(*slot)[part];
  *slot = options;
  write_text_atomic(g.out_dir / "effective_config.json", root.dump(2) + "\n");
}

PoseSequence load_sequence(const fs::path& path, const GlobalOptions& g) {
  PoseSequence seq = read_poses(path);
  if (g.fps) seq.fps = *g.fps;
  return seq;
}

void require_min_poses(const PoseSequence& seq, const fs::path& path) {
  if (seq.size() < 2) {
    throw InvalidSpecError("pose file " + path.string() + " holds " +
                           std::to_string(seq.size()) +
                           " poses; at least 2 are required");
  }
}

/// Video ids appear in artifact file names; anything outside [A-Za-z0-9._-]
/// becomes '_' there (the csv columns keep the original id).
std::string sanitize_id(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return out;
}

const char* op_name(EditOp op) {
  switch (op) {
    case EditOp::sub:
      return "sub";
    case EditOp::ins:
      return "ins";
    case EditOp::del:
      return "del";
    case EditOp::none:
      break;
  }
  return "none";
}

// ---------------------------------------------------------------------------
// synth

struct SynthOptions {
  SynthKind kind = SynthKind::cyclic;
  std::string video_id = "synth";
  double duration = 30.0;
  double base_cycle = 60.0;
  double mod_amplitude = 0.0;
  double mod_period = 20.0;
  int transitions_per_cycle = 1;
  double sharpness = 0.0;
  std::optional<std::int64_t> active_from, active_to;
  std::optional<std::int64_t> glide_from, glide_to;
  double drift = 0.0;
  double noise_sigma = 0.0;
  double dropout = 0.0;
  double outliers = 0.0;
  std::uint64_t signature = 0;
  int runup_cycles = 12;
};

void run_synth(const GlobalOptions& g, const SynthOptions& o) {
  if (o.active_from.has_value() != o.active_to.has_value()) {
    throw InvalidSpecError("--active-from and --active-to must be used together");
  }
  if (o.glide_from.has_value() != o.glide_to.has_value()) {
    throw InvalidSpecError("--glide-from and --glide-to must be used together");
  }
  SynthSpec spec;
  spec.kind = o.kind;
  spec.video_id = o.video_id;
  spec.fps = g.fps.value_or(spec.fps);
  spec.duration_s = o.duration;
  spec.base_cycle_frames = o.base_cycle;
  spec.modulation_amplitude = o.mod_amplitude;
  spec.modulation_period_s = o.mod_period;
  spec.transitions_per_cycle = o.transitions_per_cycle;
  spec.transition_sharpness = o.sharpness;
  if (o.active_from) spec.active_interval = FrameInterval{*o.active_from, *o.active_to};
  if (o.glide_from) spec.glide_interval = FrameInterval{*o.glide_from, *o.glide_to};
  spec.drift_px_per_frame = o.drift;
  spec.noise_sigma = o.noise_sigma;
  spec.dropout_prob = o.dropout;
  spec.outlier_prob = o.outliers;
  spec.athlete_signature = o.signature;
  spec.runup_cycles = o.runup_cycles;
  const SynthResult res = synthesize(spec, g.seed);

  json opts;
  opts["kind"] = o.kind == SynthKind::cyclic ? "cyclic" : "longjump";
  opts["video-id"] = o.video_id;
  opts["duration"] = o.duration;
  opts["base-cycle"] = o.base_cycle;
  opts["mod-amplitude"] = o.mod_amplitude;
  opts["mod-period"] = o.mod_period;
  opts["transitions-per-cycle"] = o.transitions_per_cycle;
  opts["sharpness"] = o.sharpness;
  opts["active-from"] = o.active_from ? json(*o.active_from) : json(nullptr);
  opts["active-to"] = o.active_to ? json(*o.active_to) : json(nullptr);
  opts["glide-from"] = o.glide_from ? json(*o.glide_from) : json(nullptr);
  opts["glide-to"] = o.glide_to ? json(*o.glide_to) : json(nullptr);
  opts["drift"] = o.drift;
  opts["noise-sigma"] = o.noise_sigma;
  opts["dropout"] = o.dropout;
  opts["outliers"] = o.outliers;
  opts["signature"] = o.signature;
  opts["runup-cycles"] = o.runup_cycles;
  GlobalOptions effective = g;
  effective.fps = spec.fps;
  echo_config(effective, "synth", opts);

  write_poses(res.seq, g.out_dir / "poses.txt", "synthetic");

  if (spec.kind == SynthKind::cyclic) {
    std::string cycles_csv = "frame,cycle_length\n";
    for (std::size_t i = 0; i < res.seq.size(); ++i) {
      cycles_csv += std::to_string(res.seq.poses[i].frame);
      cycles_csv += ',';
      cycles_csv += format_double(res.cycle_length[i]);
      cycles_csv += '\n';
    }
    write_text_atomic(g.out_dir / "truth_cycles.csv", cycles_csv);

    std::string striking_csv = "frame\n";
    for (std::int64_t f : res.striking_frames) {
      striking_csv += std::to_string(f);
      striking_csv += '\n';
    }
    write_text_atomic(g.out_dir / "truth_striking.csv", striking_csv);
  } else {
    std::string labels_csv = "frame,phase\n";
    for (std::size_t i = 0; i < res.seq.size(); ++i) {
      labels_csv += std::to_string(res.seq.poses[i].frame);
      labels_csv += ',';
      labels_csv += phase_name(res.labels[i]);
      labels_csv += '\n';
    }
    write_text_atomic(g.out_dir / "truth_labels.csv", labels_csv);

    std::vector<TruthEvent> events;
    for (const PhaseEvent& ev : to_events(frames_of(res.seq), res.labels)) {
      events.push_back({spec.video_id, ev.label, {ev.t1, ev.t2}});
    }
    write_events(events, g.out_dir / "truth_events.txt");

    std::string kin_csv = "video_id,step_count,flight_start,first_runup_frame\n";
    kin_csv += spec.video_id;
    kin_csv += ',';
    kin_csv += std::to_string(res.true_step_count);
    kin_csv += ',';
    kin_csv += std::to_string(res.flight_start);
    kin_csv += ',';
    kin_csv += std::to_string(res.first_runup_frame);
    kin_csv += '\n';
    write_text_atomic(g.out_dir / "truth_kinematics.csv", kin_csv);
  }

  std::string anomalies_csv = "frame,kind\n";
  for (std::int64_t f : res.dropped_frames) {
    anomalies_csv += std::to_string(f);
    anomalies_csv += ",dropped\n";
  }
  for (std::int64_t f : res.outlier_frames) {
    anomalies_csv += std::to_string(f);
    anomalies_csv += ",outlier\n";
  }
  write_text_atomic(g.out_dir / "truth_anomalies.csv", anomalies_csv);

  std::cout << "synthesized " << res.seq.size() << " poses for video "
            << spec.video_id << " into "
            << (g.out_dir / "poses.txt").string() << "\n";
}

// ---------------------------------------------------------------------------
// cycle mining options shared by cycles, rate and the eval subcommands

struct MiningOptions {
  double match_threshold = 49.0;
  std::int64_t gap = 3;
  std::int64_t spread = 10;
  double median_window = 2.0;
  double rel_tol = 0.10;
  int degree = 5;
  double segment_cycles = 3.0;
  std::size_t min_region_points = 12;
  std::size_t min_segment_points = 8;
  bool legs_only = false;
};

void add_mining_options(CLI::App* cmd, MiningOptions& o) {
  cmd->add_option("--match-threshold", o.match_threshold,
                  "normalized distance below which two poses match");
  cmd->add_option("--gap", o.gap,
                  "frame gap that splits a match cluster in two");
  cmd->add_option("--spread", o.spread,
                  "maximum cluster spread in frames before an anchor is dropped");
  cmd->add_option("--median-window", o.median_window,
                  "sliding median window in seconds for sample rejection");
  cmd->add_option("--rel-tol", o.rel_tol,
                  "allowed relative deviation from the local median");
  cmd->add_option("--degree", o.degree, "polynomial degree per curve segment");
  cmd->add_option("--segment-cycles", o.segment_cycles,
                  "target curve segment length, in cycles");
  cmd->add_option("--min-region-points", o.min_region_points,
                  "samples a region needs before a curve is fitted");
  cmd->add_option("--min-segment-points", o.min_segment_points,
                  "samples a single segment needs");
  cmd->add_flag("--legs-only", o.legs_only,
                "mine hips, knees and ankles instead of the full body");
}

CycleConfig to_cycle_config(const MiningOptions& o, double s_ref) {
  CycleConfig cfg;
  cfg.match_threshold = o.match_threshold;
  cfg.s_ref = s_ref;
  cfg.gap_threshold = o.gap;
  cfg.spread_threshold = o.spread;
  cfg.median_window_seconds = o.median_window;
  cfg.median_rel_tol = o.rel_tol;
  cfg.fit.degree = o.degree;
  cfg.fit.segment_cycles = o.segment_cycles;
  cfg.fit.min_region_points = o.min_region_points;
  cfg.fit.min_segment_points = o.min_segment_points;
  cfg.fit.median_window_seconds = o.median_window;
  if (o.legs_only) cfg.joints = lower_body_subset();
  return cfg;
}

json mining_json(const MiningOptions& o) {
  json j;
  j["match-threshold"] = o.match_threshold;
  j["gap"] = o.gap;
  j["spread"] = o.spread;
  j["median-window"] = o.median_window;
  j["rel-tol"] = o.rel_tol;
  j["degree"] = o.degree;
  j["segment-cycles"] = o.segment_cycles;
  j["min-region-points"] = o.min_region_points;
  j["min-segment-points"] = o.min_segment_points;
  j["legs-only"] = o.legs_only;
  return j;
}

// ---------------------------------------------------------------------------
// cycles

void run_cycles(const GlobalOptions& g, const fs::path& input,
                const MiningOptions& o, bool svg) {
  const PoseSequence seq = load_sequence(input, g);
  require_min_poses(seq, input);
  const CycleMiningResult res = mine_cycles(seq, to_cycle_config(o, g.s_ref));

  json opts = mining_json(o);
  opts["input"] = input.string();
  opts["svg"] = svg;
  echo_config(g, "cycles", opts);

  std::string curve_csv = "frame,raw_diff,kept_flag,fitted_value\n";
  for (std::size_t i = 0; i < res.raw_points.size(); ++i) {
    const DifferencePoint& p = res.raw_points[i];
    curve_csv += std::to_string(p.frame);
    curve_csv += ',';
    curve_csv += std::to_string(p.diff);
    curve_csv += ',';
    curve_csv += res.kept[i] ? '1' : '0';
    curve_csv += ',';
    curve_csv += res.curve.covers(p.frame)
                     ? format_double(res.curve.value_at(p.frame))
                     : "nan";
    curve_csv += '\n';
  }
  write_text_atomic(g.out_dir / "curve.csv", curve_csv);

  std::string fitted_csv = "frame,cycle_length_frames,cycles_per_minute\n";
  for (const FrameInterval& r : res.detected_ranges) {
    for (std::int64_t f = r.first; f <= r.last; ++f) {
      const double value = res.curve.value_at(f);
      fitted_csv += std::to_string(f);
      fitted_csv += ',';
      fitted_csv += format_double(value);
      fitted_csv += ',';
      fitted_csv += format_double(cycle_rate(res.curve, f));
      fitted_csv += '\n';
    }
  }
  write_text_atomic(g.out_dir / "fitted.csv", fitted_csv);

  std::string ranges_csv = "kind,first,last\n";
  for (const FrameInterval& r : res.detected_ranges) {
    ranges_csv += "detected,";
    ranges_csv += std::to_string(r.first);
    ranges_csv += ',';
    ranges_csv += std::to_string(r.last);
    ranges_csv += '\n';
  }
  for (const FrameInterval& r : res.skipped_regions) {
    ranges_csv += "skipped,";
    ranges_csv += std::to_string(r.first);
    ranges_csv += ',';
    ranges_csv += std::to_string(r.last);
    ranges_csv += '\n';
  }
  write_text_atomic(g.out_dir / "ranges.csv", ranges_csv);

  if (svg) {
    write_text_atomic(g.out_dir / "curve.svg", posemine::tools::curve_svg(res));
  }

  std::int64_t covered = 0;
  for (const FrameInterval& r : res.detected_ranges) covered += r.length();
  std::cout << "kept " << res.anchors_kept << " of " << res.anchors_total
            << " anchors, " << res.raw_points.size()
            << " cycle samples; curve covers " << covered << " frames in "
            << res.detected_ranges.size() << " ranges ("
            << res.skipped_regions.size() << " regions skipped)\n";
}

// ---------------------------------------------------------------------------
// rate

void run_rate(const GlobalOptions& g, const fs::path& input,
              std::int64_t frame, const MiningOptions& o) {
  const PoseSequence seq = load_sequence(input, g);
  require_min_poses(seq, input);
  const CycleMiningResult res = mine_cycles(seq, to_cycle_config(o, g.s_ref));
  const double rate = cycle_rate(res.curve, frame);
  const double length = res.curve.value_at(frame);

  json opts = mining_json(o);
  opts["input"] = input.string();
  opts["frame"] = frame;
  echo_config(g, "rate", opts);

  std::string rate_csv = "frame,cycle_length_frames,cycles_per_minute\n";
  rate_csv += std::to_string(frame);
  rate_csv += ',';
  rate_csv += format_double(length);
  rate_csv += ',';
  rate_csv += format_double(rate);
  rate_csv += '\n';
  write_text_atomic(g.out_dir / "rate.csv", rate_csv);

  std::cout << "frame " << frame << ": cycle length " << format_double(length)
            << " frames = " << format_double(rate) << " cycles per minute\n";
}

// ---------------------------------------------------------------------------
// salient

struct SalientOptions {
  std::size_t top_n = 20;
  std::size_t k = 1;
  int w_l = 4;
  int w_s = 4;
  bool normalized = false;
};

void run_salient(const GlobalOptions& g, const fs::path& input,
                 const SalientOptions& o) {
  const PoseSequence seq = load_sequence(input, g);
  require_min_poses(seq, input);
  StrikingConfig cfg;
  cfg.saliency.w_l = o.w_l;
  cfg.saliency.w_s = o.w_s;
  cfg.saliency.use_normalized = o.normalized;
  cfg.saliency.s_ref = g.s_ref;
  cfg.ap.s_ref = g.s_ref;
  const std::vector<SaliencyScore> profile = saliency_profile(seq, cfg.saliency);
  const StrikingPoseSet set = striking_poses(seq, o.top_n, o.k, cfg);

  json opts;
  opts["input"] = input.string();
  opts["top-n"] = o.top_n;
  opts["k"] = o.k;
  opts["w-l"] = o.w_l;
  opts["w-s"] = o.w_s;
  opts["normalized"] = o.normalized;
  echo_config(g, "salient", opts);

  std::string saliency_csv = "frame,value\n";
  for (const SaliencyScore& s : profile) {
    saliency_csv += std::to_string(s.frame);
    saliency_csv += ',';
    saliency_csv += format_double(s.value);
    saliency_csv += '\n';
  }
  write_text_atomic(g.out_dir / "saliency.csv", saliency_csv);

  std::string salient_csv = "rank,frame,cluster_size,saliency\n";
  for (std::size_t i = 0; i < set.representatives.size(); ++i) {
    const StrikingPose& sp = set.representatives[i];
    salient_csv += std::to_string(i + 1);
    salient_csv += ',';
    salient_csv += std::to_string(sp.frame);
    salient_csv += ',';
    salient_csv += std::to_string(sp.cluster_size);
    salient_csv += ',';
    salient_csv += format_double(sp.saliency);
    salient_csv += '\n';
  }
  write_text_atomic(g.out_dir / "salient.csv", salient_csv);

  PoseSequence picks;
  picks.video_id = seq.video_id;
  picks.fps = seq.fps;
  for (const StrikingPose& sp : set.representatives) {
    picks.poses.push_back({sp.frame, sp.pose});
  }
  std::sort(picks.poses.begin(), picks.poses.end(),
            [](const TimedPose& a, const TimedPose& b) {
              return a.frame < b.frame;
            });
  write_poses(picks, g.out_dir / "salient_poses.txt", "salient");

  std::cout << set.representatives.size() << " striking poses at frames";
  for (const StrikingPose& sp : set.representatives) {
    std::cout << ' ' << sp.frame;
  }
  std::cout << (set.converged ? " (clustering converged)\n"
                              : " (clustering hit the iteration cap)\n");
}

// ---------------------------------------------------------------------------
// stability

struct StabilityOptions {
  std::string reference;
  std::vector<std::string> sequences;
  std::optional<std::int64_t> from, to;
  double th_same = 49.0;
  double th_diff = 400.0;
  double th_match = 0.3;
};

json clip_json(const std::optional<std::int64_t>& from,
               const std::optional<std::int64_t>& to) {
  json j;
  j["from"] = from ? json(*from) : json(nullptr);
  j["to"] = to ? json(*to) : json(nullptr);
  return j;
}

void run_stability(const GlobalOptions& g, const StabilityOptions& o) {
  const PoseSequence ref_seq = load_sequence(o.reference, g);
  const std::vector<Pose> pattern = clip_poses(ref_seq, o.from, o.to);
  std::vector<PoseSequence> sequences;
  for (const std::string& path : o.sequences) {
    sequences.push_back(load_sequence(path, g));
    if (sequences.back().size() <= pattern.size()) {
      throw InvalidSpecError("sequence " + path + " holds " +
                             std::to_string(sequences.back().size()) +
                             " poses; more than the " +
                             std::to_string(pattern.size()) +
                             " reference poses are required");
    }
  }
  const BoundedDistParams dist{o.th_same, o.th_diff, g.s_ref};

  json opts = clip_json(o.from, o.to);
  opts["reference"] = o.reference;
  opts["sequences"] = o.sequences;
  opts["th-same"] = o.th_same;
  opts["th-diff"] = o.th_diff;
  opts["th-match"] = o.th_match;
  echo_config(g, "stability", opts);

  std::string scores_csv = "video_id,end_index,end_frame,score\n";
  std::string matches_csv = "video_id,start_frame,end_frame,score\n";
  std::string align_csv =
      "video_id,match_index,op,pattern_index,text_index,text_frame\n";
  double total = 0.0;
  std::size_t count = 0;
  for (const PoseSequence& seq : sequences) {
    const EditResult er = edit_match(pattern, poses_of(seq), dist);
    for (std::size_t j = 0; j < er.scores.size(); ++j) {
      scores_csv += seq.video_id;
      scores_csv += ',';
      scores_csv += std::to_string(j);
      scores_csv += ',';
      scores_csv += std::to_string(seq.poses[j].frame);
      scores_csv += ',';
      scores_csv += format_double(er.scores[j]);
      scores_csv += '\n';
    }
    const std::vector<ClipMatch> matches = extract_matches(er, o.th_match);
    for (std::size_t m = 0; m < matches.size(); ++m) {
      const ClipMatch& match = matches[m];
      matches_csv += seq.video_id;
      matches_csv += ',';
      matches_csv += std::to_string(seq.poses[match.start].frame);
      matches_csv += ',';
      matches_csv += std::to_string(seq.poses[match.end].frame);
      matches_csv += ',';
      matches_csv += format_double(match.score);
      matches_csv += '\n';
      total += match.score;
      ++count;
      for (const AlignmentStep& step : match.alignment) {
        align_csv += seq.video_id;
        align_csv += ',';
        align_csv += std::to_string(m);
        align_csv += ',';
        align_csv += op_name(step.op);
        align_csv += ',';
        align_csv += std::to_string(step.pat_index);
        align_csv += ',';
        if (step.text_index == AlignmentStep::npos) {
          align_csv += ',';
        } else {
          align_csv += std::to_string(step.text_index);
          align_csv += ',';
          align_csv += std::to_string(seq.poses[step.text_index].frame);
        }
        align_csv += '\n';
      }
    }
  }
  write_text_atomic(g.out_dir / "scores.csv", scores_csv);
  write_text_atomic(g.out_dir / "matches.csv", matches_csv);
  write_text_atomic(g.out_dir / "alignments.csv", align_csv);

  if (count == 0) {
    throw NoMatchesError("no match scored below " + format_double(o.th_match) +
                         " in any sequence");
  }
  std::cout << "mean match score " << format_double(total / count) << " over "
            << count << " matches in " << sequences.size() << " sequences\n";
}

// ---------------------------------------------------------------------------
// identify

struct IdentifyOptions {
  std::string reference;
  std::string own;
  std::string other;
  std::optional<std::int64_t> from, to;
  double th_same = 49.0;
  double th_diff = 400.0;
  double th_match = 0.9;
};

void run_identify(const GlobalOptions& g, const IdentifyOptions& o) {
  const PoseSequence ref_seq = load_sequence(o.reference, g);
  const std::vector<Pose> pattern = clip_poses(ref_seq, o.from, o.to);
  const PoseSequence own = load_sequence(o.own, g);
  const PoseSequence other = load_sequence(o.other, g);
  for (const auto& [seq, path] :
       {std::pair<const PoseSequence&, const std::string&>{own, o.own},
        {other, o.other}}) {
    if (seq.size() <= pattern.size()) {
      throw InvalidSpecError("sequence " + path + " holds " +
                             std::to_string(seq.size()) +
                             " poses; more than the " +
                             std::to_string(pattern.size()) +
                             " reference poses are required");
    }
  }
  MatchRatioParams params;
  params.dist = {o.th_same, o.th_diff, g.s_ref};
  params.th_match = o.th_match;
  const MatchRatioResult res = athlete_match_ratio(pattern, own, other, params);

  json opts = clip_json(o.from, o.to);
  opts["reference"] = o.reference;
  opts["own"] = o.own;
  opts["other"] = o.other;
  opts["th-same"] = o.th_same;
  opts["th-diff"] = o.th_diff;
  opts["th-match"] = o.th_match;
  echo_config(g, "identify", opts);

  std::string ratio_csv = "ratio,own_mean,other_mean\n";
  ratio_csv += format_double(res.ratio);
  ratio_csv += ',';
  ratio_csv += format_double(res.own_mean);
  ratio_csv += ',';
  ratio_csv += format_double(res.other_mean);
  ratio_csv += '\n';
  write_text_atomic(g.out_dir / "ratio.csv", ratio_csv);

  std::cout << "match ratio " << format_double(res.ratio) << " (own mean "
            << format_double(res.own_mean) << ", other mean "
            << format_double(res.other_mean) << ")\n";
}

// ---------------------------------------------------------------------------
// phase train / predict / eval

struct PhaseTrainOptions {
  std::vector<std::string> poses;
  std::vector<std::string> events;
  std::size_t k = 60;
  double smoothing = 1.0;
  std::size_t max_codebook_items = 1500;
};

void run_phase_train(const GlobalOptions& g, const PhaseTrainOptions& o) {
  std::vector<TruthEvent> events;
  for (const std::string& path : o.events) {
    const std::vector<TruthEvent> part = read_events(path);
    events.insert(events.end(), part.begin(), part.end());
  }
  std::vector<LabeledSequence> train;
  std::size_t total_poses = 0;
  for (const std::string& path : o.poses) {
    PoseSequence seq = load_sequence(path, g);
    total_poses += seq.size();
    std::vector<Phase> labels = labels_from_events(seq, events);
    train.push_back({std::move(seq), std::move(labels)});
  }
  PhaseModelConfig cfg;
  cfg.k = o.k;
  cfg.seed = g.seed;
  cfg.smoothing = o.smoothing;
  cfg.s_ref = g.s_ref;
  cfg.max_codebook_items = o.max_codebook_items;
  const PhaseModel model = fit_model(train, cfg);

  json opts;
  opts["poses"] = o.poses;
  opts["events"] = o.events;
  opts["k"] = o.k;
  opts["smoothing"] = o.smoothing;
  opts["max-codebook-items"] = o.max_codebook_items;
  echo_config(g, "phase train", opts);

  write_model(model, g.out_dir / "model.txt");
  std::cout << "trained a phase model with codebook size "
            << model.codebook.size() << " on " << train.size()
            << " sequences (" << total_poses << " poses) into "
            << (g.out_dir / "model.txt").string() << "\n";
}

struct PhasePredictOptions {
  std::string model;
  std::vector<std::string> poses;
  StepEvent step_event = StepEvent::jump;
};

void run_phase_predict(const GlobalOptions& g, const PhasePredictOptions& o) {
  const PhaseModel model = read_model(o.model);
  std::vector<PoseSequence> sequences;
  for (const std::string& path : o.poses) {
    sequences.push_back(load_sequence(path, g));
  }

  json opts;
  opts["model"] = o.model;
  opts["poses"] = o.poses;
  opts["step-event"] =
      o.step_event == StepEvent::jump ? "jump" : "landing";
  echo_config(g, "phase predict", opts);

  std::vector<DetectedEvent> detections;
  std::vector<TruthEvent> events;
  std::string kin_csv = "video_id,step_count,runup_duration_s\n";
  for (const PoseSequence& seq : sequences) {
    const PhasePrediction pred = viterbi(model, seq);

    std::string labels_csv = "frame,phase\n";
    for (std::size_t i = 0; i < pred.frames.size(); ++i) {
      labels_csv += std::to_string(pred.frames[i]);
      labels_csv += ',';
      labels_csv += phase_name(pred.labels[i]);
      labels_csv += '\n';
    }
    write_text_atomic(
        g.out_dir / ("pred_" + sanitize_id(seq.video_id) + "_labels.csv"),
        labels_csv);

    const std::vector<DetectedEvent> scored =
        score_events(seq.video_id, pred, model.median_event_frames);
    detections.insert(detections.end(), scored.begin(), scored.end());
    std::size_t event_count = 0;
    for (const PhaseEvent& ev : to_events(pred)) {
      events.push_back({seq.video_id, ev.label, {ev.t1, ev.t2}});
      ++event_count;
    }

    kin_csv += seq.video_id;
    kin_csv += ',';
    std::string step_note;
    try {
      const Kinematics kin = derive_kinematics(pred, seq.fps, o.step_event);
      kin_csv += std::to_string(kin.step_count);
      kin_csv += ',';
      kin_csv += format_double(kin.runup_duration_s);
      step_note = std::to_string(kin.step_count) + " steps, run-up " +
                  format_double(kin.runup_duration_s) + " s";
    } catch (const NoFlightPhaseError&) {
      kin_csv += ',';
      step_note = "no flight phase";
    }
    kin_csv += '\n';
    std::cout << seq.video_id << ": " << event_count << " events, "
              << step_note << "\n";
  }
  write_detections_csv(detections, g.out_dir / "pred_detections.csv");
  write_events(events, g.out_dir / "pred_events.txt");
  write_text_atomic(g.out_dir / "kinematics.csv", kin_csv);
}

struct PhaseEvalOptions {
  std::string truth;
  double tau = 0.5;
  std::string detections;
  std::vector<std::string> poses;
  std::string folds;
  std::size_t k = 60;
  double smoothing = 1.0;
  std::size_t max_codebook_items = 1500;
  StepEvent step_event = StepEvent::jump;
};

void write_phase_eval_csv(const PhaseMapResult& res, double tau,
                          const fs::path& path) {
  std::string csv = "class,average_precision,truth_events,detections\n";
  for (std::size_t i = 0; i < kPhaseCount; ++i) {
    csv += phase_name(static_cast<Phase>(i));
    csv += ',';
    if (res.per_class_ap[i]) csv += format_double(*res.per_class_ap[i]);
    csv += ',';
    csv += std::to_string(res.truth_counts[i]);
    csv += ',';
    csv += std::to_string(res.detection_counts[i]);
    csv += '\n';
  }
  csv += "mean,";
  csv += format_double(res.map);
  csv += ",,\n";
  write_text_atomic(path, csv);
  (void)tau;
}

void run_phase_eval(const GlobalOptions& g, const PhaseEvalOptions& o) {
  const bool from_detections = !o.detections.empty();
  const bool cross_validate = !o.poses.empty() || !o.folds.empty();
  if (from_detections == cross_validate) {
    throw InvalidSpecError(
        "provide either --detections or --poses with --folds, not both");
  }
  if (cross_validate && (o.poses.empty() || o.folds.empty())) {
    throw InvalidSpecError("cross validation needs both --poses and --folds");
  }
  const std::vector<TruthEvent> truths = read_events(o.truth);

  json opts;
  opts["truth"] = o.truth;
  opts["tau"] = o.tau;

  if (from_detections) {
    const std::vector<DetectedEvent> detections =
        posemine::tools::read_detections_csv(o.detections);
    opts["detections"] = o.detections;
    echo_config(g, "phase eval", opts);
    const PhaseMapResult res = phase_map(detections, truths, o.tau);
    write_phase_eval_csv(res, o.tau, g.out_dir / "phase_eval.csv");
    std::size_t scored = 0;
    for (const auto& ap : res.per_class_ap) {
      if (ap) ++scored;
    }
    std::cout << "mAP " << format_double(res.map) << " at IoU threshold "
              << format_double(o.tau) << " over " << scored << " classes\n";
    return;
  }

  std::map<std::string, int> fold_of;
  for (const FoldEntry& fe : read_folds(o.folds)) {
    if (!fold_of.emplace(fe.video_id, fe.fold).second) {
      throw InvalidSpecError("duplicate fold assignment for video " +
                             fe.video_id);
    }
  }
  std::vector<PoseSequence> sequences;
  std::set<int> fold_ids;
  for (const std::string& path : o.poses) {
    sequences.push_back(load_sequence(path, g));
    const auto it = fold_of.find(sequences.back().video_id);
    if (it == fold_of.end()) {
      throw InvalidSpecError("no fold assignment for video " +
                             sequences.back().video_id);
    }
    fold_ids.insert(it->second);
  }

  opts["poses"] = o.poses;
  opts["folds"] = o.folds;
  opts["k"] = o.k;
  opts["smoothing"] = o.smoothing;
  opts["max-codebook-items"] = o.max_codebook_items;
  opts["step-event"] = o.step_event == StepEvent::jump ? "jump" : "landing";
  echo_config(g, "phase eval", opts);

  PhaseModelConfig cfg;
  cfg.k = o.k;
  cfg.seed = g.seed;
  cfg.smoothing = o.smoothing;
  cfg.s_ref = g.s_ref;
  cfg.max_codebook_items = o.max_codebook_items;

  std::vector<DetectedEvent> detections;
  std::string kin_csv = "video_id,step_count,runup_duration_s\n";
  for (int fold : fold_ids) {
    std::vector<LabeledSequence> train;
    for (const PoseSequence& seq : sequences) {
      if (fold_of.at(seq.video_id) == fold) continue;
      train.push_back({seq, labels_from_events(seq, truths)});
    }
    if (train.empty()) {
      throw InvalidSpecError("fold " + std::to_string(fold) +
                             " leaves no training sequences");
    }
    const PhaseModel model = fit_model(train, cfg);
    for (const PoseSequence& seq : sequences) {
      if (fold_of.at(seq.video_id) != fold) continue;
      const PhasePrediction pred = viterbi(model, seq);
      const std::vector<DetectedEvent> scored =
          score_events(seq.video_id, pred, model.median_event_frames);
      detections.insert(detections.end(), scored.begin(), scored.end());
      kin_csv += seq.video_id;
      kin_csv += ',';
      try {
        const Kinematics kin = derive_kinematics(pred, seq.fps, o.step_event);
        kin_csv += std::to_string(kin.step_count);
        kin_csv += ',';
        kin_csv += format_double(kin.runup_duration_s);
      } catch (const NoFlightPhaseError&) {
        kin_csv += ',';
      }
      kin_csv += '\n';
    }
  }
  const PhaseMapResult res = phase_map(detections, truths, o.tau);
  write_phase_eval_csv(res, o.tau, g.out_dir / "phase_eval.csv");
  write_detections_csv(detections, g.out_dir / "pred_detections.csv");
  write_text_atomic(g.out_dir / "kinematics.csv", kin_csv);

  std::size_t scored_classes = 0;
  for (const auto& ap : res.per_class_ap) {
    if (ap) ++scored_classes;
  }
  std::cout << "mAP " << format_double(res.map) << " at IoU threshold "
            << format_double(o.tau) << " over " << scored_classes
            << " classes, " << fold_ids.size() << " folds\n";
}

// ---------------------------------------------------------------------------
// eval stroke / range

struct EvalStrokeOptions {
  std::vector<std::string> poses;
  std::string truth;
  double tolerance = 2.0;
  MiningOptions mining;
};

void run_eval_stroke(const GlobalOptions& g, const EvalStrokeOptions& o) {
  const std::vector<StrokeTruth> truths = read_stroke_truth(o.truth);
  std::map<std::string, CycleSpeedCurve> curves;
  for (const std::string& path : o.poses) {
    const PoseSequence seq = load_sequence(path, g);
    require_min_poses(seq, path);
    const CycleMiningResult res =
        mine_cycles(seq, to_cycle_config(o.mining, g.s_ref));
    if (!curves.emplace(seq.video_id, res.curve).second) {
      throw InvalidSpecError("duplicate pose file for video " + seq.video_id);
    }
  }
  const StrokeEvalResult res = stroke_eval(curves, truths, o.tolerance);

  json opts = mining_json(o.mining);
  opts["poses"] = o.poses;
  opts["truth"] = o.truth;
  opts["tolerance"] = o.tolerance;
  echo_config(g, "eval stroke", opts);

  std::string csv = "mean_abs_error,evaluated,outliers,undetected,tolerance\n";
  csv += format_double(res.mean_abs_error);
  csv += ',';
  csv += std::to_string(res.evaluated);
  csv += ',';
  csv += std::to_string(res.outliers);
  csv += ',';
  csv += std::to_string(res.undetected);
  csv += ',';
  csv += format_double(res.tolerance);
  csv += '\n';
  write_text_atomic(g.out_dir / "stroke_eval.csv", csv);

  std::cout << "mean absolute error " << format_double(res.mean_abs_error)
            << " frames over " << res.evaluated << " measurements ("
            << res.outliers << " outliers, " << res.undetected
            << " undetected)\n";
}

struct EvalRangeOptions {
  std::string poses;
  std::int64_t truth_first = 0;
  std::int64_t truth_last = 0;
  MiningOptions mining;
};

void run_eval_range(const GlobalOptions& g, const EvalRangeOptions& o) {
  const PoseSequence seq = load_sequence(o.poses, g);
  require_min_poses(seq, o.poses);
  const CycleMiningResult mined =
      mine_cycles(seq, to_cycle_config(o.mining, g.s_ref));
  const RangeEvalResult res =
      range_eval(mined.detected_ranges, FrameInterval{o.truth_first, o.truth_last});

  json opts = mining_json(o.mining);
  opts["poses"] = o.poses;
  opts["truth-first"] = o.truth_first;
  opts["truth-last"] = o.truth_last;
  echo_config(g, "eval range", opts);

  std::string csv = "video_id,coverage_pct,overdetect_pct\n";
  csv += seq.video_id;
  csv += ',';
  csv += format_double(res.coverage_pct);
  csv += ',';
  csv += format_double(res.overdetect_pct);
  csv += '\n';
  write_text_atomic(g.out_dir / "range_eval.csv", csv);

  std::cout << "coverage " << format_double(res.coverage_pct)
            << "% of truth frames, over-detection "
            << format_double(res.overdetect_pct) << "%\n";
}

bool is_algorithmic(const Error& e) {
  return dynamic_cast<const NoMatchesError*>(&e) != nullptr ||
         dynamic_cast<const NoFlightPhaseError*>(&e) != nullptr ||
         dynamic_cast<const ImpossibleObservationError*>(&e) != nullptr ||
         dynamic_cast<const OutOfRangeError*>(&e) != nullptr ||
         dynamic_cast<const InsufficientDataError*>(&e) != nullptr ||
         dynamic_cast<const DegeneratePoseError*>(&e) != nullptr;
}

CLI::App* add_cmd(CLI::App& parent, const std::string& name,
                  const std::string& description) {
  CLI::App* cmd = parent.add_subcommand(name, description);
  cmd->fallthrough();
  return cmd;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mines repeated motion cycles, striking poses and jump phases "
      "from 2d pose tracks"};
  app.name("posemine");
  app.set_version_flag("--version", std::string("posemine ") + POSEMINE_VERSION);
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "",
                 "JSON file with option values; command line flags win");
  app.allow_config_extras(true);

  GlobalOptions g;
  app.add_option("--s-ref", g.s_ref,
                 "reference scale all pose distances are normalized to");
  app.add_option("--fps", g.fps,
                 "frames per second; overrides the value stored in pose files");
  app.add_option("--seed", g.seed, "seed for every randomized step");
  app.add_option("--out-dir", g.out_dir, "directory artifacts are written to");

  const std::map<std::string, SynthKind> kind_names{
      {"cyclic", SynthKind::cyclic}, {"longjump", SynthKind::longjump}};
  const std::map<std::string, StepEvent> step_names{
      {"jump", StepEvent::jump}, {"landing", StepEvent::landing}};

  // synth
  SynthOptions so;
  CLI::App* synth_cmd =
      add_cmd(app, "synth", "generate a synthetic pose sequence with ground truth");
  synth_cmd->add_option("--kind", so.kind, "sequence family")
      ->transform(CLI::CheckedTransformer(kind_names, CLI::ignore_case));
  synth_cmd->add_option("--video-id", so.video_id, "id stored in the pose file");
  synth_cmd->add_option("--duration", so.duration, "clip length in seconds");
  synth_cmd->add_option("--base-cycle", so.base_cycle,
                        "nominal cycle length in frames");
  synth_cmd->add_option("--mod-amplitude", so.mod_amplitude,
                        "cycle length modulation amplitude in frames");
  synth_cmd->add_option("--mod-period", so.mod_period,
                        "cycle length modulation period in seconds");
  synth_cmd->add_option("--transitions-per-cycle", so.transitions_per_cycle,
                        "distinct pose transitions per cycle");
  synth_cmd->add_option("--sharpness", so.sharpness,
                        "0 = sinusoidal blending, larger = snappier poses");
  synth_cmd->add_option("--active-from", so.active_from,
                        "first frame of cyclic activity");
  synth_cmd->add_option("--active-to", so.active_to,
                        "last frame of cyclic activity");
  synth_cmd->add_option("--glide-from", so.glide_from,
                        "first frame of a held glide inside the activity");
  synth_cmd->add_option("--glide-to", so.glide_to,
                        "last frame of a held glide inside the activity");
  synth_cmd->add_option("--drift", so.drift, "camera drift in px per frame");
  synth_cmd->add_option("--noise-sigma", so.noise_sigma,
                        "gaussian jitter sigma in px");
  synth_cmd->add_option("--dropout", so.dropout,
                        "probability a frame loses its detection");
  synth_cmd->add_option("--outliers", so.outliers,
                        "probability a frame gets a corrupted detection");
  synth_cmd->add_option("--signature", so.signature,
                        "athlete style signature; same value, same style");
  synth_cmd->add_option("--runup-cycles", so.runup_cycles,
                        "long jump run-up step pairs");
  synth_cmd->callback([&] { run_synth(g, so); });

  // cycles
  std::string cycles_input;
  MiningOptions cycles_mining;
  bool cycles_svg = false;
  CLI::App* cycles_cmd =
      add_cmd(app, "cycles", "mine cycle lengths and fit a speed curve");
  cycles_cmd->add_option("input", cycles_input, "pose file")->required();
  add_mining_options(cycles_cmd, cycles_mining);
  cycles_cmd->add_flag("--svg", cycles_svg, "also plot the curve as svg");
  cycles_cmd->callback(
      [&] { run_cycles(g, cycles_input, cycles_mining, cycles_svg); });

  // rate
  std::string rate_input;
  std::int64_t rate_frame = 0;
  MiningOptions rate_mining;
  CLI::App* rate_cmd =
      add_cmd(app, "rate", "cycle length and cycles per minute at one frame");
  rate_cmd->add_option("input", rate_input, "pose file")->required();
  rate_cmd->add_option("--frame", rate_frame, "frame to evaluate")->required();
  add_mining_options(rate_cmd, rate_mining);
  rate_cmd->callback([&] { run_rate(g, rate_input, rate_frame, rate_mining); });

  // salient
  std::string salient_input;
  SalientOptions sal;
  CLI::App* salient_cmd =
      add_cmd(app, "salient", "saliency profile and striking poses");
  salient_cmd->add_option("input", salient_input, "pose file")->required();
  salient_cmd->add_option("--top-n", sal.top_n,
                          "highest-saliency frames entering clustering");
  salient_cmd->add_option("--k", sal.k, "striking poses to keep");
  salient_cmd->add_option("--w-l", sal.w_l, "frame window half-width");
  salient_cmd->add_option("--w-s", sal.w_s, "temporal shift half-width");
  salient_cmd->add_flag("--normalized", sal.normalized,
                        "use scale-normalized alignment residuals");
  salient_cmd->callback([&] { run_salient(g, salient_input, sal); });

  // stability
  StabilityOptions st;
  CLI::App* stability_cmd = add_cmd(
      app, "stability", "match a reference clip against full sequences");
  stability_cmd->add_option("reference", st.reference, "reference pose file")
      ->required();
  stability_cmd->add_option("sequences", st.sequences, "pose files to search")
      ->required()
      ->expected(-1);
  stability_cmd->add_option("--from", st.from,
                            "first reference frame to keep");
  stability_cmd->add_option("--to", st.to, "last reference frame to keep");
  stability_cmd->add_option("--th-same", st.th_same,
                            "distance at or below which poses cost 0");
  stability_cmd->add_option("--th-diff", st.th_diff,
                            "distance at or above which poses cost 1");
  stability_cmd->add_option("--th-match", st.th_match,
                            "score below which an end point is a match");
  stability_cmd->callback([&] { run_stability(g, st); });

  // identify
  IdentifyOptions id;
  CLI::App* identify_cmd = add_cmd(
      app, "identify", "compare how well two athletes match a reference clip");
  identify_cmd->add_option("--reference", id.reference, "reference pose file")
      ->required();
  identify_cmd->add_option("--own", id.own, "sequence of the same athlete")
      ->required();
  identify_cmd->add_option("--other", id.other, "sequence of another athlete")
      ->required();
  identify_cmd->add_option("--from", id.from, "first reference frame to keep");
  identify_cmd->add_option("--to", id.to, "last reference frame to keep");
  identify_cmd->add_option("--th-same", id.th_same,
                           "distance at or below which poses cost 0");
  identify_cmd->add_option("--th-diff", id.th_diff,
                           "distance at or above which poses cost 1");
  identify_cmd->add_option("--th-match", id.th_match,
                           "score below which an end point is a match");
  identify_cmd->callback([&] { run_identify(g, id); });

  // phase
  CLI::App* phase_cmd =
      add_cmd(app, "phase", "train, apply and evaluate the jump phase model");
  phase_cmd->require_subcommand(1);

  PhaseTrainOptions pt;
  CLI::App* train_cmd =
      add_cmd(*phase_cmd, "train", "fit a phase model from labeled sequences");
  train_cmd->add_option("--poses", pt.poses, "training pose files")
      ->required()
      ->expected(-1);
  train_cmd->add_option("--events", pt.events, "ground truth event files")
      ->required()
      ->expected(-1);
  train_cmd->add_option("--k", pt.k, "codebook size");
  train_cmd->add_option("--smoothing", pt.smoothing,
                        "pseudo-count added to every model count");
  train_cmd->add_option("--max-codebook-items", pt.max_codebook_items,
                        "poses entering clustering before subsampling");
  train_cmd->callback([&] { run_phase_train(g, pt); });

  PhasePredictOptions pp;
  CLI::App* predict_cmd =
      add_cmd(*phase_cmd, "predict", "decode phases for pose sequences");
  predict_cmd->add_option("--model", pp.model, "phase model file")->required();
  predict_cmd->add_option("--poses", pp.poses, "pose files to decode")
      ->required()
      ->expected(-1);
  predict_cmd->add_option("--step-event", pp.step_event,
                          "which event type counts as a step")
      ->transform(CLI::CheckedTransformer(step_names, CLI::ignore_case));
  predict_cmd->callback([&] { run_phase_predict(g, pp); });

  PhaseEvalOptions pe;
  CLI::App* phase_eval_cmd = add_cmd(
      *phase_cmd, "eval",
      "mean average precision of detections against ground truth events");
  phase_eval_cmd->add_option("--truth", pe.truth, "ground truth event file")
      ->required();
  phase_eval_cmd->add_option("--tau", pe.tau, "IoU threshold");
  phase_eval_cmd->add_option("--detections", pe.detections,
                             "detection csv to score directly");
  phase_eval_cmd->add_option("--poses", pe.poses,
                             "pose files for cross validation")
      ->expected(-1);
  phase_eval_cmd->add_option("--folds", pe.folds, "fold assignment file");
  phase_eval_cmd->add_option("--k", pe.k, "codebook size");
  phase_eval_cmd->add_option("--smoothing", pe.smoothing,
                             "pseudo-count added to every model count");
  phase_eval_cmd->add_option("--max-codebook-items", pe.max_codebook_items,
                             "poses entering clustering before subsampling");
  phase_eval_cmd->add_option("--step-event", pe.step_event,
                             "which event type counts as a step")
      ->transform(CLI::CheckedTransformer(step_names, CLI::ignore_case));
  phase_eval_cmd->callback([&] { run_phase_eval(g, pe); });

  // eval
  CLI::App* eval_cmd =
      add_cmd(app, "eval", "score mined cycles against ground truth");
  eval_cmd->require_subcommand(1);

  EvalStrokeOptions es;
  CLI::App* stroke_cmd = add_cmd(
      *eval_cmd, "stroke", "cycle length error against point measurements");
  stroke_cmd->add_option("--poses", es.poses, "pose files to mine")
      ->required()
      ->expected(-1);
  stroke_cmd->add_option("--truth", es.truth, "stroke measurement file")
      ->required();
  stroke_cmd->add_option("--tolerance", es.tolerance,
                         "error bound separating measurements from outliers");
  add_mining_options(stroke_cmd, es.mining);
  stroke_cmd->callback([&] { run_eval_stroke(g, es); });

  EvalRangeOptions er;
  CLI::App* range_cmd = add_cmd(
      *eval_cmd, "range", "coverage of a known activity interval");
  range_cmd->add_option("--poses", er.poses, "pose file to mine")->required();
  range_cmd->add_option("--truth-first", er.truth_first,
                        "first frame of the true activity interval")
      ->required();
  range_cmd->add_option("--truth-last", er.truth_last,
                        "last frame of the true activity interval")
      ->required();
  add_mining_options(range_cmd, er.mining);
  range_cmd->callback([&] { run_eval_range(g, er); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_algorithmic(e) ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
