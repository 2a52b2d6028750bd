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
#include "artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "posemine/pose_io.hpp"

namespace posemine::tools {

namespace {

/// Two-decimal rounding keeps plot coordinates short and reproducible.
std::string px(double value) {
  return format_double(std::round(value * 100.0) / 100.0);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::vector<std::int64_t> frames_of(const PoseSequence& seq) {
  std::vector<std::int64_t> frames;
  frames.reserve(seq.poses.size());
  for (const TimedPose& tp : seq.poses) frames.push_back(tp.frame);
  return frames;
}

std::vector<Pose> poses_of(const PoseSequence& seq) {
  std::vector<Pose> poses;
  poses.reserve(seq.poses.size());
  for (const TimedPose& tp : seq.poses) poses.push_back(tp.pose);
  return poses;
}

std::vector<Phase> labels_from_events(const PoseSequence& seq,
                                      const std::vector<TruthEvent>& events) {
  std::vector<Phase> labels;
  labels.reserve(seq.poses.size());
  for (const TimedPose& tp : seq.poses) {
    const TruthEvent* found = nullptr;
    for (const TruthEvent& ev : events) {
      if (ev.video_id == seq.video_id && ev.span.contains(tp.frame)) {
        found = &ev;
        break;
      }
    }
    if (found == nullptr) {
      throw InvalidSpecError("no event labels frame " +
                             std::to_string(tp.frame) + " of video '" +
                             seq.video_id + "'");
    }
    labels.push_back(found->label);
  }
  return labels;
}

std::vector<Pose> clip_poses(const PoseSequence& seq,
                             std::optional<std::int64_t> from,
                             std::optional<std::int64_t> to) {
  std::vector<Pose> poses;
  for (const TimedPose& tp : seq.poses) {
    if (from && tp.frame < *from) continue;
    if (to && tp.frame > *to) continue;
    poses.push_back(tp.pose);
  }
  if (poses.size() < 2) {
    throw InvalidSpecError("reference clip needs at least 2 poses, got " +
                           std::to_string(poses.size()));
  }
  return poses;
}

void write_detections_csv(const std::vector<DetectedEvent>& detections,
                          const std::filesystem::path& path) {
  std::string out = "video_id,t1,t2,label,confidence\n";
  for (const DetectedEvent& det : detections) {
    out += det.video_id;
    out += ',';
    out += std::to_string(det.span.first);
    out += ',';
    out += std::to_string(det.span.last);
    out += ',';
    out += phase_name(det.label);
    out += ',';
    out += format_double(det.confidence);
    out += '\n';
  }
  write_text_atomic(path, out);
}

std::vector<DetectedEvent> read_detections_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open file: " + path.string());
  }
  std::string line;
  std::size_t row = 0;
  std::vector<DetectedEvent> detections;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (row == 1) {
      if (line != "video_id,t1,t2,label,confidence") {
        throw SchemaError("unexpected detection table header in " +
                          path.string());
      }
      continue;
    }
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 5) {
      throw ParseError("expected 5 comma separated fields", row);
    }
    DetectedEvent det;
    det.video_id = fields[0];
    try {
      det.span.first = std::stoll(fields[1]);
      det.span.last = std::stoll(fields[2]);
      det.confidence = std::stod(fields[4]);
    } catch (const std::exception&) {
      throw ParseError("invalid number in detection row", row);
    }
    const std::optional<Phase> label = parse_phase(fields[3]);
    if (!label) {
      throw ParseError("unknown phase label '" + fields[3] + "'", row);
    }
    det.label = *label;
    detections.push_back(std::move(det));
  }
  return detections;
}

std::string curve_svg(const CycleMiningResult& result) {
  constexpr double kWidth = 1000.0;
  constexpr double kHeight = 420.0;
  constexpr double kLeft = 60.0;
  constexpr double kRight = 20.0;
  constexpr double kTop = 20.0;
  constexpr double kBottom = 50.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" "
      "height=\"420\" viewBox=\"0 0 1000 420\">\n"
      "<rect width=\"1000\" height=\"420\" fill=\"white\"/>\n";

  if (result.raw_points.empty()) {
    svg += "<text x=\"500\" y=\"210\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">no cycle-length "
           "samples</text>\n</svg>\n";
    return svg;
  }

  std::int64_t x_min = result.raw_points.front().frame;
  std::int64_t x_max = x_min;
  double y_max = 1.0;
  for (const DifferencePoint& p : result.raw_points) {
    x_min = std::min(x_min, p.frame);
    x_max = std::max(x_max, p.frame);
    y_max = std::max(y_max, static_cast<double>(p.diff));
  }
  for (const FrameInterval& r : result.curve.ranges) {
    x_min = std::min(x_min, r.first);
    x_max = std::max(x_max, r.last);
    for (std::int64_t f = r.first; f <= r.last; ++f) {
      y_max = std::max(y_max, result.curve.value_at(f));
    }
  }
  if (x_max == x_min) x_max = x_min + 1;
  y_max *= 1.08;

  const auto sx = [&](double frame) {
    return kLeft + (frame - static_cast<double>(x_min)) * plot_w /
                       static_cast<double>(x_max - x_min);
  };
  const auto sy = [&](double value) {
    return kTop + plot_h - value * plot_h / y_max;
  };

  // Axes with end labels.
  svg += "<g stroke=\"#444\" stroke-width=\"1\">\n";
  svg += "<line x1=\"" + px(kLeft) + "\" y1=\"" + px(kTop + plot_h) +
         "\" x2=\"" + px(kLeft + plot_w) + "\" y2=\"" + px(kTop + plot_h) +
         "\"/>\n";
  svg += "<line x1=\"" + px(kLeft) + "\" y1=\"" + px(kTop) + "\" x2=\"" +
         px(kLeft) + "\" y2=\"" + px(kTop + plot_h) + "\"/>\n";
  svg += "</g>\n<g font-family=\"sans-serif\" font-size=\"12\" "
         "fill=\"#222\">\n";
  svg += "<text x=\"" + px(kLeft) + "\" y=\"" + px(kHeight - 14.0) +
         "\">frame " + std::to_string(x_min) + "</text>\n";
  svg += "<text x=\"" + px(kLeft + plot_w) + "\" y=\"" + px(kHeight - 14.0) +
         "\" text-anchor=\"end\">frame " + std::to_string(x_max) +
         "</text>\n";
  svg += "<text x=\"" + px(kLeft - 6.0) + "\" y=\"" + px(kTop + 10.0) +
         "\" text-anchor=\"end\">" + px(y_max) + "</text>\n";
  svg += "<text x=\"" + px(kLeft - 6.0) + "\" y=\"" + px(kTop + plot_h) +
         "\" text-anchor=\"end\">0</text>\n";
  svg += "<text x=\"14\" y=\"" + px(kTop + plot_h / 2.0) +
         "\" transform=\"rotate(-90 14 " + px(kTop + plot_h / 2.0) +
         ")\" text-anchor=\"middle\">cycle length (frames)</text>\n";
  svg += "</g>\n";

  // Rejected samples in gray, kept samples in blue.
  svg += "<g fill=\"#9aa0a6\" fill-opacity=\"0.7\">\n";
  for (std::size_t i = 0; i < result.raw_points.size(); ++i) {
    if (result.kept[i]) continue;
    const DifferencePoint& p = result.raw_points[i];
    svg += "<circle cx=\"" + px(sx(static_cast<double>(p.frame))) +
           "\" cy=\"" + px(sy(static_cast<double>(p.diff))) +
           "\" r=\"2\"/>\n";
  }
  svg += "</g>\n<g fill=\"#1a73e8\" fill-opacity=\"0.8\">\n";
  for (std::size_t i = 0; i < result.raw_points.size(); ++i) {
    if (!result.kept[i]) continue;
    const DifferencePoint& p = result.raw_points[i];
    svg += "<circle cx=\"" + px(sx(static_cast<double>(p.frame))) +
           "\" cy=\"" + px(sy(static_cast<double>(p.diff))) +
           "\" r=\"2\"/>\n";
  }
  svg += "</g>\n";

  // Fitted curve, one polyline per covered range.
  for (const FrameInterval& r : result.curve.ranges) {
    const std::int64_t stride = std::max<std::int64_t>(1, r.length() / 400);
    svg += "<polyline fill=\"none\" stroke=\"#d93025\" stroke-width=\"1.5\" "
           "points=\"";
    for (std::int64_t f = r.first; f <= r.last; f += stride) {
      svg += px(sx(static_cast<double>(f))) + "," +
             px(sy(result.curve.value_at(f))) + " ";
    }
    svg += px(sx(static_cast<double>(r.last))) + "," +
           px(sy(result.curve.value_at(r.last)));
    svg += "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace posemine::tools
