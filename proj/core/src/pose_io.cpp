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
#include "posemine/pose_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace posemine {

namespace {

constexpr std::string_view kPoseMagic = "#posemine-poses v1";
constexpr std::string_view kEventsMagic = "#posemine-events v1";
constexpr std::string_view kStrokeMagic = "#posemine-stroke v1";
constexpr std::string_view kFoldsMagic = "#posemine-folds v1";
constexpr std::string_view kModelMagic = "#posemine-model v1";

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open file: " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void check_magic(const std::vector<std::string>& lines, std::string_view magic,
                 const std::filesystem::path& path) {
  if (lines.empty() || lines.front() != magic) {
    throw SchemaError("missing magic line '" + std::string(magic) +
                      "' in " + path.string());
  }
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

double parse_double(std::string_view token, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError("invalid number '" + std::string(token) + "'", line);
  }
  return value;
}

std::int64_t parse_int(std::string_view token, std::size_t line) {
  std::int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError("invalid integer '" + std::string(token) + "'", line);
  }
  return value;
}

void require_plain_id(const std::string& video_id) {
  if (video_id.empty() ||
      video_id.find_first_of(" \t\r\n") != std::string::npos) {
    throw InvalidSpecError("video_id must be non-empty without whitespace: '" +
                           video_id + "'");
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) {
    throw Error("failed to format a floating point value");
  }
  return std::string(buf, ptr);
}

void write_text_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  const std::filesystem::path parent = path.parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) {
      throw Error("cannot create directory " + parent.string() + ": " +
                  ec.message());
    }
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error("cannot write file: " + tmp.string());
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw Error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error("cannot rename " + tmp.string() + " to " + path.string() +
                ": " + ec.message());
  }
}

PoseSequence read_poses(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  check_magic(lines, kPoseMagic, path);

  std::map<std::string, std::string, std::less<>> header;
  std::size_t row = 1;
  for (; row < lines.size(); ++row) {
    const std::string& line = lines[row];
    if (line.empty()) continue;
    if (line[0] != '#') break;
    // Header lines look like `# key: value`.
    const std::size_t colon = line.find(':');
    if (line.size() < 2 || line[1] != ' ' || colon == std::string::npos) {
      throw ParseError("malformed header line", row + 1);
    }
    std::string key = line.substr(2, colon - 2);
    std::string value =
        colon + 2 <= line.size() ? line.substr(colon + 2) : std::string();
    header[std::move(key)] = std::move(value);
  }

  for (const char* required : {"video_id", "fps", "joint_count"}) {
    if (header.find(required) == header.end()) {
      throw SchemaError(std::string("missing header field '") + required +
                        "' in " + path.string());
    }
  }

  PoseSequence seq;
  seq.video_id = header["video_id"];
  seq.fps = parse_double(header["fps"], 0);
  if (!(seq.fps > 0.0)) {
    throw SchemaError("fps must be positive in " + path.string());
  }
  const std::int64_t joint_count_raw = parse_int(header["joint_count"], 0);
  if (joint_count_raw < 2) {
    throw SchemaError("joint_count must be at least 2 in " + path.string());
  }
  const std::size_t joint_count = static_cast<std::size_t>(joint_count_raw);
  if (const auto it = header.find("joints"); it != header.end()) {
    if (split_ws(it->second).size() != joint_count) {
      throw SchemaError("joint name table does not match joint_count in " +
                        path.string());
    }
  }

  for (; row < lines.size(); ++row) {
    const std::string& line = lines[row];
    if (line.empty()) continue;
    if (line[0] == '#') {
      throw ParseError("header line after first record", row + 1);
    }
    const std::vector<std::string_view> tokens = split_ws(line);
    if (tokens.size() != 1 + 2 * joint_count) {
      throw ParseError("expected " + std::to_string(1 + 2 * joint_count) +
                           " values, found " + std::to_string(tokens.size()),
                       row + 1);
    }
    TimedPose tp;
    tp.frame = parse_int(tokens[0], row + 1);
    if (!seq.poses.empty() && tp.frame <= seq.poses.back().frame) {
      throw SchemaError("frames out of order at line " +
                        std::to_string(row + 1) + " in " + path.string());
    }
    tp.pose.joints.resize(joint_count);
    for (std::size_t j = 0; j < joint_count; ++j) {
      tp.pose.joints[j].x = parse_double(tokens[1 + 2 * j], row + 1);
      tp.pose.joints[j].y = parse_double(tokens[2 + 2 * j], row + 1);
    }
    seq.poses.push_back(std::move(tp));
  }

  seq.validate();
  return seq;
}

void write_poses(const PoseSequence& seq, const std::filesystem::path& path,
                 const std::string& source) {
  if (seq.poses.empty()) {
    throw InvalidSpecError("cannot write an empty pose sequence");
  }
  seq.validate();
  require_plain_id(seq.video_id);
  const std::size_t joint_count = seq.poses.front().pose.size();
  if (joint_count < 2) {
    throw InvalidSpecError("poses need at least 2 joints");
  }

  std::string out;
  out += kPoseMagic;
  out += "\n# video_id: ";
  out += seq.video_id;
  out += "\n# fps: ";
  out += format_double(seq.fps);
  out += "\n# joint_count: ";
  out += std::to_string(joint_count);
  out += "\n# joints:";
  for (std::size_t j = 0; j < joint_count; ++j) {
    out += ' ';
    if (joint_count == kModelJointCount) {
      out += kModelJointNames[j];
    } else {
      out += 'j' + std::to_string(j);
    }
  }
  out += "\n# source: ";
  out += source;
  out += '\n';
  for (const TimedPose& tp : seq.poses) {
    out += std::to_string(tp.frame);
    for (const Point2& p : tp.pose.joints) {
      out += ' ';
      out += format_double(p.x);
      out += ' ';
      out += format_double(p.y);
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

std::vector<TruthEvent> read_events(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  check_magic(lines, kEventsMagic, path);
  std::vector<TruthEvent> events;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::string& line = lines[row];
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string_view> tokens = split_ws(line);
    if (tokens.size() != 4) {
      throw ParseError("expected 'video_id t1 t2 label'", row + 1);
    }
    TruthEvent ev;
    ev.video_id = std::string(tokens[0]);
    ev.span.first = parse_int(tokens[1], row + 1);
    ev.span.last = parse_int(tokens[2], row + 1);
    if (ev.span.first > ev.span.last) {
      throw ParseError("event interval is empty", row + 1);
    }
    const std::optional<Phase> label = parse_phase(tokens[3]);
    if (!label) {
      throw ParseError("unknown phase label '" + std::string(tokens[3]) + "'",
                       row + 1);
    }
    ev.label = *label;
    events.push_back(std::move(ev));
  }
  return events;
}

void write_events(const std::vector<TruthEvent>& events,
                  const std::filesystem::path& path) {
  std::string out;
  out += kEventsMagic;
  out += '\n';
  for (const TruthEvent& ev : events) {
    require_plain_id(ev.video_id);
    out += ev.video_id;
    out += ' ';
    out += std::to_string(ev.span.first);
    out += ' ';
    out += std::to_string(ev.span.last);
    out += ' ';
    out += phase_name(ev.label);
    out += '\n';
  }
  write_text_atomic(path, out);
}

std::vector<StrokeTruth> read_stroke_truth(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  check_magic(lines, kStrokeMagic, path);
  std::vector<StrokeTruth> rows;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::string& line = lines[row];
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string_view> tokens = split_ws(line);
    if (tokens.size() != 3) {
      throw ParseError("expected 'video_id frame cycle_length'", row + 1);
    }
    StrokeTruth st;
    st.video_id = std::string(tokens[0]);
    st.frame = parse_int(tokens[1], row + 1);
    st.cycle_length = parse_double(tokens[2], row + 1);
    rows.push_back(std::move(st));
  }
  return rows;
}

void write_stroke_truth(const std::vector<StrokeTruth>& rows,
                        const std::filesystem::path& path) {
  std::string out;
  out += kStrokeMagic;
  out += '\n';
  for (const StrokeTruth& st : rows) {
    require_plain_id(st.video_id);
    out += st.video_id;
    out += ' ';
    out += std::to_string(st.frame);
    out += ' ';
    out += format_double(st.cycle_length);
    out += '\n';
  }
  write_text_atomic(path, out);
}

std::vector<FoldEntry> read_folds(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  check_magic(lines, kFoldsMagic, path);
  std::vector<FoldEntry> folds;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::string& line = lines[row];
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string_view> tokens = split_ws(line);
    if (tokens.size() != 2) {
      throw ParseError("expected 'video_id fold'", row + 1);
    }
    FoldEntry entry;
    entry.video_id = std::string(tokens[0]);
    entry.fold = static_cast<int>(parse_int(tokens[1], row + 1));
    folds.push_back(std::move(entry));
  }
  return folds;
}

void write_folds(const std::vector<FoldEntry>& folds,
                 const std::filesystem::path& path) {
  std::string out;
  out += kFoldsMagic;
  out += '\n';
  for (const FoldEntry& entry : folds) {
    require_plain_id(entry.video_id);
    out += entry.video_id;
    out += ' ';
    out += std::to_string(entry.fold);
    out += '\n';
  }
  write_text_atomic(path, out);
}

namespace {

/// Sequential reader for the strict line-oriented model format.
class ModelReader {
 public:
  explicit ModelReader(const std::vector<std::string>& lines)
      : lines_(lines) {}

  std::vector<std::string_view> next(std::string_view keyword,
                                     std::size_t value_count) {
    while (row_ < lines_.size() && lines_[row_].empty()) ++row_;
    if (row_ >= lines_.size()) {
      throw ParseError("unexpected end of model file, expected '" +
                           std::string(keyword) + "'",
                       lines_.size());
    }
    const std::vector<std::string_view> tokens = split_ws(lines_[row_]);
    ++row_;
    if (tokens.empty() || tokens[0] != keyword ||
        tokens.size() != value_count + 1) {
      throw ParseError("expected '" + std::string(keyword) + "' with " +
                           std::to_string(value_count) + " values",
                       row_);
    }
    return {tokens.begin() + 1, tokens.end()};
  }

  std::size_t line() const { return row_; }

 private:
  const std::vector<std::string>& lines_;
  std::size_t row_ = 1;
};

}  // namespace

PhaseModel read_model(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  check_magic(lines, kModelMagic, path);
  ModelReader reader(lines);

  PhaseModel model;
  model.codebook.s_ref = parse_double(reader.next("s_ref", 1)[0], reader.line());
  model.smoothing =
      parse_double(reader.next("smoothing", 1)[0], reader.line());
  const std::int64_t joint_count =
      parse_int(reader.next("joint_count", 1)[0], reader.line());
  const std::int64_t k = parse_int(reader.next("k", 1)[0], reader.line());
  if (joint_count < 2 || k < 1) {
    throw SchemaError("invalid model dimensions in " + path.string());
  }

  const std::size_t n_joints = static_cast<std::size_t>(joint_count);
  model.codebook.medoids.resize(static_cast<std::size_t>(k));
  for (Pose& medoid : model.codebook.medoids) {
    const std::vector<std::string_view> tokens =
        reader.next("medoid", 2 * n_joints);
    medoid.joints.resize(n_joints);
    for (std::size_t j = 0; j < n_joints; ++j) {
      medoid.joints[j].x = parse_double(tokens[2 * j], reader.line());
      medoid.joints[j].y = parse_double(tokens[2 * j + 1], reader.line());
    }
  }

  {
    const std::vector<std::string_view> tokens =
        reader.next("prior", kPhaseCount);
    for (std::size_t h = 0; h < kPhaseCount; ++h) {
      model.prior[h] = parse_double(tokens[h], reader.line());
    }
  }
  for (std::size_t from = 0; from < kPhaseCount; ++from) {
    const std::vector<std::string_view> tokens =
        reader.next("transition", kPhaseCount);
    for (std::size_t to = 0; to < kPhaseCount; ++to) {
      model.transition[from][to] = parse_double(tokens[to], reader.line());
    }
  }
  model.emission.resize(static_cast<std::size_t>(k));
  for (auto& row : model.emission) {
    const std::vector<std::string_view> tokens =
        reader.next("emission", kPhaseCount);
    for (std::size_t h = 0; h < kPhaseCount; ++h) {
      row[h] = parse_double(tokens[h], reader.line());
    }
  }
  {
    const std::vector<std::string_view> tokens =
        reader.next("occupancy", static_cast<std::size_t>(k));
    model.cluster_occupancy.resize(static_cast<std::size_t>(k));
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
      model.cluster_occupancy[c] = parse_double(tokens[c], reader.line());
    }
  }
  model.phase_given_cluster.resize(static_cast<std::size_t>(k));
  for (auto& row : model.phase_given_cluster) {
    const std::vector<std::string_view> tokens =
        reader.next("phase_given_cluster", kPhaseCount);
    for (std::size_t h = 0; h < kPhaseCount; ++h) {
      row[h] = parse_double(tokens[h], reader.line());
    }
  }
  {
    const std::vector<std::string_view> tokens =
        reader.next("median_event_frames", kPhaseCount);
    for (std::size_t h = 0; h < kPhaseCount; ++h) {
      model.median_event_frames[h] = parse_double(tokens[h], reader.line());
    }
  }
  return model;
}

void write_model(const PhaseModel& model, const std::filesystem::path& path) {
  if (model.codebook.medoids.empty()) {
    throw InvalidSpecError("cannot write a model with an empty codebook");
  }
  const std::size_t n_joints = model.codebook.medoids.front().size();

  std::string out;
  out += kModelMagic;
  out += "\ns_ref ";
  out += format_double(model.codebook.s_ref);
  out += "\nsmoothing ";
  out += format_double(model.smoothing);
  out += "\njoint_count ";
  out += std::to_string(n_joints);
  out += "\nk ";
  out += std::to_string(model.codebook.medoids.size());
  out += '\n';
  for (const Pose& medoid : model.codebook.medoids) {
    out += "medoid";
    for (const Point2& p : medoid.joints) {
      out += ' ';
      out += format_double(p.x);
      out += ' ';
      out += format_double(p.y);
    }
    out += '\n';
  }
  out += "prior";
  for (double v : model.prior) {
    out += ' ';
    out += format_double(v);
  }
  out += '\n';
  for (const auto& row : model.transition) {
    out += "transition";
    for (double v : row) {
      out += ' ';
      out += format_double(v);
    }
    out += '\n';
  }
  for (const auto& row : model.emission) {
    out += "emission";
    for (double v : row) {
      out += ' ';
      out += format_double(v);
    }
    out += '\n';
  }
  out += "occupancy";
  for (double v : model.cluster_occupancy) {
    out += ' ';
    out += format_double(v);
  }
  out += '\n';
  for (const auto& row : model.phase_given_cluster) {
    out += "phase_given_cluster";
    for (double v : row) {
      out += ' ';
      out += format_double(v);
    }
    out += '\n';
  }
  out += "median_event_frames";
  for (double v : model.median_event_frames) {
    out += ' ';
    out += format_double(v);
  }
  out += '\n';
  write_text_atomic(path, out);
}

}  // namespace posemine
