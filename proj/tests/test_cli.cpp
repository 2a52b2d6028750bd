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

// End-to-end checks of the posemine binary: artifact layout, exit codes,
// config file handling and byte-stable reruns.  The binary path comes in
// through POSEMINE_CLI_PATH at compile time.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = POSEMINE_CLI_PATH;

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() /
           ("posemine_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

int exit_code_of(int status) {
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

/// Runs the binary with stdout and stderr discarded; returns the exit code.
int run(const std::string& args) {
  const std::string cmd = q(kCli) + " " + args + " > /dev/null 2>&1";
  return exit_code_of(std::system(cmd.c_str()));
}

/// Runs the binary from inside `dir` with output logged to dir/logs/<log>,
/// so relative paths and captured stdout take part in rerun comparisons.
int run_in(const fs::path& dir, const std::string& args,
           const std::string& log) {
  fs::create_directories(dir / "logs");
  const std::string cmd = "cd " + q(dir) + " && " + q(kCli) + " " + args +
                          " > logs/" + log + " 2>&1";
  return exit_code_of(std::system(cmd.c_str()));
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

/// Relative paths of every regular file below root, sorted.
std::vector<std::string> tree(const fs::path& root) {
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      files.push_back(fs::relative(entry.path(), root).string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

/// Rows of a CSV file with the header dropped.
std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

TEST_CASE("cyclic pipeline writes the documented artifacts") {
  TempDir t;
  const fs::path synth_dir = t.path / "synth";
  const fs::path cycles_dir = t.path / "cycles";
  REQUIRE(run("synth --out-dir " + q(synth_dir) +
              " --duration 12 --noise-sigma 1 --seed 7 --video-id clip1") ==
          0);
  for (const char* name : {"poses.txt", "truth_cycles.csv",
                           "truth_striking.csv", "truth_anomalies.csv",
                           "effective_config.json"}) {
    CHECK_MESSAGE(fs::exists(synth_dir / name), name);
  }

  REQUIRE(run("cycles " + q(synth_dir / "poses.txt") + " --out-dir " +
              q(cycles_dir) + " --svg") == 0);
  for (const char* name : {"curve.csv", "fitted.csv", "ranges.csv",
                           "curve.svg", "effective_config.json"}) {
    CHECK_MESSAGE(fs::exists(cycles_dir / name), name);
  }

  const auto config = nlohmann::json::parse(
      slurp(cycles_dir / "effective_config.json"));
  CHECK(config.at("command") == "cycles");
  CHECK(config.at("seed") == 1);
  CHECK(config.at("cycles").at("svg") == true);
  CHECK(config.at("cycles").at("match-threshold") == 49.0);

  // The modulation-free clip cycles at 60 frames, so every fitted value
  // should sit close to that and the curve should cover most of the clip.
  const auto fitted = read_csv(cycles_dir / "fitted.csv");
  REQUIRE(fitted.size() > 450);
  for (const auto& row : fitted) {
    REQUIRE(row.size() == 3);
    const double value = std::stod(row[1]);
    CHECK(value > 55.0);
    CHECK(value < 65.0);
  }

  std::int64_t covered = 0;
  bool any_detected = false;
  for (const auto& row : read_csv(cycles_dir / "ranges.csv")) {
    REQUIRE(row.size() == 3);
    if (row[0] == "detected") {
      any_detected = true;
      covered += std::stoll(row[2]) - std::stoll(row[1]) + 1;
    }
  }
  CHECK(any_detected);
  CHECK(covered == static_cast<std::int64_t>(fitted.size()));

  const auto curve = read_csv(cycles_dir / "curve.csv");
  CHECK(curve.size() >= fitted.size());
  for (const auto& row : curve) {
    REQUIRE(row.size() == 4);
    CHECK((row[2] == "0" || row[2] == "1"));
  }

  // rate at a covered frame agrees with the fitted table.
  const fs::path rate_dir = t.path / "rate";
  REQUIRE(run("rate " + q(synth_dir / "poses.txt") +
              " --frame 300 --out-dir " + q(rate_dir)) == 0);
  const auto rate_rows = read_csv(rate_dir / "rate.csv");
  REQUIRE(rate_rows.size() == 1);
  for (const auto& row : fitted) {
    if (row[0] == "300") {
      CHECK(rate_rows[0][1] == row[1]);
      CHECK(rate_rows[0][2] == row[2]);
    }
  }
}

TEST_CASE("exit codes separate usage, input and algorithmic failures") {
  TempDir t;
  CHECK(run("--help") == 0);
  CHECK(run("--version") == 0);
  CHECK(run("") == 2);
  CHECK(run("no-such-command") == 2);
  CHECK(run("cycles") == 2);
  CHECK(run("cycles --no-such-flag x") == 2);
  CHECK(run("cycles " + q(t.path / "missing.txt") + " --out-dir " +
            q(t.path / "out")) == 2);

  // A structurally valid pose file without records is an input error and
  // must not leave artifacts behind.
  const fs::path empty = t.path / "empty.txt";
  {
    std::ofstream out(empty);
    out << "#posemine-poses v1\n# video_id: e\n# fps: 50\n# joint_count: 2\n";
  }
  const fs::path empty_out = t.path / "empty_out";
  CHECK(run("cycles " + q(empty) + " --out-dir " + q(empty_out)) == 2);
  CHECK(!fs::exists(empty_out));

  const fs::path synth_dir = t.path / "synth";
  REQUIRE(run("synth --out-dir " + q(synth_dir) +
              " --duration 12 --seed 7 --video-id clip1") == 0);

  // Frame 590 lies beyond the last difference sample of a 600 frame clip,
  // outside curve coverage: an algorithmic failure, not a usage one.
  CHECK(run("rate " + q(synth_dir / "poses.txt") +
            " --frame 590 --out-dir " + q(t.path / "r")) == 3);

  // More striking poses requested than frames exist.
  CHECK(run("salient " + q(synth_dir / "poses.txt") +
            " --top-n 100000 --out-dir " + q(t.path / "s")) == 3);
}

TEST_CASE("reruns with identical arguments are byte identical") {
  TempDir a, b;
  auto drive = [](const fs::path& root) {
    CHECK(run_in(root,
                 "synth --out-dir out/synth --duration 12 --noise-sigma 1 "
                 "--seed 7 --video-id clip1",
                 "synth.log") == 0);
    CHECK(run_in(root,
                 "cycles out/synth/poses.txt --out-dir out/cycles --svg",
                 "cycles.log") == 0);
    CHECK(run_in(root, "salient out/synth/poses.txt --out-dir out/salient",
                 "salient.log") == 0);
  };
  drive(a.path);
  drive(b.path);

  const auto files_a = tree(a.path);
  const auto files_b = tree(b.path);
  REQUIRE(files_a == files_b);
  CHECK(files_a.size() >= 12);
  for (const std::string& rel : files_a) {
    CHECK_MESSAGE(slurp(a.path / rel) == slurp(b.path / rel), rel);
  }
}

TEST_CASE("config file values apply and command line flags win") {
  TempDir t;
  const fs::path conf = t.path / "conf.json";
  {
    std::ofstream out(conf);
    out << "{\n"
           "  \"seed\": 99,\n"
           "  \"synth\": {\"duration\": 4, \"video-id\": \"fromcfg\", "
           "\"noise-sigma\": 1}\n"
           "}\n";
  }

  const fs::path out1 = t.path / "out1";
  REQUIRE(run("--config " + q(conf) + " synth --out-dir " + q(out1)) == 0);
  auto cfg = nlohmann::json::parse(slurp(out1 / "effective_config.json"));
  CHECK(cfg.at("seed") == 99);
  CHECK(cfg.at("synth").at("duration") == 4.0);
  CHECK(cfg.at("synth").at("video-id") == "fromcfg");
  CHECK(slurp(out1 / "poses.txt").find("# video_id: fromcfg") !=
        std::string::npos);

  const fs::path out2 = t.path / "out2";
  REQUIRE(run("--config " + q(conf) + " synth --video-id cliwins --out-dir " +
              q(out2)) == 0);
  cfg = nlohmann::json::parse(slurp(out2 / "effective_config.json"));
  CHECK(cfg.at("synth").at("video-id") == "cliwins");
  CHECK(cfg.at("synth").at("duration") == 4.0);

  const fs::path bad = t.path / "bad.json";
  {
    std::ofstream out(bad);
    out << "not json";
  }
  CHECK(run("--config " + q(bad) + " synth --out-dir " + q(t.path / "x")) ==
        2);
}

TEST_CASE("stability and identify artifacts line up with their inputs") {
  TempDir t;
  REQUIRE(run("synth --out-dir " + q(t.path / "ref") +
              " --duration 8 --signature 5 --seed 11 --video-id refclip") ==
          0);
  REQUIRE(run("synth --out-dir " + q(t.path / "own") +
              " --duration 20 --signature 5 --noise-sigma 1 --seed 12 "
              "--video-id ownclip") == 0);
  REQUIRE(run("synth --out-dir " + q(t.path / "oth") +
              " --duration 20 --signature 900 --noise-sigma 1 --seed 13 "
              "--video-id otherclip") == 0);
  const std::string ref = q(t.path / "ref" / "poses.txt");
  const std::string own = q(t.path / "own" / "poses.txt");
  const std::string oth = q(t.path / "oth" / "poses.txt");

  const fs::path stab = t.path / "stab";
  REQUIRE(run("stability " + ref + " " + own + " " + oth +
              " --from 60 --to 119 --out-dir " + q(stab)) == 0);

  // One score per text pose of each searched sequence (20 s at 50 fps).
  const auto scores = read_csv(stab / "scores.csv");
  CHECK(scores.size() == 2000);
  const auto matches = read_csv(stab / "matches.csv");
  REQUIRE(!matches.empty());
  for (const auto& row : matches) {
    REQUIRE(row.size() == 4);
    CHECK(std::stod(row[3]) < 0.3);
    CHECK(std::stoll(row[1]) <= std::stoll(row[2]));
  }
  const auto alignments = read_csv(stab / "alignments.csv");
  REQUIRE(!alignments.empty());
  CHECK(alignments.front().size() == 6);

  // The same-athlete sequence must match the reference clip better than
  // the stranger's sequence.
  const fs::path ident = t.path / "ident";
  REQUIRE(run("identify --reference " + ref + " --own " + own + " --other " +
              oth + " --from 60 --to 119 --out-dir " + q(ident)) == 0);
  const auto ratio = read_csv(ident / "ratio.csv");
  REQUIRE(ratio.size() == 1);
  CHECK(std::stod(ratio[0][1]) < std::stod(ratio[0][2]));

  // Distance thresholds so harsh that every jittered pose costs ~1 leave
  // no match below the score threshold: an algorithmic failure, but the
  // score curve is still written for inspection.
  const fs::path none = t.path / "none";
  CHECK(run("stability " + ref + " " + own + " --from 60 --to 119 "
            "--th-same 0.0001 --th-diff 0.0002 --out-dir " + q(none)) == 3);
  CHECK(fs::exists(none / "scores.csv"));
}

TEST_CASE("phase pipeline trains, predicts and cross validates") {
  TempDir t;
  for (int i = 1; i <= 4; ++i) {
    REQUIRE(run("synth --kind longjump --out-dir " +
                q(t.path / ("lj" + std::to_string(i))) + " --signature " +
                std::to_string(20 + i) + " --seed " + std::to_string(40 + i) +
                " --noise-sigma 0.5 --video-id trial" + std::to_string(i)) ==
            0);
  }
  auto poses = [&](int i) {
    return q(t.path / ("lj" + std::to_string(i)) / "poses.txt");
  };
  auto events = [&](int i) {
    return q(t.path / ("lj" + std::to_string(i)) / "truth_events.txt");
  };

  const fs::path model_dir = t.path / "model";
  REQUIRE(run("phase train --poses " + poses(1) + " " + poses(2) + " " +
              poses(3) + " --events " + events(1) + " " + events(2) + " " +
              events(3) + " --k 40 --seed 3 --out-dir " + q(model_dir)) == 0);
  REQUIRE(fs::exists(model_dir / "model.txt"));

  const fs::path pred_dir = t.path / "pred";
  REQUIRE(run("phase predict --model " + q(model_dir / "model.txt") +
              " --poses " + poses(4) + " --out-dir " + q(pred_dir)) == 0);
  CHECK(fs::exists(pred_dir / "pred_trial4_labels.csv"));
  CHECK(fs::exists(pred_dir / "pred_events.txt"));

  // Step count and run-up duration must agree with the generator's truth.
  const auto kin = read_csv(pred_dir / "kinematics.csv");
  REQUIRE(kin.size() == 1);
  const auto truth_kin = read_csv(t.path / "lj4" / "truth_kinematics.csv");
  REQUIRE(truth_kin.size() == 1);
  CHECK(kin[0][1] == truth_kin[0][1]);
  const double fps = 50.0;
  const double truth_runup = (std::stod(truth_kin[0][2]) -
                              std::stod(truth_kin[0][3])) / fps;
  CHECK(std::abs(std::stod(kin[0][2]) - truth_runup) <= 0.06);

  // Decoded labels cover every frame of the input clip.
  const auto labels = read_csv(pred_dir / "pred_trial4_labels.csv");
  const auto truth_labels = read_csv(t.path / "lj4" / "truth_labels.csv");
  CHECK(labels.size() == truth_labels.size());

  // Scoring the held-out clip against its own truth.
  const fs::path eval_a = t.path / "eval_a";
  REQUIRE(run("phase eval --truth " + events(4) + " --detections " +
              q(pred_dir / "pred_detections.csv") + " --out-dir " +
              q(eval_a)) == 0);
  const auto eval_rows = read_csv(eval_a / "phase_eval.csv");
  REQUIRE(eval_rows.size() == 6);
  CHECK(eval_rows.back()[0] == "mean");
  CHECK(std::stod(eval_rows.back()[1]) >= 0.8);

  // Two-fold cross validation over all four clips.
  std::vector<std::string> all_events;
  for (int i = 1; i <= 4; ++i) {
    const auto lines = slurp(t.path / ("lj" + std::to_string(i)) /
                             "truth_events.txt");
    all_events.push_back(lines);
  }
  const fs::path truth_all = t.path / "all_events.txt";
  {
    std::ofstream out(truth_all);
    out << "#posemine-events v1\n";
    for (const std::string& content : all_events) {
      std::istringstream in(content);
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') out << line << "\n";
      }
    }
  }
  const fs::path folds = t.path / "folds.txt";
  {
    std::ofstream out(folds);
    out << "#posemine-folds v1\ntrial1 0\ntrial2 0\ntrial3 1\ntrial4 1\n";
  }
  const fs::path eval_b = t.path / "eval_b";
  REQUIRE(run("phase eval --truth " + q(truth_all) + " --poses " + poses(1) +
              " " + poses(2) + " " + poses(3) + " " + poses(4) + " --folds " +
              q(folds) + " --k 40 --seed 3 --out-dir " + q(eval_b)) == 0);
  const auto cv_rows = read_csv(eval_b / "phase_eval.csv");
  CHECK(std::stod(cv_rows.back()[1]) >= 0.8);
  CHECK(read_csv(eval_b / "kinematics.csv").size() == 4);

  // Exactly one evaluation mode may be selected.
  CHECK(run("phase eval --truth " + q(truth_all) + " --out-dir " +
            q(t.path / "m0")) == 2);
  CHECK(run("phase eval --truth " + q(truth_all) + " --detections " +
            q(pred_dir / "pred_detections.csv") + " --folds " + q(folds) +
            " --out-dir " + q(t.path / "m2")) == 2);

  // Training is seed-stable: a second run reproduces the model file.
  const fs::path model2 = t.path / "model2";
  REQUIRE(run("phase train --poses " + poses(1) + " " + poses(2) + " " +
              poses(3) + " --events " + events(1) + " " + events(2) + " " +
              events(3) + " --k 40 --seed 3 --out-dir " + q(model2)) == 0);
  CHECK(slurp(model_dir / "model.txt") == slurp(model2 / "model.txt"));
}

TEST_CASE("eval stroke and range summarize mining accuracy") {
  TempDir t;
  const fs::path synth_dir = t.path / "synth";
  REQUIRE(run("synth --out-dir " + q(synth_dir) +
              " --duration 12 --noise-sigma 1 --seed 7 --video-id clip1") ==
          0);

  const fs::path stroke_truth = t.path / "stroke.txt";
  {
    std::ofstream out(stroke_truth);
    out << "#posemine-stroke v1\n"
           "clip1 100 60\n"
           "clip1 300 60\n"
           "clip1 9999 60\n";
  }
  const fs::path stroke_dir = t.path / "stroke";
  REQUIRE(run("eval stroke --poses " + q(synth_dir / "poses.txt") +
              " --truth " + q(stroke_truth) + " --out-dir " +
              q(stroke_dir)) == 0);
  const auto stroke_rows = read_csv(stroke_dir / "stroke_eval.csv");
  REQUIRE(stroke_rows.size() == 1);
  CHECK(std::stod(stroke_rows[0][0]) <= 1.0);
  CHECK(stroke_rows[0][1] == "2");
  CHECK(stroke_rows[0][3] == "1");

  const fs::path range_dir = t.path / "range";
  REQUIRE(run("eval range --poses " + q(synth_dir / "poses.txt") +
              " --truth-first 0 --truth-last 599 --out-dir " +
              q(range_dir)) == 0);
  const auto range_rows = read_csv(range_dir / "range_eval.csv");
  REQUIRE(range_rows.size() == 1);
  CHECK(range_rows[0][0] == "clip1");
  CHECK(std::stod(range_rows[0][1]) >= 80.0);
  CHECK(std::stod(range_rows[0][2]) <= 10.0);
}
