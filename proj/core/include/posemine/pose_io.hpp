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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "posemine/eval.hpp"
#include "posemine/phases.hpp"
#include "posemine/types.hpp"

namespace posemine {

/**
 * File formats: all artifacts are line-delimited text with a versioned
 * magic line, chosen for diff-ability and easy cross-language parsing.
 *
 *   #posemine-poses v1     header `# key: value` lines, then one record
 *                          per detected frame: `frame x1 y1 ... xN yN`
 *   #posemine-events v1    `video_id t1 t2 label` per line
 *   #posemine-stroke v1    `video_id frame cycle_length` per line
 *   #posemine-folds v1     `video_id fold` per line
 *   #posemine-model v1     serialized PhaseModel
 *
 * Floating point values are written in shortest round-trip form, so a
 * write/read cycle reproduces every coordinate bit-exactly.  Malformed
 * lines raise ParseError with the 1-based line number; structural problems
 * (bad magic, missing header fields, inconsistent joint counts, frames out
 * of order) raise SchemaError.
 */

/// @throws ParseError, SchemaError; the sequence is validated before return.
PoseSequence read_poses(const std::filesystem::path& path);

/// Writes atomically (temp file + rename).  `source` tags the producing
/// detector in the header.
void write_poses(const PoseSequence& seq, const std::filesystem::path& path,
                 const std::string& source = "unknown");

std::vector<TruthEvent> read_events(const std::filesystem::path& path);
void write_events(const std::vector<TruthEvent>& events,
                  const std::filesystem::path& path);

std::vector<StrokeTruth> read_stroke_truth(const std::filesystem::path& path);
void write_stroke_truth(const std::vector<StrokeTruth>& rows,
                        const std::filesystem::path& path);

/// One video's fold assignment for cross-validated evaluation.
struct FoldEntry {
  std::string video_id;
  int fold = 0;
};

std::vector<FoldEntry> read_folds(const std::filesystem::path& path);
void write_folds(const std::vector<FoldEntry>& folds,
                 const std::filesystem::path& path);

/// Model serialization round-trips every probability and medoid coordinate
/// bit-exactly.
PhaseModel read_model(const std::filesystem::path& path);
void write_model(const PhaseModel& model, const std::filesystem::path& path);

/// Writes content to a temp file next to `path`, then renames it into
/// place, so readers never observe a partial file.
void write_text_atomic(const std::filesystem::path& path,
                       std::string_view content);

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

}  // namespace posemine
