#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mapseg/pipelines.hpp"
#include "mapseg/synth.hpp"

// Key/value configuration files:
//
//   # comment
//   preset = desk          (pipeline files only: "full" or "desk")
//   [task1]
//   area_close = 1000
//   [task3_uwb.refine]
//   window = 5
//
// Every key is optional and overrides the preset. Unknown sections, keys
// or malformed values raise FormatError naming the line.
namespace mapseg::config {

struct Entry {
  std::string key;  // "section.name"; top-level keys have no section
  std::string value;
  int line = 0;
};

std::vector<Entry> parse(std::string_view text);

/// Starts from the preset named in the text (default "full") and applies
/// every entry. The result is validated.
pipelines::PipelineConfig pipeline_from_text(std::string_view text);
/// `spec` is a file path or one of the preset names "full" and "desk".
pipelines::PipelineConfig load_pipeline(const std::string& spec);
std::string to_text(const pipelines::PipelineConfig& cfg);

/// Starts from the default SheetSpec.
synth::SheetSpec sheet_from_text(std::string_view text);
/// `spec` is a file path or "default".
synth::SheetSpec load_sheet(const std::string& spec);
std::string to_text(const synth::SheetSpec& spec);

/// Throws PreconditionError naming the first out-of-range field.
void validate(const pipelines::PipelineConfig& cfg);
void validate(const synth::SheetSpec& spec);

}  // namespace mapseg::config
