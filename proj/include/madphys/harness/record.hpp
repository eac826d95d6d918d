#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "madphys/harness/episode.hpp"

namespace madphys::harness {

nlohmann::json to_json(const EpisodeRecord& record);
/// Throws ConfigError on schema mismatches.
EpisodeRecord record_from_json(const nlohmann::json& value);

/// JSON-Lines: one record per line.
void write_records(const std::string& path, const std::vector<EpisodeRecord>& records, bool append = false);
std::vector<EpisodeRecord> read_records(const std::string& path);

struct ReplayResult {
  bool identical = true;
  /// Transcript index of the first differing response (-1 for the briefing).
  std::optional<long> first_mismatch;
  std::string detail;
  std::optional<double> score;
};

/// Rebuilds the episode from the logged config and stream offsets, feeds
/// the logged agent messages, and compares every envelope bitwise (as
/// serialized JSON) with the log.
ReplayResult replay(const EpisodeRecord& record);

}  // namespace madphys::harness
