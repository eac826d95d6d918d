#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "agents.hpp"
#include "madphys/core/error.hpp"
#include "madphys/harness/baselines.hpp"
#include "madphys/harness/presets.hpp"
#include "madphys/harness/record.hpp"

using namespace madphys;
using namespace madphys::harness;
using nlohmann::json;

namespace {

EpisodeRecord sample_record(EnvironmentKind kind, BaselinePolicy policy = BaselinePolicy::Random) {
  const EpisodeConfig config = make_preset(kind, "normal", PresetScale::Quick, 11);
  auto agent = make_baseline(policy, 4);
  return run_episode(config, *agent, "sample-0");
}

}  // namespace

TEST(Record, JsonRoundTrip) {
  const EpisodeRecord record = sample_record(EnvironmentKind::Classical);
  const json first = to_json(record);
  EXPECT_EQ(first.at("schema_version"), kRecordSchemaVersion);
  const EpisodeRecord back = record_from_json(first);
  EXPECT_EQ(to_json(back), first);
  EXPECT_EQ(back.transcript.size(), record.transcript.size());
  EXPECT_EQ(back.score, record.score);
}

TEST(Record, SchemaVersionIsChecked) {
  json value = to_json(sample_record(EnvironmentKind::Classical));
  value["schema_version"] = kRecordSchemaVersion + 1;
  EXPECT_THROW(record_from_json(value), ConfigError);
  value = to_json(sample_record(EnvironmentKind::Classical));
  value.erase("transcript");
  EXPECT_THROW(record_from_json(value), ConfigError);
}

TEST(Record, JsonLinesFile) {
  const std::string path = ::testing::TempDir() + "madphys_records.jsonl";
  std::remove(path.c_str());
  const EpisodeRecord a = sample_record(EnvironmentKind::Classical);
  const EpisodeRecord b = sample_record(EnvironmentKind::Quantum, BaselinePolicy::Grid);
  write_records(path, {a});
  write_records(path, {b}, true);
  const auto back = read_records(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(to_json(back[0]), to_json(a));
  EXPECT_EQ(to_json(back[1]), to_json(b));
  std::ifstream in(path);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 2);
  write_records(path, {a});
  EXPECT_EQ(read_records(path).size(), 1u);
  std::remove(path.c_str());
}

TEST(Record, ReplayIsIdenticalInEveryDomain) {
  for (auto kind : {EnvironmentKind::Classical, EnvironmentKind::Fluid, EnvironmentKind::Quantum}) {
    const EpisodeRecord record = sample_record(kind);
    const ReplayResult result = replay(record_from_json(json::parse(to_json(record).dump())));
    EXPECT_TRUE(result.identical) << to_string(kind) << ": " << result.detail;
    EXPECT_EQ(result.score, record.score);
  }
}

TEST(Record, ReplayDetectsTampering) {
  EpisodeRecord record = sample_record(EnvironmentKind::Classical);
  ASSERT_GT(record.transcript.size(), 2u);
  record.transcript[1].response["payload"]["budget_remaining"] = 12345.0;
  const ReplayResult result = replay(record);
  EXPECT_FALSE(result.identical);
  EXPECT_EQ(result.first_mismatch.value(), 1);
}

TEST(Record, ReplayOfIclEpisodeUsesStreamOffsets) {
  EpisodeConfig config = make_preset(EnvironmentKind::Classical, "normal", PresetScale::Quick, 6);
  config.variant.kind = VariantKind::Icl;
  config.variant.num_episodes = 3;
  auto agent = make_baseline(BaselinePolicy::Random, 1);
  const auto records = run_trials(config, *agent, "icl");
  ASSERT_EQ(records.size(), 3u);
  for (const auto& r : records) EXPECT_TRUE(replay(r).identical) << r.episode_id;
}
