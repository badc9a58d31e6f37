// Copyright 2026 The Emph Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "emph/wav.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct CliRun {
  int status = -1;
  std::string out;
};

CliRun Cli(const std::string& args) {
  const std::string cmd = std::string(EMPH_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (p == nullptr) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int raw = ::pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("emph_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string Fixture() const { return std::string(EMPH_DATA_DIR) + "/fixture_traditionally.json"; }
  fs::path dir_;
};

TEST_F(CliTest, HelpListsSubcommands) {
  const CliRun r = Cli("--help");
  EXPECT_EQ(r.status, 0);
  for (const char* sub : {"synthesize", "analyze", "experiment", "gen-corpus", "serve", "stats"}) {
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  }
  const CliRun s = Cli("synthesize --help");
  EXPECT_EQ(s.status, 0);
  for (const char* flag : {"--mode", "--profile", "--alpha-dd", "--alpha-mel", "--v-mel", "--seed"}) {
    EXPECT_NE(s.out.find(flag), std::string::npos) << flag;
  }
  EXPECT_NE(Cli("").status, 0);
}

TEST_F(CliTest, SynthesizeIsDeterministic) {
  ASSERT_EQ(Cli("synthesize " + Fixture() + " -o " + (dir_ / "a").string()).status, 0);
  ASSERT_EQ(Cli("synthesize " + Fixture() + " -o " + (dir_ / "b").string()).status, 0);
  for (const char* f : {"audio.wav", "mel.bin", "alignment.json", "correlates.json", "durations.json"}) {
    ASSERT_TRUE(fs::exists(dir_ / "a" / f)) << f;
    EXPECT_EQ(Slurp(dir_ / "a" / f), Slurp(dir_ / "b" / f)) << f;
  }
}

TEST_F(CliTest, DdIsLongerByHopArithmetic) {
  ASSERT_EQ(Cli("synthesize " + Fixture() + " --mode none -o " + (dir_ / "none").string()).status, 0);
  ASSERT_EQ(Cli("synthesize " + Fixture() + " --mode dd --alpha-dd 1.5 -o " + (dir_ / "dd").string()).status, 0);
  const auto none = emph::ReadWavFile((dir_ / "none" / "audio.wav").string());
  const auto dd = emph::ReadWavFile((dir_ / "dd" / "audio.wav").string());
  const json d_none = json::parse(Slurp(dir_ / "none" / "durations.json"));
  const json d_dd = json::parse(Slurp(dir_ / "dd" / "durations.json"));
  long long f_none = 0, f_dd = 0;
  for (const json& v : d_none) f_none += v.get<long long>();
  for (const json& v : d_dd) f_dd += v.get<long long>();
  const json corr = json::parse(Slurp(dir_ / "dd" / "correlates.json"));
  const long long injected = corr["injected_silence_frames"].get<long long>();
  EXPECT_EQ(injected, 3);
  EXPECT_EQ(static_cast<long long>(dd.samples.size()) - static_cast<long long>(none.samples.size()),
            300 * (f_dd - f_none + injected));
  EXPECT_GT(f_dd, f_none);
}

TEST_F(CliTest, RangeAndInputErrors) {
  EXPECT_NE(Cli("synthesize " + Fixture() + " --mode dd --alpha-dd 2.0 -o " + dir_.string()).status, 0);
  EXPECT_NE(Cli("synthesize " + Fixture() + " --alpha-mel 0.5 -o " + dir_.string()).status, 0);
  EXPECT_NE(Cli("synthesize " + Fixture() + " --mode loud -o " + dir_.string()).status, 0);
  EXPECT_NE(Cli("synthesize /nonexistent.json -o " + dir_.string()).status, 0);
  std::ofstream(dir_ / "broken.json") << "{\"words\": [";
  const CliRun r = Cli("synthesize " + (dir_ / "broken.json").string() + " -o " + (dir_ / "x").string());
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.out.find("error"), std::string::npos);
  EXPECT_NE(Cli("gen-corpus --n 0 -o " + (dir_ / "c").string()).status, 0);
  fs::create_directories(dir_ / "empty");
  EXPECT_NE(Cli("experiment " + (dir_ / "empty").string()).status, 0);
  EXPECT_NE(Cli("experiment " + (dir_ / "missing").string()).status, 0);
}

TEST_F(CliTest, AnalyzeReportsEveryWord) {
  ASSERT_EQ(Cli("synthesize " + Fixture() + " --mode dd -o " + dir_.string()).status, 0);
  const CliRun r = Cli("analyze " + (dir_ / "audio.wav").string() + " " + (dir_ / "alignment.json").string() +
                    " --out " + (dir_ / "report.json").string());
  ASSERT_EQ(r.status, 0) << r.out;
  const json report = json::parse(Slurp(dir_ / "report.json"));
  ASSERT_EQ(report.size(), 14u);
  EXPECT_EQ(report[3]["orthography"], "traditionally");
  EXPECT_GT(report[3]["pre_stress_silence_ms"].get<double>(), 0.0);
  for (const char* key : {"duration_ms", "f0_mean_hz", "f0_range_hz", "intensity_max_db"}) {
    EXPECT_TRUE(report[3].contains(key)) << key;
  }
}

TEST_F(CliTest, GenCorpusAndExperiment) {
  ASSERT_EQ(Cli("gen-corpus --n 3 --seed 7 -o " + (dir_ / "c1").string()).status, 0);
  ASSERT_EQ(Cli("gen-corpus --n 3 --seed 7 -o " + (dir_ / "c2").string()).status, 0);
  for (const auto& e : fs::directory_iterator(dir_ / "c1")) {
    EXPECT_EQ(Slurp(e.path()), Slurp(dir_ / "c2" / e.path().filename()));
  }
  const CliRun r = Cli("experiment " + (dir_ / "c1").string() + " --modes none,dd --out " +
                    (dir_ / "summary.json").string());
  ASSERT_EQ(r.status, 0) << r.out;
  const json s = json::parse(Slurp(dir_ / "summary.json"));
  ASSERT_EQ(s["modes"].size(), 2u);
  EXPECT_EQ(s["modes"][0]["mode"], "none");
  EXPECT_EQ(s["modes"][0]["no_emphasis_detected"], 3);
  EXPECT_NE(Cli("experiment " + (dir_ / "c1").string() + " --modes dd,bogus").status, 0);
}

TEST_F(CliTest, Stats) {
  std::ofstream(dir_ / "pref.jsonl") << "{\"systems\": [\"dd\", \"mel\"], \"choice\": \"dd\"}\n"
                                        "{\"systems\": [\"dd\", \"mel\"], \"choice\": \"mel\"}\n"
                                        "{\"systems\": [\"dd\", \"mel\"], \"choice\": \"dd\"}\n";
  const CliRun j = Cli("stats " + (dir_ / "pref.jsonl").string() + " --type preference");
  ASSERT_EQ(j.status, 0) << j.out;
  const json doc = json::parse(j.out);
  EXPECT_EQ(doc["pairs"][0]["votes_a"], 2);
  const CliRun t = Cli("stats " + (dir_ / "pref.jsonl").string() + " --type preference --format table");
  EXPECT_EQ(t.status, 0);
  EXPECT_NE(t.out.find("33.3%"), std::string::npos);
  EXPECT_NE(Cli("stats " + (dir_ / "pref.jsonl").string() + " --type mushra").status, 0);
  EXPECT_NE(Cli("stats " + (dir_ / "pref.jsonl").string() + " --type abx").status, 0);
}

}  // namespace
