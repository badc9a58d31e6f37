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


// Command-line front end: synthesis, analysis, experiments, corpus
// generation, the listening-test server and evaluation statistics.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "emph/analysis.h"
#include "emph/corpus.h"
#include "emph/duration.h"
#include "emph/error.h"
#include "emph/evalstats.h"
#include "emph/mel_io.h"
#include "emph/pipeline.h"
#include "emph/service.h"
#include "emph/wav.h"

namespace fs = std::filesystem;

namespace {

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw emph::Error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw emph::Error("cannot write " + path.string());
}

void Emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    WriteText(out_path, text);
  }
}

std::vector<std::string> SplitCommas(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

// Run options shared by synthesize and experiment; flags win over the file.
struct RunFlags {
  std::string config_path;
  std::string mode;
  std::string profile;
  std::optional<double> alpha_dd;
  std::optional<double> alpha_mel;
  std::optional<double> v_mel;
  std::optional<uint32_t> seed;
  std::string model_path;

  void Register(CLI::App* app, bool with_mode) {
    app->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    if (with_mode) {
      app->add_option("--mode", mode, "Emphasis mode")
          ->check(CLI::IsMember({"none", "dd", "mel", "flag"}));
    }
    app->add_option("--profile", profile, "Prosody profile")
        ->check(CLI::IsMember({"neutral", "expressive"}));
    app->add_option("--alpha-dd", alpha_dd, "Duration dilation factor (default 1.5, 1.25 neutral)")
        ->check(CLI::Range(1.0, 1.5));
    app->add_option("--alpha-mel", alpha_mel, "Mel-domain time stretch (default 1.25)")
        ->check(CLI::Range(1.0, 1.5));
    app->add_option("--v-mel", v_mel, "Mel-domain amplitude gain (default 1.15)")
        ->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Vocoder noise seed");
    app->add_option("--model", model_path, "Duration model JSON")->check(CLI::ExistingFile);
  }

  emph::RunConfig Resolve() const {
    emph::RunConfig c;
    if (!config_path.empty()) c = emph::ParseRunConfig(ReadText(config_path), c);
    if (!mode.empty()) c.mode = emph::ParseMode(mode);
    if (!profile.empty()) c.profile = emph::ParseProfile(profile);
    if (alpha_dd) c.alpha_dd = *alpha_dd;
    if (alpha_mel) c.alpha_mel = *alpha_mel;
    if (v_mel) c.v_mel = *v_mel;
    if (seed) c.seed = *seed;
    c.Validate();
    return c;
  }

  emph::DurationModel Model() const {
    return model_path.empty() ? emph::DurationModel{} : emph::DurationModel::FromJson(ReadText(model_path));
  }
};

emph::service::HttpServer* g_server = nullptr;

void OnSignal(int) {
  if (g_server) g_server->Stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emphasis control for phoneme-duration text-to-speech"};
  app.require_subcommand(1);

  // synthesize
  RunFlags synth_flags;
  std::string synth_utt, synth_durations, synth_out;
  auto* synth = app.add_subcommand("synthesize", "Render an utterance to WAV, mel, alignment and correlate log");
  synth->add_option("utterance", synth_utt, "Utterance JSON")->required()->check(CLI::ExistingFile);
  synth->add_option("--out-dir,-o", synth_out,
                    "Output directory for audio.wav, mel.bin, alignment.json, correlates.json, durations.json")
      ->required();
  synth->add_option("--durations", synth_durations, "Oracle durations JSON instead of the duration model")
      ->check(CLI::ExistingFile);
  synth_flags.Register(synth, true);

  // analyze
  std::string an_wav, an_alignment, an_out;
  auto* analyze = app.add_subcommand("analyze", "Per-word acoustic report for a WAV and its alignment");
  analyze->add_option("wav", an_wav, "Input WAV")->required()->check(CLI::ExistingFile);
  analyze->add_option("alignment", an_alignment, "Alignment JSON")->required()->check(CLI::ExistingFile);
  analyze->add_option("--out", an_out, "Report path (stdout when omitted)");

  // experiment
  RunFlags exp_flags;
  std::string exp_corpus, exp_modes = "none,mel,dd", exp_out;
  auto* experiment = app.add_subcommand("experiment", "Machine identifiability of each emphasis mode over a corpus");
  experiment->add_option("corpus", exp_corpus, "Corpus directory")->required();
  experiment->add_option("--modes", exp_modes, "Comma-separated modes from none, dd, mel, flag")
      ->capture_default_str();
  experiment->add_option("--out", exp_out, "Summary path (stdout when omitted)");
  exp_flags.Register(experiment, false);

  // gen-corpus
  std::size_t gen_n = 50;
  uint64_t gen_seed = 7;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-corpus", "Generate a seeded corpus of annotated utterances");
  gen->add_option("--n", gen_n, "Number of utterances")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--out,-o", gen_out, "Output directory")->required();

  // serve
  std::string serve_plan, serve_log, serve_host = "127.0.0.1", serve_static;
  int serve_port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the listening-test HTTP service");
  serve->add_option("plan", serve_plan, "Test plan JSON")->required()->check(CLI::ExistingFile);
  serve->add_option("--log", serve_log, "Append-only response log (JSONL)")->required();
  serve->add_option("--host", serve_host, "Bind address")->capture_default_str();
  serve->add_option("--port", serve_port, "Port")->capture_default_str()->check(CLI::Range(1, 65535));
  serve->add_option("--static", serve_static, "Directory with web client assets")->check(CLI::ExistingDirectory);

  // stats
  std::string stats_file, stats_type, stats_format = "json", stats_out;
  auto* stats = app.add_subcommand("stats", "Summarize listening-test responses");
  stats->add_option("responses", stats_file, "Responses JSONL")->required()->check(CLI::ExistingFile);
  stats->add_option("--type", stats_type, "Test type")
      ->required()
      ->check(CLI::IsMember({"mushra", "preference", "identify"}));
  stats->add_option("--format", stats_format, "json or table")
      ->capture_default_str()
      ->check(CLI::IsMember({"json", "table"}));
  stats->add_option("--out", stats_out, "Summary path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*synth) {
      const emph::RunConfig config = synth_flags.Resolve();
      const emph::Utterance utt = emph::ParseUtterance(ReadText(synth_utt));
      std::optional<emph::DurationSequence> oracle;
      if (!synth_durations.empty()) oracle = emph::ParseDurations(ReadText(synth_durations));
      const emph::SynthesisResult r =
          emph::Synthesize(utt, config, synth_flags.Model(), oracle ? &*oracle : nullptr);
      const fs::path dir = synth_out;
      fs::create_directories(dir);
      emph::WriteWavFile((dir / "audio.wav").string(), r.waveform);
      emph::WriteMelFile((dir / "mel.bin").string(), r.mel);
      WriteText(dir / "alignment.json", emph::SerializeAlignment(r.alignment));
      WriteText(dir / "correlates.json", emph::SerializeCorrelates(r.plan));
      WriteText(dir / "durations.json", emph::SerializeDurations(r.durations));
      std::cerr << "wrote " << r.waveform.samples.size() << " samples, " << r.mel.n_frames()
                << " frames to " << dir.string() << "\n";
    } else if (*analyze) {
      const emph::Waveform w = emph::ReadWavFile(an_wav);
      const emph::Alignment a = emph::ParseAlignment(ReadText(an_alignment));
      Emit(an_out, emph::SerializeReports(emph::WordReport(w, a)));
    } else if (*experiment) {
      const emph::RunConfig config = exp_flags.Resolve();
      std::vector<emph::EmphasisMode> modes;
      for (const std::string& m : SplitCommas(exp_modes)) modes.push_back(emph::ParseMode(m));
      const auto corpus = emph::ReadCorpus(exp_corpus);
      const auto summary = emph::RunExperiment(corpus, modes, config, exp_flags.Model());
      Emit(exp_out, emph::SerializeExperiment(summary));
    } else if (*gen) {
      emph::WriteCorpus(emph::GenerateCorpus(gen_n, gen_seed), gen_out);
      std::cerr << "wrote " << gen_n << " utterances to " << gen_out << "\n";
    } else if (*serve) {
      namespace svc = emph::service;
      const fs::path plan_path = serve_plan;
      svc::TestPlan plan = svc::ParseTestPlan(ReadText(serve_plan), plan_path.parent_path());
      svc::ServiceOptions options;
      options.log_path = serve_log;
      if (!serve_static.empty()) options.static_dir = fs::path(serve_static);
      svc::Service service(std::move(plan), std::move(options));
      svc::HttpServer server(service);
      g_server = &server;
      std::signal(SIGINT, OnSignal);
      std::signal(SIGTERM, OnSignal);
      std::cerr << "serving on http://" << serve_host << ":" << serve_port << "/\n";
      if (!server.Listen(serve_host, serve_port)) {
        g_server = nullptr;
        throw emph::Error("cannot listen on " + serve_host + ":" + std::to_string(serve_port));
      }
      g_server = nullptr;
    } else if (*stats) {
      const std::string text = ReadText(stats_file);
      Emit(stats_out, stats_format == "table" ? emph::stats::SummarizeTable(stats_type, text)
                                              : emph::stats::SummarizeJson(stats_type, text));
    }
  } catch (const emph::service::ServiceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
