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


#ifndef EMPH_SERVICE_H_
#define EMPH_SERVICE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace emph::service {

enum class TestType { kMushra, kPreference, kIdentify };

std::string_view TestTypeName(TestType t);
TestType ParseTestType(std::string_view name);

struct Stimulus {
  std::string system;
  std::filesystem::path wav;
  // Blinded id handed to clients.
  std::string id;
};

struct Screen {
  std::string utterance;
  std::vector<Stimulus> stimuli;
  // Identify screens only.
  std::optional<std::size_t> correct_word;
  std::vector<std::string> words;
};

struct TestPlan {
  std::string plan_id;
  TestType test_type = TestType::kMushra;
  uint64_t seed = 0;
  std::vector<Screen> screens;
};

// Reads a plan document. Relative WAV paths resolve against base_dir.
// Assigns blinded stimulus ids derived from the plan seed.
TestPlan ParseTestPlan(std::string_view json_text, const std::filesystem::path& base_dir);

// Failure carrying an HTTP status and a short machine-readable code.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }
  nlohmann::json ToJson() const { return {{"code", code_}, {"message", what()}}; }

 private:
  int status_;
  std::string code_;
};

struct ServiceOptions {
  std::filesystem::path log_path;
  // Served under "/" when set; otherwise a placeholder page.
  std::optional<std::filesystem::path> static_dir;
  // Milliseconds since the epoch.
  std::function<int64_t()> clock;
};

struct ExportResult {
  TestType test_type;
  // evalstats input lines, one JSON document per line.
  std::string jsonl;
  // Listeners left out because their MUSHRA session is incomplete.
  nlohmann::json excluded = nlohmann::json::array();
};

// Listening-test state: sessions, blinded screens and the response log.
// Thread-safe.
class Service {
 public:
  // Checks every stimulus file and replays an existing log.
  Service(TestPlan plan, ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  const TestPlan& plan() const { return plan_; }

  // Session id and per-listener screen order are pure functions of
  // (plan, listener); repeated calls return the same descriptor.
  nlohmann::json CreateSession(const std::string& listener);
  nlohmann::json GetScreen(const std::string& session, std::size_t n) const;
  // Appends to the log and syncs it before returning the acknowledgment.
  nlohmann::json RecordResponse(const nlohmann::json& request);
  void CloseSession(const std::string& session);
  ExportResult Export(TestType t) const;
  std::optional<std::filesystem::path> StimulusPath(const std::string& id) const;
  std::optional<std::filesystem::path> StaticDir() const { return options_.static_dir; }

 private:
  struct Session {
    std::string id;
    std::string listener;
    std::vector<std::size_t> screen_order;
    std::vector<std::vector<std::size_t>> stimulus_order;
    std::vector<bool> answered;
    bool closed = false;
  };
  struct Logged {
    std::string listener;
    std::size_t plan_screen;
    nlohmann::json payload;
  };

  Session MakeSession(const std::string& listener) const;
  Session& SessionOrThrow(const std::string& id);
  const Session& SessionOrThrow(const std::string& id) const;
  nlohmann::json Resolve(const Screen& screen, const nlohmann::json& payload) const;
  void Replay();
  void Append(const std::string& line);

  TestPlan plan_;
  ServiceOptions options_;
  std::map<std::string, const Stimulus*> stimuli_by_id_;
  mutable std::shared_mutex mu_;
  std::map<std::string, Session> sessions_;
  std::vector<Logged> log_;
  std::mutex writer_mu_;
  int log_fd_ = -1;
};

// HTTP front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  // Binds and serves on the calling thread until Stop().
  bool Listen(const std::string& host, int port);
  // Binds to an ephemeral port; serve with ListenAfterBind().
  int BindToAnyPort(const std::string& host);
  bool ListenAfterBind();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace emph::service

#endif  // EMPH_SERVICE_H_
