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


#include "emph/service.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "httplib.h"

namespace emph::service {
namespace {

using json = nlohmann::json;

uint64_t Mix(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

uint64_t Hash(std::initializer_list<std::string_view> parts) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (std::string_view part : parts) {
    for (unsigned char c : part) {
      h ^= c;
      h *= 0x100000001B3ull;
    }
    h ^= 0xFF;
    h *= 0x100000001B3ull;
  }
  return Mix(h);
}

std::string Hex(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}
  uint64_t Below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do x = Mix(state_ += 0x9E3779B97F4A7C15ull); while (x >= limit);
    return x % n;
  }

 private:
  uint64_t state_;
};

std::vector<std::size_t> Shuffled(std::size_t n, uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.Below(i)]);
  return order;
}

bool ValidListener(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.' || c == '@';
  });
}

ServiceError BadRequest(const std::string& code, const std::string& message) {
  return ServiceError(400, code, message);
}

}  // namespace

std::string_view TestTypeName(TestType t) {
  switch (t) {
    case TestType::kMushra: return "mushra";
    case TestType::kPreference: return "preference";
    case TestType::kIdentify: return "identify";
  }
  return "?";
}

TestType ParseTestType(std::string_view name) {
  if (name == "mushra") return TestType::kMushra;
  if (name == "preference") return TestType::kPreference;
  if (name == "identify") return TestType::kIdentify;
  throw BadRequest("unknown_test_type", "unknown test type \"" + std::string(name) + "\"");
}

TestPlan ParseTestPlan(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw BadRequest("bad_plan", std::string("malformed plan JSON: ") + e.what());
  }
  TestPlan plan;
  try {
    plan.plan_id = doc.value("plan_id", "plan");
    plan.test_type = ParseTestType(doc.at("test_type").get<std::string>());
    plan.seed = doc.value("seed", uint64_t{0});
    const json& screens = doc.at("screens");
    if (!screens.is_array() || screens.empty()) {
      throw BadRequest("bad_plan", "plan needs at least one screen");
    }
    std::optional<std::set<std::string>> mushra_systems;
    std::set<std::string> ids;
    for (std::size_t s = 0; s < screens.size(); ++s) {
      const json& js = screens[s];
      const std::string at = " on screen " + std::to_string(s);
      Screen screen;
      screen.utterance = js.value("utterance", "screen-" + std::to_string(s));
      std::set<std::string> systems;
      for (const json& st : js.at("stimuli")) {
        Stimulus stim;
        stim.system = st.at("system").get<std::string>();
        const std::filesystem::path wav = st.at("wav").get<std::string>();
        stim.wav = wav.is_absolute() ? wav : base_dir / wav;
        stim.id = Hex(Hash({plan.plan_id, std::to_string(plan.seed), std::to_string(s), stim.system}));
        if (!systems.insert(stim.system).second) {
          throw BadRequest("bad_plan", "duplicate system \"" + stim.system + "\"" + at);
        }
        if (!ids.insert(stim.id).second) throw BadRequest("bad_plan", "stimulus id collision" + at);
        screen.stimuli.push_back(std::move(stim));
      }
      if (js.contains("words")) screen.words = js.at("words").get<std::vector<std::string>>();
      if (js.contains("correct_word")) screen.correct_word = js.at("correct_word").get<std::size_t>();

      switch (plan.test_type) {
        case TestType::kMushra:
          if (screen.stimuli.size() < 2) throw BadRequest("bad_plan", "MUSHRA needs two or more stimuli" + at);
          if (!mushra_systems) mushra_systems = systems;
          if (*mushra_systems != systems) throw BadRequest("bad_plan", "MUSHRA system set differs" + at);
          break;
        case TestType::kPreference:
          if (screen.stimuli.size() != 2) throw BadRequest("bad_plan", "preference needs two stimuli" + at);
          break;
        case TestType::kIdentify:
          if (screen.stimuli.size() != 1) throw BadRequest("bad_plan", "identify needs one stimulus" + at);
          if (screen.words.empty() || !screen.correct_word) {
            throw BadRequest("bad_plan", "identify needs words and correct_word" + at);
          }
          if (*screen.correct_word >= screen.words.size()) {
            throw BadRequest("bad_plan", "correct_word out of range" + at);
          }
          break;
      }
      if (plan.test_type != TestType::kIdentify && screen.correct_word) {
        throw BadRequest("bad_plan", "correct_word only belongs on identify screens" + at);
      }
      plan.screens.push_back(std::move(screen));
    }
  } catch (const json::exception& e) {
    throw BadRequest("bad_plan", std::string("invalid plan: ") + e.what());
  }
  return plan;
}

Service::Service(TestPlan plan, ServiceOptions options)
    : plan_(std::move(plan)), options_(std::move(options)) {
  if (!options_.clock) {
    options_.clock = [] {
      return std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::system_clock::now().time_since_epoch())
          .count();
    };
  }
  for (const Screen& screen : plan_.screens) {
    for (const Stimulus& stim : screen.stimuli) {
      if (!std::filesystem::is_regular_file(stim.wav)) {
        throw ServiceError(500, "missing_stimulus", "stimulus file not found: " + stim.wav.string());
      }
      stimuli_by_id_[stim.id] = &stim;
    }
  }
  Replay();
  log_fd_ = ::open(options_.log_path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (log_fd_ < 0) {
    throw ServiceError(500, "log_unavailable",
                       "cannot open response log " + options_.log_path.string() + ": " + std::strerror(errno));
  }
}

Service::~Service() {
  if (log_fd_ >= 0) ::close(log_fd_);
}

Service::Session Service::MakeSession(const std::string& listener) const {
  Session s;
  s.listener = listener;
  const std::string seed = std::to_string(plan_.seed);
  s.id = Hex(Hash({"session", plan_.plan_id, seed, listener}));
  s.screen_order = Shuffled(plan_.screens.size(), Hash({"order", plan_.plan_id, seed, listener}));
  for (std::size_t k = 0; k < plan_.screens.size(); ++k) {
    s.stimulus_order.push_back(Shuffled(plan_.screens[k].stimuli.size(),
                                        Hash({"stimuli", plan_.plan_id, seed, listener, std::to_string(k)})));
  }
  s.answered.assign(plan_.screens.size(), false);
  return s;
}

void Service::Replay() {
  std::error_code ec;
  if (!std::filesystem::exists(options_.log_path, ec)) return;
  std::ifstream in(options_.log_path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  // A torn final line was never acknowledged; drop it.
  const std::size_t keep = text.rfind('\n') == std::string::npos ? 0 : text.rfind('\n') + 1;
  if (keep != text.size()) {
    text.resize(keep);
    std::filesystem::resize_file(options_.log_path, keep);
  }
  std::istringstream lines(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const json rec = json::parse(line);
      const std::string listener = rec.at("listener").get<std::string>();
      const std::size_t n = rec.at("screen").get<std::size_t>();
      auto it = sessions_.find(MakeSession(listener).id);
      if (it == sessions_.end()) {
        Session s = MakeSession(listener);
        it = sessions_.emplace(s.id, std::move(s)).first;
      }
      if (n >= it->second.answered.size()) throw std::out_of_range("screen");
      it->second.answered[n] = true;
      log_.push_back({listener, it->second.screen_order[n], rec.at("payload")});
    } catch (const std::exception& e) {
      throw ServiceError(500, "corrupt_log",
                         "response log line " + std::to_string(number) + " unreadable: " + e.what());
    }
  }
}

Service::Session& Service::SessionOrThrow(const std::string& id) {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "unknown_session", "no session \"" + id + "\"");
  return it->second;
}

const Service::Session& Service::SessionOrThrow(const std::string& id) const {
  return const_cast<Service*>(this)->SessionOrThrow(id);
}

json Service::CreateSession(const std::string& listener) {
  if (!ValidListener(listener)) {
    throw BadRequest("bad_listener", "listener id must be 1-64 characters of [A-Za-z0-9_.@-]");
  }
  for (const auto& [id, stim] : stimuli_by_id_) {
    if (!std::filesystem::is_regular_file(stim->wav)) {
      throw ServiceError(500, "missing_stimulus", "stimulus file not found: " + stim->wav.string());
    }
  }
  std::unique_lock lock(mu_);
  Session candidate = MakeSession(listener);
  auto it = sessions_.find(candidate.id);
  if (it == sessions_.end()) it = sessions_.emplace(candidate.id, std::move(candidate)).first;
  const Session& s = it->second;
  return {{"session", s.id},
          {"listener", s.listener},
          {"test_type", std::string(TestTypeName(plan_.test_type))},
          {"screens", s.answered.size()},
          {"answered", s.answered},
          {"closed", s.closed}};
}

json Service::GetScreen(const std::string& session, std::size_t n) const {
  std::shared_lock lock(mu_);
  const Session& s = SessionOrThrow(session);
  if (n >= s.screen_order.size()) {
    throw ServiceError(404, "bad_screen", "screen " + std::to_string(n) + " out of range");
  }
  const std::size_t k = s.screen_order[n];
  const Screen& screen = plan_.screens[k];
  json stimuli = json::array();
  for (std::size_t i : s.stimulus_order[k]) {
    const std::string& id = screen.stimuli[i].id;
    stimuli.push_back({{"id", id}, {"url", "/audio/" + id + ".wav"}});
  }
  json out = {{"session", s.id},
              {"screen", n},
              {"screens", s.screen_order.size()},
              {"test_type", std::string(TestTypeName(plan_.test_type))},
              {"answered", static_cast<bool>(s.answered[n])},
              {"stimuli", std::move(stimuli)}};
  if (plan_.test_type == TestType::kIdentify) out["words"] = screen.words;
  return out;
}

json Service::Resolve(const Screen& screen, const json& payload) const {
  if (!payload.is_object()) throw BadRequest("invalid_payload", "payload must be an object");
  auto system_of = [&](const std::string& id) -> const std::string* {
    for (const Stimulus& st : screen.stimuli) {
      if (st.id == id) return &st.system;
    }
    return nullptr;
  };
  switch (plan_.test_type) {
    case TestType::kMushra: {
      if (!payload.contains("ratings") || !payload["ratings"].is_object()) {
        throw BadRequest("payload_type_mismatch", "MUSHRA screens take a \"ratings\" object");
      }
      const json& ratings = payload["ratings"];
      if (ratings.size() != screen.stimuli.size()) {
        throw BadRequest("invalid_payload", "every stimulus needs exactly one rating");
      }
      json resolved = json::object();
      for (const auto& [id, value] : ratings.items()) {
        const std::string* system = system_of(id);
        if (!system) throw BadRequest("invalid_payload", "unknown stimulus \"" + id + "\"");
        if (!value.is_number()) throw BadRequest("invalid_payload", "ratings must be numbers");
        const double v = value.get<double>();
        if (!std::isfinite(v) || v < 0.0 || v > 100.0) {
          throw BadRequest("out_of_range", "rating outside [0, 100]");
        }
        resolved[*system] = value;
      }
      return {{"ratings", std::move(resolved)}};
    }
    case TestType::kPreference: {
      if (!payload.contains("choice") || !payload["choice"].is_string()) {
        throw BadRequest("payload_type_mismatch", "preference screens take a \"choice\" stimulus id");
      }
      const std::string* system = system_of(payload["choice"].get<std::string>());
      if (!system) throw BadRequest("invalid_payload", "choice is not a stimulus of this screen");
      return {{"systems", {screen.stimuli[0].system, screen.stimuli[1].system}}, {"choice", *system}};
    }
    case TestType::kIdentify: {
      if (!payload.contains("chosen_word") || !payload["chosen_word"].is_number_integer()) {
        throw BadRequest("payload_type_mismatch", "identify screens take an integer \"chosen_word\"");
      }
      const int64_t w = payload["chosen_word"].get<int64_t>();
      if (w < 0 || static_cast<std::size_t>(w) >= screen.words.size()) {
        throw BadRequest("out_of_range", "chosen_word outside the sentence");
      }
      return {{"system", screen.stimuli[0].system},
              {"word_count", screen.words.size()},
              {"target", *screen.correct_word},
              {"chosen", w}};
    }
  }
  return {};
}

void Service::Append(const std::string& line) {
  std::lock_guard lock(writer_mu_);
  const char* p = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    const ssize_t n = ::write(log_fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ServiceError(500, "log_write_failed", std::string("response log write failed: ") + std::strerror(errno));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (::fsync(log_fd_) != 0) {
    throw ServiceError(500, "log_write_failed", std::string("response log sync failed: ") + std::strerror(errno));
  }
}

json Service::RecordResponse(const json& request) {
  if (!request.is_object() || !request.contains("session") || !request["session"].is_string() ||
      !request.contains("screen") || !request["screen"].is_number_integer() ||
      request["screen"].get<int64_t>() < 0 ||
      !request.contains("payload")) {
    throw BadRequest("bad_request", "response needs \"session\", \"screen\" and \"payload\"");
  }
  const std::string session = request["session"].get<std::string>();
  const std::size_t n = request["screen"].get<std::size_t>();

  std::unique_lock lock(mu_);
  Session& s = SessionOrThrow(session);
  if (s.closed) throw ServiceError(409, "session_closed", "session \"" + session + "\" is closed");
  if (n >= s.screen_order.size()) {
    throw ServiceError(404, "bad_screen", "screen " + std::to_string(n) + " out of range");
  }
  if (s.answered[n]) {
    throw ServiceError(409, "duplicate", "screen " + std::to_string(n) + " already answered");
  }
  const std::size_t k = s.screen_order[n];
  const json resolved = Resolve(plan_.screens[k], request["payload"]);
  const int64_t now = options_.clock();
  const json rec = {{"session", s.id},
                    {"listener", s.listener},
                    {"screen", n},
                    {"plan_screen", k},
                    {"utterance", plan_.screens[k].utterance},
                    {"test_type", std::string(TestTypeName(plan_.test_type))},
                    {"payload", resolved},
                    {"timestamp_ms", now}};
  Append(rec.dump() + "\n");
  s.answered[n] = true;
  log_.push_back({s.listener, k, resolved});
  return {{"ok", true}, {"session", s.id}, {"screen", n}, {"timestamp_ms", now}};
}

void Service::CloseSession(const std::string& session) {
  std::unique_lock lock(mu_);
  SessionOrThrow(session).closed = true;
}

ExportResult Service::Export(TestType t) const {
  if (t != plan_.test_type) {
    throw ServiceError(404, "wrong_test_type",
                       "this plan administers " + std::string(TestTypeName(plan_.test_type)));
  }
  std::shared_lock lock(mu_);
  ExportResult out{t, {}, json::array()};
  std::set<std::string> incomplete;
  if (t == TestType::kMushra) {
    for (const auto& [id, s] : sessions_) {
      const auto answered = static_cast<std::size_t>(std::count(s.answered.begin(), s.answered.end(), true));
      if (answered != s.answered.size() && answered > 0) {
        incomplete.insert(s.listener);
        out.excluded.push_back({{"listener", s.listener},
                                {"answered", answered},
                                {"screens", s.answered.size()},
                                {"reason", "incomplete MUSHRA session"}});
      }
    }
  }
  for (const Logged& entry : log_) {
    if (incomplete.count(entry.listener)) continue;
    const Screen& screen = plan_.screens[entry.plan_screen];
    json line;
    switch (t) {
      case TestType::kMushra:
        line = {{"listener", entry.listener}, {"utterance", screen.utterance},
                {"ratings", entry.payload.at("ratings")}};
        break;
      case TestType::kPreference:
        line = {{"listener", entry.listener}, {"utterance", screen.utterance},
                {"systems", entry.payload.at("systems")}, {"choice", entry.payload.at("choice")}};
        break;
      case TestType::kIdentify:
        line = {{"utterance", screen.utterance}, {"listener", entry.listener},
                {"system", entry.payload.at("system")}, {"word_count", entry.payload.at("word_count")},
                {"target", entry.payload.at("target")}, {"chosen", entry.payload.at("chosen")}};
        break;
    }
    out.jsonl += line.dump() + "\n";
  }
  return out;
}

std::optional<std::filesystem::path> Service::StimulusPath(const std::string& id) const {
  auto it = stimuli_by_id_.find(id);
  if (it == stimuli_by_id_.end()) return std::nullopt;
  return it->second->wav;
}

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
};

namespace {

constexpr const char* kPlaceholderPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>Listening test</title></head>"
    "<body><p>Listening test service is running. Install the web client under the static "
    "directory to take a test.</p></body></html>";

void SendJson(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

template <typename F>
void Guard(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    SendJson(res, e.status(), e.ToJson());
  } catch (const json::exception& e) {
    SendJson(res, 400, {{"code", "bad_request"}, {"message", e.what()}});
  } catch (const std::exception& e) {
    SendJson(res, 500, {{"code", "internal"}, {"message", e.what()}});
  }
}

}  // namespace

HttpServer::HttpServer(Service& service) : impl_(new Impl{service, {}}) {
  auto& srv = impl_->server;
  Service& svc = impl_->service;

  srv.Get("/api/session", [&svc](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] {
      if (!req.has_param("listener")) throw BadRequest("bad_listener", "missing listener parameter");
      SendJson(res, 200, svc.CreateSession(req.get_param_value("listener")));
    });
  });
  srv.Get(R"(/api/screen/(\d+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] {
      if (!req.has_param("session")) throw BadRequest("unknown_session", "missing session parameter");
      const std::size_t n = std::stoull(req.matches[1].str());
      SendJson(res, 200, svc.GetScreen(req.get_param_value("session"), n));
    });
  });
  srv.Post("/api/response", [&svc](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] { SendJson(res, 200, svc.RecordResponse(json::parse(req.body))); });
  });
  srv.Post("/api/session/close", [&svc](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] {
      const json body = json::parse(req.body);
      svc.CloseSession(body.at("session").get<std::string>());
      SendJson(res, 200, {{"ok", true}});
    });
  });
  srv.Get(R"(/api/export/(\w+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] {
      const ExportResult r = svc.Export(ParseTestType(req.matches[1].str()));
      SendJson(res, 200, {{"test_type", std::string(TestTypeName(r.test_type))},
                          {"jsonl", r.jsonl},
                          {"excluded", r.excluded}});
    });
  });
  srv.Get(R"(/audio/([0-9a-f]+)\.wav)", [&svc](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] {
      const auto path = svc.StimulusPath(req.matches[1].str());
      if (!path) throw ServiceError(404, "unknown_stimulus", "no such stimulus");
      std::ifstream in(*path, std::ios::binary);
      if (!in) throw ServiceError(500, "missing_stimulus", "stimulus file unreadable");
      std::stringstream buf;
      buf << in.rdbuf();
      res.set_content(buf.str(), "audio/wav");
    });
  });
  if (const auto dir = svc.StaticDir()) {
    srv.set_mount_point("/", dir->string());
  } else {
    srv.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
    });
  }
}

HttpServer::~HttpServer() { Stop(); }

bool HttpServer::Listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int HttpServer::BindToAnyPort(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpServer::ListenAfterBind() { return impl_->server.listen_after_bind(); }

void HttpServer::Stop() { impl_->server.stop(); }

}  // namespace emph::service
