// Copyright 2026 The scspec Authors
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

#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "scspec/serialize.hpp"
#include "scspec/valley_filter.hpp"

namespace scspec {

enum class Stage { Loaded, Filtered, Contoured, Assigned, Extracted, Fitted };

std::string to_string(Stage stage);

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8765;
  std::optional<std::filesystem::path> persist_dir;
  unsigned fit_threads = 0;
};

/// Session-based JSON API over the analysis pipeline. `handle` is transport
/// independent; `listen` serves it over HTTP/1.1.
class AnalysisService {
 public:
  explicit AnalysisService(ServiceOptions options = {});
  ~AnalysisService();
  AnalysisService(const AnalysisService &) = delete;
  AnalysisService &operator=(const AnalysisService &) = delete;

  HttpResponse handle(const HttpRequest &request);

  /// Blocking; returns false if the socket could not be bound.
  bool listen();
  /// Binds to an ephemeral port and serves on a background thread.
  int listen_background();
  void stop();

  /// Blocks until no fit job is running in the session (tests, shutdown).
  void wait_for_jobs(const std::string &session_id);

  struct Session;

 private:
  ServiceOptions options_;
  std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  struct Server;
  std::unique_ptr<Server> server_;
  std::thread server_thread_;

  std::shared_ptr<Session> find(const std::string &id);
  std::string new_id();
  void persist(const Session &s) const;
  void restore();

  HttpResponse create_session(const HttpRequest &req);
  HttpResponse route_session(const std::shared_ptr<Session> &s, const std::string &action, const HttpRequest &req);
};

}  // namespace scspec
