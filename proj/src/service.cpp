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

#include "scspec/service.hpp"

#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <httplib.h>

#include "scspec/error.hpp"
#include "scspec/parallel.hpp"
#include "scspec/png_writer.hpp"

namespace scspec {

namespace {

Error stage_error(const std::string &msg) { return Error("stage", msg); }
Error not_found(const std::string &msg) { return Error("not_found", msg); }

HttpResponse json_response(int status, const Json &body) { return {status, "application/json", body.dump()}; }

HttpResponse error_response(int status, const std::string &code, const std::string &message,
                            const std::string &field = {}) {
  Json body = {{"error", code}, {"message", message}};
  if (!field.empty()) body["field"] = field;
  return json_response(status, body);
}

Json parse_body(const std::string &body) {
  if (body.empty()) return Json::object();
  try {
    return Json::parse(body);
  } catch (const Json::parse_error &e) {
    throw InvalidArgument(std::string("invalid JSON body: ") + e.what(), "body");
  }
}

std::vector<std::string> split_path(const std::string &path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '/'))
    if (!part.empty()) parts.push_back(part);
  return parts;
}

FilterConfig filter_config_from_json(const Json &j) {
  FilterConfig c;
  if (j.contains("scales")) {
    if (!j.at("scales").is_array() || j.at("scales").empty())
      throw InvalidArgument("'scales' must be a non-empty array", "scales");
    c.scales.clear();
    for (const auto &v : j.at("scales")) {
      if (!v.is_number() || !(v.get<double>() > 0.0)) throw InvalidArgument("scales must be positive numbers", "scales");
      c.scales.push_back(v.get<double>());
    }
  }
  const std::string mode = j.value("mode", std::string("valley"));
  if (mode == "valley") c.mode = LineMode::Valley;
  else if (mode == "ridge") c.mode = LineMode::Ridge;
  else throw InvalidArgument("mode must be 'valley' or 'ridge'", "mode");
  return c;
}

Json filter_config_to_json(const FilterConfig &c) {
  return {{"scales", c.scales}, {"mode", c.mode == LineMode::Valley ? "valley" : "ridge"}};
}

}  // namespace

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::Loaded: return "loaded";
    case Stage::Filtered: return "filtered";
    case Stage::Contoured: return "contoured";
    case Stage::Assigned: return "assigned";
    case Stage::Extracted: return "extracted";
    case Stage::Fitted: return "fitted";
  }
  return "unknown";
}

struct AnalysisService::Session {
  std::string id;
  std::mutex mutex;
  Stage stage = Stage::Loaded;
  std::uint64_t generation = 0;  // bumped whenever earlier stages re-run

  Spectrum2D spectrum;
  FilterConfig filter_config;
  FilteredImage filtered;
  double level = 0.25;
  int min_length = 20;
  ContourSet contours;
  GroupAssignment assignment;
  DilationHalfwidths halfwidths;
  PeakMethod method = PeakMethod::RegionMin;
  PeakSet peaks;
  std::map<std::string, FitProblem> fit_problems;
  std::map<std::string, FitResult> fits;

  std::thread job;
  std::atomic<bool> cancel{false};
  std::string job_state = "idle";  // idle, running, done, failed, cancelled
  std::string job_model;
  std::string job_error;
  std::condition_variable job_done;

  ~Session() {
    cancel = true;
    if (!job.joinable()) return;
    if (job.get_id() == std::this_thread::get_id()) job.detach();
    else job.join();
  }

  // Re-running `stage` drops everything computed after it.
  void reset_to(Stage s) {
    stage = s;
    ++generation;
    cancel = true;
    if (s < Stage::Filtered) filtered = FilteredImage{};
    if (s < Stage::Contoured) contours = ContourSet{};
    if (s < Stage::Assigned) assignment = GroupAssignment{};
    if (s < Stage::Extracted) peaks = PeakSet{};
    if (s < Stage::Fitted) {
      fits.clear();
      fit_problems.clear();
    }
  }

  void require(Stage s, const std::string &what) const {
    if (stage < s)
      throw stage_error(what + " requires stage '" + to_string(s) + "', session is '" + to_string(stage) + "'");
  }

  Json summary() const {
    return {{"id", id},
            {"stage", to_string(stage)},
            {"shape", {spectrum.rows(), spectrum.cols()}},
            {"fit", {{"state", job_state}, {"model", job_model}, {"error", job_error}}}};
  }
};

struct AnalysisService::Server {
  httplib::Server http;
};

AnalysisService::AnalysisService(ServiceOptions options) : options_(std::move(options)) {
  if (options_.persist_dir) {
    std::filesystem::create_directories(*options_.persist_dir);
    restore();
  }
}

AnalysisService::~AnalysisService() {
  stop();
  std::lock_guard<std::mutex> lock(sessions_mutex_);
  for (auto &[id, s] : sessions_) {
    s->cancel = true;
    if (s->job.joinable()) s->job.join();
  }
  sessions_.clear();
}

std::string AnalysisService::new_id() {
  static std::mt19937_64 engine{std::random_device{}()};
  static std::mutex id_mutex;
  std::lock_guard<std::mutex> lock(id_mutex);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(engine()));
  return buf;
}

std::shared_ptr<AnalysisService::Session> AnalysisService::find(const std::string &id) {
  std::lock_guard<std::mutex> lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw not_found("unknown session '" + id + "'");
  return it->second;
}

void AnalysisService::wait_for_jobs(const std::string &session_id) {
  auto s = find(session_id);
  std::unique_lock<std::mutex> lock(s->mutex);
  s->job_done.wait(lock, [&] { return s->job_state != "running"; });
}

HttpResponse AnalysisService::handle(const HttpRequest &req) {
  try {
    const std::vector<std::string> parts = split_path(req.path);
    if (parts.empty() || parts[0] != "sessions") throw not_found("no route for " + req.path);
    if (parts.size() == 1) {
      if (req.method == "POST") return create_session(req);
      if (req.method == "GET") {
        Json list = Json::array();
        std::lock_guard<std::mutex> lock(sessions_mutex_);
        for (const auto &[id, s] : sessions_) list.push_back(id);
        return json_response(200, {{"sessions", list}});
      }
      throw not_found("no route for " + req.method + " " + req.path);
    }
    auto session = find(parts[1]);
    std::string action = parts.size() > 2 ? parts[2] : "";
    if (parts.size() > 3) action += "/" + parts[3];
    return route_session(session, action, req);
  } catch (const InvalidArgument &e) {
    return error_response(422, e.code(), e.what(), e.field());
  } catch (const ParseError &e) {
    return error_response(422, e.code(), e.what(), "body");
  } catch (const Error &e) {
    if (e.code() == "not_found") return error_response(404, e.code(), e.what());
    if (e.code() == "stage") return error_response(409, e.code(), e.what());
    return error_response(422, e.code(), e.what());
  } catch (const Json::exception &e) {
    return error_response(422, "invalid_argument", e.what(), "body");
  } catch (const std::exception &e) {
    return error_response(500, "internal", e.what());
  }
}

HttpResponse AnalysisService::create_session(const HttpRequest &req) {
  auto s = std::make_shared<Session>();
  const Json body = parse_body(req.body);
  if (body.is_object() && body.contains("csv")) {
    if (!body.at("csv").is_string()) throw InvalidArgument("'csv' must be a string", "csv");
    s->spectrum = parse_csv_spectrum(body.at("csv").get<std::string>());
  } else {
    s->spectrum = parse_json_spectrum(body.is_object() && body.contains("spectrum") ? body.at("spectrum").dump() : req.body);
  }
  if (body.is_object() && body.value("negate", false))
    s->spectrum = Spectrum2D(s->spectrum.bias(), s->spectrum.freq(), -s->spectrum.amplitude(), s->spectrum.metadata());
  s->id = new_id();
  {
    std::lock_guard<std::mutex> lock(sessions_mutex_);
    sessions_[s->id] = s;
  }
  persist(*s);
  return json_response(201, s->summary());
}

HttpResponse AnalysisService::route_session(const std::shared_ptr<Session> &sp, const std::string &action,
                                            const HttpRequest &req) {
  Session &s = *sp;
  const std::string &m = req.method;

  if (action == "" && m == "GET") {
    std::lock_guard<std::mutex> lock(s.mutex);
    return json_response(200, s.summary());
  }
  if (action == "" && m == "DELETE") {
    {
      std::lock_guard<std::mutex> lock(s.mutex);
      s.cancel = true;
    }
    std::lock_guard<std::mutex> lock(sessions_mutex_);
    sessions_.erase(s.id);
    if (options_.persist_dir) std::filesystem::remove(*options_.persist_dir / (s.id + ".json"));
    return json_response(200, {{"deleted", s.id}});
  }
  if (action == "reset" && m == "POST") {
    std::lock_guard<std::mutex> lock(s.mutex);
    s.reset_to(Stage::Loaded);
    persist(s);
    return json_response(200, s.summary());
  }
  if (action == "spectrum" && m == "GET") {
    std::lock_guard<std::mutex> lock(s.mutex);
    return {200, "application/json", format_json_spectrum(s.spectrum)};
  }
  if (action == "filter" && m == "POST") {
    const Json body = parse_body(req.body);
    const FilterConfig config = filter_config_from_json(body);
    std::lock_guard<std::mutex> lock(s.mutex);
    FilteredImage filtered = multiscale_valley_response(s.spectrum.amplitude(), config);
    s.reset_to(Stage::Filtered);
    s.filter_config = config;
    s.filtered = std::move(filtered);
    persist(s);
    return json_response(200, {{"stage", to_string(s.stage)}, {"degenerate", s.filtered.degenerate}, {"config", filter_config_to_json(config)}});
  }
  if (action == "filtered" && m == "GET") {
    std::lock_guard<std::mutex> lock(s.mutex);
    s.require(Stage::Filtered, "GET filtered");
    if (req.query.count("format") && req.query.at("format") == "png")
      return {200, "image/png", encode_png_gray(s.filtered.data, top_is_last_row(s.spectrum.freq()))};
    return json_response(200, {{"rows", s.filtered.data.rows()},
                               {"cols", s.filtered.data.cols()},
                               {"data", matrix_to_json(s.filtered.data)},
                               {"config", filter_config_to_json(s.filter_config)},
                               {"png", "/sessions/" + s.id + "/filtered?format=png"}});
  }
  if (action == "contours" && (m == "POST" || m == "GET")) {
    std::lock_guard<std::mutex> lock(s.mutex);
    s.require(Stage::Filtered, "contours");
    if (m == "POST" || s.stage == Stage::Filtered) {
      const Json body = m == "POST" ? parse_body(req.body) : Json::object();
      const double level = body.value("level", 0.25);
      const int min_length = body.value("min_length", 20);
      if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("level must lie in (0, 1)", "level");
      if (min_length < 2) throw InvalidArgument("min_length must be >= 2", "min_length");
      ContourSet set = filter_contours(marching_squares(s.filtered.data, level), min_length);
      s.reset_to(Stage::Contoured);
      s.level = level;
      s.min_length = min_length;
      s.contours = std::move(set);
      persist(s);
    }
    return json_response(200, to_json(s.contours));
  }
  if (action == "assignment" && (m == "PUT" || m == "GET")) {
    std::lock_guard<std::mutex> lock(s.mutex);
    if (m == "GET") {
      s.require(Stage::Assigned, "GET assignment");
      return json_response(200, to_json(s.assignment));
    }
    s.require(Stage::Contoured, "assignment");
    GroupAssignment a = assignment_from_json(parse_body(req.body));
    for (const auto &[g, ids] : a.groups)
      for (int id : ids)
        if (!s.contours.find(id)) throw InvalidArgument("unknown contour id " + std::to_string(id), "groups");
    s.reset_to(Stage::Assigned);
    s.assignment = std::move(a);
    persist(s);
    return json_response(200, to_json(s.assignment));
  }
  if (action == "extract" && m == "POST") {
    const Json body = parse_body(req.body);
    std::lock_guard<std::mutex> lock(s.mutex);
    s.require(Stage::Assigned, "extract");
    DilationHalfwidths hw;
    hw.rows = body.value("halfwidth_rows", hw.rows);
    hw.cols = body.value("halfwidth_cols", hw.cols);
    if (hw.rows < 0 || hw.cols < 0) throw InvalidArgument("halfwidths must be >= 0", "halfwidth_rows");
    const PeakMethod method = peak_method_from_string(body.value("method", std::string("region-min")));
    const auto masks = xor_resolve(build_regions(s.contours, s.assignment, hw));
    PeakSet peaks = extract_peaks(s.filtered, masks, s.spectrum.bias(), s.spectrum.freq(), method, &s.spectrum);
    s.reset_to(Stage::Extracted);
    s.halfwidths = hw;
    s.method = method;
    s.peaks = std::move(peaks);
    persist(s);
    return json_response(200, to_json(s.peaks));
  }
  if (action == "fit" && m == "POST") {
    Json body = parse_body(req.body);
    std::unique_lock<std::mutex> lock(s.mutex);
    s.require(Stage::Extracted, "fit");
    if (s.job_state == "running") throw stage_error("a fit is already running in this session");
    const std::string model = body.value("model", std::string("rabi"));
    std::vector<std::string> labels;
    for (const auto &[g, l] : s.assignment.transition_labels) labels.push_back(l);
    Json problem_json = body;
    problem_json.erase("direct");
    problem_json.erase("sample_points");
    Json obs = Json::array();
    std::vector<Observation> observations;
    if (model == "rabi" || body.value("direct", false)) {
      observations = observations_from_peaks(s.peaks, s.assignment);
    } else {
      const auto rabi = s.fits.find("rabi");
      if (rabi == s.fits.end()) throw stage_error("circuit fit targets the Rabi curves; fit the Rabi model first");
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const auto &[g, pts] : s.peaks.groups)
        for (const auto &p : pts) {
          lo = std::min(lo, p.bias);
          hi = std::max(hi, p.bias);
        }
      const int count = body.value("sample_points", 21);
      if (count < 2) throw InvalidArgument("sample_points must be >= 2", "sample_points");
      std::vector<double> bias(static_cast<std::size_t>(count));
      for (int i = 0; i < count; ++i) bias[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
      observations = sample_model_curve(rabi->second.rabi(), labels, bias,
                                        s.fit_problems.at("rabi").trunc.fock);
    }
    for (const auto &o : observations)
      obs.push_back({{"label", o.label}, {"bias", o.bias}, {"freq", o.freq}, {"weight", o.weight}});
    problem_json["observations"] = obs;
    problem_json["model"] = model;
    if (model != "rabi" && !problem_json.contains("bias_unit")) problem_json["bias_unit"] = "mA";
    FitProblem problem = fit_problem_from_json(problem_json);
    problem.threads = options_.fit_threads;

    if (s.job.joinable()) {
      lock.unlock();
      s.job.join();
      lock.lock();
    }
    s.cancel = false;
    s.job_state = "running";
    s.job_model = model;
    s.job_error.clear();
    const std::uint64_t generation = s.generation;
    std::weak_ptr<Session> weak = sp;
    s.job = std::thread([this, weak, problem, model, generation]() mutable {
      auto session = weak.lock();
      if (!session) return;
      problem.simplex.cancel = [session]() { return session->cancel.load(); };
      std::optional<FitResult> result;
      std::string error;
      try {
        result = fit(problem);
      } catch (const std::exception &e) {
        error = e.what();
      }
      std::lock_guard<std::mutex> guard(session->mutex);
      if (!error.empty()) {
        session->job_state = "failed";
        session->job_error = error;
      } else if (result->cancelled || session->generation != generation) {
        session->job_state = "cancelled";
      } else {
        session->fits[model] = *result;
        session->fit_problems[model] = problem;
        session->fit_problems[model].simplex.cancel = nullptr;
        session->stage = Stage::Fitted;
        session->job_state = "done";
        persist(*session);
      }
      session->job_done.notify_all();
    });
    return json_response(202, {{"state", "running"}, {"model", model}, {"observations", problem.observations.size()}});
  }
  if (action == "fit" && m == "GET") {
    std::lock_guard<std::mutex> lock(s.mutex);
    return json_response(200, {{"state", s.job_state}, {"model", s.job_model}, {"error", s.job_error}});
  }
  if ((action == "fit" && m == "DELETE") || (action == "fit/cancel" && m == "POST")) {
    std::lock_guard<std::mutex> lock(s.mutex);
    s.cancel = true;
    return json_response(200, {{"state", s.job_state}, {"cancel_requested", true}});
  }
  if (action == "results" && m == "GET") {
    std::lock_guard<std::mutex> lock(s.mutex);
    Json out = s.summary();
    if (s.stage >= Stage::Contoured) out["contour_count"] = s.contours.contours.size();
    if (s.stage >= Stage::Assigned) out["assignment"] = to_json(s.assignment);
    if (s.stage >= Stage::Extracted) out["peaks"] = to_json(s.peaks);
    Json fits = Json::object();
    for (const auto &[model, r] : s.fits) fits[model] = to_json(r);
    out["fits"] = fits;
    return json_response(200, out);
  }
  if (action == "overlay" && m == "GET") {
    std::lock_guard<std::mutex> lock(s.mutex);
    s.require(Stage::Fitted, "overlay");
    const std::vector<double> &bias = s.spectrum.bias().values();
    Json curves = Json::object();
    for (const auto &[model, r] : s.fits) {
      const FitProblem &problem = s.fit_problems.at(model);
      std::vector<std::string> labels;
      for (const auto &o : problem.observations)
        if (std::find(labels.begin(), labels.end(), o.label) == labels.end()) labels.push_back(o.label);
      FitProblem grid = problem;
      grid.observations.clear();
      for (const auto &l : labels)
        for (double b : bias) grid.observations.push_back({l, b, 0.0, 1.0});
      const TruncationConfig trunc = model == "circuit" && !r.stages.empty() ? r.stages.back().trunc : problem.trunc;
      const Eigen::VectorXd freq = model_frequencies(grid, r.values, trunc);
      Json per_label = Json::object();
      for (std::size_t k = 0; k < labels.size(); ++k) {
        std::vector<double> f(bias.size());
        for (std::size_t i = 0; i < bias.size(); ++i) f[i] = freq(static_cast<Eigen::Index>(k * bias.size() + i));
        per_label[labels[k]] = f;
      }
      curves[model] = per_label;
    }
    return json_response(200, {{"bias", bias}, {"curves", curves}});
  }
  throw not_found("no route for " + m + " /sessions/" + s.id + "/" + action);
}

void AnalysisService::persist(const Session &s) const {
  if (!options_.persist_dir) return;
  Json bundle = {{"id", s.id},
                 {"stage", to_string(s.stage)},
                 {"spectrum", Json::parse(format_json_spectrum(s.spectrum))},
                 {"filter", filter_config_to_json(s.filter_config)},
                 {"contour", {{"level", s.level}, {"min_length", s.min_length}}},
                 {"extract",
                  {{"method", to_string(s.method)},
                   {"halfwidth_rows", s.halfwidths.rows},
                   {"halfwidth_cols", s.halfwidths.cols}}}};
  if (s.stage >= Stage::Assigned) bundle["assignment"] = to_json(s.assignment);
  Json fits = Json::object();
  for (const auto &[model, r] : s.fits)
    fits[model] = {{"problem", to_json(s.fit_problems.at(model))}, {"result", to_json(r)}};
  bundle["fits"] = fits;
  write_text_file(*options_.persist_dir / (s.id + ".json"), bundle.dump());
}

void AnalysisService::restore() {
  for (const auto &entry : std::filesystem::directory_iterator(*options_.persist_dir)) {
    if (entry.path().extension() != ".json") continue;
    try {
      const Json b = read_json_file(entry.path());
      auto s = std::make_shared<Session>();
      s->id = b.at("id").get<std::string>();
      s->spectrum = parse_json_spectrum(b.at("spectrum").dump());
      const std::string stage = b.value("stage", std::string("loaded"));
      auto reached = [&](Stage st) {
        for (Stage x : {Stage::Filtered, Stage::Contoured, Stage::Assigned, Stage::Extracted, Stage::Fitted})
          if (to_string(x) == stage && x >= st) return true;
        return false;
      };
      if (reached(Stage::Filtered)) {
        s->filter_config = filter_config_from_json(b.at("filter"));
        s->filtered = multiscale_valley_response(s->spectrum.amplitude(), s->filter_config);
        s->stage = Stage::Filtered;
      }
      if (reached(Stage::Contoured)) {
        s->level = b.at("contour").at("level").get<double>();
        s->min_length = b.at("contour").at("min_length").get<int>();
        s->contours = filter_contours(marching_squares(s->filtered.data, s->level), s->min_length);
        s->stage = Stage::Contoured;
      }
      if (reached(Stage::Assigned)) {
        s->assignment = assignment_from_json(b.at("assignment"));
        s->stage = Stage::Assigned;
      }
      if (reached(Stage::Extracted)) {
        const Json &e = b.at("extract");
        s->method = peak_method_from_string(e.at("method").get<std::string>());
        s->halfwidths = {e.at("halfwidth_rows").get<int>(), e.at("halfwidth_cols").get<int>()};
        const auto masks = xor_resolve(build_regions(s->contours, s->assignment, s->halfwidths));
        s->peaks = extract_peaks(s->filtered, masks, s->spectrum.bias(), s->spectrum.freq(), s->method, &s->spectrum);
        s->stage = Stage::Extracted;
      }
      if (reached(Stage::Fitted)) {
        for (auto it = b.at("fits").begin(); it != b.at("fits").end(); ++it) {
          s->fit_problems[it.key()] = fit_problem_from_json(it.value().at("problem"));
          s->fits[it.key()] = fit_result_from_json(it.value().at("result"));
        }
        s->stage = Stage::Fitted;
      }
      sessions_[s->id] = s;
    } catch (const std::exception &) {
      // Unreadable bundles are skipped; the file is left for inspection.
    }
  }
}

namespace {

void install_routes(httplib::Server &http, AnalysisService &service) {
  auto handler = [&service](const httplib::Request &req, httplib::Response &res) {
    HttpRequest r;
    r.method = req.method;
    r.path = req.path;
    r.body = req.body;
    for (const auto &[k, v] : req.params) r.query[k] = v;
    const HttpResponse out = service.handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  http.Get(".*", handler);
  http.Post(".*", handler);
  http.Put(".*", handler);
  http.Delete(".*", handler);
}

}  // namespace

bool AnalysisService::listen() {
  server_ = std::make_unique<Server>();
  install_routes(server_->http, *this);
  return server_->http.listen(options_.host, options_.port);
}

int AnalysisService::listen_background() {
  server_ = std::make_unique<Server>();
  install_routes(server_->http, *this);
  const int port = server_->http.bind_to_any_port(options_.host);
  if (port < 0) throw Error("io", "cannot bind to " + options_.host);
  server_thread_ = std::thread([this]() { server_->http.listen_after_bind(); });
  server_->http.wait_until_ready();
  return port;
}

void AnalysisService::stop() {
  if (server_) server_->http.stop();
  if (server_thread_.joinable()) server_thread_.join();
}

}  // namespace scspec
