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

// Command-line front end: one subcommand per pipeline step.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "scspec/contour.hpp"
#include "scspec/convergence.hpp"
#include "scspec/error.hpp"
#include "scspec/fit.hpp"
#include "scspec/hamiltonian.hpp"
#include "scspec/peaks.hpp"
#include "scspec/png_writer.hpp"
#include "scspec/serialize.hpp"
#include "scspec/service.hpp"
#include "scspec/spectrum.hpp"
#include "scspec/valley_filter.hpp"

#ifndef SCSPEC_VERSION
#define SCSPEC_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace scspec;

namespace {

// JSON config files: nested objects map to subcommand sections, arrays to
// multi-value options.
// Keys are long option names of the selected subcommand; an object keyed by
// a subcommand name addresses that subcommand explicitly.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App *root) : root_(root) {}

  std::string to_config(const CLI::App *app, bool default_also, bool, std::string) const override {
    Json j = Json::object();
    for (const CLI::Option *opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto &r = opt->results();
        j[name] = r.size() == 1 ? Json(r.front()) : Json(r);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream &input) const override {
    Json j;
    try {
      j = Json::parse(input);
    } catch (const Json::exception &e) {
      throw CLI::ConversionError("config", e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config", "top level must be an object");
    std::vector<std::string> parents;
    const auto selected = root_->get_subcommands();
    if (!selected.empty()) {
      const std::string name = selected.front()->get_name();
      if (j.contains(name) && j.at(name).is_object()) {
        Json inner = j.at(name);
        j = std::move(inner);
      }
      parents.push_back(name);
    }
    std::vector<CLI::ConfigItem> items;
    flatten(j, parents, items);
    return items;
  }

 private:
  const CLI::App *root_;

  static std::string scalar(const Json &v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void flatten(const Json &j, std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem> &out) {
    if (!j.is_object()) throw CLI::ConversionError("config", "top level must be an object");
    for (const auto &[key, value] : j.items()) {
      if (value.is_object()) {
        auto p = parents;
        p.push_back(key);
        flatten(value, p, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto &v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      out.push_back(std::move(item));
    }
  }
};

std::string sha256_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  EVP_MD_CTX *ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Writes artifacts together with their provenance sidecars.
class Provenance {
 public:
  Provenance(const CLI::App *command, std::vector<fs::path> inputs)
      : command_(command), inputs_(std::move(inputs)) {}

  void add_input(const fs::path &p) { inputs_.push_back(p); }

  void text(const fs::path &path, const std::string &content) const {
    write_text_file(path, content);
    sidecar(path);
  }
  void binary(const fs::path &path, const std::string &bytes) const {
    write_binary_file(path, bytes);
    sidecar(path);
  }

 private:
  const CLI::App *command_;
  std::vector<fs::path> inputs_;

  void sidecar(const fs::path &path) const {
    Json params = Json::object();
    for (const CLI::Option *opt : command_->get_options()) {
      if (opt->get_lnames().empty()) continue;
      const std::string name = opt->get_lnames().front();
      if (name == "help") continue;
      if (opt->count() > 0) {
        const auto &r = opt->results();
        params[name] = r.size() == 1 ? Json(r.front()) : Json(r);
      } else if (!opt->get_default_str().empty()) {
        params[name] = opt->get_default_str();
      }
    }
    Json inputs = Json::array();
    for (const auto &p : inputs_) {
      if (p.empty()) continue;
      inputs.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
    }
    Json j = {{"artifact", path.filename().string()},
              {"tool", "scspec"},
              {"version", SCSPEC_VERSION},
              {"subcommand", command_->get_name()},
              {"parameters", params},
              {"inputs", inputs},
              {"created_utc", utc_now()}};
    write_text_file(fs::path(path.string() + ".prov.json"), j.dump(2) + "\n");
  }
};

void require_file(const fs::path &p, const std::string &field) {
  if (!fs::exists(p)) throw InvalidArgument("file not found: " + p.string(), field);
}

Spectrum2D load_any(const fs::path &p, bool negate, const std::string &field) {
  require_file(p, field);
  return load_spectrum(p, format_from_path(p), negate);
}

LineMode mode_from_string(const std::string &s) {
  if (s == "valley") return LineMode::Valley;
  if (s == "ridge") return LineMode::Ridge;
  throw InvalidArgument("mode must be valley or ridge", "mode");
}

std::string join(const std::vector<double> &v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::vector<double> split_doubles(const std::string &s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

/// Filtered images travel as spectrum JSON with the filter settings in metadata.
Spectrum2D filtered_to_spectrum(const Spectrum2D &source, const FilteredImage &f) {
  Spectrum2D out(source.bias(), source.freq(), f.data);
  out.metadata()["kind"] = "filtered";
  out.metadata()["scales"] = join(f.config.scales);
  out.metadata()["mode"] = f.config.mode == LineMode::Valley ? "valley" : "ridge";
  out.metadata()["degenerate"] = f.degenerate ? "true" : "false";
  return out;
}

FilteredImage filtered_from_spectrum(const Spectrum2D &s) {
  FilteredImage f;
  f.data = s.amplitude();
  const auto &m = s.metadata();
  if (auto it = m.find("scales"); it != m.end() && !it->second.empty()) f.config.scales = split_doubles(it->second);
  if (auto it = m.find("mode"); it != m.end()) f.config.mode = mode_from_string(it->second);
  if (auto it = m.find("degenerate"); it != m.end()) f.degenerate = it->second == "true";
  return f;
}

Point to_pixel(const Point &p, Eigen::Index rows, bool flip) {
  return {flip ? static_cast<double>(rows - 1) - p.row : p.row, p.col};
}

/// Grayscale image with each contour drawn in its palette color and labeled
/// with its id, scaled up for legibility.
RgbImage labeled_contours(const Matrix &image, const ContourSet &set, bool flip, int zoom) {
  const Eigen::Index rows = image.rows(), cols = image.cols();
  RgbImage base = RgbImage::from_gray(image, flip);
  RgbImage img(static_cast<int>(cols) * zoom, static_cast<int>(rows) * zoom);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) img.set(x, y, base.get(x / zoom, y / zoom));
  for (const Contour &c : set.contours) {
    const Rgb color = palette(static_cast<std::size_t>(c.id));
    for (std::size_t i = 1; i < c.vertices.size(); ++i) {
      const Point a = to_pixel(c.vertices[i - 1], rows, flip), b = to_pixel(c.vertices[i], rows, flip);
      img.line((a.col + 0.5) * zoom, (a.row + 0.5) * zoom, (b.col + 0.5) * zoom, (b.row + 0.5) * zoom, color);
    }
    if (!c.vertices.empty()) {
      const Point m = to_pixel(c.vertices[c.vertices.size() / 2], rows, flip);
      const int x = static_cast<int>(m.col * zoom) + 2, y = static_cast<int>(m.row * zoom) + 2;
      const std::string label = std::to_string(c.id);
      img.rect(x - 1, y - 1, x + 8 * static_cast<int>(label.size()) + 1, y + 11, {255, 255, 255});
      img.text(x, y, label, color, 2);
    }
  }
  return img;
}

RgbImage region_image(const std::vector<RegionMask> &masks, Eigen::Index rows, Eigen::Index cols, bool flip) {
  RgbImage img(static_cast<int>(cols), static_cast<int>(rows));
  for (std::size_t k = 0; k < masks.size(); ++k) {
    const Rgb color = palette(static_cast<std::size_t>(masks[k].group_id));
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        if (masks[k].cells(r, c)) img.set(static_cast<int>(c), static_cast<int>(flip ? rows - 1 - r : r), color);
  }
  return img;
}

Json masks_to_json(const std::vector<RegionMask> &masks) {
  Json arr = Json::array();
  for (const auto &m : masks) arr.push_back({{"group", m.group_id}, {"mask", matrix_to_json(m.cells.cast<double>())}});
  return arr;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw InvalidArgument("point count must be positive");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

void print_error(const std::string &code, const std::string &message, const std::string &field = {}) {
  Json j = {{"error", code}, {"message", message}};
  if (!field.empty()) j["field"] = field;
  std::cerr << j.dump() << "\n";
}

void add_config(CLI::App *sub) {
  sub->fallthrough();
  sub->footer("Options may also be read from a JSON file with --config FILE.");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Spectroscopy peak tracing and circuit fitting"};
  app.set_version_flag("--version", SCSPEC_VERSION);
  app.require_subcommand(1);
  app.set_config("--config", "", "JSON file with option values");
  app.config_formatter(std::make_shared<JsonConfig>(&app));

  // ---- synth ----
  auto *synth = app.add_subcommand("synth", "Generate a synthetic spectrum with Lorentzian dips");
  add_config(synth);
  std::string s_model = "rabi", s_params, s_out, s_png, s_truth;
  std::vector<double> s_bias{-0.05, 0.05, 121}, s_freq{0.0, 12.0, 241};
  std::vector<std::string> s_labels{"w10", "w20", "w31"};
  double s_gamma = 0.1, s_sigma = 0.05, s_depth = 1.0;
  std::uint64_t s_seed = 0;
  int s_fock = 13, s_basis = 50;
  synth->add_option("--model", s_model, "rabi or fluxonium")->check(CLI::IsMember({"rabi", "fluxonium"}))->capture_default_str();
  synth->add_option("--params", s_params, "JSON parameter record");
  synth->add_option("--bias", s_bias, "first last count (mA, or flux quanta for fluxonium)")->expected(3)->capture_default_str();
  synth->add_option("--freq", s_freq, "first last count (GHz)")->expected(3)->capture_default_str();
  synth->add_option("--transitions", s_labels, "transition labels")->capture_default_str();
  synth->add_option("--gamma", s_gamma, "Lorentzian FWHM (GHz)")->capture_default_str();
  synth->add_option("--sigma-g", s_sigma, "Gaussian noise std")->capture_default_str();
  synth->add_option("--depth", s_depth, "dip depth")->capture_default_str();
  synth->add_option("--fock", s_fock, "Fock cutoff for the Rabi model")->capture_default_str();
  synth->add_option("--basis", s_basis, "fluxonium oscillator basis size")->capture_default_str();
  synth->add_option("--seed", s_seed, "noise seed")->required();
  synth->add_option("--out", s_out, "spectrum path (.json or .csv)")->required();
  synth->add_option("--png", s_png, "grayscale PNG of the spectrum");
  synth->add_option("--truth", s_truth, "CSV of the true transition frequencies");

  // ---- filter ----
  auto *filter = app.add_subcommand("filter", "Multi-scale valley filter");
  add_config(filter);
  std::string f_in, f_out, f_png, f_mode = "valley";
  std::vector<double> f_scales{1.0, 2.0, 4.0};
  bool f_negate = false, f_auto = false;
  double f_level = 0.25;
  int f_min_length = 20;
  filter->add_option("--in", f_in, "spectrum (.json or .csv)")->required();
  filter->add_option("--scales", f_scales, "Gaussian scales in pixels")->capture_default_str();
  filter->add_option("--mode", f_mode, "valley or ridge")->capture_default_str();
  filter->add_flag("--negate", f_negate, "negate amplitudes at load");
  filter->add_flag("--auto-scale", f_auto, "keep the single scale that extracts the most contour length");
  filter->add_option("--level", f_level, "contour level used by --auto-scale")->capture_default_str();
  filter->add_option("--min-length", f_min_length, "minimum contour length used by --auto-scale")->capture_default_str();
  filter->add_option("--out", f_out, "filtered image (spectrum JSON)")->required();
  filter->add_option("--png", f_png, "8-bit PNG, top row = highest frequency");

  // ---- contours ----
  auto *contours = app.add_subcommand("contours", "Marching-squares contours of a filtered image");
  add_config(contours);
  std::string c_in, c_out, c_png;
  double c_level = 0.25;
  int c_min_length = 20, c_zoom = 3;
  bool c_raw = false;
  contours->add_option("--in", c_in, "filtered image (spectrum JSON)")->required();
  contours->add_option("--level", c_level, "iso level")->capture_default_str();
  contours->add_option("--min-length", c_min_length, "minimum vertex count")->capture_default_str();
  contours->add_flag("--raw", c_raw, "allow tracing an unfiltered spectrum (normalized first)");
  contours->add_option("--out", c_out, "contour JSON")->required();
  contours->add_option("--png", c_png, "labeled-contour PNG for assignment");
  contours->add_option("--zoom", c_zoom, "PNG magnification")->capture_default_str();

  // ---- regions ----
  auto *regions = app.add_subcommand("regions", "Build and XOR-resolve group regions");
  add_config(regions);
  std::string r_contours, r_assignment, r_out, r_png;
  int r_hw_rows = 5, r_hw_cols = 1;
  regions->add_option("--contours", r_contours, "contour JSON")->required();
  regions->add_option("--assignment", r_assignment, "assignment JSON")->required();
  regions->add_option("--halfwidth-rows", r_hw_rows, "dilation halfwidth along frequency")->capture_default_str();
  regions->add_option("--halfwidth-cols", r_hw_cols, "dilation halfwidth along bias")->capture_default_str();
  regions->add_option("--out", r_out, "region masks JSON")->required();
  regions->add_option("--png", r_png, "region PNG");

  // ---- peaks ----
  auto *peaks = app.add_subcommand("peaks", "Extract per-column peaks inside each region");
  add_config(peaks);
  std::string p_filtered, p_contours, p_assignment, p_raw, p_out, p_csv, p_method = "region-min";
  int p_hw_rows = 5, p_hw_cols = 1;
  bool p_negate = false;
  peaks->add_option("--filtered", p_filtered, "filtered image (spectrum JSON)")->required();
  peaks->add_option("--contours", p_contours, "contour JSON")->required();
  peaks->add_option("--assignment", p_assignment, "assignment JSON")->required();
  peaks->add_option("--halfwidth-rows", p_hw_rows, "dilation halfwidth along frequency")->capture_default_str();
  peaks->add_option("--halfwidth-cols", p_hw_cols, "dilation halfwidth along bias")->capture_default_str();
  peaks->add_option("--method", p_method, "region-min or lorentzian-fit")->capture_default_str();
  peaks->add_option("--raw", p_raw, "raw spectrum for lorentzian-fit");
  peaks->add_flag("--negate", p_negate, "negate the raw spectrum at load");
  peaks->add_option("--out", p_out, "PeakSet JSON")->required();
  peaks->add_option("--csv", p_csv, "peaks CSV");

  // ---- fit-rabi ----
  auto *fit_rabi_cmd = app.add_subcommand("fit-rabi", "Fit the bias-dependent Rabi model to peaks");
  add_config(fit_rabi_cmd);
  std::string fr_peaks, fr_assignment, fr_problem, fr_initial, fr_out;
  int fr_fock = 13, fr_multistart = 0;
  std::uint64_t fr_seed = 0;
  fit_rabi_cmd->add_option("--peaks", fr_peaks, "PeakSet JSON");
  fit_rabi_cmd->add_option("--assignment", fr_assignment, "assignment JSON with transition labels");
  fit_rabi_cmd->add_option("--problem", fr_problem, "complete FitProblem JSON");
  fit_rabi_cmd->add_option("--initial", fr_initial, "initial RabiParams JSON");
  fit_rabi_cmd->add_option("--fock", fr_fock, "Fock cutoff")->capture_default_str();
  fit_rabi_cmd->add_option("--multistart", fr_multistart, "extra perturbed starts")->capture_default_str();
  fit_rabi_cmd->add_option("--seed", fr_seed, "multistart seed")->capture_default_str();
  fit_rabi_cmd->add_option("--out", fr_out, "FitResult JSON")->required();

  // ---- fit-circuit ----
  auto *fit_circuit_cmd = app.add_subcommand("fit-circuit", "Fit circuit parameters to Rabi curves or peaks");
  add_config(fit_circuit_cmd);
  std::string fc_rabi, fc_peaks, fc_assignment, fc_problem, fc_initial, fc_out;
  std::vector<double> fc_calibration;
  std::vector<std::string> fc_labels{"w10", "w20", "w31"};
  int fc_points = 21;
  unsigned fc_threads = 0;
  bool fc_direct = false, fc_flux = false;
  fit_circuit_cmd->add_option("--rabi", fc_rabi, "FitResult JSON of a Rabi fit");
  fit_circuit_cmd->add_option("--sample-points", fc_points, "Rabi curve samples per transition")->capture_default_str();
  fit_circuit_cmd->add_option("--transitions", fc_labels, "transitions sampled from the Rabi fit")->capture_default_str();
  fit_circuit_cmd->add_flag("--direct", fc_direct, "fit peaks directly instead of Rabi curves");
  fit_circuit_cmd->add_option("--peaks", fc_peaks, "PeakSet JSON for --direct");
  fit_circuit_cmd->add_option("--assignment", fc_assignment, "assignment JSON for --direct");
  fit_circuit_cmd->add_flag("--flux-bias", fc_flux, "bias axis is already in flux quanta");
  fit_circuit_cmd->add_option("--calibration", fc_calibration, "I0_mA slope_per_mA")->expected(2);
  fit_circuit_cmd->add_option("--problem", fc_problem, "complete FitProblem JSON");
  fit_circuit_cmd->add_option("--initial", fc_initial, "initial CircuitParams JSON");
  fit_circuit_cmd->add_option("--threads", fc_threads, "worker threads (0 = hardware)")->capture_default_str();
  fit_circuit_cmd->add_option("--out", fc_out, "FitResult JSON")->required();

  // ---- converge ----
  auto *converge = app.add_subcommand("converge", "Truncation convergence studies");
  add_config(converge);
  std::string cv_axis = "fock", cv_params, cv_dir = ".";
  int cv_points = 0;
  unsigned cv_threads = 0;
  std::vector<double> cv_g_sweep;
  converge->add_option("--axis", cv_axis, "fock, charge or qubit")->check(CLI::IsMember({"fock", "charge", "qubit"}))->capture_default_str();
  converge->add_option("--params", cv_params, "CircuitParams JSON (charge, qubit)");
  converge->add_option("--points", cv_points, "bias points (0 = default for the axis)")->capture_default_str();
  converge->add_option("--threads", cv_threads, "worker threads (0 = hardware)")->capture_default_str();
  converge->add_option("--g-sweep", cv_g_sweep, "g / omega_r values for Fock ratio curves at delta / omega_r = 0.4");
  converge->add_option("--out-dir", cv_dir, "output directory")->capture_default_str();

  // ---- precision ----
  auto *precision = app.add_subcommand("precision", "Peak-position precision versus noise");
  add_config(precision);
  double pr_gamma = 10.0;
  std::vector<double> pr_sigmas{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  int pr_n = 10000;
  std::uint64_t pr_seed = 0;
  std::string pr_dir = ".";
  precision->add_option("--gamma", pr_gamma, "Lorentzian FWHM in samples")->capture_default_str();
  precision->add_option("--sigma-g", pr_sigmas, "noise levels")->capture_default_str();
  precision->add_option("--n", pr_n, "signals per noise level")->capture_default_str();
  precision->add_option("--seed", pr_seed, "noise seed")->required();
  precision->add_option("--out-dir", pr_dir, "output directory")->capture_default_str();

  // ---- serve ----
  auto *serve = app.add_subcommand("serve", "Run the local analysis service");
  add_config(serve);
  ServiceOptions sv;
  std::string sv_persist;
  if (const char *env = std::getenv("SCSPEC_PORT")) {
    try {
      sv.port = std::stoi(env);
    } catch (const std::exception &) {
      print_error("invalid_argument", "SCSPEC_PORT is not an integer", "port");
      return 2;
    }
  }
  serve->add_option("--host", sv.host, "bind address")->capture_default_str();
  serve->add_option("--port", sv.port, "TCP port (env SCSPEC_PORT)")->capture_default_str();
  serve->add_option("--persist-dir", sv_persist, "directory for session bundles");
  serve->add_option("--fit-threads", sv.fit_threads, "worker threads per fit")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (synth->parsed()) {
      const AxisGrid bias = AxisGrid::linspace(s_bias[0], s_bias[1], static_cast<std::size_t>(s_bias[2]),
                                               s_model == "rabi" ? "bias" : "flux", s_model == "rabi" ? "mA" : "Phi0");
      const AxisGrid freq = AxisGrid::linspace(s_freq[0], s_freq[1], static_cast<std::size_t>(s_freq[2]), "frequency", "GHz");
      std::vector<std::pair<int, int>> pairs;
      for (const auto &l : s_labels) pairs.push_back(parse_transition(l));
      int levels = 0;
      for (auto [i, j] : pairs) levels = std::max(levels, std::max(i, j) + 1);
      std::vector<std::vector<double>> truth(bias.size());
      if (s_model == "rabi") {
        const RabiParams p = s_params.empty() ? RabiParams{3.45, 0.83, 5.17, 60.0, 0.0, 0.0, 0.0}
                                              : rabi_params_from_json(read_json_file(s_params));
        p.validate();
        for (std::size_t b = 0; b < bias.size(); ++b)
          truth[b] = transition_frequencies(rabi_levels(p, bias[b], s_fock, levels), pairs);
      } else {
        const FluxoniumParams p = s_params.empty() ? FluxoniumParams{} : fluxonium_params_from_json(read_json_file(s_params));
        p.validate();
        for (std::size_t b = 0; b < bias.size(); ++b)
          truth[b] = transition_frequencies(fluxonium_levels(p, 2.0 * M_PI * bias[b], s_basis, levels), pairs);
      }
      std::vector<SyntheticLineSpec> lines;
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        SyntheticLineSpec line;
        line.gamma = s_gamma;
        line.depth = s_depth;
        line.center = [&truth, &bias, k](double x) { return truth[bias.nearest_index(x)][k]; };
        lines.push_back(std::move(line));
      }
      SyntheticOptions opts;
      opts.sigma_g = s_sigma;
      opts.seed = s_seed;
      Spectrum2D spec = generate_synthetic_spectrum(lines, bias, freq, opts);
      spec.metadata()["model"] = s_model;
      Provenance prov(synth, {s_params});
      const fs::path out(s_out);
      prov.text(out, format_from_path(out) == SpectrumFormat::Json ? format_json_spectrum(spec) : format_csv_spectrum(spec));
      if (!s_png.empty()) prov.binary(s_png, encode_png_gray(normalize_unit_range(spec.amplitude()), top_is_last_row(freq)));
      if (!s_truth.empty()) {
        std::ostringstream os;
        os << std::setprecision(17) << "bias,transition,freq_GHz\n";
        for (std::size_t b = 0; b < bias.size(); ++b)
          for (std::size_t k = 0; k < pairs.size(); ++k) os << bias[b] << "," << s_labels[k] << "," << truth[b][k] << "\n";
        prov.text(s_truth, os.str());
      }
      return 0;
    }

    if (filter->parsed()) {
      const Spectrum2D spec = load_any(f_in, f_negate, "in");
      FilterConfig cfg;
      cfg.scales = f_scales;
      cfg.mode = mode_from_string(f_mode);
      if (f_auto && cfg.scales.size() > 1) {
        const std::size_t best = select_scale_by_structure(spec.amplitude(), cfg.scales, f_level, f_min_length);
        cfg.scales = {cfg.scales[best]};
      }
      const FilteredImage filtered = multiscale_valley_response(spec.amplitude(), cfg);
      if (filtered.degenerate) print_error("degenerate", "filter response is constant; image set to 0.5");
      Provenance prov(filter, {f_in});
      prov.text(f_out, format_json_spectrum(filtered_to_spectrum(spec, filtered)));
      if (!f_png.empty()) prov.binary(f_png, encode_png_gray(filtered.data, top_is_last_row(spec.freq())));
      return 0;
    }

    if (contours->parsed()) {
      const Spectrum2D spec = load_any(c_in, false, "in");
      if (!c_raw && (spec.metadata().count("kind") == 0 || spec.metadata().at("kind") != "filtered"))
        throw InvalidArgument("input is not a filtered image; pass --raw to trace it anyway", "in");
      const Matrix image = c_raw ? normalize_unit_range(spec.amplitude()) : spec.amplitude();
      const ContourSet set = filter_contours(marching_squares(image, c_level), c_min_length);
      Provenance prov(contours, {c_in});
      prov.text(c_out, to_json(set).dump(1) + "\n");
      if (!c_png.empty())
        prov.binary(c_png, labeled_contours(image, set, top_is_last_row(spec.freq()), std::max(1, c_zoom)).encode());
      std::cout << set.contours.size() << " contours\n";
      return 0;
    }

    if (regions->parsed()) {
      require_file(r_contours, "contours");
      require_file(r_assignment, "assignment");
      const ContourSet set = contour_set_from_json(read_json_file(r_contours));
      const GroupAssignment assignment = assignment_from_json(read_json_file(r_assignment));
      const auto masks = xor_resolve(build_regions(set, assignment, {r_hw_rows, r_hw_cols}));
      Provenance prov(regions, {r_contours, r_assignment});
      prov.text(r_out, Json({{"rows", set.rows}, {"cols", set.cols}, {"regions", masks_to_json(masks)}}).dump() + "\n");
      if (!r_png.empty()) prov.binary(r_png, region_image(masks, set.rows, set.cols, true).encode());
      return 0;
    }

    if (peaks->parsed()) {
      const Spectrum2D fspec = load_any(p_filtered, false, "filtered");
      require_file(p_contours, "contours");
      require_file(p_assignment, "assignment");
      const ContourSet set = contour_set_from_json(read_json_file(p_contours));
      const GroupAssignment assignment = assignment_from_json(read_json_file(p_assignment));
      const auto masks = xor_resolve(build_regions(set, assignment, {p_hw_rows, p_hw_cols}));
      const PeakMethod method = peak_method_from_string(p_method);
      std::optional<Spectrum2D> raw;
      if (!p_raw.empty()) raw = load_any(p_raw, p_negate, "raw");
      if (method == PeakMethod::LorentzianFit && !raw) throw InvalidArgument("lorentzian-fit needs --raw", "raw");
      const PeakSet result = extract_peaks(filtered_from_spectrum(fspec), masks, fspec.bias(), fspec.freq(), method,
                                           raw ? &*raw : nullptr);
      Provenance prov(peaks, {p_filtered, p_contours, p_assignment, p_raw});
      prov.text(p_out, to_json(result).dump(1) + "\n");
      if (!p_csv.empty()) prov.text(p_csv, format_peaks_csv(result));
      std::cout << result.size() << " peaks in " << result.groups.size() << " groups\n";
      return 0;
    }

    if (fit_rabi_cmd->parsed()) {
      FitProblem problem;
      Provenance prov(fit_rabi_cmd, {fr_problem, fr_peaks, fr_assignment, fr_initial});
      if (!fr_problem.empty()) {
        problem = fit_problem_from_json(read_json_file(fr_problem));
      } else {
        if (fr_peaks.empty() || fr_assignment.empty())
          throw InvalidArgument("either --problem or both --peaks and --assignment are required", "peaks");
        problem.model = ModelKind::Rabi;
        problem.observations = observations_from_peaks(peak_set_from_json(read_json_file(fr_peaks)),
                                                       assignment_from_json(read_json_file(fr_assignment)));
        const RabiParams init = fr_initial.empty() ? RabiParams{} : rabi_params_from_json(read_json_file(fr_initial));
        problem.parameters = rabi_parameters(init);
        problem.trunc.fock = fr_fock;
        problem.multistart = fr_multistart;
        problem.seed = fr_seed;
      }
      if (problem.model != ModelKind::Rabi) throw InvalidArgument("problem model is not rabi", "model");
      const FitResult result = fit_rabi(problem);
      prov.text(fr_out, to_json(result).dump(2) + "\n");
      std::cout << format_fit_report(result);
      return 0;
    }

    if (fit_circuit_cmd->parsed()) {
      FitProblem problem;
      Provenance prov(fit_circuit_cmd, {fc_problem, fc_rabi, fc_peaks, fc_assignment, fc_initial});
      if (!fc_problem.empty()) {
        problem = fit_problem_from_json(read_json_file(fc_problem));
      } else {
        problem.model = ModelKind::Circuit;
        if (fc_direct) {
          if (fc_peaks.empty() || fc_assignment.empty())
            throw InvalidArgument("--direct needs --peaks and --assignment", "peaks");
          problem.observations = observations_from_peaks(peak_set_from_json(read_json_file(fc_peaks)),
                                                         assignment_from_json(read_json_file(fc_assignment)));
        } else {
          if (fc_rabi.empty()) throw InvalidArgument("--rabi is required unless --direct is given", "rabi");
          const FitResult rabi = fit_result_from_json(read_json_file(fc_rabi));
          if (rabi.model != ModelKind::Rabi) throw InvalidArgument("--rabi result is not a Rabi fit", "rabi");
          double lo = 0.0, hi = 0.0;
          if (fc_peaks.empty()) {
            const RabiParams p = rabi.rabi();
            lo = p.I0 - 0.5 / std::max(1.0, std::abs(p.eps_slope));
            hi = p.I0 + 0.5 / std::max(1.0, std::abs(p.eps_slope));
          } else {
            const PeakSet ps = peak_set_from_json(read_json_file(fc_peaks));
            lo = std::numeric_limits<double>::infinity();
            hi = -lo;
            for (const auto &[g, pts] : ps.groups)
              for (const auto &p : pts) lo = std::min(lo, p.bias), hi = std::max(hi, p.bias);
          }
          problem.observations = sample_model_curve(rabi.rabi(), fc_labels, linspace(lo, hi, fc_points));
        }
        const CircuitParams init = fc_initial.empty() ? CircuitParams{} : circuit_params_from_json(read_json_file(fc_initial));
        problem.parameters = circuit_parameters(init);
        if (fc_flux) {
          problem.bias_unit = BiasUnit::Flux;
        } else {
          if (fc_calibration.size() != 2)
            throw InvalidArgument("current bias needs --calibration I0 slope, or pass --flux-bias", "calibration");
          problem.bias_unit = BiasUnit::Current_mA;
          problem.calibration = BiasCalibration(fc_calibration[0], fc_calibration[1]);
        }
      }
      problem.threads = fc_threads;
      if (problem.model != ModelKind::Circuit) throw InvalidArgument("problem model is not circuit", "model");
      const FitResult result = fit_circuit(problem);
      prov.text(fc_out, to_json(result).dump(2) + "\n");
      std::cout << format_fit_report(result);
      return 0;
    }

    if (converge->parsed()) {
      const fs::path dir(cv_dir);
      Provenance prov(converge, {cv_params});
      auto emit = [&](const ConvergenceReport &r, const std::string &stem, bool log_y) {
        prov.text(dir / (stem + ".json"), to_json(r).dump(1) + "\n");
        prov.text(dir / (stem + ".csv"), format_convergence_csv(r));
        std::vector<PlotSeries> plot;
        if (r.series.empty() || log_y) {
          PlotSeries s;
          for (std::size_t i = 0; i < r.values.size(); ++i) {
            s.x.push_back(static_cast<double>(i));
            s.y.push_back(r.values[i]);
          }
          plot.push_back(std::move(s));
        } else {
          for (const auto &[name, ys] : r.series) {
            PlotSeries s;
            for (std::size_t i = 0; i < ys.size(); ++i) {
              s.x.push_back(static_cast<double>(i));
              s.y.push_back(ys[i]);
            }
            plot.push_back(std::move(s));
          }
        }
        prov.binary(dir / (stem + ".png"), line_plot(plot, 640, 400, log_y).encode());
        for (std::size_t i = 0; i < r.values.size(); ++i)
          std::cout << stem << " " << r.settings[i] << " " << std::setprecision(6) << r.values[i] << "\n";
      };
      if (cv_axis == "fock") {
        FockSweep sweep;
        if (cv_points > 0) sweep.flux = flux_points(0.49, 0.50, cv_points);
        const FockConvergence fc = fock_convergence(sweep);
        emit(fc.deviation, "fock_deviation", true);
        emit(fc.ratio, "fock_ratio", false);
        for (double gr : cv_g_sweep) {
          FockSweep s = sweep;
          s.g = gr * s.omega_r;
          s.delta = 0.4 * s.omega_r;
          std::ostringstream stem;
          stem << "fock_ratio_g" << gr;
          emit(fock_convergence(s).ratio, stem.str(), false);
        }
      } else {
        const CircuitParams params = cv_params.empty() ? CircuitParams{} : circuit_params_from_json(read_json_file(cv_params));
        if (cv_axis == "charge") {
          ChargeSweep sweep;
          if (cv_points > 0) sweep.flux = flux_points(0.49, 0.50, cv_points);
          sweep.threads = cv_threads;
          emit(charge_convergence(params, sweep), "charge", true);
        } else {
          QubitSpaceSweep sweep;
          if (cv_points > 0) sweep.flux = flux_points(0.49, 0.50, cv_points);
          sweep.threads = cv_threads;
          emit(qubit_space_convergence(params, sweep), "qubit_space", true);
        }
      }
      return 0;
    }

    if (precision->parsed()) {
      const PrecisionStudy study = precision_study(pr_gamma, pr_sigmas, pr_n, pr_seed);
      const fs::path dir(pr_dir);
      Provenance prov(precision, {});
      prov.text(dir / "precision.json", to_json(study).dump(1) + "\n");
      prov.text(dir / "precision.csv", format_precision_csv(study));
      PlotSeries measured, fitted;
      for (const auto &row : study.rows) {
        measured.x.push_back(row.sigma_g);
        measured.y.push_back(row.sigma_p);
        fitted.x.push_back(row.sigma_g);
        fitted.y.push_back(study.slope * row.sigma_g + study.intercept);
      }
      prov.binary(dir / "precision.png", line_plot({measured, fitted}, 640, 400, false).encode());
      std::cout << std::setprecision(6) << "slope " << study.slope << " intercept " << study.intercept << " r2 "
                << study.r_squared << "\n";
      return 0;
    }

    if (serve->parsed()) {
      if (!sv_persist.empty()) sv.persist_dir = sv_persist;
      AnalysisService service(sv);
      std::cout << "listening on http://" << sv.host << ":" << sv.port << std::endl;
      if (!service.listen()) {
        print_error("bind", "could not bind " + sv.host + ":" + std::to_string(sv.port), "port");
        return 1;
      }
      return 0;
    }
  } catch (const InvalidArgument &e) {
    print_error(e.code(), e.what(), e.field());
    return 1;
  } catch (const Error &e) {
    print_error(e.code(), e.what());
    return 1;
  } catch (const Json::exception &e) {
    print_error("parse", e.what());
    return 1;
  } catch (const std::exception &e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
