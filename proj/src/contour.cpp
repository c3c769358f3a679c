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

#include "scspec/contour.hpp"

#include <array>
#include <cmath>
#include <deque>

#include "scspec/error.hpp"
#include "scspec/valley_filter.hpp"

namespace scspec {

namespace {

enum Side { kTop = 0, kRight = 1, kBottom = 2, kLeft = 3 };

class EdgeIndex {
 public:
  EdgeIndex(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols) {}

  // Horizontal edge between (r, c) and (r, c + 1).
  Eigen::Index horizontal(Eigen::Index r, Eigen::Index c) const { return r * (cols_ - 1) + c; }
  // Vertical edge between (r, c) and (r + 1, c).
  Eigen::Index vertical(Eigen::Index r, Eigen::Index c) const {
    return rows_ * (cols_ - 1) + r * cols_ + c;
  }
  Eigen::Index count() const { return rows_ * (cols_ - 1) + (rows_ - 1) * cols_; }

  Eigen::Index of(Side side, Eigen::Index r, Eigen::Index c) const {
    switch (side) {
      case kTop: return horizontal(r, c);
      case kBottom: return horizontal(r + 1, c);
      case kLeft: return vertical(r, c);
      case kRight: return vertical(r, c + 1);
    }
    return -1;
  }

  // Crossing point on an edge, always interpolated from the top/left corner.
  Point crossing(const Matrix &img, double level, Eigen::Index edge) const {
    const Eigen::Index nh = rows_ * (cols_ - 1);
    if (edge < nh) {
      const Eigen::Index r = edge / (cols_ - 1), c = edge % (cols_ - 1);
      const double a = img(r, c), b = img(r, c + 1);
      return {static_cast<double>(r), static_cast<double>(c) + (level - a) / (b - a)};
    }
    const Eigen::Index e = edge - nh;
    const Eigen::Index r = e / cols_, c = e % cols_;
    const double a = img(r, c), b = img(r + 1, c);
    return {static_cast<double>(r) + (level - a) / (b - a), static_cast<double>(c)};
  }

 private:
  Eigen::Index rows_, cols_;
};

struct Segment {
  Eigen::Index a, b;
};

// Side pairs for each corner case; bit 0 = top-left, 1 = top-right,
// 2 = bottom-right, 3 = bottom-left. Saddles (5, 10) are handled separately.
constexpr std::array<std::array<int, 2>, 16> kCases{{
    {-1, -1}, {kLeft, kTop}, {kTop, kRight}, {kLeft, kRight},
    {kRight, kBottom}, {-1, -1}, {kTop, kBottom}, {kLeft, kBottom},
    {kLeft, kBottom}, {kTop, kBottom}, {-1, -1}, {kRight, kBottom},
    {kLeft, kRight}, {kTop, kRight}, {kLeft, kTop}, {-1, -1},
}};

}  // namespace

const Contour *ContourSet::find(int id) const {
  for (const auto &c : contours) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

ContourSet marching_squares(const Matrix &image, double level) {
  ContourSet set;
  set.level = level;
  set.rows = image.rows();
  set.cols = image.cols();
  if (image.rows() < 2 || image.cols() < 2) return set;
  if (!(level > image.minCoeff() && level < image.maxCoeff())) return set;

  const EdgeIndex edges(image.rows(), image.cols());
  std::vector<Segment> segments;
  for (Eigen::Index r = 0; r + 1 < image.rows(); ++r) {
    for (Eigen::Index c = 0; c + 1 < image.cols(); ++c) {
      const double tl = image(r, c), tr = image(r, c + 1);
      const double br = image(r + 1, c + 1), bl = image(r + 1, c);
      const int index = (tl >= level ? 1 : 0) | (tr >= level ? 2 : 0) | (br >= level ? 4 : 0) |
                        (bl >= level ? 8 : 0);
      auto add = [&](int s1, int s2) {
        segments.push_back({edges.of(static_cast<Side>(s1), r, c),
                            edges.of(static_cast<Side>(s2), r, c)});
      };
      if (index == 5 || index == 10) {
        const bool center_high = 0.25 * (tl + tr + br + bl) >= level;
        // Separate whichever pair of diagonal corners is not connected
        // through the cell center.
        const bool isolate_tl_br = (index == 5) != center_high;
        if (isolate_tl_br) {
          add(kLeft, kTop);
          add(kRight, kBottom);
        } else {
          add(kTop, kRight);
          add(kLeft, kBottom);
        }
        continue;
      }
      if (kCases[index][0] >= 0) add(kCases[index][0], kCases[index][1]);
    }
  }

  // Each edge is touched by at most two segments.
  std::vector<std::array<int, 2>> touching(static_cast<std::size_t>(edges.count()), {-1, -1});
  for (std::size_t i = 0; i < segments.size(); ++i) {
    for (Eigen::Index e : {segments[i].a, segments[i].b}) {
      auto &slot = touching[static_cast<std::size_t>(e)];
      (slot[0] < 0 ? slot[0] : slot[1]) = static_cast<int>(i);
    }
  }

  std::vector<bool> used(segments.size(), false);
  auto next_segment = [&](Eigen::Index edge) -> int {
    for (int s : touching[static_cast<std::size_t>(edge)]) {
      if (s >= 0 && !used[static_cast<std::size_t>(s)]) return s;
    }
    return -1;
  };
  auto other_end = [&](int s, Eigen::Index edge) {
    const auto &seg = segments[static_cast<std::size_t>(s)];
    return seg.a == edge ? seg.b : seg.a;
  };

  for (std::size_t seed = 0; seed < segments.size(); ++seed) {
    if (used[seed]) continue;
    used[seed] = true;
    std::deque<Eigen::Index> chain{segments[seed].a, segments[seed].b};
    bool closed = false;
    for (int s = next_segment(chain.back()); s >= 0; s = next_segment(chain.back())) {
      used[static_cast<std::size_t>(s)] = true;
      const Eigen::Index far = other_end(s, chain.back());
      if (far == chain.front()) {
        closed = true;
        break;
      }
      chain.push_back(far);
    }
    if (!closed) {
      for (int s = next_segment(chain.front()); s >= 0; s = next_segment(chain.front())) {
        used[static_cast<std::size_t>(s)] = true;
        chain.push_front(other_end(s, chain.front()));
      }
    }
    Contour contour;
    contour.id = static_cast<int>(set.contours.size());
    contour.closed = closed;
    contour.level = level;
    for (Eigen::Index e : chain) {
      const Point p = edges.crossing(image, level, e);
      if (!contour.vertices.empty() && contour.vertices.back().row == p.row &&
          contour.vertices.back().col == p.col)
        continue;
      contour.vertices.push_back(p);
    }
    if (closed && contour.vertices.size() > 1 &&
        contour.vertices.front().row == contour.vertices.back().row &&
        contour.vertices.front().col == contour.vertices.back().col)
      contour.vertices.pop_back();
    if (contour.vertices.size() < 2) continue;
    set.contours.push_back(std::move(contour));
  }
  return set;
}

ContourSet filter_contours(const ContourSet &set, int min_length,
                           std::optional<std::pair<double, double>> level_band) {
  if (min_length < 2) throw InvalidArgument("min_length must be >= 2", "min_length");
  ContourSet out;
  out.level = set.level;
  out.rows = set.rows;
  out.cols = set.cols;
  for (const auto &c : set.contours) {
    if (static_cast<int>(c.vertices.size()) < min_length) continue;
    if (level_band && (c.level < level_band->first || c.level > level_band->second)) continue;
    Contour kept = c;
    kept.id = static_cast<int>(out.contours.size());
    out.contours.push_back(std::move(kept));
  }
  return out;
}

double bilinear(const Matrix &image, Point p) {
  const auto r0 = static_cast<Eigen::Index>(std::floor(p.row));
  const auto c0 = static_cast<Eigen::Index>(std::floor(p.col));
  const Eigen::Index r1 = std::min<Eigen::Index>(r0 + 1, image.rows() - 1);
  const Eigen::Index c1 = std::min<Eigen::Index>(c0 + 1, image.cols() - 1);
  const double fr = p.row - static_cast<double>(r0);
  const double fc = p.col - static_cast<double>(c0);
  const double top = image(r0, c0) + fc * (image(r0, c1) - image(r0, c0));
  const double bottom = image(r1, c0) + fc * (image(r1, c1) - image(r1, c0));
  return top + fr * (bottom - top);
}

std::size_t select_scale_by_structure(const Matrix &image, const std::vector<double> &scales,
                                      double level, int min_length) {
  if (scales.empty()) throw InvalidArgument("no scales to select from", "scales");
  std::size_t best = 0;
  std::size_t best_total = 0;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    FilterConfig config;
    config.scales = {scales[i]};
    const auto filtered = multiscale_valley_response(image, config);
    const auto kept = filter_contours(marching_squares(filtered.data, level), min_length);
    std::size_t total = 0;
    for (const auto &c : kept.contours) total += c.vertices.size();
    if (total > best_total) {
      best_total = total;
      best = i;
    }
  }
  return best;
}

}  // namespace scspec
