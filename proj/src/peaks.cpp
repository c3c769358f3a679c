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

#include "scspec/peaks.hpp"

#include <cmath>
#include <set>

#include "scspec/error.hpp"

namespace scspec {

void GroupAssignment::validate() const {
  std::set<int> seen;
  auto claim = [&](int id) {
    if (!seen.insert(id).second)
      throw InvalidArgument("contour " + std::to_string(id) + " is assigned more than once",
                            "groups");
  };
  for (const auto &[group, ids] : groups) {
    for (int id : ids) claim(id);
  }
  for (int id : ignored) claim(id);
}

std::size_t PeakSet::size() const {
  std::size_t n = 0;
  for (const auto &[g, pts] : groups) n += pts.size();
  return n;
}

std::vector<RegionMask> build_regions(const ContourSet &set, const GroupAssignment &assignment,
                                      DilationHalfwidths halfwidths) {
  if (halfwidths.rows < 0 || halfwidths.cols < 0)
    throw InvalidArgument("dilation halfwidths must be >= 0", "halfwidths");
  assignment.validate();
  std::vector<RegionMask> masks;
  for (const auto &[group, ids] : assignment.groups) {
    RegionMask mask{group, BoolMatrix::Constant(set.rows, set.cols, false)};
    for (int id : ids) {
      const Contour *contour = set.find(id);
      if (!contour)
        throw InvalidArgument("unknown contour id " + std::to_string(id), "groups");
      for (const Point &v : contour->vertices) {
        const auto r = static_cast<Eigen::Index>(std::lround(v.row));
        const auto c = static_cast<Eigen::Index>(std::lround(v.col));
        const Eigen::Index r0 = std::max<Eigen::Index>(0, r - halfwidths.rows);
        const Eigen::Index r1 = std::min<Eigen::Index>(set.rows - 1, r + halfwidths.rows);
        const Eigen::Index c0 = std::max<Eigen::Index>(0, c - halfwidths.cols);
        const Eigen::Index c1 = std::min<Eigen::Index>(set.cols - 1, c + halfwidths.cols);
        if (r0 > r1 || c0 > c1) continue;
        mask.cells.block(r0, c0, r1 - r0 + 1, c1 - c0 + 1).setConstant(true);
      }
    }
    masks.push_back(std::move(mask));
  }
  return masks;
}

std::vector<RegionMask> xor_resolve(const std::vector<RegionMask> &masks) {
  if (masks.empty()) return {};
  const Eigen::Index rows = masks.front().cells.rows(), cols = masks.front().cells.cols();
  Eigen::MatrixXi coverage = Eigen::MatrixXi::Zero(rows, cols);
  for (const auto &m : masks) {
    if (m.cells.rows() != rows || m.cells.cols() != cols)
      throw InvalidArgument("region masks have different shapes", "masks");
    coverage += m.cells.cast<int>();
  }
  std::vector<RegionMask> out;
  out.reserve(masks.size());
  for (const auto &m : masks) {
    RegionMask resolved{m.group_id, m.cells.array() && (coverage.array() == 1)};
    out.push_back(std::move(resolved));
  }
  return out;
}

PeakSet extract_peaks(const FilteredImage &filtered, const std::vector<RegionMask> &masks,
                      const AxisGrid &bias, const AxisGrid &freq, PeakMethod method,
                      const Spectrum2D *raw) {
  if (masks.empty()) throw InvalidArgument("no region masks to extract from", "masks");
  if (method == PeakMethod::LorentzianFit && raw == nullptr)
    throw InvalidArgument("Lorentzian extraction needs the raw spectrum", "raw");
  const Matrix &data = filtered.data;
  if (data.rows() != static_cast<Eigen::Index>(freq.size()) ||
      data.cols() != static_cast<Eigen::Index>(bias.size()))
    throw InvalidArgument("filtered image does not match the axes", "filtered");
  if (raw && (raw->rows() != data.rows() || raw->cols() != data.cols()))
    throw InvalidArgument("raw spectrum does not match the filtered image", "raw");

  PeakSet peaks;
  peaks.method = method;
  for (const auto &mask : masks) {
    if (mask.cells.rows() != data.rows() || mask.cells.cols() != data.cols())
      throw InvalidArgument("region mask does not match the filtered image", "masks");
    auto &points = peaks.groups[mask.group_id];
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      const auto col = static_cast<std::size_t>(c);
      if (method == PeakMethod::RegionMin) {
        Eigen::Index best = -1;
        bool tie = false;
        for (Eigen::Index r = 0; r < data.rows(); ++r) {
          if (!mask.cells(r, c)) continue;
          if (best < 0 || data(r, c) < data(best, c)) {
            best = r;
            tie = false;
          } else if (data(r, c) == data(best, c)) {
            tie = true;
            if (freq[static_cast<std::size_t>(r)] < freq[static_cast<std::size_t>(best)]) best = r;
          }
        }
        if (best < 0) continue;
        if (tie) peaks.tied_columns.emplace_back(mask.group_id, static_cast<int>(c));
        points.push_back({static_cast<int>(c), bias[col], freq[static_cast<std::size_t>(best)],
                          raw ? raw->amplitude()(best, c) : data(best, c)});
        continue;
      }
      std::vector<double> f, a;
      for (Eigen::Index r = 0; r < data.rows(); ++r) {
        if (!mask.cells(r, c)) continue;
        f.push_back(freq[static_cast<std::size_t>(r)]);
        a.push_back(raw->amplitude()(r, c));
      }
      if (f.empty()) continue;
      try {
        const LorentzianFit fit = lorentzian_fit_1d(f, a);
        const std::size_t row = freq.nearest_index(fit.params.center);
        const bool inside_axis = fit.params.center >= std::min(freq.values().front(), freq.values().back()) &&
                                 fit.params.center <= std::max(freq.values().front(), freq.values().back());
        if (!inside_axis || !mask.cells(static_cast<Eigen::Index>(row), c)) {
          peaks.skipped_columns.emplace_back(mask.group_id, static_cast<int>(c));
          continue;
        }
        points.push_back({static_cast<int>(c), bias[col], fit.params.center,
                          fit.params.offset - fit.params.depth});
      } catch (const Error &) {
        peaks.skipped_columns.emplace_back(mask.group_id, static_cast<int>(c));
      }
    }
  }
  return peaks;
}

}  // namespace scspec
