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

#include "scspec/valley_filter.hpp"

#include <cmath>

#include "scspec/error.hpp"

namespace scspec {

namespace {

// Sampled Gaussian derivative kernels, moment-corrected so that the discrete
// operators are exact on polynomials up to degree 2.
struct Kernels {
  int radius;
  std::vector<double> g0, g1, g2;
};

Kernels make_kernels(double sigma) {
  Kernels k;
  k.radius = static_cast<int>(std::ceil(4.0 * sigma));
  const int n = 2 * k.radius + 1;
  k.g0.resize(n);
  k.g1.resize(n);
  k.g2.resize(n);
  const double s2 = sigma * sigma;
  for (int i = 0; i < n; ++i) {
    const double x = i - k.radius;
    const double g = std::exp(-0.5 * x * x / s2);
    k.g0[i] = g;
    k.g1[i] = -x / s2 * g;
    k.g2[i] = (x * x - s2) / (s2 * s2) * g;
  }
  // Kernels are applied as out(x) = sum_j k[j] f(x + j - radius).
  double m0 = 0.0;
  for (double v : k.g0) m0 += v;
  for (double &v : k.g0) v /= m0;

  // First derivative: sum_j k[j] (j - r) = 1.
  double m1 = 0.0;
  for (int i = 0; i < n; ++i) m1 += k.g1[i] * (i - k.radius);
  for (double &v : k.g1) v /= m1;

  // Second derivative: zero mean, sum_j k[j] (j - r)^2 = 2.
  double mean = 0.0;
  for (double v : k.g2) mean += v;
  mean /= n;
  for (double &v : k.g2) v -= mean;
  double m2 = 0.0;
  for (int i = 0; i < n; ++i) m2 += k.g2[i] * (i - k.radius) * (i - k.radius);
  for (double &v : k.g2) v *= 2.0 / m2;
  return k;
}

// Symmetric reflection: d c b a | a b c d | d c b a.
inline Eigen::Index reflect(Eigen::Index i, Eigen::Index n) {
  if (n == 1) return 0;
  const Eigen::Index period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

Matrix convolve_rows(const Matrix &in, const std::vector<double> &k, int radius) {
  // Along the row index (vertical direction).
  Matrix out(in.rows(), in.cols());
  const Eigen::Index n = in.rows();
  for (Eigen::Index c = 0; c < in.cols(); ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      double acc = 0.0;
      for (int j = -radius; j <= radius; ++j) acc += k[j + radius] * in(reflect(r + j, n), c);
      out(r, c) = acc;
    }
  }
  return out;
}

Matrix convolve_cols(const Matrix &in, const std::vector<double> &k, int radius) {
  Matrix out(in.rows(), in.cols());
  const Eigen::Index n = in.cols();
  for (Eigen::Index c = 0; c < n; ++c) {
    out.col(c).setZero();
    for (int j = -radius; j <= radius; ++j) out.col(c) += k[j + radius] * in.col(reflect(c + j, n));
  }
  return out;
}

}  // namespace

HessianField hessian_at_scale(const Matrix &image, double sigma) {
  if (!(sigma >= 0.5)) throw InvalidArgument("filter scale below half a pixel", "sigma");
  if (!image.allFinite()) throw InvalidArgument("image contains non-finite values", "image");
  const Kernels k = make_kernels(sigma);
  const double norm = sigma * sigma;
  HessianField h;
  const Matrix smooth_c = convolve_cols(image, k.g0, k.radius);
  const Matrix d1_c = convolve_cols(image, k.g1, k.radius);
  const Matrix d2_c = convolve_cols(image, k.g2, k.radius);
  h.rr = norm * convolve_rows(smooth_c, k.g2, k.radius);
  h.rc = norm * convolve_rows(d1_c, k.g1, k.radius);
  h.cc = norm * convolve_rows(d2_c, k.g0, k.radius);
  return h;
}

FilteredImage multiscale_valley_response(const Matrix &image, const FilterConfig &config) {
  if (config.scales.empty()) throw InvalidArgument("filter needs at least one scale", "scales");
  for (double s : config.scales) {
    if (!(s > 0.0)) throw InvalidArgument("filter scales must be positive", "scales");
  }
  FilteredImage out;
  out.config = config;
  out.raw_response = Matrix::Zero(image.rows(), image.cols());
  out.best_scale = Eigen::MatrixXi::Constant(image.rows(), image.cols(), -1);
  for (std::size_t s = 0; s < config.scales.size(); ++s) {
    const HessianField h = hessian_at_scale(image, config.scales[s]);
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      for (Eigen::Index r = 0; r < image.rows(); ++r) {
        const double a = h.rr(r, c), b = h.rc(r, c), d = h.cc(r, c);
        const double mid = 0.5 * (a + d);
        const double rad = std::hypot(0.5 * (a - d), b);
        const double measure = config.mode == LineMode::Valley ? mid + rad : -(mid - rad);
        if (measure > 0.0 && measure > out.raw_response(r, c)) {
          out.raw_response(r, c) = measure;
          out.best_scale(r, c) = static_cast<int>(s);
        }
      }
    }
  }
  const Matrix negated = -out.raw_response;
  if (!(negated.maxCoeff() > negated.minCoeff())) {
    out.data = Matrix::Constant(image.rows(), image.cols(), 0.5);
    out.degenerate = true;
  } else {
    out.data = normalize_unit_range(negated);
  }
  return out;
}

double scale_from_fwhm(double fwhm_px) {
  if (!(fwhm_px > 0.0)) throw InvalidArgument("FWHM must be positive", "fwhm");
  return fwhm_px / 2.355;
}

double scale_from_fwhm(double fwhm, const AxisGrid &freq) {
  return scale_from_fwhm(fwhm / freq.mean_step());
}

}  // namespace scspec
