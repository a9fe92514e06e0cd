#pragma once

// Shared helpers for the test suites: an independent naive DFT oracle,
// random Hermitian trigonometric polynomials, and torus metrics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <vector>

#include "torusfpras/fft_nd.hpp"
#include "torusfpras/rng.hpp"
#include "torusfpras/trig_poly.hpp"

namespace tf_test {

using torusfpras::CoeffMap;
using torusfpras::FrequencyVector;
using torusfpras::Htp;
using torusfpras::Tensor;

// Direct O(N^2) evaluation of the centered multidimensional transform
//   out[t] = sum_n in[n] * prod_j exp(sign * 2*pi*i * t_j * n_j / N_j),
// written independently of the production FFT (no shared code paths).
inline Tensor naive_dft(const Tensor& in, int sign) {
  const int m = static_cast<int>(in.sizes.size());
  std::vector<int> d(m);
  for (int j = 0; j < m; ++j) d[j] = (in.sizes[j] - 1) / 2;

  Tensor out;
  out.sizes = in.sizes;
  out.data.assign(in.data.size(), {0.0, 0.0});

  std::vector<int> t(m);
  std::vector<int> n(m);
  for (int j = 0; j < m; ++j) t[j] = -d[j];
  for (std::size_t to = 0; to < out.data.size(); ++to) {
    std::complex<double> acc{0.0, 0.0};
    for (int j = 0; j < m; ++j) n[j] = -d[j];
    for (std::size_t no = 0; no < in.data.size(); ++no) {
      double phase = 0.0;
      for (int j = 0; j < m; ++j) {
        phase += 2.0 * std::numbers::pi * static_cast<double>(t[j]) *
                 static_cast<double>(n[j]) / static_cast<double>(in.sizes[j]);
      }
      acc += in.data[torusfpras::tensor_offset(in.sizes, n)] *
             std::polar(1.0, sign * phase);
      for (int j = m - 1; j >= 0; --j) {
        if (++n[j] <= d[j]) break;
        n[j] = -d[j];
      }
    }
    out.data[torusfpras::tensor_offset(out.sizes, t)] = acc;
    for (int j = m - 1; j >= 0; --j) {
      if (++t[j] <= d[j]) break;
      t[j] = -d[j];
    }
  }
  return out;
}

inline Tensor random_tensor(const std::vector<int>& sizes, torusfpras::RngStream& rng) {
  Tensor t;
  t.sizes = sizes;
  std::size_t total = 1;
  for (int s : sizes) total *= static_cast<std::size_t>(s);
  t.data.resize(total);
  for (std::complex<double>& v : t.data) v = {rng.normal(), rng.normal()};
  return t;
}

// Random Hermitian trigonometric polynomial with the given degree box.
inline Htp random_htp(const std::vector<int>& degrees, torusfpras::RngStream& rng) {
  const int m = static_cast<int>(degrees.size());
  CoeffMap coeffs;
  FrequencyVector alpha(m);
  for (int j = 0; j < m; ++j) alpha[j] = -degrees[j];
  while (true) {
    bool canonical = true;
    for (int j = 0; j < m; ++j) {
      if (alpha[j] != 0) {
        canonical = alpha[j] > 0;
        break;
      }
    }
    if (canonical) {
      bool zero = true;
      for (int v : alpha) zero = zero && v == 0;
      if (zero) {
        coeffs[alpha] = {rng.normal(), 0.0};
      } else {
        const std::complex<double> c = rng.complex_normal();
        coeffs[alpha] = c;
        FrequencyVector neg(m);
        for (int j = 0; j < m; ++j) neg[j] = -alpha[j];
        coeffs[neg] = std::conj(c);
      }
    }
    int j = m - 1;
    for (; j >= 0; --j) {
      if (++alpha[j] <= degrees[j]) break;
      alpha[j] = -degrees[j];
    }
    if (j < 0) break;
  }
  return torusfpras::make_htp(m, coeffs, degrees);
}

// Distance on the circle between two angles.
inline double circle_dist(double a, double b) {
  const double two_pi = 2.0 * std::numbers::pi;
  double d = std::fabs(std::remainder(a - b, two_pi));
  return d;
}

// Max over coordinates of the circle distance.
inline double torus_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, circle_dist(a[j], b[j]));
  return worst;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
  }
  return worst;
}

}  // namespace tf_test
