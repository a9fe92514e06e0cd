#include "torusfpras/fft_nd.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>

#include "torusfpras/errors.hpp"

namespace torusfpras {

namespace {

using cd = std::complex<double>;

constexpr int kNaiveCutoff = 16;  // direct O(N^2) kernel below this size

void validate(const Tensor& t) {
  std::size_t prod = 1;
  for (int n : t.sizes) {
    if (n < 1 || n % 2 == 0)
      throw validation_error("fft_nd: per-axis sizes must be odd and >= 1");
    prod *= static_cast<std::size_t>(n);
  }
  if (t.data.size() != prod)
    throw validation_error("fft_nd: data length does not match the size product");
}

// Iterative radix-2 Cooley-Tukey on a power-of-two length, used only inside
// the Bluestein convolution. sign = +1/-1 picks exp(sign*2*pi*i*jk/L).
void pow2_fft(std::vector<cd>& a, int sign) {
  const std::size_t L = a.size();
  for (std::size_t i = 1, j = 0; i < L; ++i) {
    std::size_t bit = L >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= L; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const cd wl = std::polar(1.0, ang);
    for (std::size_t i = 0; i < L; i += len) {
      cd w = 1.0;
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cd u = a[i + k];
        const cd v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// 1D centered transform on a fiber of odd length N = 2d+1:
//   y[u] = sum_{v=-d..d} x[v] * exp(sign * 2*pi*i * u*v / N),
// with both arrays stored at shifted index (. + d).
//
// For N <= 16 a direct double loop wins; larger N uses the chirp-z
// (Bluestein) factorization u*v = (u^2 + v^2 - (u-v)^2)/2, which turns the
// transform into a linear convolution against the chirp b[k] = w^{-k^2},
// w = exp(sign*pi*i/N). The convolution is evaluated circularly at the next
// power of two >= 2N-1: the needed output band sits at positions
// N-1 .. 2N-2 of the length-(3N-2) linear convolution, and wraparound from a
// length >= 2N-1 circle never lands inside that band.
void centered_dft_1d(std::vector<cd>& x, int sign) {
  const int N = static_cast<int>(x.size());
  if (N == 1) return;
  const int d = (N - 1) / 2;

  if (N <= kNaiveCutoff) {
    std::vector<cd> y(N);
    for (int u = -d; u <= d; ++u) {
      cd acc = 0.0;
      for (int v = -d; v <= d; ++v) {
        const double ang = sign * 2.0 * std::numbers::pi * u * v / N;
        acc += x[v + d] * std::polar(1.0, ang);
      }
      y[u + d] = acc;
    }
    x = std::move(y);
    return;
  }

  // w has period 2N in its integer exponent, so chirp exponents reduce mod 2N.
  const auto chirp = [&](long long e2, int dir) {
    const long long r = ((e2 % (2 * N)) + 2 * N) % (2 * N);
    return std::polar(1.0, dir * sign * std::numbers::pi * static_cast<double>(r) / N);
  };

  std::size_t L = 1;
  while (L < static_cast<std::size_t>(2 * N - 1)) L <<= 1;

  std::vector<cd> a(L, 0.0), b(L, 0.0);
  for (int v = -d; v <= d; ++v)
    a[v + d] = x[v + d] * chirp(static_cast<long long>(v) * v, +1);
  for (int k = -(N - 1); k <= N - 1; ++k)
    b[k + (N - 1)] = chirp(static_cast<long long>(k) * k, -1);

  pow2_fft(a, -1);
  pow2_fft(b, -1);
  for (std::size_t i = 0; i < L; ++i) a[i] *= b[i];
  pow2_fft(a, +1);
  const double inv_l = 1.0 / static_cast<double>(L);

  for (int u = -d; u <= d; ++u) {
    const cd conv = a[static_cast<std::size_t>(u + d + N - 1)] * inv_l;
    x[u + d] = conv * chirp(static_cast<long long>(u) * u, +1);
  }
}

// Applies the 1D kernel along mode `axis` of every fiber.
void transform_mode(Tensor& t, int axis, int sign) {
  const int n = t.sizes[axis];
  std::size_t inner = 1;
  for (std::size_t j = axis + 1; j < t.sizes.size(); ++j) inner *= t.sizes[j];
  std::size_t outer = 1;
  for (int j = 0; j < axis; ++j) outer *= t.sizes[j];

  std::vector<cd> fiber(n);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t base = o * n * inner + i;
      for (int k = 0; k < n; ++k) fiber[k] = t.data[base + k * inner];
      centered_dft_1d(fiber, sign);
      for (int k = 0; k < n; ++k) t.data[base + k * inner] = fiber[k];
    }
  }
}

}  // namespace

std::size_t tensor_offset(const std::vector<int>& sizes, const std::vector<int>& idx) {
  if (idx.size() != sizes.size())
    throw validation_error("tensor_offset: index rank does not match tensor rank");
  std::size_t off = 0;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    const int dj = (sizes[j] - 1) / 2;
    if (idx[j] < -dj || idx[j] > dj)
      throw validation_error("tensor_offset: index outside the centered box");
    off = off * sizes[j] + static_cast<std::size_t>(idx[j] + dj);
  }
  return off;
}

EvalTensor dft_forward(const CoeffTensor& coeffs) {
  validate(coeffs);
  EvalTensor out = coeffs;
  for (std::size_t axis = 0; axis < out.sizes.size(); ++axis)
    transform_mode(out, static_cast<int>(axis), +1);
  return out;
}

CoeffTensor dft_inverse(const EvalTensor& evals) {
  validate(evals);
  CoeffTensor out = evals;
  double scale = 1.0;
  for (std::size_t axis = 0; axis < out.sizes.size(); ++axis) {
    transform_mode(out, static_cast<int>(axis), -1);
    scale /= out.sizes[axis];
  }
  for (cd& v : out.data) v *= scale;
  return out;
}

}  // namespace torusfpras
