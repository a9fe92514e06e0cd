#pragma once

#include <complex>
#include <vector>

namespace torusfpras {

// Dense complex tensor with odd per-axis sizes N_j = 2*d_j + 1, stored
// row-major over the shifted multi-index (n_j + d_j). The same layout serves
// both roles in the transform pair:
//   - coefficient tensors, indexed by frequencies n in prod [-d_j, d_j];
//   - evaluation tensors, indexed by grid indices t in prod [-d_j, d_j],
//     where index t corresponds to the grid point theta_j = 2*pi*t_j / N_j.
struct Tensor {
  std::vector<int> sizes;
  std::vector<std::complex<double>> data;
};

using CoeffTensor = Tensor;
using EvalTensor = Tensor;

// Flat row-major offset of the centered multi-index `idx` (entries in
// [-d_j, d_j]) within a tensor of the given sizes.
std::size_t tensor_offset(const std::vector<int>& sizes, const std::vector<int>& idx);

// Synthesis transform: P[t] = sum_n F[n] * prod_j exp(+2*pi*i*t_j*n_j/N_j),
// i.e. evaluation of the trigonometric polynomial with coefficients F on the
// uniform grid theta_j = 2*pi*t_j/N_j. Computed as M sequential batches of
// independent 1D transforms along each mode, O(N log N) overall.
EvalTensor dft_forward(const CoeffTensor& coeffs);

// Exact inverse of dft_forward up to round-off:
// F[n] = (1/prod N_j) * sum_t P[t] * prod_j exp(-2*pi*i*t_j*n_j/N_j).
CoeffTensor dft_inverse(const EvalTensor& evals);

}  // namespace torusfpras
