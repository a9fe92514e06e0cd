#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace torusfpras {

// Structured SDP in the one shape this project needs:
//
//   minimize    <c, y>   (real by conjugate pairing)
//   subject to  y[normalization_index] = 1,
//               T(y) >= 0  (Hermitian PSD),
//
// where y is a conjugate-reduced complex moment vector (one representative
// per +/-gamma pair; the entry at normalization_index is real) and T is an
// affine map onto side x side Hermitian matrices supplied as assemble/adjoint
// callbacks. T must place each y entry with constant coefficient pattern such
// that T*(T(y)) = multiplicity .* y — diagonal normal equations, which makes
// the splitting's least-squares restoration step closed-form.
struct StructuredSDP {
  int side = 0;        // PSD matrix side
  int n_reduced = 0;   // reduced moment count (normalization entry included)
  std::vector<std::complex<double>> c;  // objective per reduced entry
  std::vector<double> multiplicity;     // diag of T*T per reduced entry
  int normalization_index = 0;

  // out = T(y); out is pre-sized side x side.
  std::function<void(const std::vector<std::complex<double>>&, Eigen::MatrixXcd&)> assemble;
  // out = T*(X) in reduced coordinates; out is pre-sized n_reduced.
  std::function<void(const Eigen::MatrixXcd&, std::vector<std::complex<double>>&)> adjoint;

  double tol = 1e-7;            // primal/dual residual tolerance
  long long max_iters = 100000;
  double rho = 1.0;             // penalty parameter
  double over_relax = 1.6;      // relaxation factor for the matrix iterate

  // Warm start: previous reduced moment vector (embedded by the caller).
  std::optional<std::vector<std::complex<double>>> warm_y;
};

struct SDPResult {
  std::vector<std::complex<double>> y;  // feasibility-rounded reduced moments
  double objective = 0.0;    // <c, y> at the rounded (PSD-feasible) y
  double dual_bound = 0.0;   // rigorous lower bound on the SDP optimum
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double min_eigenvalue = 0.0;  // of the returned assembled matrix
  long long iterations = 0;
  std::string status;  // "converged" | "max_iter"
  Eigen::MatrixXcd matrix;  // T(y) at the returned y
};

// Over-relaxed ADMM / Douglas-Rachford splitting:
//   (a) project the assembled matrix onto the PSD cone (eigendecomposition,
//       eigenvalues clamped at 0, iterate re-Hermitized),
//   (b) closed-form least-squares restoration of the affine structure and
//       the normalization (exact because T*T is diagonal),
//   (c) scaled dual update with over-relaxation factor 1.6.
//
// Termination is certificate-driven: once both residuals pass `tol`, the
// scaled dual variable is PSD-projected into a rigorous dual bound
//   c_0 - tr(S) - sum_{gamma != 0} |c_gamma - conj((T* S)_gamma)|
// (valid because torus pseudo-moments satisfy |y_gamma| <= 1), the primal
// iterate is rounded feasible along the identity direction
// (y + t e_0)/(1 + t) with t = max(0, -lambda_min), and iteration stops when
// rounded objective - dual bound <= 2*tol — or, if the gap stalls, when it is
// below 10*tol. Deterministic and bit-identical across reruns.
//
// Throws numerical_error on non-finite iterates.
SDPResult solve(const StructuredSDP& problem);

}  // namespace torusfpras
