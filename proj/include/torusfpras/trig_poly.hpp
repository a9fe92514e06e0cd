#pragma once

#include <complex>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace torusfpras {

// Integer frequency vector alpha in Z^M; one entry per independent circuit
// parameter. std::map's lexicographic ordering over these keys gives every
// coefficient container a reproducible iteration order.
using FrequencyVector = std::vector<int>;

using CoeffMap = std::map<FrequencyVector, std::complex<double>>;

// Hermitian trigonometric polynomial
//
//   f(theta) = sum_alpha f_alpha * exp(i<alpha, theta>),   f_{-alpha} = conj(f_alpha),
//
// which is real-valued on the torus [-pi, pi)^M. `degrees[j]` bounds |alpha_j|
// over the support.
struct Htp {
  int M = 0;
  CoeffMap coeffs;
  std::vector<int> degrees;
};

// Per-parameter degree bounds derived from circuit structure: d_j sums the
// spectral diameters of all generators feeding parameter j, and
// conservative_bound = K * max_k diameter_k bounds every d_j from above.
struct DegreeProfile {
  std::vector<int> d;
  int conservative_bound = 0;
};

// Validates the Hermitian-symmetry invariant (tolerance 1e-12 relative to the
// largest coefficient) and the degree bounds, then returns the polynomial.
// When `degrees` is absent it is computed as the per-axis support maximum.
Htp make_htp(int M, CoeffMap coeffs, std::optional<std::vector<int>> degrees = std::nullopt);

// Re(sum f_alpha exp(i<alpha,theta>)). Throws if theta has the wrong length or
// if the imaginary residual exceeds 1e-10 * sum|f_alpha| (a Hermitian
// polynomial evaluates to a real number; a larger residual means corrupt data).
double eval(const Htp& htp, const std::vector<double>& theta);

// Enforces Hermitian symmetry on a raw coefficient map:
// f_alpha = (raw_alpha + conj(raw_{-alpha})) / 2, absent entries read as zero.
// Conjugate pairs are stored bit-exactly (coeff(-alpha) is computed as the
// conjugate of the stored coeff(alpha)), and near-zero coefficients below
// 1e-12 * max|f| are pruned afterwards.
Htp symmetrize(int M, const CoeffMap& raw);

// Drops coefficients with |f_alpha| < rel_tol * max|f_alpha| (conjugate pairs
// leave or stay together since their magnitudes are equal).
Htp prune(const Htp& htp, double rel_tol = 1e-12);

// sum_{alpha != 0} |f_alpha|: the off-zero coefficient mass that drives the
// relaxation-level bound.
double offzero_l1(const Htp& htp);

// Brute-force minimization oracle: scans the uniform grid
// theta_t = -pi + 2*pi*t/points_per_axis on [-pi,pi)^M (ties broken by the
// lexicographically smallest index), then refines with 50 rounds of
// coordinate descent using golden-section line searches around the best
// point. Requires points_per_axis >= 2*max_j(d_j) + 1 so no frequency
// aliases on the scan grid. Returned angles are wrapped into [-pi, pi).
std::pair<std::vector<double>, double> grid_minimize(const Htp& htp, int points_per_axis);

// Serialization: {"M": int, "coeffs": [{"alpha": [int...], "re": f, "im": f}...]},
// coefficients sorted lexicographically by alpha for reproducible files.
nlohmann::json htp_to_json(const Htp& htp);
Htp htp_from_json(const nlohmann::json& j);

// Wraps an angle into [-pi, pi).
double wrap_angle(double theta);

}  // namespace torusfpras
