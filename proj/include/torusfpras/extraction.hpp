#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "torusfpras/moment_sos.hpp"
#include "torusfpras/rng.hpp"
#include "torusfpras/trig_poly.hpp"

namespace torusfpras {

// Numerical ranks of the moment matrices at the solution level L and at
// L - 1; the flat-extension condition holds when they are equal.
struct FlatCheck {
  int rank_lo = 0;  // rank at level L-1
  int rank_hi = 0;  // rank at level L
  bool flat = false;
};

// Ranks by eigenvalues (singular values of the PSD iterate) above
// rank_tol * the largest one. A level-0 solution is trivially flat.
FlatCheck flat_check(const MomentIndexing& idx, const std::vector<std::complex<double>>& y,
                     double rank_tol = 1e-6);

// One candidate minimizer with its surrogate value; extraction returns every
// candidate from both conjugation conventions, best (lowest value) first
// choice recorded separately.
struct AtomCandidate {
  std::vector<double> angles;  // in [-pi, pi)^M
  double surrogate_value = 0.0;
};

// Atomic representing measure recovered from a flat moment solution.
struct AtomSet {
  int R = 0;                                              // atom count (= rank)
  std::vector<std::vector<std::complex<double>>> atoms;   // unit-modulus entries
  std::vector<double> weights;                            // >= 0, sum ~ 1
  std::vector<std::vector<double>> angles;                // chosen angles per atom
  bool flat = false;
  int rank_lo = 0;
  int rank_hi = 0;
  std::vector<AtomCandidate> candidates;  // all evaluated candidates
  std::vector<double> best_theta;
  double best_value = 0.0;
  // Gram-space shift operators (one R x R matrix per parameter), kept as a
  // diagnostic: exact flatness makes each one unitary and the family
  // commuting, so their deviation measures extraction conditioning. Not
  // serialized.
  std::vector<Eigen::MatrixXcd> shifts;
};

// Constructive atom extraction from a level-L moment vector:
//  (1) Gram vectors: eigendecompose the level-L moment matrix, keep the R
//      dominant components, Z = Lambda_R^{1/2} U_R^dagger;
//  (2) select R independent columns among the level-(L-1) indices by
//      column-pivoted QR; with B the selected R x R block, the shift
//      operators are T_j = Z[:, selected + e_j] * B^{-1}, which are unitary
//      on the Gram space in exact arithmetic;
//  (3) draw a complex Gaussian combination H = sum_j (c_j T_j + conj(c_j)
//      T_j^dagger) from the stream, redrawing (at most 10 draws) until its
//      minimum eigengap exceeds 1e-6 * spectral width;
//  (4) atoms d_j^(k) = (u_k^dagger T_j u_k) / ||u_k||^2 from H's
//      eigenvectors; entries must lie within 1e-3 of the unit circle (else
//      extraction fails) and are renormalized onto it; weights are
//      |<z_0, u_k>|^2 against the Gram vector of the constant monomial;
//  (5) both conjugation conventions (angles +arg d and -arg d) are evaluated
//      on the surrogate; the better-scoring convention is kept per atom and
//      the overall best candidate is reported.
AtomSet extract_minimizers(const MomentIndexing& idx,
                           const std::vector<std::complex<double>>& y, const Htp& surrogate,
                           RngStream& stream, double rank_tol = 1e-6);

nlohmann::json atomset_to_json(const AtomSet& atoms);

}  // namespace torusfpras
