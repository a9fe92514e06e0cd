#include "torusfpras/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "torusfpras/errors.hpp"

namespace torusfpras {

namespace {

using cd = std::complex<double>;

// Numerical rank: count of eigenvalue magnitudes above rank_tol times the
// largest magnitude (the matrices here are Hermitian, so magnitudes are
// singular values).
int hermitian_rank(const Eigen::MatrixXcd& m, double rank_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  double smax = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    smax = std::max(smax, std::abs(es.eigenvalues()(i)));
  }
  if (smax == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()(i)) > rank_tol * smax) ++r;
  }
  return r;
}

}  // namespace

FlatCheck flat_check(const MomentIndexing& idx, const std::vector<cd>& y, double rank_tol) {
  if (static_cast<long long>(y.size()) != idx.reduced_count) {
    throw validation_error("flat_check: moment vector length does not match indexing");
  }
  if (!(rank_tol > 0.0)) throw validation_error("flat_check: rank tolerance must be positive");
  FlatCheck fc;
  if (idx.level == 0) {
    // A single-entry matrix [1]; there is no lower level, and a point mass
    // at the origin always represents it, so treat it as flat of rank one.
    fc.rank_lo = 1;
    fc.rank_hi = 1;
    fc.flat = true;
    return fc;
  }
  fc.rank_lo = hermitian_rank(moment_matrix(idx, y, idx.level - 1), rank_tol);
  fc.rank_hi = hermitian_rank(moment_matrix(idx, y, idx.level), rank_tol);
  fc.flat = (fc.rank_lo == fc.rank_hi);
  return fc;
}

AtomSet extract_minimizers(const MomentIndexing& idx, const std::vector<cd>& y,
                           const Htp& surrogate, RngStream& stream, double rank_tol) {
  const int M = idx.M;
  const int L = idx.level;
  if (surrogate.M != M) {
    throw validation_error("extract_minimizers: surrogate dimension mismatch");
  }
  if (static_cast<long long>(y.size()) != idx.reduced_count) {
    throw validation_error("extract_minimizers: moment vector length does not match indexing");
  }
  if (!(rank_tol > 0.0)) {
    throw validation_error("extract_minimizers: rank tolerance must be positive");
  }

  AtomSet out;
  const FlatCheck fc = flat_check(idx, y, rank_tol);
  out.flat = fc.flat;
  out.rank_lo = fc.rank_lo;
  out.rank_hi = fc.rank_hi;

  if (L == 0) {
    // Constant objective: the single moment is y_0 = 1 and any point
    // represents it; report the origin with full weight.
    const std::vector<double> zero(M, 0.0);
    out.R = 1;
    out.atoms = {std::vector<cd>(M, cd(1.0, 0.0))};
    out.weights = {1.0};
    out.angles = {zero};
    const double v = eval(surrogate, zero);
    out.candidates = {AtomCandidate{zero, v}};
    out.best_theta = zero;
    out.best_value = v;
    return out;
  }

  // (1) Gram vectors of the level-L moment matrix, truncated to the
  // numerically nonzero spectrum.
  const Eigen::MatrixXcd ml = moment_matrix(idx, y, L);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ml);
  if (es.info() != Eigen::Success) {
    throw numerical_error("extract_minimizers: eigendecomposition failed");
  }
  const int side = static_cast<int>(ml.rows());
  double smax = 0.0;
  for (int i = 0; i < side; ++i) smax = std::max(smax, std::abs(es.eigenvalues()(i)));
  if (smax == 0.0) throw numerical_error("extract_minimizers: moment matrix is numerically zero");
  int big = 0;
  for (int i = 0; i < side; ++i) {
    if (std::abs(es.eigenvalues()(i)) > rank_tol * smax) ++big;
  }
  const int R = big;
  out.R = R;

  // Eigenvalues come back ascending, so the kept components are the last R.
  Eigen::MatrixXcd z(R, side);
  for (int r = 0; r < R; ++r) {
    const int k = side - R + r;
    const double lam = std::max(es.eigenvalues()(k), 0.0);
    z.row(r) = std::sqrt(lam) * es.eigenvectors().col(k).adjoint();
  }

  // (2) Pivoted column selection among indices that stay inside the box one
  // level down, so every selected column can be shifted by +e_j.
  std::vector<int> lowcols;
  for (int i = 0; i < side; ++i) {
    bool low = true;
    for (int j = 0; j < M; ++j) {
      if (idx.basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > L - 1) {
        low = false;
        break;
      }
    }
    if (low) lowcols.push_back(i);
  }
  Eigen::MatrixXcd zlow(R, static_cast<int>(lowcols.size()));
  for (std::size_t c = 0; c < lowcols.size(); ++c) {
    zlow.col(static_cast<int>(c)) = z.col(lowcols[c]);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(zlow);
  const Eigen::MatrixXcd& qrmat = qr.matrixQR();
  const double pivot0 = std::abs(qrmat(0, 0));
  const int avail = static_cast<int>(std::min<Eigen::Index>(qrmat.rows(), qrmat.cols()));
  for (int k = 0; k < R; ++k) {
    if (k >= avail || !(std::abs(qrmat(k, k)) > rank_tol * pivot0)) {
      throw numerical_error(
          "extract_minimizers: no full-rank principal block at the given rank tolerance");
    }
  }
  std::vector<int> selected(static_cast<std::size_t>(R));
  for (int k = 0; k < R; ++k) {
    selected[static_cast<std::size_t>(k)] = lowcols[static_cast<std::size_t>(
        qr.colsPermutation().indices()(k))];
  }

  // Position of a multi-index in the lexicographic basis of {0..L}^M.
  const auto position = [&](const FrequencyVector& alpha) {
    long long pos = 0;
    for (int j = 0; j < M; ++j) {
      pos = pos * (L + 1) + alpha[static_cast<std::size_t>(j)];
    }
    return static_cast<int>(pos);
  };

  // (3) Shift operators on the Gram column space: T_j maps the selected
  // columns onto their +e_j shifts; right-division by the selected block
  // realizes the (unitary in exact arithmetic) multiplication operator.
  Eigen::MatrixXcd b(R, R);
  for (int k = 0; k < R; ++k) b.col(k) = z.col(selected[static_cast<std::size_t>(k)]);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(b.transpose());
  std::vector<Eigen::MatrixXcd> shifts;
  shifts.reserve(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) {
    Eigen::MatrixXcd s(R, R);
    for (int k = 0; k < R; ++k) {
      FrequencyVector alpha = idx.basis[static_cast<std::size_t>(selected[static_cast<std::size_t>(k)])];
      alpha[static_cast<std::size_t>(j)] += 1;
      s.col(k) = z.col(position(alpha));
    }
    shifts.push_back(lu.solve(s.transpose()).transpose());
  }

  // (4) Simultaneous diagonalization through a generic Hermitian
  // combination; redraw until the spectrum is simple enough to separate the
  // common eigenvectors.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs;
  bool accepted = false;
  for (int attempt = 0; attempt < 10 && !accepted; ++attempt) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(R, R);
    for (int j = 0; j < M; ++j) {
      const cd c = stream.complex_normal();
      h += c * shifts[static_cast<std::size_t>(j)] +
           std::conj(c) * shifts[static_cast<std::size_t>(j)].adjoint();
    }
    hs.compute(h);
    if (hs.info() != Eigen::Success) continue;
    if (R == 1) {
      accepted = true;
      break;
    }
    const double width = hs.eigenvalues()(R - 1) - hs.eigenvalues()(0);
    double gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k + 1 < R; ++k) {
      gap = std::min(gap, hs.eigenvalues()(k + 1) - hs.eigenvalues()(k));
    }
    if (gap > 1e-6 * width) accepted = true;
  }
  if (!accepted) {
    throw numerical_error("extract_minimizers: eigengap retries exhausted");
  }

  // Atom entries are Rayleigh quotients of the shift operators on the
  // common eigenvectors; they must land on the unit circle.
  out.atoms.assign(static_cast<std::size_t>(R), std::vector<cd>(static_cast<std::size_t>(M)));
  out.weights.assign(static_cast<std::size_t>(R), 0.0);
  const Eigen::VectorXcd z0 = z.col(0);
  for (int k = 0; k < R; ++k) {
    const Eigen::VectorXcd u = hs.eigenvectors().col(k);
    const double un = u.squaredNorm();
    for (int j = 0; j < M; ++j) {
      cd d = (u.adjoint() * shifts[static_cast<std::size_t>(j)] * u)(0, 0) / un;
      const double mod = std::abs(d);
      if (std::abs(mod - 1.0) > 1e-3) {
        throw numerical_error("extract_minimizers: atom entry off the unit circle");
      }
      out.atoms[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = d / mod;
    }
    out.weights[static_cast<std::size_t>(k)] = std::norm(cd((z0.adjoint() * u)(0, 0)));
  }
  out.shifts = std::move(shifts);

  // (5) Both phase conventions are scored on the surrogate; candidates keep
  // everything evaluated, the per-atom choice is the better one.
  out.angles.assign(static_cast<std::size_t>(R), std::vector<double>(static_cast<std::size_t>(M)));
  for (int k = 0; k < R; ++k) {
    std::vector<double> plus(static_cast<std::size_t>(M));
    std::vector<double> minus(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
      const double a = std::arg(out.atoms[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]);
      plus[static_cast<std::size_t>(j)] = wrap_angle(a);
      minus[static_cast<std::size_t>(j)] = wrap_angle(-a);
    }
    const double vplus = eval(surrogate, plus);
    const double vminus = eval(surrogate, minus);
    out.candidates.push_back(AtomCandidate{plus, vplus});
    out.candidates.push_back(AtomCandidate{minus, vminus});
    out.angles[static_cast<std::size_t>(k)] = (vminus < vplus) ? minus : plus;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < out.candidates.size(); ++c) {
    if (out.candidates[c].surrogate_value < out.candidates[best].surrogate_value) best = c;
  }
  out.best_theta = out.candidates[best].angles;
  out.best_value = out.candidates[best].surrogate_value;
  return out;
}

nlohmann::json atomset_to_json(const AtomSet& atoms) {
  nlohmann::json j;
  j["R"] = atoms.R;
  j["flat"] = atoms.flat;
  j["rank_lo"] = atoms.rank_lo;
  j["rank_hi"] = atoms.rank_hi;
  nlohmann::json atom_list = nlohmann::json::array();
  for (const auto& atom : atoms.atoms) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& d : atom) {
      entries.push_back({{"re", d.real()}, {"im", d.imag()}});
    }
    atom_list.push_back(entries);
  }
  j["atoms"] = atom_list;
  j["weights"] = atoms.weights;
  j["angles"] = atoms.angles;
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& c : atoms.candidates) {
    cands.push_back({{"angles", c.angles}, {"value", c.surrogate_value}});
  }
  j["candidates"] = cands;
  j["best_theta"] = atoms.best_theta;
  j["best_value"] = atoms.best_value;
  return j;
}

}  // namespace torusfpras
