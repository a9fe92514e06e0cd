#include "torusfpras/sdp_solver.hpp"

#include <cmath>
#include <limits>

#include "torusfpras/errors.hpp"

namespace torusfpras {

namespace {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

void hermitize(Mat& m) { m = 0.5 * (m + m.adjoint()).eval(); }

// PSD projection via eigendecomposition with eigenvalues clamped at 0.
// Returns the smallest eigenvalue of the (Hermitized) input.
double project_psd(Mat& m, Eigen::SelfAdjointEigenSolver<Mat>& es) {
  hermitize(m);
  es.compute(m);
  if (es.info() != Eigen::Success)
    throw numerical_error("sdp_solver: eigendecomposition failed");
  const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(0.0);
  m = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().adjoint();
  hermitize(m);
  return es.eigenvalues()(0);
}

// Norm of the full conjugate-symmetric vector a reduced vector represents:
// the normalization entry appears once, every other entry twice.
double reduced_vector_norm(const std::vector<cd>& v, int norm_index) {
  double sq = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    sq += (static_cast<int>(i) == norm_index ? 1.0 : 2.0) * std::norm(v[i]);
  return std::sqrt(sq);
}

}  // namespace

SDPResult solve(const StructuredSDP& p) {
  if (p.side < 1 || p.n_reduced < 1 || !p.assemble || !p.adjoint)
    throw validation_error("sdp_solver: incomplete problem description");
  if (static_cast<int>(p.c.size()) != p.n_reduced ||
      static_cast<int>(p.multiplicity.size()) != p.n_reduced)
    throw validation_error("sdp_solver: objective/multiplicity size mismatch");
  if (p.normalization_index < 0 || p.normalization_index >= p.n_reduced)
    throw validation_error("sdp_solver: normalization index out of range");

  const int nz = p.normalization_index;
  const double c0 = p.c[nz].real();
  const double c_norm = reduced_vector_norm(p.c, nz);

  std::vector<cd> y(p.n_reduced, cd(0.0, 0.0));
  y[nz] = 1.0;
  if (p.warm_y) {
    if (static_cast<int>(p.warm_y->size()) != p.n_reduced)
      throw validation_error("sdp_solver: warm start size mismatch");
    y = *p.warm_y;
    y[nz] = 1.0;
  }

  // <c, y> over the full conjugate-symmetric expansion.
  const auto objective_of = [&](const std::vector<cd>& v) {
    double obj = p.c[nz].real() * v[nz].real();
    for (int i = 0; i < p.n_reduced; ++i)
      if (i != nz) obj += 2.0 * (p.c[i] * v[i]).real();
    return obj;
  };

  Mat Ty(p.side, p.side), X(p.side, p.side), U = Mat::Zero(p.side, p.side);
  Mat Tyn(p.side, p.side), scratch(p.side, p.side);
  std::vector<cd> ty(p.n_reduced), y_new(p.n_reduced), tdiff(p.n_reduced);
  Eigen::SelfAdjointEigenSolver<Mat> es;

  // Certificate state: rigorous dual bound and PSD-rounded primal objective.
  double best_dual = -std::numeric_limits<double>::infinity();
  long long first_resid_pass = -1;
  long long last_cert_iter = -1;

  const auto certificate = [&](const std::vector<cd>& yv) {
    // Dual side: S = Proj_PSD(rho * U) is PSD by construction; its linear
    // infeasibility is absorbed via |y_gamma| <= 1 into an absolute penalty.
    scratch = p.rho * U;
    project_psd(scratch, es);
    p.adjoint(scratch, tdiff);
    double slack = 0.0;
    for (int i = 0; i < p.n_reduced; ++i)
      if (i != nz) slack += 2.0 * std::abs(p.c[i] - std::conj(tdiff[i]));
    const double dual = c0 - scratch.trace().real() - slack;
    best_dual = std::max(best_dual, dual);

    // Primal side: round along the identity direction (T maps the unit vector
    // at the normalization entry to the identity matrix).
    p.assemble(yv, scratch);
    hermitize(scratch);
    es.compute(scratch);
    if (es.info() != Eigen::Success)
      throw numerical_error("sdp_solver: eigendecomposition failed");
    const double lam_min = es.eigenvalues()(0);
    const double t = std::max(0.0, -lam_min);
    const double feas_obj = (objective_of(yv) + t * c0) / (1.0 + t);
    return feas_obj - best_dual;
  };

  double rp = std::numeric_limits<double>::infinity();
  double rd = rp;
  long long it = 0;
  std::string status = "max_iter";

  for (it = 1; it <= p.max_iters; ++it) {
    p.assemble(y, Ty);

    // (a) PSD projection of the shifted iterate.
    X = Ty - U;
    project_psd(X, es);

    // Over-relaxation.
    scratch = p.over_relax * X + (1.0 - p.over_relax) * Ty;  // Xh

    // (b) Closed-form structure restoration: T*T is diagonal, so the
    // least-squares step divides by the per-entry multiplicity.
    p.adjoint(scratch + U, ty);
    for (int i = 0; i < p.n_reduced; ++i)
      y_new[i] = (ty[i] - std::conj(p.c[i]) / p.rho) / p.multiplicity[i];
    y_new[nz] = 1.0;

    // (c) Scaled dual update against the over-relaxed iterate.
    p.assemble(y_new, Tyn);
    U += scratch - Tyn;

    rp = (X - Tyn).norm() / (1.0 + X.norm());
    p.adjoint(Tyn - Ty, tdiff);
    rd = p.rho * reduced_vector_norm(tdiff, nz) / (1.0 + c_norm);
    y.swap(y_new);

    if (!std::isfinite(rp) || !std::isfinite(rd))
      throw numerical_error("sdp_solver: non-finite residual at iteration " +
                            std::to_string(it));

    if (rp < p.tol && rd < p.tol) {
      if (first_resid_pass < 0) first_resid_pass = it;
      // Certificates cost an extra eigendecomposition; check sparsely.
      if (last_cert_iter < 0 || it - last_cert_iter >= 25) {
        last_cert_iter = it;
        const double gap = certificate(y);
        // Floating-point stall escape: after a long post-residual tail a
        // certified gap within 10*tol still meets the contract.
        const bool stalled = it - first_resid_pass > 5000;
        if (gap <= 2.0 * p.tol || (stalled && gap <= 10.0 * p.tol)) {
          status = "converged";
          break;
        }
      }
    }
  }
  if (it > p.max_iters) it = p.max_iters;

  SDPResult result;
  result.iterations = it;
  result.primal_residual = rp;
  result.dual_residual = rd;
  result.status = status;

  // Ensure the dual bound exists even on the max_iter path.
  if (last_cert_iter < 0) certificate(y);
  result.dual_bound = best_dual;

  // Feasibility rounding along the identity direction; the returned iterate
  // always satisfies the PSD constraint up to round-off.
  p.assemble(y, scratch);
  hermitize(scratch);
  es.compute(scratch);
  if (es.info() != Eigen::Success)
    throw numerical_error("sdp_solver: eigendecomposition failed");
  const double lam_min = es.eigenvalues()(0);
  const double t = std::max(0.0, -lam_min);
  for (int i = 0; i < p.n_reduced; ++i)
    y[i] = (i == nz) ? cd(1.0, 0.0) : y[i] / (1.0 + t);
  result.y = y;
  result.objective = objective_of(y);
  result.matrix.resize(p.side, p.side);
  p.assemble(y, result.matrix);
  hermitize(result.matrix);
  es.compute(result.matrix);
  result.min_eigenvalue = es.eigenvalues()(0);
  return result;
}

}  // namespace torusfpras
