#include "torusfpras/qsim.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "test_support.hpp"
#include "torusfpras/errors.hpp"
#include "torusfpras/rng.hpp"
#include "torusfpras/trig_poly.hpp"

namespace {

using torusfpras::CircuitSpec;
using torusfpras::GraphSpec;
using torusfpras::Htp;
using torusfpras::Instance;
using torusfpras::Layer;
using torusfpras::Matrix;
using torusfpras::StateVector;
using torusfpras::validation_error;

constexpr double kPi = std::numbers::pi;
const std::complex<double> kI{0.0, 1.0};

Matrix pauli_z() {
  Matrix z(2, 2);
  z << 1.0, 0.0, 0.0, -1.0;
  return z;
}

Matrix pauli_x() {
  Matrix x(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  return x;
}

Matrix hadamard() {
  Matrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

GraphSpec triangle() { return {3, {{0, 1}, {1, 2}, {0, 2}}}; }
GraphSpec two_path() { return {2, {{0, 1}}}; }

TEST(MakeGenerator, PauliZSpectrum) {
  const auto gen = torusfpras::make_generator(pauli_z());
  ASSERT_EQ(gen.eigenvalues.size(), 2u);
  EXPECT_NEAR(gen.eigenvalues[0], -1.0, 1e-12);
  EXPECT_NEAR(gen.eigenvalues[1], 1.0, 1e-12);
  EXPECT_NEAR(gen.spectral_diameter, 2.0, 1e-12);
  // Spectral resolution reconstructs the operator.
  Matrix sum = Matrix::Zero(2, 2);
  for (std::size_t k = 0; k < gen.eigenvalues.size(); ++k) {
    sum += gen.eigenvalues[k] * gen.projectors[k];
  }
  EXPECT_LE((sum - pauli_z()).norm(), 1e-10);
}

TEST(MakeGenerator, ClustersNearDegenerateLevels) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 0.0;
  m(1, 1) = 1e-10;
  m(2, 2) = 1.0;
  const auto gen = torusfpras::make_generator(m);
  ASSERT_EQ(gen.eigenvalues.size(), 2u);
  EXPECT_NEAR(gen.eigenvalues[0], 0.0, 1e-9);
  EXPECT_NEAR(gen.eigenvalues[1], 1.0, 1e-9);
}

TEST(MakeGenerator, RejectsNonIntegerDifferences) {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 1) = 0.5;
  EXPECT_THROW(torusfpras::make_generator(m), validation_error);
}

TEST(MakeGenerator, RejectsNonHermitian) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(torusfpras::make_generator(m), validation_error);
}

TEST(Prepare, MatchesDenseMatrixExponentialOracle) {
  // Two-qubit circuit: Hadamards, exp(-i*theta_0*(Z ot I)), then a CZ and
  // exp(-i*theta_1*(X ot I + I ot X)).
  const Matrix eye2 = Matrix::Identity(2, 2);
  const Matrix w = kron(hadamard(), hadamard());
  Matrix cz = Matrix::Identity(4, 4);
  cz(3, 3) = -1.0;
  const Matrix g1 = kron(pauli_z(), eye2);
  const Matrix g2 = kron(pauli_x(), eye2) + kron(eye2, pauli_x());

  CircuitSpec circuit;
  circuit.n = 2;
  circuit.M = 2;
  circuit.layers.push_back({w, torusfpras::make_generator(g1), 0});
  circuit.layers.push_back({cz, torusfpras::make_generator(g2), 1});

  torusfpras::RngStream rng(31, "test-prepare");
  for (int rep = 0; rep < 50; ++rep) {
    const std::vector<double> theta{rng.uniform01() * 2.0 * kPi - kPi,
                                    rng.uniform01() * 2.0 * kPi - kPi};
    StateVector zero = StateVector::Zero(4);
    zero(0) = 1.0;
    const Matrix u1 = (-kI * theta[0] * g1).exp();
    const Matrix u2 = (-kI * theta[1] * g2).exp();
    const StateVector expected = u2 * cz * u1 * w * zero;
    const StateVector got = torusfpras::prepare(circuit, theta);
    EXPECT_LE((got - expected).norm(), 1e-9);
    EXPECT_NEAR(got.norm(), 1.0, 1e-10);
  }
}

TEST(Expectation, RealAndCorrect) {
  const Instance inst = torusfpras::phase_rotation_instance();
  for (double theta : {0.0, 0.3, 1.1, -2.0}) {
    const StateVector psi = torusfpras::prepare(inst.circuit, {theta});
    EXPECT_NEAR(torusfpras::expectation(psi, inst.observable), std::cos(2.0 * theta), 1e-10);
  }
}

TEST(SampleMean, UnbiasedWithinHoeffdingWindow) {
  const Instance inst = torusfpras::phase_rotation_instance();
  const StateVector psi = torusfpras::prepare(inst.circuit, {0.7});
  const double truth = std::cos(1.4);
  torusfpras::RngStream rng(32, "test-shots");
  const long long shots = 200000;
  const double mean = torusfpras::sample_mean(psi, inst.observable, shots, rng);
  EXPECT_LE(std::abs(mean - truth), 4.0 / std::sqrt(static_cast<double>(shots)));
}

TEST(SampleMean, CountsQueries) {
  const Instance inst = torusfpras::phase_rotation_instance();
  const StateVector psi = torusfpras::prepare(inst.circuit, {0.2});
  torusfpras::RngStream rng(33, "test-counter");
  torusfpras::query_counter::reset();
  (void)torusfpras::sample_mean(psi, inst.observable, 123, rng);
  (void)torusfpras::sample_mean(psi, inst.observable, 77, rng);
  EXPECT_EQ(torusfpras::query_counter::value(), 200);
}

TEST(SampleMean, RejectsZeroShots) {
  const Instance inst = torusfpras::phase_rotation_instance();
  const StateVector psi = torusfpras::prepare(inst.circuit, {0.0});
  torusfpras::RngStream rng(34, "test-zero-shots");
  EXPECT_THROW(torusfpras::sample_mean(psi, inst.observable, 0, rng), validation_error);
}

TEST(MaxCut, TriangleDiagonalCutValues) {
  const auto obs = torusfpras::maxcut_hamiltonian(triangle());
  EXPECT_NEAR(obs.norm_bound, 3.0, 1e-12);  // declared bound |E|
  const std::vector<double> expected{0.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 0.0};
  for (int b = 0; b < 8; ++b) {
    EXPECT_NEAR(obs.matrix(b, b).real(), expected[static_cast<std::size_t>(b)], 1e-12);
  }
}

TEST(MaxCut, ValidatesGraph) {
  EXPECT_THROW(torusfpras::maxcut_hamiltonian({2, {{0, 0}}}), validation_error);
  EXPECT_THROW(torusfpras::maxcut_hamiltonian({2, {{0, 2}}}), validation_error);
  EXPECT_THROW(torusfpras::maxcut_hamiltonian({2, {{0, 1}, {1, 0}}}), validation_error);
  EXPECT_THROW(torusfpras::maxcut_hamiltonian({13, {}}), validation_error);  // qubit cap
}

TEST(Qaoa, StructureAndUniformStart) {
  const Instance inst = torusfpras::qaoa_maxcut(triangle(), 2);
  EXPECT_EQ(inst.circuit.n, 3);
  EXPECT_EQ(inst.circuit.M, 4);
  ASSERT_EQ(inst.circuit.layers.size(), 4u);
  EXPECT_EQ(inst.circuit.layers[0].param_index, 0);  // gamma_1
  EXPECT_EQ(inst.circuit.layers[1].param_index, 2);  // beta_1
  EXPECT_EQ(inst.circuit.layers[2].param_index, 1);  // gamma_2
  EXPECT_EQ(inst.circuit.layers[3].param_index, 3);  // beta_2
  // At theta = 0 the state is |+>^n.
  const StateVector psi = torusfpras::prepare(inst.circuit, {0.0, 0.0, 0.0, 0.0});
  for (int b = 0; b < 8; ++b) {
    EXPECT_NEAR(std::abs(psi(b)), 1.0 / std::sqrt(8.0), 1e-12);
  }
}

TEST(Qaoa, TriangleExpectationAtZeroIsMinusMeanCut) {
  const Instance inst = torusfpras::qaoa_maxcut(triangle(), 1);
  const StateVector psi = torusfpras::prepare(inst.circuit, {0.0, 0.0});
  EXPECT_NEAR(torusfpras::expectation(psi, inst.observable), -1.5, 1e-10);
}

TEST(DegreeProfile, TriangleLevelOne) {
  const Instance inst = torusfpras::qaoa_maxcut(triangle(), 1);
  const auto profile = torusfpras::degree_profile(inst.circuit);
  EXPECT_EQ(profile.d, (std::vector<int>{2, 6}));
  EXPECT_EQ(profile.conservative_bound, 12);
}

TEST(ProjectorHtp, PhaseRotationIsCosTwoTheta) {
  const Instance inst = torusfpras::phase_rotation_instance();
  const Htp htp = torusfpras::projector_htp(inst);
  ASSERT_EQ(htp.coeffs.size(), 2u);
  EXPECT_LE(std::abs(htp.coeffs.at({2}) - std::complex<double>(0.5, 0.0)), 1e-12);
  EXPECT_LE(std::abs(htp.coeffs.at({-2}) - std::complex<double>(0.5, 0.0)), 1e-12);
}

TEST(ProjectorHtp, MatchesSimulatorOnRandomPoints) {
  for (const Instance& inst :
       {torusfpras::qaoa_maxcut(two_path(), 1), torusfpras::qaoa_maxcut(triangle(), 1)}) {
    const Htp htp = torusfpras::projector_htp(inst);
    const auto profile = torusfpras::degree_profile(inst.circuit);
    for (const auto& [alpha, c] : htp.coeffs) {
      for (std::size_t j = 0; j < alpha.size(); ++j) {
        EXPECT_LE(std::abs(alpha[j]), profile.d[j]);
      }
    }
    torusfpras::RngStream rng(35, "test-representation");
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> theta(static_cast<std::size_t>(inst.circuit.M));
      for (double& t : theta) t = rng.uniform01() * 2.0 * kPi - kPi;
      const StateVector psi = torusfpras::prepare(inst.circuit, theta);
      EXPECT_NEAR(torusfpras::eval(htp, theta),
                  torusfpras::expectation(psi, inst.observable), 1e-8);
    }
  }
}

TEST(ProjectorHtp, TriangleSupportCount) {
  const Htp htp = torusfpras::projector_htp(torusfpras::qaoa_maxcut(triangle(), 1));
  EXPECT_EQ(htp.coeffs.size(), 9u);
  const Htp htp2 = torusfpras::projector_htp(torusfpras::qaoa_maxcut(two_path(), 1));
  EXPECT_EQ(htp2.coeffs.size(), 5u);
}

TEST(ProjectorHtp, TupleCapIsEnforced) {
  const Instance inst = torusfpras::qaoa_maxcut(triangle(), 1);
  EXPECT_THROW(torusfpras::projector_htp(inst, 2), torusfpras::resource_limit_error);
}

TEST(HeaIonTrap, TwoQubitSpectrumAfterQuantization) {
  // J eigenvalues +-0.6 round (half away from zero) to the nearest integer
  // +-1 at L = 1, so the reconstituted coupling strengthens to 1 and the
  // layer generator has levels {-2, 0, 2}.
  const CircuitSpec c = torusfpras::hea_ion_trap(2, 1, 0.6, 0.0, 1, {0, 1});
  ASSERT_EQ(c.layers.size(), 2u);
  const auto& gen = c.layers[0].generator;
  ASSERT_EQ(gen.eigenvalues.size(), 3u);
  EXPECT_NEAR(gen.eigenvalues[0], -2.0, 1e-9);
  EXPECT_NEAR(gen.eigenvalues[1], 0.0, 1e-9);
  EXPECT_NEAR(gen.eigenvalues[2], 2.0, 1e-9);
  // Drive layer: sum of Y's has integer levels {-2, 0, 2} on two qubits.
  const auto& drive = c.layers[1].generator;
  EXPECT_NEAR(drive.spectral_diameter, 4.0, 1e-9);
}

TEST(HeaIonTrap, UniformCouplingsThreeQubitsValid) {
  const CircuitSpec c = torusfpras::hea_ion_trap(3, 1, 0.5, 0.0, 2, {0, 1});
  EXPECT_EQ(c.n, 3);
  EXPECT_EQ(c.M, 2);
  const auto profile = torusfpras::degree_profile(c);
  EXPECT_EQ(profile.d.size(), 2u);
}

TEST(HeaIonTrap, DecayingCouplingsCanFailQuantization) {
  // With power-law decay the projected coupling spectrum is no longer
  // integer-difference after scaling; the builder must refuse it.
  EXPECT_THROW(torusfpras::hea_ion_trap(3, 1, 1.0, 1.0, 2, {0, 1}),
               validation_error);
}

TEST(HeaIonTrap, ValidatesArguments) {
  EXPECT_THROW(torusfpras::hea_ion_trap(1, 1, 0.5, 0.0, 1, {0, 1}), validation_error);
  EXPECT_THROW(torusfpras::hea_ion_trap(2, 1, 0.5, 0.0, 0, {0, 1}), validation_error);
  EXPECT_THROW(torusfpras::hea_ion_trap(2, 2, 0.5, 0.0, 1, {0, 1}), validation_error);
}

TEST(Observable, NormBoundMustDominate) {
  EXPECT_THROW(torusfpras::make_observable(pauli_z(), 0.5), validation_error);
  const auto obs = torusfpras::make_observable(pauli_z());
  EXPECT_NEAR(obs.norm_bound, 1.0, 1e-12);
}

}  // namespace
