#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "torusfpras/rng.hpp"
#include "torusfpras/trig_poly.hpp"

namespace torusfpras {

using Matrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

// Hard cap on the dense statevector representation (2^n amplitudes).
inline constexpr int kQubitCap = 12;

// Hermitian generator of a parameterized gate, stored spectrally: the gate
// applies as U(t) = sum_lambda exp(-i*lambda*t) * P_lambda, which keeps the
// integer-difference structure of the spectrum exact (no matrix exponentials
// anywhere). Eigenvalues within 1e-8 are clustered into one level, and all
// pairwise differences of distinct levels must be integers to 1e-9.
struct Generator {
  Matrix matrix;
  std::vector<double> eigenvalues;  // distinct levels, ascending
  std::vector<Matrix> projectors;   // spectral projector per level
  double spectral_diameter = 0.0;   // max eigenvalue - min eigenvalue
};

// One circuit layer: a fixed unitary followed by the parameterized gate
// exp(-i * generator * theta[param_index]).
struct Layer {
  Matrix fixed_gate;
  Generator generator;
  int param_index = 0;  // 0-based column of the sharing matrix
};

// Parameterized quantum circuit acting on n qubits with M independent
// parameters. The 0/1 sharing matrix A (K rows, one 1 per row) is implied by
// the per-layer param_index values.
struct CircuitSpec {
  int n = 0;
  int M = 0;
  std::vector<Layer> layers;
};

// Hermitian observable with a declared norm bound O_max >= operator norm and
// a cached eigendecomposition used for measurement sampling. For exactly
// diagonal matrices the cache is the identity basis, so sampled outcomes are
// exact cut values rather than eigensolver approximations.
struct Observable {
  Matrix matrix;
  double norm_bound = 0.0;
  Eigen::VectorXd eigenvalues;  // full spectrum, one entry per basis vector
  Matrix eigenvectors;          // columns are the sampling basis
};

struct GraphSpec {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
};

struct InstanceMetadata {
  std::string name;
  std::optional<GraphSpec> graph;
};

// A problem instance: circuit plus observable plus bookkeeping metadata.
struct Instance {
  CircuitSpec circuit;
  Observable observable;
  InstanceMetadata metadata;
};

// Validates Hermiticity, eigendecomposes, clusters degenerate levels, and
// checks the integer-difference assumption on the spectrum.
Generator make_generator(const Matrix& hermitian);

// Wraps a Hermitian matrix as an observable. norm_bound defaults to the
// computed operator norm; an explicit value must dominate it to 1e-9.
Observable make_observable(const Matrix& hermitian,
                           std::optional<double> norm_bound = std::nullopt);

// |psi(theta)> = U_K(theta_{j_K}) C_K ... U_1(theta_{j_1}) C_1 |0...0>,
// each parameterized gate applied in spectral form.
StateVector prepare(const CircuitSpec& circuit, const std::vector<double>& theta);

// <psi|O|psi>, checked real to 1e-10.
double expectation(const StateVector& state, const Observable& obs);

// Mean of `shots` i.i.d. eigenvalue draws in the observable's cached
// eigenbasis with Born probabilities |<e_i|psi>|^2. Unbiased for
// expectation(state, obs); every outcome lies in [-O_max, O_max]. Adds
// `shots` to the global query counter.
double sample_mean(const StateVector& state, const Observable& obs, long long shots,
                   RngStream& stream);

// MaxCut cost Hamiltonian H_MC = sum_{(u,v) in E} (I - Z_u Z_v)/2: diagonal
// with the cut value of each computational basis cut; O_max = |E|.
Observable maxcut_hamiltonian(const GraphSpec& graph);

// QAOA instance for MaxCut at level p: layers alternate the phase generator
// H_MC (parameters gamma_1..gamma_p, indices 0..p-1) and the mixer
// B = sum_u X_u (parameters beta_1..beta_p, indices p..2p-1); the first
// layer's fixed gate is the Walsh-Hadamard W_n (|0> -> |+>^n), all others
// identity. Observable is -H_MC, so minimizing f maximizes the expected cut.
Instance qaoa_maxcut(const GraphSpec& graph, int p);

// Ion-trap hardware-efficient ansatz: depth-D alternation of the coupling
// generator L*H_J, H_J = sum_{j<k} J_{jk}(X_j X_k + Y_j Y_k) with power-law
// couplings J_{jk} = J0/|j-k|^decay_exp, and the drive generator sum_j Y_j.
// H_J's eigenvalues are first projected to the nearest multiples of 1/L
// (half-away-from-zero) and the operator reconstituted; if the projected
// spectrum still fails integer-difference validation the builder throws.
// `sharing` maps each of the 2*D layers to its 0-based parameter index.
CircuitSpec hea_ion_trap(int n, int depth, double J0, double decay_exp, int quant_level,
                         const std::vector<int>& sharing);

// Single-qubit demonstration instance: C = Hadamard, generator Z, observable
// Pauli-X, so f(theta) = <+|exp(i*theta*Z) X exp(-i*theta*Z)|+> = cos(2*theta).
Instance phase_rotation_instance();

// Exact surrogate oracle from the representation theorem: enumerates
// eigenvalue tuples lambda in L_1 x ... x L_K, caches the branch vectors
// P_lambda|0> = P_{K,lambda_K} C_K ... P_{1,lambda_1} C_1 |0>, and
// accumulates f_alpha = sum <branch_+|O|branch_-> over pairs whose frequency
// difference A^T(lambda_+ - lambda_-) equals alpha. Throws when the tuple
// count exceeds `tuple_cap` or a projected frequency is not an integer.
Htp projector_htp(const Instance& instance, std::size_t tuple_cap = 10000);

// Per-parameter degree bounds: d_j = sum of spectral diameters of all
// generators feeding parameter j (validated integer to 1e-9, then rounded);
// conservative_bound = K * max_k diameter_k.
DegreeProfile degree_profile(const CircuitSpec& circuit);

// Global instrumented counter of simulated quantum queries (shot draws).
namespace query_counter {
long long value();
void reset();
void add(long long shots);
}  // namespace query_counter

}  // namespace torusfpras
