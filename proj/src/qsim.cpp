#include "torusfpras/qsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "torusfpras/errors.hpp"

namespace torusfpras {

namespace {

using cd = std::complex<double>;

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << cd(0, 0), cd(0, -1), cd(0, 1), cd(0, 0);
  return m;
}

Matrix hadamard() {
  Matrix m(2, 2);
  const double s = 1.0 / std::numbers::sqrt2;
  m << s, s, s, -s;
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Qubit 0 is the leftmost tensor factor (most significant bit of the basis
// index); the same convention is used for diagonal cut values below.
Matrix op_on_qubit(int n, int qubit, const Matrix& single) {
  Matrix out = Matrix::Identity(1, 1);
  for (int q = 0; q < n; ++q)
    out = kron(out, q == qubit ? single : Matrix::Identity(2, 2));
  return out;
}

int bit_of(long long basis, int qubit, int n) {
  return static_cast<int>((basis >> (n - 1 - qubit)) & 1);
}

void check_hermitian(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) throw validation_error(std::string(who) + ": matrix not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw validation_error(std::string(who) + ": matrix not Hermitian");
}

void check_qubit_count(int n, const char* who) {
  if (n < 1 || n > kQubitCap)
    throw validation_error(std::string(who) + ": qubit count outside [1, " +
                           std::to_string(kQubitCap) + "]");
}

std::atomic<long long> g_query_counter{0};

}  // namespace

namespace query_counter {
long long value() { return g_query_counter.load(); }
void reset() { g_query_counter.store(0); }
void add(long long shots) { g_query_counter.fetch_add(shots); }
}  // namespace query_counter

Generator make_generator(const Matrix& hermitian) {
  check_hermitian(hermitian, "make_generator");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
  if (es.info() != Eigen::Success)
    throw numerical_error("make_generator: eigendecomposition failed");

  // Cluster eigenvalues within 1e-8 into one degenerate level; numerical
  // eigensolvers split exactly degenerate levels by round-off.
  Generator gen;
  gen.matrix = hermitian;
  const Eigen::VectorXd& vals = es.eigenvalues();
  const Matrix& vecs = es.eigenvectors();
  Eigen::Index lo = 0;
  while (lo < vals.size()) {
    Eigen::Index hi = lo + 1;
    while (hi < vals.size() && vals(hi) - vals(hi - 1) <= 1e-8) ++hi;
    gen.eigenvalues.push_back(vals.segment(lo, hi - lo).mean());
    const Matrix block = vecs.middleCols(lo, hi - lo);
    gen.projectors.push_back(block * block.adjoint());
    lo = hi;
  }
  for (std::size_t i = 0; i < gen.eigenvalues.size(); ++i) {
    for (std::size_t j = i + 1; j < gen.eigenvalues.size(); ++j) {
      const double diff = gen.eigenvalues[j] - gen.eigenvalues[i];
      if (std::abs(diff - std::round(diff)) > 1e-9)
        throw validation_error(
            "make_generator: spectrum fails integer-difference validation");
    }
  }
  gen.spectral_diameter = gen.eigenvalues.back() - gen.eigenvalues.front();
  return gen;
}

Observable make_observable(const Matrix& hermitian, std::optional<double> norm_bound) {
  check_hermitian(hermitian, "make_observable");
  Observable obs;
  obs.matrix = hermitian;

  bool diagonal = true;
  for (Eigen::Index i = 0; i < hermitian.rows() && diagonal; ++i)
    for (Eigen::Index j = 0; j < hermitian.cols(); ++j)
      if (i != j && hermitian(i, j) != cd(0.0, 0.0)) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    // Identity sampling basis keeps diagonal observables (cut values) exact.
    obs.eigenvalues = hermitian.diagonal().real();
    obs.eigenvectors = Matrix::Identity(hermitian.rows(), hermitian.cols());
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
    if (es.info() != Eigen::Success)
      throw numerical_error("make_observable: eigendecomposition failed");
    obs.eigenvalues = es.eigenvalues();
    obs.eigenvectors = es.eigenvectors();
  }

  const double op_norm = obs.eigenvalues.size()
                             ? obs.eigenvalues.cwiseAbs().maxCoeff()
                             : 0.0;
  if (norm_bound) {
    if (*norm_bound < op_norm - 1e-9)
      throw validation_error("make_observable: norm_bound below the operator norm");
    obs.norm_bound = *norm_bound;
  } else {
    obs.norm_bound = op_norm;
  }
  return obs;
}

StateVector prepare(const CircuitSpec& circuit, const std::vector<double>& theta) {
  if (static_cast<int>(theta.size()) != circuit.M)
    throw validation_error("prepare: theta length differs from parameter count");
  const Eigen::Index dim = Eigen::Index(1) << circuit.n;
  StateVector state = StateVector::Zero(dim);
  state(0) = 1.0;
  for (const Layer& layer : circuit.layers) {
    if (layer.fixed_gate.rows() != dim || layer.generator.matrix.rows() != dim)
      throw validation_error("prepare: layer dimension differs from 2^n");
    state = layer.fixed_gate * state;
    const double t = theta.at(layer.param_index);
    StateVector next = StateVector::Zero(dim);
    for (std::size_t k = 0; k < layer.generator.eigenvalues.size(); ++k)
      next += std::polar(1.0, -layer.generator.eigenvalues[k] * t) *
              (layer.generator.projectors[k] * state);
    state = std::move(next);
  }
  if (std::abs(state.norm() - 1.0) > 1e-9)
    throw numerical_error("prepare: output state is not unit-norm");
  return state;
}

double expectation(const StateVector& state, const Observable& obs) {
  if (state.size() != obs.matrix.rows())
    throw validation_error("expectation: state dimension differs from observable");
  const cd val = state.dot(obs.matrix * state);
  if (std::abs(val.imag()) > 1e-10 * std::max(1.0, obs.norm_bound))
    throw numerical_error("expectation: value has a non-real residual");
  return val.real();
}

double sample_mean(const StateVector& state, const Observable& obs, long long shots,
                   RngStream& stream) {
  if (shots < 1) throw validation_error("sample_mean: shots must be >= 1");
  if (state.size() != obs.matrix.rows())
    throw validation_error("sample_mean: state dimension differs from observable");

  // Born probabilities in the cached eigenbasis, as an inverse-CDF table.
  const StateVector amps = obs.eigenvectors.adjoint() * state;
  std::vector<double> cdf(amps.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    total += std::norm(amps(i));
    cdf[i] = total;
  }

  double sum = 0.0;
  for (long long s = 0; s < shots; ++s) {
    const double u = stream.uniform01() * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const Eigen::Index idx = std::min<Eigen::Index>(it - cdf.begin(), amps.size() - 1);
    sum += obs.eigenvalues(idx);
  }
  query_counter::add(shots);
  return sum / static_cast<double>(shots);
}

Observable maxcut_hamiltonian(const GraphSpec& graph) {
  check_qubit_count(graph.n, "maxcut_hamiltonian");
  std::set<std::pair<int, int>> seen;
  for (const auto& [u, v] : graph.edges) {
    if (u < 0 || v < 0 || u >= graph.n || v >= graph.n)
      throw validation_error("maxcut_hamiltonian: edge endpoint outside [0, n)");
    if (u == v) throw validation_error("maxcut_hamiltonian: self-loop");
    if (!seen.insert(std::minmax(u, v)).second)
      throw validation_error("maxcut_hamiltonian: duplicate edge");
  }
  const Eigen::Index dim = Eigen::Index(1) << graph.n;
  Matrix mat = Matrix::Zero(dim, dim);
  for (long long b = 0; b < dim; ++b) {
    int cut = 0;
    for (const auto& [u, v] : graph.edges)
      cut += bit_of(b, u, graph.n) != bit_of(b, v, graph.n);
    mat(b, b) = static_cast<double>(cut);
  }
  return make_observable(mat, static_cast<double>(graph.edges.size()));
}

Instance qaoa_maxcut(const GraphSpec& graph, int p) {
  if (p < 1) throw validation_error("qaoa_maxcut: level p must be >= 1");
  const Observable cost = maxcut_hamiltonian(graph);  // also validates the graph
  const Eigen::Index dim = cost.matrix.rows();

  Matrix mixer = Matrix::Zero(dim, dim);
  for (int q = 0; q < graph.n; ++q) mixer += op_on_qubit(graph.n, q, pauli_x());
  const Generator phase_gen = make_generator(cost.matrix);
  const Generator mixer_gen = make_generator(mixer);

  Matrix walsh = Matrix::Identity(1, 1);
  for (int q = 0; q < graph.n; ++q) walsh = kron(walsh, hadamard());

  CircuitSpec circuit;
  circuit.n = graph.n;
  circuit.M = 2 * p;
  for (int level = 0; level < p; ++level) {
    Layer phase;
    phase.fixed_gate = (level == 0) ? walsh : Matrix::Identity(dim, dim);
    phase.generator = phase_gen;
    phase.param_index = level;  // gamma_1..gamma_p occupy indices 0..p-1
    circuit.layers.push_back(std::move(phase));

    Layer mix;
    mix.fixed_gate = Matrix::Identity(dim, dim);
    mix.generator = mixer_gen;
    mix.param_index = p + level;  // beta_1..beta_p occupy indices p..2p-1
    circuit.layers.push_back(std::move(mix));
  }

  Instance inst;
  inst.circuit = std::move(circuit);
  inst.observable = make_observable(-cost.matrix, cost.norm_bound);
  inst.metadata.name = "qaoa-maxcut-p" + std::to_string(p);
  inst.metadata.graph = graph;
  return inst;
}

CircuitSpec hea_ion_trap(int n, int depth, double J0, double decay_exp, int quant_level,
                         const std::vector<int>& sharing) {
  check_qubit_count(n, "hea_ion_trap");
  if (n < 2) throw validation_error("hea_ion_trap: coupling needs n >= 2");
  if (depth < 1) throw validation_error("hea_ion_trap: depth must be >= 1");
  if (quant_level < 1) throw validation_error("hea_ion_trap: quantization level must be >= 1");
  if (sharing.size() != static_cast<std::size_t>(2 * depth))
    throw validation_error("hea_ion_trap: sharing map must cover all 2*depth layers");
  for (int j : sharing)
    if (j < 0) throw validation_error("hea_ion_trap: negative parameter index");

  // Power-law coupling matrix, projected so its eigenvalues are exact
  // multiples of 1/L (nearest, half away from zero), then reconstituted.
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      coupling(j, k) = coupling(k, j) = J0 / std::pow(std::abs(j - k), decay_exp);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(coupling);
  Eigen::VectorXd proj = es.eigenvalues();
  for (Eigen::Index i = 0; i < proj.size(); ++i)
    proj(i) = std::round(proj(i) * quant_level) / quant_level;
  coupling = es.eigenvectors() * proj.asDiagonal() * es.eigenvectors().transpose();

  const Eigen::Index dim = Eigen::Index(1) << n;
  Matrix hj = Matrix::Zero(dim, dim);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      hj += coupling(j, k) *
            (op_on_qubit(n, j, pauli_x()) * op_on_qubit(n, k, pauli_x()) +
             op_on_qubit(n, j, pauli_y()) * op_on_qubit(n, k, pauli_y()));
    }
  }
  Matrix drive = Matrix::Zero(dim, dim);
  for (int q = 0; q < n; ++q) drive += op_on_qubit(n, q, pauli_y());

  // make_generator rejects the circuit if the scaled coupling spectrum still
  // has non-integer eigenvalue differences after the projection above.
  const Generator coupling_gen = make_generator(double(quant_level) * hj);
  const Generator drive_gen = make_generator(drive);

  CircuitSpec circuit;
  circuit.n = n;
  circuit.M = 1 + *std::max_element(sharing.begin(), sharing.end());
  for (int d = 0; d < depth; ++d) {
    Layer couple;
    couple.fixed_gate = Matrix::Identity(dim, dim);
    couple.generator = coupling_gen;
    couple.param_index = sharing[2 * d];
    circuit.layers.push_back(std::move(couple));

    Layer rotate;
    rotate.fixed_gate = Matrix::Identity(dim, dim);
    rotate.generator = drive_gen;
    rotate.param_index = sharing[2 * d + 1];
    circuit.layers.push_back(std::move(rotate));
  }
  return circuit;
}

Instance phase_rotation_instance() {
  Matrix z(2, 2);
  z << 1, 0, 0, -1;

  CircuitSpec circuit;
  circuit.n = 1;
  circuit.M = 1;
  Layer layer;
  layer.fixed_gate = hadamard();
  layer.generator = make_generator(z);
  layer.param_index = 0;
  circuit.layers.push_back(std::move(layer));

  Instance inst;
  inst.circuit = std::move(circuit);
  inst.observable = make_observable(pauli_x());
  inst.metadata.name = "phase-rotation";
  return inst;
}

Htp projector_htp(const Instance& instance, std::size_t tuple_cap) {
  const CircuitSpec& circuit = instance.circuit;
  if (instance.observable.matrix.rows() != (Eigen::Index(1) << circuit.n))
    throw validation_error("projector_htp: observable dimension differs from circuit");
  std::size_t tuples = 1;
  for (const Layer& layer : circuit.layers) {
    tuples *= layer.generator.eigenvalues.size();
    if (tuples > tuple_cap)
      throw resource_limit_error("projector_htp: eigenvalue tuple count exceeds cap");
  }

  // Depth-first branch enumeration shares every P...C|0> prefix.
  struct Branch {
    StateVector vec;
    std::vector<double> freq;  // per-parameter accumulated eigenvalue sums
  };
  std::vector<Branch> branches;
  branches.reserve(tuples);
  const Eigen::Index dim = Eigen::Index(1) << circuit.n;
  StateVector root = StateVector::Zero(dim);
  root(0) = 1.0;
  std::vector<double> zero_freq(circuit.M, 0.0);

  auto descend = [&](auto&& self, std::size_t layer_idx, const StateVector& state,
                     const std::vector<double>& freq) -> void {
    if (layer_idx == circuit.layers.size()) {
      branches.push_back({state, freq});
      return;
    }
    const Layer& layer = circuit.layers[layer_idx];
    const StateVector gated = layer.fixed_gate * state;
    for (std::size_t k = 0; k < layer.generator.eigenvalues.size(); ++k) {
      std::vector<double> next_freq = freq;
      next_freq.at(layer.param_index) += layer.generator.eigenvalues[k];
      self(self, layer_idx + 1, layer.generator.projectors[k] * gated, next_freq);
    }
  };
  descend(descend, 0, root, zero_freq);

  std::vector<StateVector> obs_applied;
  obs_applied.reserve(branches.size());
  for (const Branch& b : branches) obs_applied.push_back(instance.observable.matrix * b.vec);

  CoeffMap raw;
  FrequencyVector alpha(circuit.M);
  for (std::size_t a = 0; a < branches.size(); ++a) {
    for (std::size_t b = 0; b < branches.size(); ++b) {
      for (int j = 0; j < circuit.M; ++j) {
        const double diff = branches[a].freq[j] - branches[b].freq[j];
        const double rounded = std::round(diff);
        if (std::abs(diff - rounded) > 1e-9)
          throw validation_error("projector_htp: non-integer projected frequency");
        alpha[j] = static_cast<int>(rounded);
      }
      const cd coeff = branches[a].vec.dot(obs_applied[b]);
      if (coeff != cd(0.0, 0.0)) raw[alpha] += coeff;
    }
  }
  return symmetrize(circuit.M, raw);
}

DegreeProfile degree_profile(const CircuitSpec& circuit) {
  std::vector<double> sums(circuit.M, 0.0);
  double max_diameter = 0.0;
  for (const Layer& layer : circuit.layers) {
    if (layer.param_index < 0 || layer.param_index >= circuit.M)
      throw validation_error("degree_profile: layer parameter index outside [0, M)");
    sums.at(layer.param_index) += layer.generator.spectral_diameter;
    max_diameter = std::max(max_diameter, layer.generator.spectral_diameter);
  }
  DegreeProfile profile;
  profile.d.resize(circuit.M);
  for (int j = 0; j < circuit.M; ++j) {
    if (std::abs(sums[j] - std::round(sums[j])) > 1e-9)
      throw validation_error("degree_profile: non-integer spectral diameter sum");
    profile.d[j] = static_cast<int>(std::round(sums[j]));
  }
  const double k_delta = static_cast<double>(circuit.layers.size()) * max_diameter;
  if (std::abs(k_delta - std::round(k_delta)) > 1e-9)
    throw validation_error("degree_profile: non-integer conservative bound");
  profile.conservative_bound = static_cast<int>(std::round(k_delta));
  return profile;
}

}  // namespace torusfpras
