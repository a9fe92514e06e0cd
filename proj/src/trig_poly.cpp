#include "torusfpras/trig_poly.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "torusfpras/errors.hpp"

namespace torusfpras {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

FrequencyVector negated(const FrequencyVector& alpha) {
  FrequencyVector neg(alpha.size());
  std::transform(alpha.begin(), alpha.end(), neg.begin(), [](int a) { return -a; });
  return neg;
}

double max_abs_coeff(const CoeffMap& coeffs) {
  double m = 0.0;
  for (const auto& [alpha, c] : coeffs) m = std::max(m, std::abs(c));
  return m;
}

std::vector<int> support_degrees(int M, const CoeffMap& coeffs) {
  std::vector<int> d(M, 0);
  for (const auto& [alpha, c] : coeffs) {
    for (int j = 0; j < M; ++j) d[j] = std::max(d[j], std::abs(alpha[j]));
  }
  return d;
}

// Golden-section search for the minimum of g on [lo, hi]. The bracket spans
// one grid cell around the scan minimizer, so g is unimodal there in practice;
// 64 shrink steps reduce the bracket by a factor ~1e13.
double golden_section(const std::function<double(double)>& g, double lo, double hi) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 64; ++it) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }
  const double mid = 0.5 * (a + b);
  return mid;
}

}  // namespace

double wrap_angle(double theta) {
  double t = std::remainder(theta, kTwoPi);  // (-pi, pi]
  if (t >= std::numbers::pi) t -= kTwoPi;
  return t;
}

Htp make_htp(int M, CoeffMap coeffs, std::optional<std::vector<int>> degrees) {
  if (M < 0) throw validation_error("make_htp: negative parameter count");
  const double scale = max_abs_coeff(coeffs);
  for (const auto& [alpha, c] : coeffs) {
    if (static_cast<int>(alpha.size()) != M)
      throw validation_error("make_htp: frequency vector length differs from M");
    const auto it = coeffs.find(negated(alpha));
    const std::complex<double> mirror = (it == coeffs.end()) ? 0.0 : it->second;
    if (std::abs(mirror - std::conj(c)) > 1e-12 * std::max(1.0, scale))
      throw validation_error("make_htp: coefficients violate Hermitian symmetry");
  }
  Htp htp;
  htp.M = M;
  htp.coeffs = std::move(coeffs);
  if (degrees) {
    if (static_cast<int>(degrees->size()) != M)
      throw validation_error("make_htp: degree vector length differs from M");
    const auto sup = support_degrees(M, htp.coeffs);
    for (int j = 0; j < M; ++j) {
      if (sup[j] > (*degrees)[j])
        throw validation_error("make_htp: support exceeds the declared degree bound");
    }
    htp.degrees = std::move(*degrees);
  } else {
    htp.degrees = support_degrees(M, htp.coeffs);
  }
  return htp;
}

double eval(const Htp& htp, const std::vector<double>& theta) {
  if (static_cast<int>(theta.size()) != htp.M)
    throw validation_error("eval: theta length differs from M");
  std::complex<double> acc = 0.0;
  double l1 = 0.0;
  for (const auto& [alpha, c] : htp.coeffs) {
    double phase = 0.0;
    for (int j = 0; j < htp.M; ++j) phase += alpha[j] * theta[j];
    acc += c * std::polar(1.0, phase);
    l1 += std::abs(c);
  }
  if (std::abs(acc.imag()) > 1e-10 * std::max(1.0, l1))
    throw numerical_error("eval: non-real value; coefficients are not Hermitian");
  return acc.real();
}

Htp symmetrize(int M, const CoeffMap& raw) {
  CoeffMap out;
  for (const auto& [alpha, c] : raw) {
    if (static_cast<int>(alpha.size()) != M)
      throw validation_error("symmetrize: frequency vector length differs from M");
    if (out.count(alpha)) continue;
    const FrequencyVector neg = negated(alpha);
    const auto mirror_it = raw.find(neg);
    const std::complex<double> mirror = (mirror_it == raw.end()) ? 0.0 : mirror_it->second;
    const std::complex<double> f = 0.5 * (c + std::conj(mirror));
    if (neg == alpha) {
      out[alpha] = std::complex<double>(f.real(), 0.0);  // self-paired: exactly real
    } else {
      out[alpha] = f;
      out[neg] = std::conj(f);  // bit-exact conjugate pairing
    }
  }
  Htp htp;
  htp.M = M;
  htp.coeffs = std::move(out);
  htp.degrees = support_degrees(M, htp.coeffs);
  return prune(htp);
}

Htp prune(const Htp& htp, double rel_tol) {
  const double cutoff = rel_tol * max_abs_coeff(htp.coeffs);
  CoeffMap kept;
  for (const auto& [alpha, c] : htp.coeffs) {
    if (std::abs(c) >= cutoff && c != 0.0) kept.emplace(alpha, c);
  }
  Htp out;
  out.M = htp.M;
  out.coeffs = std::move(kept);
  out.degrees = support_degrees(htp.M, out.coeffs);
  return out;
}

double offzero_l1(const Htp& htp) {
  double sum = 0.0;
  for (const auto& [alpha, c] : htp.coeffs) {
    if (std::any_of(alpha.begin(), alpha.end(), [](int a) { return a != 0; }))
      sum += std::abs(c);
  }
  return sum;
}

std::pair<std::vector<double>, double> grid_minimize(const Htp& htp, int points_per_axis) {
  const int max_d = htp.degrees.empty()
                        ? 0
                        : *std::max_element(htp.degrees.begin(), htp.degrees.end());
  if (points_per_axis < 2 * max_d + 1)
    throw validation_error("grid_minimize: points_per_axis below the alias-free bound 2*max_degree+1");
  const int M = htp.M;
  const int N = points_per_axis;

  // Row-major odometer scan visits indices in lexicographic order, so a
  // strict improvement test yields the lexicographically smallest tie-break.
  std::vector<int> index(M, 0);
  std::vector<double> theta(M, -std::numbers::pi);
  std::vector<double> best_theta = theta;
  double best = eval(htp, theta);
  const auto grid_angle = [N](int t) { return -std::numbers::pi + kTwoPi * t / N; };
  for (;;) {
    int axis = M - 1;
    while (axis >= 0) {
      if (++index[axis] < N) break;
      index[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
    for (int j = 0; j < M; ++j) theta[j] = grid_angle(index[j]);
    const double v = eval(htp, theta);
    if (v < best) {
      best = v;
      best_theta = theta;
    }
  }

  // Coordinate descent with a golden-section line search per axis; the
  // bracket spans one grid cell on either side of the current point.
  const double span = kTwoPi / N;
  std::vector<double> cur = best_theta;
  for (int round = 0; round < 50; ++round) {
    for (int j = 0; j < M; ++j) {
      const auto line = [&](double x) {
        std::vector<double> probe = cur;
        probe[j] = x;
        return eval(htp, probe);
      };
      const double x = golden_section(line, cur[j] - span, cur[j] + span);
      const double v = line(x);
      if (v < best) {
        best = v;
        cur[j] = x;
      }
    }
  }
  for (double& t : cur) t = wrap_angle(t);
  best = std::min(best, eval(htp, cur));
  return {cur, best};
}

nlohmann::json htp_to_json(const Htp& htp) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& [alpha, c] : htp.coeffs) {  // std::map iterates lexicographically
    coeffs.push_back({{"alpha", alpha}, {"re", c.real()}, {"im", c.imag()}});
  }
  return {{"M", htp.M}, {"coeffs", std::move(coeffs)}};
}

Htp htp_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("M") || !j.contains("coeffs"))
    throw validation_error("htp_from_json: expected {\"M\", \"coeffs\"}");
  const int M = j.at("M").get<int>();
  CoeffMap coeffs;
  for (const auto& entry : j.at("coeffs")) {
    FrequencyVector alpha = entry.at("alpha").get<FrequencyVector>();
    coeffs[std::move(alpha)] = {entry.at("re").get<double>(), entry.at("im").get<double>()};
  }
  return make_htp(M, std::move(coeffs));
}

}  // namespace torusfpras
