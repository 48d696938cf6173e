#include "entroscope/hypotest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "entroscope/entropy.hpp"
#include "entroscope/numkernel.hpp"

namespace entroscope {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RVec normalized(const RVec& p) {
  RVec out = p.cwiseMax(0.0);
  const double z = out.sum();
  if (z <= 0) throw std::invalid_argument("distribution has no mass");
  return out / z;
}

// ln sum_k p_k^s q_k^(1-s) on (0,1), continuously extended: a term vanishes
// when either entry does.
double classical_phi(const RVec& p, const RVec& q, double s) {
  double acc = 0.0;
  for (int k = 0; k < p.size(); ++k) {
    if (p(k) > 0 && q(k) > 0) {
      acc += std::exp(s * std::log(p(k)) + (1.0 - s) * std::log(q(k)));
    }
  }
  return acc > 0 ? std::log(acc) : -kInf;
}

double outcome_prob(const Mat& effect, const Mat& rho) {
  return std::max(0.0, std::real((effect * rho).trace()));
}

RVec outcome_dist(const Povm& povm, const Mat& rho) {
  RVec p(static_cast<int>(povm.effects.size()));
  for (std::size_t k = 0; k < povm.effects.size(); ++k) {
    p(static_cast<int>(k)) = outcome_prob(povm.effects[k], rho);
  }
  return p;
}

}  // namespace

void CompositeSet::validate() const {
  if (states.empty() || states.size() != weights.size()) {
    throw std::invalid_argument("composite set: states/weights mismatch");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("composite set: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("composite set: weights must sum to 1");
  }
  for (const auto& s : states) {
    if (s.dim() != states.front().dim()) {
      throw std::invalid_argument("composite set: dimension mismatch");
    }
  }
}

double classical_kl(const RVec& p_raw, const RVec& q_raw) {
  const RVec p = normalized(p_raw), q = normalized(q_raw);
  double acc = 0.0;
  for (int k = 0; k < p.size(); ++k) {
    if (p(k) > 0) {
      if (q(k) <= 0) return kInf;
      acc += p(k) * (std::log(p(k)) - std::log(q(k)));
    }
  }
  return std::max(0.0, acc);
}

double classical_chernoff(const RVec& p_raw, const RVec& q_raw, double s_tol,
                          double* argmin_s) {
  const RVec p = normalized(p_raw), q = normalized(q_raw);
  if (classical_phi(p, q, 0.5) == -kInf) {
    if (argmin_s) *argmin_s = 0.5;
    return kInf;
  }
  auto f = [&](double s) { return classical_phi(p, q, s); };
  // Coarse bracket, then golden section on the convex objective.
  int best = 0;
  double best_val = kInf;
  constexpr int kGrid = 20;
  for (int i = 0; i <= kGrid; ++i) {
    const double v = f(static_cast<double>(i) / kGrid);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = std::max(0.0, (best - 1.0) / kGrid);
  const double hi = std::min(1.0, (best + 1.0) / kGrid);
  const auto [s_star, val] = golden_min(f, lo, hi, s_tol);
  if (argmin_s) *argmin_s = s_star;
  return std::max(0.0, -std::min(val, best_val));
}

double classical_hoeffding(const RVec& p_raw, const RVec& q_raw, double r,
                           double s_tol, double* argmax_s) {
  const RVec p = normalized(p_raw), q = normalized(q_raw);
  // s = 1 - 1e-7 keeps the (1-s) division well conditioned while sitting
  // close enough to the supremum boundary for 1e-6 accuracy at r = 0.
  constexpr double kSMax = 1.0 - 1e-7;
  auto g = [&](double s) {
    const double phi = classical_phi(p, q, s);
    if (phi == -kInf) return kInf;
    return (-s * r - phi) / (1.0 - s);
  };
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0 * kSMax);
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) grid.push_back(1.0 - eps);
  grid.push_back(kSMax);
  std::sort(grid.begin(), grid.end());

  std::size_t best = 0;
  double best_val = -kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = g(grid[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best_val == kInf) {
    if (argmax_s) *argmax_s = grid[best];
    return kInf;
  }
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];
  const auto [s_star, neg] = golden_min([&](double s) { return -g(s); }, lo, hi, s_tol);
  if (argmax_s) *argmax_s = s_star;
  return std::max({0.0, -neg, best_val});
}

ExponentResult stein_exponent(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const EntropyReport rep = relative_entropy(rho, sigma);
  ExponentResult out;
  out.value = rep.value;
  out.infinite = rep.support_violation;
  return out;
}

ExponentResult chernoff_exponent(const DensityMatrix& rho, const DensityMatrix& sigma,
                                 double s_tol) {
  ExponentResult out;
  if (chernoff_phi(0.5, rho.mat, sigma.mat) == -kInf) {
    out.value = kInf;
    out.infinite = true;
    out.argmin_s = 0.5;
    return out;
  }
  auto f = [&](double s) { return chernoff_phi(s, rho.mat, sigma.mat); };
  int best = 0;
  double best_val = kInf;
  constexpr int kGrid = 20;
  for (int i = 0; i <= kGrid; ++i) {
    const double v = f(static_cast<double>(i) / kGrid);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = std::max(0.0, (best - 1.0) / kGrid);
  const double hi = std::min(1.0, (best + 1.0) / kGrid);
  const auto [s_star, val] = golden_min(f, lo, hi, s_tol);
  out.value = std::max(0.0, -std::min(val, best_val));
  out.argmin_s = s_star;
  return out;
}

ExponentResult hoeffding_exponent(const DensityMatrix& rho, const DensityMatrix& sigma,
                                  double r, double s_tol) {
  if (r < 0) throw std::invalid_argument("hoeffding exponent: r must be >= 0");
  constexpr double kSMax = 1.0 - 1e-7;
  auto g = [&](double s) {
    const double phi = chernoff_phi(s, rho.mat, sigma.mat);
    if (phi == -kInf) return kInf;
    return (-s * r - phi) / (1.0 - s);
  };
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0 * kSMax);
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) grid.push_back(1.0 - eps);
  grid.push_back(kSMax);
  std::sort(grid.begin(), grid.end());

  ExponentResult out;
  std::size_t best = 0;
  double best_val = -kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = g(grid[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best_val == kInf) {
    out.value = kInf;
    out.infinite = true;
    out.argmin_s = grid[best];
    return out;
  }
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];
  const auto [s_star, neg] = golden_min([&](double s) { return -g(s); }, lo, hi, s_tol);
  out.value = std::max({0.0, -neg, best_val});
  out.argmin_s = s_star;
  return out;
}

double min_error_prob(const DensityMatrix& rho, const DensityMatrix& sigma,
                      double prior) {
  if (prior < 0.0 || prior > 1.0) {
    throw std::invalid_argument("min_error_prob: prior outside [0,1]");
  }
  const Mat gap = prior * rho.mat - (1.0 - prior) * sigma.mat;
  return 0.5 * (1.0 - trace_norm(gap));
}

namespace {

// Inner exponent of the outcome distributions for one candidate pair.
double inner_exponent(PowerMode mode, const RVec& p, const RVec& q, double r,
                      double s_tol, double* arg) {
  switch (mode) {
    case PowerMode::kStein:
      return classical_kl(p, q);
    case PowerMode::kChernoff:
      return classical_chernoff(p, q, s_tol, arg);
    case PowerMode::kHoeffding:
      return classical_hoeffding(p, q, r, s_tol, arg);
  }
  return 0.0;
}

// Bloch parameterization with radial clamp: points outside the unit ball
// project onto the sphere, so boundary (pure-state) optima are attainable.
Mat bloch_from_params(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  if (n > 1.0) {
    x /= n;
    y /= n;
    z /= n;
  }
  return bloch_state(x, y, z);
}

Mat state_from_factor(const RVec& x, int d) {
  Mat t(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      t(i, j) = cxd(x(2 * (i * d + j)), x(2 * (i * d + j) + 1));
    }
  }
  Mat rho = t * t.adjoint();
  const double tr = rho.trace().real();
  if (tr < 1e-12) return Mat::Identity(d, d) / d;
  return herm(rho / tr);
}

struct PowerCandidate {
  double value = -kInf;
  double arg_s = std::numeric_limits<double>::quiet_NaN();
  Mat first, second;
};

}  // namespace

ExponentResult discrimination_power(const Povm& povm, PowerMode mode, double r,
                                    int restarts, std::uint64_t seed) {
  povm.validate();
  const int d = static_cast<int>(povm.effects.front().rows());

  // A measurement whose effects are all proportional to the identity
  // cannot distinguish anything.
  bool degenerate = true;
  for (const Mat& e : povm.effects) {
    const Mat dev = e - (e.trace() / static_cast<double>(d)) * Mat::Identity(d, d);
    if (dev.cwiseAbs().maxCoeff() > 1e-12) {
      degenerate = false;
      break;
    }
  }
  ExponentResult out;
  if (degenerate) return out;

  // Loose inner tolerance during the search; the winner is re-scored below.
  constexpr double kSearchTol = 1e-6;
  auto score_pair = [&](const Mat& a, const Mat& b, double s_tol, double* arg) {
    return inner_exponent(mode, outcome_dist(povm, a), outcome_dist(povm, b), r,
                          s_tol, arg);
  };

  std::vector<PowerCandidate> results(std::max(1, restarts));
  parallel_for(static_cast<int>(results.size()), [&](int idx) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (idx + 1));
    PowerCandidate& cand = results[idx];
    if (d == 2) {
      RVec x0(6);
      // A few deterministic axis starts, then random ball pairs.
      if (idx == 0) x0 << 0, 0, 1, 0, 0, -1;
      else if (idx == 1) x0 << 1, 0, 0, -1, 0, 0;
      else if (idx == 2) x0 << 0, 1, 0, 0, -1, 0;
      else {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        do {
          for (int i = 0; i < 6; ++i) x0(i) = u(rng);
        } while (x0.head<3>().norm() > 1.0 || x0.tail<3>().norm() > 1.0);
      }
      auto objective = [&](const RVec& x) {
        const Mat a = bloch_from_params(x(0), x(1), x(2));
        const Mat b = bloch_from_params(x(3), x(4), x(5));
        const double v = score_pair(a, b, kSearchTol, nullptr);
        return v == kInf ? -1e100 : -v;
      };
      const NelderMeadResult nm = nelder_mead(objective, x0, 0.3, 600, 1e-12);
      // Candidate list: the simplex optimum plus sphere-snapped variants
      // (boundary optima are common).
      std::vector<std::array<double, 6>> xs;
      auto push = [&](RVec v) {
        xs.push_back({v(0), v(1), v(2), v(3), v(4), v(5)});
      };
      push(nm.x);
      RVec snapped = nm.x;
      if (snapped.head<3>().norm() > 1e-9) snapped.head<3>().normalize();
      if (snapped.tail<3>().norm() > 1e-9) snapped.tail<3>().normalize();
      push(snapped);
      RVec anti = snapped;
      anti.tail<3>() = -snapped.head<3>();
      push(anti);
      for (const auto& xv : xs) {
        const Mat a = bloch_from_params(xv[0], xv[1], xv[2]);
        const Mat b = bloch_from_params(xv[3], xv[4], xv[5]);
        double arg = std::numeric_limits<double>::quiet_NaN();
        const double v = score_pair(a, b, 1e-9, &arg);
        if (v > cand.value || cand.first.size() == 0) {
          cand = {v, arg, a, b};
        }
      }
    } else {
      const int np = 2 * d * d;
      RVec x0(2 * np);
      std::normal_distribution<double> gaus(0.0, 1.0);
      for (int i = 0; i < 2 * np; ++i) x0(i) = gaus(rng);
      auto objective = [&](const RVec& x) {
        const Mat a = state_from_factor(x.head(np), d);
        const Mat b = state_from_factor(x.tail(np), d);
        const double v = score_pair(a, b, kSearchTol, nullptr);
        return v == kInf ? -1e100 : -v;
      };
      const NelderMeadResult nm = nelder_mead(objective, x0, 0.4, 1200, 1e-12);
      const Mat a = state_from_factor(nm.x.head(np), d);
      const Mat b = state_from_factor(nm.x.tail(np), d);
      double arg = std::numeric_limits<double>::quiet_NaN();
      const double v = score_pair(a, b, 1e-9, &arg);
      cand = {v, arg, a, b};
    }
  });

  const PowerCandidate* best = &results.front();
  for (const auto& c : results) {
    if (c.value > best->value) best = &c;
  }
  out.value = std::max(0.0, best->value);
  out.argmin_s = best->arg_s;
  out.infinite = best->value == kInf;
  out.witness = {best->first, best->second};
  out.witness_orthogonal = fidelity(best->first, best->second) < 1e-6;
  return out;
}

Povm mix_povms(const Povm& e, const Povm& g, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("mix_povms: p outside [0,1]");
  if (e.effects.empty() || g.effects.empty() ||
      e.effects.front().rows() != g.effects.front().rows()) {
    throw std::invalid_argument("mix_povms: dimension mismatch");
  }
  Povm out;
  for (const Mat& m : e.effects) out.effects.push_back(p * m);
  for (const Mat& m : g.effects) out.effects.push_back((1.0 - p) * m);
  out.validate();
  return out;
}

Povm covariant_qubit_povm(int n_dirs) {
  if (n_dirs < 4) throw std::invalid_argument("covariant povm: need >= 4 directions");
  std::vector<Mat> raw;
  raw.reserve(n_dirs);
  const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
  Mat sum = Mat::Zero(2, 2);
  for (int k = 0; k < n_dirs; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / n_dirs;
    const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * k;
    // Rank-one direction effect 2|n><n| = I + n.sigma.
    Mat a = Mat::Identity(2, 2) + rad * std::cos(phi) * pauli_x() +
            rad * std::sin(phi) * pauli_y() + z * pauli_z();
    sum += a;
    raw.push_back(std::move(a));
  }
  const Mat s_inv_half = mat_pow(sum, -0.5);
  Povm out;
  for (const Mat& a : raw) out.effects.push_back(herm(s_inv_half * a * s_inv_half));
  out.validate();
  return out;
}

Povm stern_gerlach_povm(double r) {
  if (r < 0.0 || r > 1.0) throw std::invalid_argument("stern_gerlach: r outside [0,1]");
  Povm out;
  out.effects.push_back(0.5 * (Mat::Identity(2, 2) + r * pauli_z()));
  out.effects.push_back(0.5 * (Mat::Identity(2, 2) - r * pauli_z()));
  out.validate();
  return out;
}

FiniteNResult finite_n_error(const Povm& povm,
                             const std::vector<DensityMatrix>& rho_rounds,
                             const std::vector<DensityMatrix>& sigma_rounds) {
  povm.validate();
  if (rho_rounds.empty() || rho_rounds.size() != sigma_rounds.size()) {
    throw std::invalid_argument("finite_n_error: round lists must match");
  }
  const int n = static_cast<int>(rho_rounds.size());
  const int m = static_cast<int>(povm.effects.size());
  double total = 1.0;
  for (int t = 0; t < n; ++t) {
    total *= m;
    if (total > static_cast<double>(kSequenceCap)) {
      throw cap_exceeded("finite_n_error: outcome sequences exceed cap");
    }
  }
  // Per-round outcome tables.
  std::vector<RVec> p_t(n), q_t(n);
  for (int t = 0; t < n; ++t) {
    p_t[t] = outcome_dist(povm, rho_rounds[t].mat);
    q_t[t] = outcome_dist(povm, sigma_rounds[t].mat);
  }
  FiniteNResult out;
  const long n_seq = static_cast<long>(total);
  std::vector<int> digits(n);
  double sum_min = 0.0;
  for (long code = 0; code < n_seq; ++code) {
    long rem = code;
    double p = 1.0, q = 1.0;
    for (int t = n - 1; t >= 0; --t) {
      digits[t] = static_cast<int>(rem % m);
      rem /= m;
      p *= p_t[t](digits[t]);
      q *= q_t[t](digits[t]);
    }
    sum_min += std::min(p, q);
    if (p >= q) out.grouping.push_back(digits);
  }
  out.p_err = 0.5 * sum_min;
  return out;
}

FiniteNResult finite_n_error(const Povm& povm, const DensityMatrix& rho,
                             const DensityMatrix& sigma, int n) {
  return finite_n_error(povm, std::vector<DensityMatrix>(n, rho),
                        std::vector<DensityMatrix>(n, sigma));
}

double adaptive_finite_n(const Povm& povm, const AdaptivePolicy& policy, int n) {
  povm.validate();
  const int m = static_cast<int>(povm.effects.size());
  double total = 1.0;
  for (int t = 0; t < n; ++t) {
    total *= m;
    if (total > static_cast<double>(kSequenceCap)) {
      throw cap_exceeded("adaptive_finite_n: outcome sequences exceed cap");
    }
  }
  // Depth-first over histories, carrying both hypothesis likelihoods.
  double sum_min = 0.0;
  std::vector<int> history;
  std::function<void(double, double)> walk = [&](double p, double q) {
    if (static_cast<int>(history.size()) == n) {
      sum_min += std::min(p, q);
      return;
    }
    const auto [st0, st1] = policy(history);
    const RVec pr = outcome_dist(povm, st0.mat);
    const RVec qr = outcome_dist(povm, st1.mat);
    for (int k = 0; k < m; ++k) {
      history.push_back(k);
      walk(p * pr(k), q * qr(k));
      history.pop_back();
    }
  };
  walk(1.0, 1.0);
  return 0.5 * sum_min;
}

namespace {

// Euclidean projection onto the probability simplex.
std::vector<double> project_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho_idx = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0) {
      rho_idx = static_cast<int>(i);
      theta = t;
    }
  }
  (void)rho_idx;
  for (double& x : v) x = std::max(0.0, x - theta);
  return v;
}

DensityMatrix tensor_power(const DensityMatrix& rho, int n) {
  DensityMatrix out = rho;
  for (int i = 1; i < n; ++i) out = tensor(out, rho);
  return out;
}

}  // namespace

CompositeSteinResult composite_stein_finite_n(const DensityMatrix& rho,
                                              const CompositeSet& alt, int n,
                                              double tol) {
  alt.validate();
  if (n < 1) throw std::invalid_argument("composite stein: n must be >= 1");
  double dim_n = 1.0;
  for (int t = 0; t < n; ++t) {
    dim_n *= rho.dim();
    if (dim_n > kDenseDimCap) {
      throw cap_exceeded("composite stein: n-copy dimension exceeds cap");
    }
  }
  const DensityMatrix rho_n = tensor_power(rho, n);
  const int k = static_cast<int>(alt.states.size());
  std::vector<Mat> sig_n(k);
  for (int i = 0; i < k; ++i) sig_n[i] = tensor_power(alt.states[i], n).mat;

  const double h_rho = von_neumann(rho_n);
  auto mix = [&](const std::vector<double>& mu) {
    Mat tau = Mat::Zero(rho_n.dim(), rho_n.dim());
    for (int i = 0; i < k; ++i) tau += mu[i] * sig_n[i];
    return tau;
  };
  auto objective = [&](const std::vector<double>& mu) {
    const EntropyReport rep = relative_entropy(rho_n.mat, mix(mu));
    return rep.value;
  };

  CompositeSteinResult out;
  std::vector<double> mu(k, 1.0 / k);
  double f = objective(mu);
  if (std::isinf(f)) {
    // Interior mixtures share a common support; if it misses rho's support,
    // every feasible point does.
    out.infinite = true;
    out.value = kInf;
    out.weights = mu;
    return out;
  }

  for (int iter = 0; iter < 2000; ++iter) {
    // Gradient of -Tr[rho_n ln tau] via the divided-difference kernel of ln.
    const Mat tau = mix(mu);
    const Eigh es = eigh(tau);
    const int d = static_cast<int>(tau.rows());
    Mat rho_tilde = es.vecs.adjoint() * rho_n.mat * es.vecs;
    RMat kernel(d, d);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        const double la = std::max(es.vals(a), kEigEps);
        const double lb = std::max(es.vals(b), kEigEps);
        kernel(a, b) = std::abs(la - lb) < 1e-14 * std::max(la, lb)
                           ? 1.0 / la
                           : (std::log(la) - std::log(lb)) / (la - lb);
      }
    }
    std::vector<double> grad(k);
    for (int i = 0; i < k; ++i) {
      const Mat x_tilde = es.vecs.adjoint() * sig_n[i] * es.vecs;
      double g = 0.0;
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          g += std::real(rho_tilde(b, a) * x_tilde(a, b)) * kernel(a, b);
        }
      }
      grad[i] = -g;
    }
    // Projected gradient step with backtracking.
    double step = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      std::vector<double> trial(k);
      for (int i = 0; i < k; ++i) trial[i] = mu[i] - step * grad[i];
      trial = project_simplex(std::move(trial));
      const double ft = objective(trial);
      if (ft < f - 1e-15) {
        double move = 0.0;
        for (int i = 0; i < k; ++i) move = std::max(move, std::abs(trial[i] - mu[i]));
        const double drop = f - ft;
        mu = std::move(trial);
        f = ft;
        moved = true;
        if (drop < tol && move < 1e-9) iter = 2000;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  out.value = f / n;
  out.weights = mu;
  return out;
}

PinchingResult pinching_gap(const DensityMatrix& rho_n, const DensityMatrix& sigma_n) {
  if (rho_n.dim() != sigma_n.dim()) {
    throw std::invalid_argument("pinching_gap: dimension mismatch");
  }
  // Permutation invariance check: adjacent-swap conjugation fixes sigma.
  const auto& dims = sigma_n.dims;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    if (dims[i] != dims[i + 1]) {
      throw std::invalid_argument("pinching_gap: subsystem dimensions differ");
    }
  }
  const int parts = static_cast<int>(dims.size());
  const int d = sigma_n.dim();
  std::vector<long> strides(parts, 1);
  for (int i = parts - 2; i >= 0; --i) strides[i] = strides[i + 1] * dims[i + 1];
  for (int sw = 0; sw + 1 < parts; ++sw) {
    std::vector<int> perm(d);
    for (int idx = 0; idx < d; ++idx) {
      const int di = static_cast<int>(idx / strides[sw]) % dims[sw];
      const int dj = static_cast<int>(idx / strides[sw + 1]) % dims[sw + 1];
      perm[idx] = static_cast<int>(idx + (dj - di) * strides[sw] +
                                   (di - dj) * strides[sw + 1]);
    }
    double dev = 0.0;
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        dev = std::max(dev, std::abs(sigma_n.mat(perm[a], perm[b]) - sigma_n.mat(a, b)));
      }
    }
    if (dev > 1e-10) {
      throw std::invalid_argument("pinching_gap: sigma is not permutation invariant");
    }
  }

  // Spectral projectors of sigma with clustered eigenvalues.
  const Eigh es = eigh(sigma_n.mat);
  std::vector<std::pair<double, int>> sorted(d);
  for (int i = 0; i < d; ++i) sorted[i] = {es.vals(i), i};
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::vector<int>> clusters;
  for (const auto& [val, idx] : sorted) {
    if (clusters.empty() ||
        val - es.vals(clusters.back().front()) >
            1e-9 * std::max(1.0, std::abs(val))) {
      clusters.push_back({idx});
    } else {
      clusters.back().push_back(idx);
    }
  }
  Mat pinched = Mat::Zero(d, d);
  for (const auto& cluster : clusters) {
    Mat proj = Mat::Zero(d, d);
    for (int idx : cluster) proj += es.vecs.col(idx) * es.vecs.col(idx).adjoint();
    pinched += proj * rho_n.mat * proj;
  }
  PinchingResult out;
  out.d = relative_entropy(rho_n.mat, sigma_n.mat).value;
  out.d_pinched = relative_entropy(herm(pinched), sigma_n.mat).value;
  out.spectrum_size = static_cast<int>(clusters.size());
  return out;
}

AudenaertResult audenaert_test(const DensityMatrix& rho, const DensityMatrix& sigma,
                               int n, double s, double lambda) {
  if (s <= 0.0 || s >= 1.0) throw std::invalid_argument("audenaert: s outside (0,1)");
  double dim_n = 1.0;
  for (int t = 0; t < n; ++t) {
    dim_n *= rho.dim();
    if (dim_n > kDenseDimCap) throw cap_exceeded("audenaert: dimension exceeds cap");
  }
  const Mat rho_n = tensor_power(rho, n).mat;
  const Mat sig_n = tensor_power(sigma, n).mat;
  const Mat test = positive_part(rho_n - std::exp(lambda) * sig_n).projector;
  const int d = static_cast<int>(rho_n.rows());
  AudenaertResult out;
  out.type1 = std::real(((Mat::Identity(d, d) - test) * rho_n).trace());
  out.type2 = std::real((test * sig_n).trace());
  const double q = std::max(
      0.0, std::real((mat_pow(rho.mat, s) * mat_pow(sigma.mat, 1.0 - s)).trace()));
  const double qn = std::pow(q, n);
  out.bound1 = std::exp((1.0 - s) * lambda) * qn;
  out.bound2 = std::exp(-s * lambda) * qn;
  out.bounds_hold =
      out.type1 <= out.bound1 + 1e-12 && out.type2 <= out.bound2 + 1e-12;
  return out;
}

}  // namespace entroscope
