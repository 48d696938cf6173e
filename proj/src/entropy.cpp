#include "entroscope/entropy.hpp"

#include <cmath>
#include <limits>

#include "entroscope/numkernel.hpp"

namespace entroscope {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Mass of rho allowed on the kernel of sigma before we call it a violation.
constexpr double kSupportTol = 1e-9;

double xlnx(double x) { return x > kEigEps ? x * std::log(x) : 0.0; }

// Tr[rho * kernel-projector(sigma)].
double kernel_mass(const Mat& rho, const Mat& sigma) {
  const Eigh e = eigh(sigma);
  double mass = 0.0;
  for (Eigen::Index i = 0; i < e.vals.size(); ++i) {
    if (e.vals(i) <= kEigEps) {
      mass += std::real(cxd(e.vecs.col(i).adjoint() * rho * e.vecs.col(i)));
    }
  }
  return mass;
}

std::vector<int> complement(const std::vector<int>& sel, int n) {
  std::vector<bool> in(n, false);
  for (int s : sel) in[s] = true;
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (!in[i]) out.push_back(i);
  }
  return out;
}

std::vector<int> concat_sorted(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace

double von_neumann(const Mat& rho) {
  const Eigh e = eigh(rho);
  double h = 0.0;
  for (Eigen::Index i = 0; i < e.vals.size(); ++i) h -= xlnx(e.vals(i));
  return h;
}

double von_neumann(const DensityMatrix& rho) { return von_neumann(rho.mat); }

double conditional_entropy(const DensityMatrix& rho, const std::vector<int>& cond) {
  return von_neumann(rho) - von_neumann(partial_trace(rho, cond));
}

double mutual_information(const DensityMatrix& rho, const std::vector<int>& a,
                          const std::vector<int>& b) {
  for (int x : a) {
    for (int y : b) {
      if (x == y) throw std::invalid_argument("mutual_information: overlapping parties");
    }
  }
  const DensityMatrix rab = partial_trace(rho, concat_sorted(a, b));
  return von_neumann(partial_trace(rho, a)) + von_neumann(partial_trace(rho, b)) -
         von_neumann(rab);
}

double cqmi(const DensityMatrix& rho, const std::vector<int>& a, const std::vector<int>& b,
            const std::vector<int>& c) {
  const int n = static_cast<int>(rho.dims.size());
  std::vector<bool> seen(n, false);
  for (const auto* grp : {&a, &b, &c}) {
    for (int x : *grp) {
      if (x < 0 || x >= n || seen[x]) throw std::invalid_argument("cqmi: bad partition");
      seen[x] = true;
    }
  }
  const double hac = von_neumann(partial_trace(rho, concat_sorted(a, c)));
  const double hbc = von_neumann(partial_trace(rho, concat_sorted(b, c)));
  const double habc = von_neumann(partial_trace(rho, concat_sorted(concat_sorted(a, b), c)));
  const double hc = c.empty() ? 0.0 : von_neumann(partial_trace(rho, c));
  return hac + hbc - habc - hc;
}

EntropyReport relative_entropy(const Mat& rho, const Mat& sigma) {
  if (rho.rows() != sigma.rows()) throw std::invalid_argument("relative_entropy: dim mismatch");
  if (kernel_mass(rho, sigma) > kSupportTol) return {kInf, true};
  const double tr_rho_ln_rho = -von_neumann(rho);
  const double tr_rho_ln_sigma = std::real((rho * mat_log_support(sigma)).trace());
  return {tr_rho_ln_rho - tr_rho_ln_sigma, false};
}

EntropyReport relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return relative_entropy(rho.mat, sigma.mat);
}

double measured_relative_entropy_in_basis(const Mat& rho, const Mat& sigma, const Mat& u) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < u.cols(); ++i) {
    const double p = std::max(0.0, std::real(cxd(u.col(i).adjoint() * rho * u.col(i))));
    const double q = std::max(0.0, std::real(cxd(u.col(i).adjoint() * sigma * u.col(i))));
    if (p > kEigEps) d += p * (std::log(p) - std::log(std::max(q, 1e-300)));
  }
  return d;
}

namespace {

// Objective restricted to a rotation in the (i,j) plane: only the two outcome
// probabilities of each distribution change, and they depend on (theta, phi)
// through three scalars per state.
struct PlaneData {
  double pa, pb;  // current diagonal entries of rho
  cxd pc;         // off-diagonal entry of rho
  double qa, qb;
  cxd qc;
  double rest;  // objective contribution from all other outcomes
};

double plane_objective(const PlaneData& pd, double theta, double phi) {
  const double c = std::cos(theta), s = std::sin(theta);
  const cxd e = std::polar(1.0, phi);
  auto pair_val = [&](double a, double b, cxd x) {
    const double cross = 2.0 * c * s * std::real(e * x);
    return std::pair<double, double>{std::max(0.0, c * c * a + s * s * b + cross),
                                     std::max(0.0, s * s * a + c * c * b - cross)};
  };
  const auto [p1, p2] = pair_val(pd.pa, pd.pb, pd.pc);
  const auto [q1, q2] = pair_val(pd.qa, pd.qb, pd.qc);
  double v = pd.rest;
  if (p1 > kEigEps) v += p1 * (std::log(p1) - std::log(std::max(q1, 1e-300)));
  if (p2 > kEigEps) v += p2 * (std::log(p2) - std::log(std::max(q2, 1e-300)));
  return v;
}

double sweep_once(const Mat& rho, const Mat& sigma, Mat& u) {
  const int d = static_cast<int>(u.cols());
  // Rotated representations, updated in place as the basis turns.
  Mat r = u.adjoint() * rho * u;
  Mat q = u.adjoint() * sigma * u;
  auto outcome_term = [&](int i) {
    const double p = std::max(0.0, std::real(r(i, i)));
    const double qq = std::max(0.0, std::real(q(i, i)));
    return p > kEigEps ? p * (std::log(p) - std::log(std::max(qq, 1e-300))) : 0.0;
  };
  double total = 0.0;
  for (int i = 0; i < d; ++i) total += outcome_term(i);

  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      PlaneData pd{std::real(r(i, i)), std::real(r(j, j)), r(i, j),
                   std::real(q(i, i)), std::real(q(j, j)), q(i, j),
                   total - outcome_term(i) - outcome_term(j)};
      // Coarse grid, then two rounds of golden refinement in each variable.
      double best_t = 0.0, best_f = 0.0, best_v = plane_objective(pd, 0.0, 0.0);
      for (int ti = 0; ti < 13; ++ti) {
        const double t = -M_PI / 4 + ti * (M_PI / 2) / 12.0;
        for (int fi = 0; fi < 12; ++fi) {
          const double f = -M_PI + fi * (2 * M_PI) / 12.0;
          const double v = plane_objective(pd, t, f);
          if (v > best_v) {
            best_v = v;
            best_t = t;
            best_f = f;
          }
        }
      }
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      for (int round = 0; round < 2; ++round) {
        {  // refine theta
          double lo = best_t - 0.2, hi = best_t + 0.2;
          double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
          double f1 = plane_objective(pd, x1, best_f), f2 = plane_objective(pd, x2, best_f);
          for (int it = 0; it < 40; ++it) {
            if (f1 < f2) {
              lo = x1;
              x1 = x2;
              f1 = f2;
              x2 = lo + gr * (hi - lo);
              f2 = plane_objective(pd, x2, best_f);
            } else {
              hi = x2;
              x2 = x1;
              f2 = f1;
              x1 = hi - gr * (hi - lo);
              f1 = plane_objective(pd, x1, best_f);
            }
          }
          best_t = 0.5 * (lo + hi);
        }
        {  // refine phi
          double lo = best_f - 0.3, hi = best_f + 0.3;
          double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
          double f1 = plane_objective(pd, best_t, x1), f2 = plane_objective(pd, best_t, x2);
          for (int it = 0; it < 40; ++it) {
            if (f1 < f2) {
              lo = x1;
              x1 = x2;
              f1 = f2;
              x2 = lo + gr * (hi - lo);
              f2 = plane_objective(pd, best_t, x2);
            } else {
              hi = x2;
              x2 = x1;
              f2 = f1;
              x1 = hi - gr * (hi - lo);
              f1 = plane_objective(pd, best_t, x1);
            }
          }
          best_f = 0.5 * (lo + hi);
        }
      }
      const double improved = plane_objective(pd, best_t, best_f);
      if (improved > total + 1e-15) {
        // Apply the rotation to the running representations and the basis.
        const double c = std::cos(best_t), s = std::sin(best_t);
        const cxd e = std::polar(1.0, best_f);
        auto rotate = [&](Mat& m) {
          const Vec col_i = m.col(i), col_j = m.col(j);
          m.col(i) = c * col_i + e * s * col_j;
          m.col(j) = -std::conj(e) * s * col_i + c * col_j;
          const Eigen::RowVectorXcd row_i = m.row(i), row_j = m.row(j);
          m.row(i) = c * row_i + std::conj(e) * s * row_j;
          m.row(j) = -e * s * row_i + c * row_j;
        };
        rotate(r);
        rotate(q);
        const Vec ui = u.col(i), uj = u.col(j);
        u.col(i) = c * ui + e * s * uj;
        u.col(j) = -std::conj(e) * s * ui + c * uj;
        total = improved;
      }
    }
  }
  return total;
}

}  // namespace

double measured_relative_entropy(const Mat& rho, const Mat& sigma, int restarts, double tol,
                                 std::mt19937_64& rng) {
  if (kernel_mass(rho, sigma) > kSupportTol) {
    throw std::invalid_argument("measured_relative_entropy: support violation");
  }
  const int d = static_cast<int>(rho.rows());

  std::vector<Mat> seeds;
  seeds.push_back(eigh(rho).vecs);
  seeds.push_back(eigh(sigma).vecs);
  seeds.push_back(eigh(Mat(rho + sigma)).vecs);
  {
    // Fuchs-Caves observable: eigenbasis measurement attains the quantum
    // fidelity classically, pinning the -2 ln F lower bound.
    const Mat si = mat_pow(sigma, -0.5);
    const Mat inner = mat_sqrt(Mat(mat_sqrt(sigma) * rho * mat_sqrt(sigma)));
    seeds.push_back(eigh(herm(Mat(si * inner * si))).vecs);
  }
  while (static_cast<int>(seeds.size()) < restarts) seeds.push_back(haar_unitary(d, rng));

  double best = 0.0;
  for (auto& u : seeds) {
    double prev = measured_relative_entropy_in_basis(rho, sigma, u);
    for (int sweep = 0; sweep < 80; ++sweep) {
      const double cur = sweep_once(rho, sigma, u);
      if (cur - prev < tol) {
        prev = cur;
        break;
      }
      prev = cur;
    }
    best = std::max(best, prev);
  }
  return best;
}

EntropyReport petz_divergence(const Mat& rho, const Mat& sigma, double s) {
  if (s <= 0.0 || s == 1.0) throw std::invalid_argument("petz_divergence: s must be in (0,1) or (1,inf)");
  if (s > 1.0 && kernel_mass(rho, sigma) > kSupportTol) return {kInf, true};
  const double tr = std::real((mat_pow(rho, s) * mat_pow(sigma, 1.0 - s)).trace());
  if (tr <= 1e-300) return {kInf, true};
  return {std::log(tr) / (s - 1.0), false};
}

EntropyReport sandwiched_divergence(const Mat& rho, const Mat& sigma, double s) {
  if (s <= 0.0 || s == 1.0) {
    throw std::invalid_argument("sandwiched_divergence: s must be in (0,1) or (1,inf)");
  }
  if (s > 1.0 && kernel_mass(rho, sigma) > kSupportTol) return {kInf, true};
  const Mat half = mat_pow(sigma, (1.0 - s) / (2.0 * s));
  const Mat inner = herm(Mat(half * rho * half));
  const double tr = std::real(mat_pow(inner, s).trace());
  if (tr <= 1e-300) return {kInf, true};
  return {std::log(tr) / (s - 1.0), false};
}

double chernoff_phi(double s, const Mat& rho, const Mat& sigma) {
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("chernoff_phi: s must be in [0,1]");
  const double tr = std::real((mat_pow(rho, s) * mat_pow(sigma, 1.0 - s)).trace());
  if (tr <= 1e-300) return -kInf;
  return std::log(tr);
}

double binary_entropy(double p) {
  if (p < -1e-12 || p > 1.0 + 1e-12) throw std::invalid_argument("binary_entropy: p outside [0,1]");
  p = std::min(1.0, std::max(0.0, p));
  return -xlnx(p) - xlnx(1.0 - p);
}

double binary_entropy_inv(double h) {
  if (h < -1e-12 || h > kLn2 + 1e-12) {
    throw std::invalid_argument("binary_entropy_inv: h outside [0, ln2]");
  }
  h = std::min(kLn2, std::max(0.0, h));
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) < h) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

double coherence_relative_entropy(const DensityMatrix& rho) {
  Mat diag = Mat::Zero(rho.dim(), rho.dim());
  diag.diagonal() = rho.mat.diagonal();
  return von_neumann(diag) - von_neumann(rho.mat);
}

RenyiMiReport renyi_mutual_information(const DensityMatrix& rho_ab, double s, double tol,
                                       int max_iters) {
  if (s <= 0.0 || s >= 1.0) {
    throw std::invalid_argument("renyi_mutual_information: s must be in (0,1)");
  }
  if (rho_ab.dims.size() != 2) {
    throw std::invalid_argument("renyi_mutual_information: expected a bipartite state");
  }
  const int da = rho_ab.dims[0], db = rho_ab.dims[1];
  const Mat rho_s = mat_pow(rho_ab.mat, s);
  const Mat ia = Mat::Identity(da, da), ib = Mat::Identity(db, db);

  Mat sa = partial_trace(rho_ab, {0}).mat;
  Mat sb = partial_trace(rho_ab, {1}).mat;

  // Optimal second marginal given the first: symmetrized Sibson update
  //   sigma_B  proportional to  (Tr_A[(sigma_A^{(1-s)/2} (x) 1) rho^s (sigma_A^{(1-s)/2} (x) 1)])^{1/s}.
  auto update_b = [&](const Mat& sig_a) {
    const Mat half = tensor(mat_pow(sig_a, 0.5 * (1.0 - s)), ib);
    Mat red = partial_trace_mat(herm(Mat(half * rho_s * half)), {da, db}, {1});
    Mat out = mat_pow(herm(red), 1.0 / s);
    return Mat(out / out.trace().real());
  };
  auto update_a = [&](const Mat& sig_b) {
    const Mat half = tensor(ia, mat_pow(sig_b, 0.5 * (1.0 - s)));
    Mat red = partial_trace_mat(herm(Mat(half * rho_s * half)), {da, db}, {0});
    Mat out = mat_pow(herm(red), 1.0 / s);
    return Mat(out / out.trace().real());
  };
  auto objective = [&](const Mat& a, const Mat& b) {
    return petz_divergence(rho_ab.mat, tensor(a, b), s).value;
  };

  double value = objective(sa, sb);
  for (int it = 1; it <= max_iters; ++it) {
    sb = update_b(sa);
    sa = update_a(sb);
    const double next = objective(sa, sb);
    if (std::abs(next - value) < tol) {
      return {next, true, it};
    }
    value = next;
  }
  return {value, false, max_iters};
}

}  // namespace entroscope
