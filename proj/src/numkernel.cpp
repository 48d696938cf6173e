#include "entroscope/numkernel.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

namespace entroscope {

namespace {

constexpr double kHermCheckTol = 1e-8;

void require_hermitian(const Mat& m, const char* where) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(where) + ": matrix must be square");
  }
  const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev > kHermCheckTol) {
    throw std::invalid_argument(std::string(where) + ": matrix is not Hermitian (deviation " +
                                std::to_string(dev) + ")");
  }
}

}  // namespace

DensityMatrix::DensityMatrix(Mat m, std::vector<int> d) : mat(std::move(m)), dims(std::move(d)) {
  if (mat.rows() != mat.cols()) {
    throw std::invalid_argument("DensityMatrix: matrix must be square");
  }
  long prod = 1;
  for (int di : dims) {
    if (di <= 0) throw std::invalid_argument("DensityMatrix: non-positive subsystem dimension");
    prod *= di;
  }
  if (prod != mat.rows()) {
    throw std::invalid_argument("DensityMatrix: product of dims does not match matrix size");
  }
  if (!mat.allFinite()) {
    throw std::invalid_argument("DensityMatrix: non-finite entries");
  }
}

void DensityMatrix::validate() const {
  const double herm_dev = (mat - mat.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > 1e-10) {
    throw std::invalid_argument("DensityMatrix: not Hermitian within 1e-10 (deviation " +
                                std::to_string(herm_dev) + ")");
  }
  const double tr_dev = std::abs(mat.trace().real() - 1.0) + std::abs(mat.trace().imag());
  if (tr_dev > 1e-10) {
    throw std::invalid_argument("DensityMatrix: trace deviates from 1 by " +
                                std::to_string(tr_dev));
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(herm(mat), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()));
  }
}

void Povm::validate() const {
  if (effects.empty()) throw std::invalid_argument("Povm: no effects");
  const auto n = effects.front().rows();
  Mat sum = Mat::Zero(n, n);
  for (const auto& e : effects) {
    if (e.rows() != n || e.cols() != n) {
      throw std::invalid_argument("Povm: effects have mismatched dimensions");
    }
    if ((e - e.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
      throw std::invalid_argument("Povm: effect not Hermitian within 1e-10");
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(herm(e), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
      throw std::invalid_argument("Povm: effect has negative eigenvalue");
    }
    sum += e;
  }
  if ((sum - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("Povm: effects do not sum to identity within 1e-10");
  }
}

Mat tensor(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Mat tensor(const std::vector<Mat>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor: empty factor list");
  Mat out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = tensor(out, factors[i]);
  return out;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  std::vector<int> dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  return DensityMatrix(tensor(a.mat, b.mat), std::move(dims));
}

Mat partial_trace_mat(const Mat& m, const std::vector<int>& dims, const std::vector<int>& keep) {
  const int ns = static_cast<int>(dims.size());
  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  for (int k : kept) {
    if (k < 0 || k >= ns) throw std::invalid_argument("partial_trace: subsystem index out of range");
  }
  std::vector<bool> is_kept(ns, false);
  for (int k : kept) is_kept[k] = true;

  // Big-endian strides: subsystem 0 varies slowest.
  std::vector<long> stride(ns, 1);
  for (int i = ns - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

  long dout = 1;
  for (int k : kept) dout *= dims[k];

  const long d = m.rows();
  // Per-index digit decomposition, reused for rows and columns.
  std::vector<std::vector<int>> digits(d, std::vector<int>(ns));
  for (long x = 0; x < d; ++x) {
    long r = x;
    for (int s = 0; s < ns; ++s) {
      digits[x][s] = static_cast<int>(r / stride[s]);
      r %= stride[s];
    }
  }
  std::vector<long> kept_index(d, 0);
  for (long x = 0; x < d; ++x) {
    long idx = 0;
    for (int k : kept) idx = idx * dims[k] + digits[x][k];
    kept_index[x] = idx;
  }

  Mat out = Mat::Zero(dout, dout);
  for (long r = 0; r < d; ++r) {
    for (long c = 0; c < d; ++c) {
      bool diag_on_traced = true;
      for (int s = 0; s < ns && diag_on_traced; ++s) {
        if (!is_kept[s] && digits[r][s] != digits[c][s]) diag_on_traced = false;
      }
      if (diag_on_traced) out(kept_index[r], kept_index[c]) += m(r, c);
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  const int ns = static_cast<int>(rho.dims.size());
  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  for (int k : kept) {
    if (k < 0 || k >= ns) throw std::invalid_argument("partial_trace: subsystem index out of range");
  }
  std::vector<int> out_dims;
  for (int k : kept) out_dims.push_back(rho.dims[k]);
  if (out_dims.empty()) out_dims.push_back(1);
  Mat out = partial_trace_mat(rho.mat, rho.dims, kept);
  return DensityMatrix(std::move(out), std::move(out_dims));
}

Eigh eigh(const Mat& h) {
  require_hermitian(h, "eigh");
  Eigen::SelfAdjointEigenSolver<Mat> es(herm(h));
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigh: eigendecomposition failed");
  }
  return Eigh{es.eigenvalues(), es.eigenvectors()};
}

Mat matfun(const Mat& h, const std::function<cxd(double)>& f) {
  const Eigh e = eigh(h);
  Vec fv(e.vals.size());
  for (Eigen::Index i = 0; i < e.vals.size(); ++i) fv(i) = f(e.vals(i));
  return e.vecs * fv.asDiagonal() * e.vecs.adjoint();
}

Mat mat_pow(const Mat& h, double p) {
  return matfun(h, [p](double x) -> cxd {
    if (std::abs(x) <= kEigEps) return 0.0;
    return std::pow(x, p);
  });
}

Mat mat_pow(const Mat& h, cxd p) {
  return matfun(h, [p](double x) -> cxd {
    if (x <= kEigEps) return 0.0;
    return std::exp(p * std::log(x));
  });
}

Mat mat_sqrt(const Mat& h) {
  return matfun(h, [](double x) -> cxd { return x > kEigEps ? std::sqrt(x) : 0.0; });
}

Mat mat_exp(const Mat& h) {
  return matfun(h, [](double x) -> cxd { return std::exp(x); });
}

Mat mat_log_support(const Mat& h) {
  return matfun(h, [](double x) -> cxd { return x > kEigEps ? std::log(x) : 0.0; });
}

double fidelity(const Mat& rho, const Mat& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  const Mat prod = mat_sqrt(rho) * mat_sqrt(sigma);
  const double f = trace_norm(prod);
  return std::min(1.0, std::max(0.0, f));
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return fidelity(rho.mat, sigma.mat);
}

double trace_norm(const Mat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("trace_norm: matrix must be square");
  Eigen::BDCSVD<Mat> svd(m);
  return svd.singularValues().sum();
}

PositivePart positive_part(const Mat& h) {
  const Eigh e = eigh(h);
  const Eigen::Index n = e.vals.size();
  Mat proj = Mat::Zero(n, n);
  Mat part = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (e.vals(i) > kEigEps) {
      const Mat vv = e.vecs.col(i) * e.vecs.col(i).adjoint();
      proj += vv;
      part += e.vals(i) * vv;
    }
  }
  return PositivePart{std::move(proj), std::move(part)};
}

Mat herm(const Mat& m) { return 0.5 * (m + m.adjoint()); }

Mat permute_subsystems(const Mat& m, const std::vector<int>& dims,
                       const std::vector<int>& perm) {
  const int k = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != k) {
    throw std::invalid_argument("permute_subsystems: perm/dims size mismatch");
  }
  std::vector<bool> seen(k, false);
  long total = 1;
  for (int i = 0; i < k; ++i) {
    if (perm[i] < 0 || perm[i] >= k || seen[perm[i]]) {
      throw std::invalid_argument("permute_subsystems: invalid permutation");
    }
    seen[perm[i]] = true;
    total *= dims[i];
  }
  if (m.rows() != total || m.cols() != total) {
    throw std::invalid_argument("permute_subsystems: dimension mismatch");
  }
  // Strides of each factor in the original and permuted big-endian layouts.
  std::vector<long> stride(k, 1);
  for (int i = k - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];
  std::vector<long> new_stride(k, 1);
  for (int i = k - 2; i >= 0; --i) new_stride[i] = new_stride[i + 1] * dims[perm[i + 1]];
  std::vector<long> old_of_new(total);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    long old_idx = 0;
    for (int i = 0; i < k; ++i) {
      const long dig = rem / new_stride[i];
      rem %= new_stride[i];
      old_idx += dig * stride[perm[i]];
    }
    old_of_new[idx] = old_idx;
  }
  Mat out(total, total);
  for (long r = 0; r < total; ++r) {
    for (long c = 0; c < total; ++c) {
      out(r, c) = m(old_of_new[r], old_of_new[c]);
    }
  }
  return out;
}

DensityMatrix permute_subsystems(const DensityMatrix& rho,
                                 const std::vector<int>& perm) {
  DensityMatrix out;
  out.mat = permute_subsystems(rho.mat, rho.dims, perm);
  out.dims.reserve(perm.size());
  for (int p : perm) out.dims.push_back(rho.dims[p]);
  return out;
}

Mat dlog_transform(const Mat& sigma, const Mat& x) {
  const Eigh e = eigh(sigma);
  const Eigen::Index n = e.vals.size();
  Mat xt = e.vecs.adjoint() * x * e.vecs;
  for (Eigen::Index a = 0; a < n; ++a) {
    const double la = std::max(e.vals(a), kEigEps);
    for (Eigen::Index b = 0; b < n; ++b) {
      const double lb = std::max(e.vals(b), kEigEps);
      double kern;
      if (std::abs(la - lb) < 1e-14 * std::max(1.0, std::abs(la))) {
        kern = 1.0 / la;
      } else {
        kern = (std::log(la) - std::log(lb)) / (la - lb);
      }
      xt(a, b) *= kern;
    }
  }
  return e.vecs * xt * e.vecs.adjoint();
}

Vec basis_ket(int i, int d) {
  Vec v = Vec::Zero(d);
  v(i) = 1.0;
  return v;
}

Mat basis_proj(int i, int d) {
  Mat m = Mat::Zero(d, d);
  m(i, i) = 1.0;
  return m;
}

Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat pauli_y() {
  Mat m(2, 2);
  m << 0, cxd(0, -1), cxd(0, 1), 0;
  return m;
}

Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Mat bloch_state(double ux, double uy, double uz) {
  return 0.5 * (Mat::Identity(2, 2) + ux * pauli_x() + uy * pauli_y() + uz * pauli_z());
}

Mat haar_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat z(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) z(i, j) = cxd(g(rng), g(rng));
  }
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const cxd rjj = r(j, j);
    const cxd phase = std::abs(rjj) > 0 ? rjj / std::abs(rjj) : cxd(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

Vec random_ket(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = cxd(g(rng), g(rng));
  v.normalize();
  return v;
}

DensityMatrix random_density(int d, std::mt19937_64& rng) {
  return random_density(std::vector<int>{d}, rng);
}

DensityMatrix random_density(const std::vector<int>& dims, std::mt19937_64& rng) {
  long d = 1;
  for (int di : dims) d *= di;
  std::normal_distribution<double> g(0.0, 1.0);
  Mat z(d, d);
  for (long i = 0; i < d; ++i) {
    for (long j = 0; j < d; ++j) z(i, j) = cxd(g(rng), g(rng));
  }
  Mat rho = z * z.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(herm(rho), dims);
}

std::pair<double, double> golden_min(const std::function<double(double)>& f,
                                     double lo, double hi, double xtol,
                                     int max_iter) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && b - a > xtol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

NelderMeadResult nelder_mead(const std::function<double(const RVec&)>& f,
                             const RVec& x0, double step, int max_iter,
                             double tol) {
  const int n = static_cast<int>(x0.size());
  std::vector<RVec> pts(n + 1, x0);
  std::vector<double> val(n + 1);
  for (int i = 1; i <= n; ++i) pts[i](i - 1) += step;
  for (int i = 0; i <= n; ++i) val[i] = f(pts[i]);

  std::vector<int> order(n + 1);
  int it = 0;
  for (; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return val[a] < val[b]; });
    const int best = order[0], worst = order[n], second = order[n - 1];
    if (val[worst] - val[best] < tol) break;

    RVec centroid = RVec::Zero(n);
    for (int i = 0; i <= n; ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= n;

    const RVec refl = centroid + (centroid - pts[worst]);
    const double frefl = f(refl);
    if (frefl < val[best]) {
      const RVec expd = centroid + 2.0 * (centroid - pts[worst]);
      const double fexpd = f(expd);
      if (fexpd < frefl) {
        pts[worst] = expd;
        val[worst] = fexpd;
      } else {
        pts[worst] = refl;
        val[worst] = frefl;
      }
    } else if (frefl < val[second]) {
      pts[worst] = refl;
      val[worst] = frefl;
    } else {
      const RVec contr =
          centroid + 0.5 * ((frefl < val[worst] ? refl : pts[worst]) - centroid);
      const double fcontr = f(contr);
      if (fcontr < std::min(frefl, val[worst])) {
        pts[worst] = contr;
        val[worst] = fcontr;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
          val[i] = f(pts[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i) {
    if (val[i] < val[best]) best = i;
  }
  return {pts[best], val[best], it};
}

int thread_count() {
  if (const char* env = std::getenv("ENTROSCOPE_THREADS")) {
    const int t = std::atoi(env);
    if (t >= 1) return t;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int n, const std::function<void(int)>& body) {
  const int workers = std::min(n, thread_count());
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += workers) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace entroscope
