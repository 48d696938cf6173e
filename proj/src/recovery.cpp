#include "entroscope/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

#include "entroscope/entropy.hpp"
#include "entroscope/numkernel.hpp"

namespace entroscope {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_tripartite(const DensityMatrix& rho) {
  if (rho.dims.size() != 3) {
    throw std::invalid_argument("recovery: state must carry exactly three slots");
  }
}

void check_bipartite_ref(const DensityMatrix& ref) {
  if (ref.dims.size() != 2) {
    throw std::invalid_argument("recovery: reference must carry exactly two slots");
  }
}

// Input-side marginal of a bipartite reference.
Mat input_marginal(const DensityMatrix& ref, bool input_on_second) {
  return partial_trace(ref, {input_on_second ? 1 : 0}).mat;
}

// K_t = ref^((1+it)/2) (I (x) rin^((-1-it)/2)) (input on the second factor),
// or with the factors swapped when the input sits on the first factor.
// t = 0 gives the plain transpose-map Kraus-like factor.
Mat rotated_kraus(const DensityMatrix& ref, bool input_on_second, double t) {
  const int dx = ref.dims[0];
  const int dy = ref.dims[1];
  const Mat rin = input_marginal(ref, input_on_second);
  const Mat left = mat_pow(ref.mat, cxd(0.5, t / 2.0));
  const Mat core = mat_pow(rin, cxd(-0.5, -t / 2.0));
  const Mat right = input_on_second ? tensor(Mat::Identity(dx, dx), core)
                                    : tensor(core, Mat::Identity(dy, dy));
  return left * right;
}

Mat embed_input(const Mat& input, const DensityMatrix& ref, bool input_on_second) {
  const int dx = ref.dims[0];
  const int dy = ref.dims[1];
  if (input_on_second) {
    if (input.rows() != dy || input.cols() != dy) {
      throw std::invalid_argument("recovery: input dimension mismatch");
    }
    return tensor(Mat::Identity(dx, dx), input);
  }
  if (input.rows() != dx || input.cols() != dx) {
    throw std::invalid_argument("recovery: input dimension mismatch");
  }
  return tensor(input, Mat::Identity(dy, dy));
}

// Embeds the channel-input marginal with an identity factor in the rebuilt
// slot and conjugates by I_(slot0) (x) k.
Mat lifted_conjugate(const Mat& k, const DensityMatrix& rho, RecoverWhich which) {
  const int d0 = rho.dims[0];
  const int d1 = rho.dims[1];
  const int d2 = rho.dims[2];
  Mat emb;
  if (which == RecoverWhich::kRebuildMiddle) {
    const DensityMatrix m02 = partial_trace(rho, {0, 2});
    emb = permute_subsystems(tensor(m02.mat, Mat::Identity(d1, d1)), {d0, d2, d1}, {0, 2, 1});
  } else {
    const DensityMatrix m01 = partial_trace(rho, {0, 1});
    emb = tensor(m01.mat, Mat::Identity(d2, d2));
  }
  const Mat kl = tensor(Mat::Identity(d0, d0), k);
  return kl * emb * kl.adjoint();
}

struct LiftContext {
  Mat rho;       // full tripartite state
  Mat marg;      // channel-input marginal ((0,2) or (0,1))
  int d_first = 0;
  int dim_in = 0;
  int dim_out = 0;
};

LiftContext make_context(const DensityMatrix& rho, RecoverWhich which) {
  check_tripartite(rho);
  LiftContext ctx;
  ctx.rho = rho.mat;
  ctx.d_first = rho.dims[0];
  ctx.dim_out = rho.dims[1] * rho.dims[2];
  if (which == RecoverWhich::kRebuildMiddle) {
    ctx.marg = partial_trace(rho, {0, 2}).mat;
    ctx.dim_in = rho.dims[2];
  } else {
    ctx.marg = partial_trace(rho, {0, 1}).mat;
    ctx.dim_in = rho.dims[1];
  }
  return ctx;
}

// Choi matrix of the channel that replaces its input by the maximally mixed
// output state.
Mat depolarize_choi(int d_in, int d_out) {
  return tensor(Mat::Identity(d_in, d_in), Mat::Identity(d_out, d_out) / d_out);
}

ChoiMatrix mix_choi(const ChoiMatrix& j, double eps) {
  ChoiMatrix out;
  out.dim_in = j.dim_in;
  out.dim_out = j.dim_out;
  out.mat = (1.0 - eps) * j.mat + eps * depolarize_choi(j.dim_in, j.dim_out);
  return out;
}

Mat recovered_state(const ChoiMatrix& j, const LiftContext& ctx) {
  return herm(apply_choi_to_last(j, ctx.marg, ctx.d_first));
}

Mat psd_clip(const Mat& m) {
  const Eigh e = eigh(herm(m));
  Mat out = Mat::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < e.vals.size(); ++i) {
    if (e.vals(i) > 0) out += e.vals(i) * (e.vecs.col(i) * e.vecs.col(i).adjoint());
  }
  return out;
}

Mat tp_project(const Mat& m, int d_in, int d_out) {
  const Mat tr_out = partial_trace_mat(m, {d_in, d_out}, {0});
  const Mat corr = Mat::Identity(d_in, d_in) - tr_out;
  return m + tensor(corr, Mat::Identity(d_out, d_out) / d_out);
}

double hs_real(const Mat& a, const Mat& b) { return (a.adjoint() * b).trace().real(); }

// Squared-fidelity objective and its Choi-space ascent direction.
double fidelity_sq(const Mat& rho, const Mat& sigma) {
  const double f = fidelity(rho, psd_clip(sigma));
  return f * f;
}

Mat fidelity_sq_grad_sigma(const Mat& rho, const Mat& sigma) {
  const Mat sr = mat_sqrt(rho);
  const Mat m = herm(sr * psd_clip(sigma) * sr);
  const double f = mat_sqrt(m).trace().real();
  return f * herm(sr * mat_pow(m, -0.5) * sr);
}

// Orthonormal Hermitian basis of d x d matrices (real HS inner product).
std::vector<Mat> hermitian_basis(int d) {
  std::vector<Mat> basis;
  basis.reserve(static_cast<std::size_t>(d) * d);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    Mat m = Mat::Zero(d, d);
    m(i, i) = 1.0;
    basis.push_back(m);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      Mat re = Mat::Zero(d, d);
      re(i, j) = inv_sqrt2;
      re(j, i) = inv_sqrt2;
      basis.push_back(re);
      Mat im = Mat::Zero(d, d);
      im(i, j) = cxd(0, -inv_sqrt2);
      im(j, i) = cxd(0, inv_sqrt2);
      basis.push_back(im);
    }
  }
  return basis;
}

}  // namespace

Mat petz_map_apply(const DensityMatrix& ref_xy, const Mat& input, bool input_on_second) {
  check_bipartite_ref(ref_xy);
  const Mat k = rotated_kraus(ref_xy, input_on_second, 0.0);
  const Mat emb = embed_input(input, ref_xy, input_on_second);
  return k * emb * k.adjoint();
}

DensityMatrix petz_recovered_state(const DensityMatrix& rho_abc, RecoverWhich which) {
  check_tripartite(rho_abc);
  const DensityMatrix ref = partial_trace(rho_abc, {1, 2});
  const bool ios = (which == RecoverWhich::kRebuildMiddle);
  const Mat k = rotated_kraus(ref, ios, 0.0);
  return DensityMatrix(herm(lifted_conjugate(k, rho_abc, which)), rho_abc.dims);
}

double beta0_weight(double t) { return (kPi / 2.0) / (std::cosh(kPi * t) + 1.0); }

RotatedPetzFamily make_rotated_family(const DensityMatrix& ref_xy, bool input_on_second,
                                      double truncation, int nodes) {
  check_bipartite_ref(ref_xy);
  if (nodes < 2 || truncation <= 0) {
    throw std::invalid_argument("make_rotated_family: need nodes >= 2 and truncation > 0");
  }
  RotatedPetzFamily fam;
  fam.ref_xy = ref_xy;
  fam.input_on_second = input_on_second;
  fam.t_grid.resize(nodes);
  fam.weights.resize(nodes);
  const double h = 2.0 * truncation / (nodes - 1);
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    fam.t_grid[i] = -truncation + h * i;
    double w = beta0_weight(fam.t_grid[i]) * h;
    if (i == 0 || i == nodes - 1) w *= 0.5;
    fam.weights[i] = w;
    sum += w;
  }
  // CDF of the weight is (1 + tanh(pi t / 2)) / 2, so the discarded mass is
  // 1 - tanh(pi T / 2).
  fam.tail_mass = 1.0 - std::tanh(kPi * truncation / 2.0);
  fam.tail_warning = fam.tail_mass > 1e-4;
  for (double& w : fam.weights) w /= sum;
  return fam;
}

Mat rotated_petz_apply(const RotatedPetzFamily& fam, double t, const Mat& input) {
  const Mat k = rotated_kraus(fam.ref_xy, fam.input_on_second, t);
  const Mat emb = embed_input(input, fam.ref_xy, fam.input_on_second);
  return k * emb * k.adjoint();
}

DensityMatrix averaged_rotated_recovery(const DensityMatrix& rho_abc, RecoverWhich which,
                                        const RotatedPetzFamily& fam) {
  check_tripartite(rho_abc);
  if (fam.ref_xy.dims.size() != 2 || fam.ref_xy.dims[0] != rho_abc.dims[1] ||
      fam.ref_xy.dims[1] != rho_abc.dims[2] ||
      fam.input_on_second != (which == RecoverWhich::kRebuildMiddle)) {
    throw std::invalid_argument("averaged_rotated_recovery: family does not match the state");
  }
  Mat acc = Mat::Zero(rho_abc.dim(), rho_abc.dim());
  for (std::size_t i = 0; i < fam.t_grid.size(); ++i) {
    const Mat k = rotated_kraus(fam.ref_xy, fam.input_on_second, fam.t_grid[i]);
    acc += fam.weights[i] * lifted_conjugate(k, rho_abc, which);
  }
  return DensityMatrix(herm(acc), rho_abc.dims);
}

DensityMatrix averaged_rotated_recovery(const DensityMatrix& rho_abc, RecoverWhich which,
                                        double truncation, int nodes) {
  check_tripartite(rho_abc);
  const DensityMatrix ref = partial_trace(rho_abc, {1, 2});
  const RotatedPetzFamily fam =
      make_rotated_family(ref, which == RecoverWhich::kRebuildMiddle, truncation, nodes);
  return averaged_rotated_recovery(rho_abc, which, fam);
}

void ChoiMatrix::validate() const {
  if (dim_in <= 0 || dim_out <= 0 ||
      mat.rows() != static_cast<long>(dim_in) * dim_out || mat.rows() != mat.cols()) {
    throw std::invalid_argument("ChoiMatrix: dimension mismatch");
  }
  if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("ChoiMatrix: not Hermitian within 1e-9");
  }
  const Eigh e = eigh(herm(mat));
  if (e.vals.minCoeff() < -1e-9) {
    throw std::invalid_argument("ChoiMatrix: negative eigenvalue " +
                                std::to_string(e.vals.minCoeff()));
  }
  const Mat tr_out = partial_trace_mat(mat, {dim_in, dim_out}, {0});
  const double dev = (tr_out - Mat::Identity(dim_in, dim_in)).cwiseAbs().maxCoeff();
  if (dev > 1e-8) {
    throw std::invalid_argument("ChoiMatrix: trace preservation violated by " +
                                std::to_string(dev));
  }
}

ChoiMatrix choi_of_map(const std::function<Mat(const Mat&)>& map, int dim_in) {
  if (dim_in <= 0) throw std::invalid_argument("choi_of_map: bad input dimension");
  ChoiMatrix j;
  j.dim_in = dim_in;
  Mat probe = Mat::Zero(dim_in, dim_in);
  probe(0, 0) = 1.0;
  const Mat first = map(probe);
  j.dim_out = static_cast<int>(first.rows());
  j.mat = Mat::Zero(static_cast<long>(dim_in) * j.dim_out, static_cast<long>(dim_in) * j.dim_out);
  for (int a = 0; a < dim_in; ++a) {
    for (int b = 0; b < dim_in; ++b) {
      Mat e = Mat::Zero(dim_in, dim_in);
      e(a, b) = 1.0;
      j.mat.block(static_cast<long>(a) * j.dim_out, static_cast<long>(b) * j.dim_out, j.dim_out,
                  j.dim_out) = (a == 0 && b == 0) ? first : map(e);
    }
  }
  return j;
}

Mat apply_choi(const ChoiMatrix& j, const Mat& x) {
  if (x.rows() != j.dim_in || x.cols() != j.dim_in) {
    throw std::invalid_argument("apply_choi: input dimension mismatch");
  }
  Mat out = Mat::Zero(j.dim_out, j.dim_out);
  for (int a = 0; a < j.dim_in; ++a) {
    for (int b = 0; b < j.dim_in; ++b) {
      out += x(a, b) * j.mat.block(static_cast<long>(a) * j.dim_out,
                                   static_cast<long>(b) * j.dim_out, j.dim_out, j.dim_out);
    }
  }
  return out;
}

Mat apply_choi_to_last(const ChoiMatrix& j, const Mat& rho, int d_first) {
  const long expect = static_cast<long>(d_first) * j.dim_in;
  if (rho.rows() != expect || rho.cols() != expect) {
    throw std::invalid_argument("apply_choi_to_last: input dimension mismatch");
  }
  const long dou = j.dim_out;
  Mat out = Mat::Zero(d_first * dou, d_first * dou);
  for (int a = 0; a < d_first; ++a) {
    for (int ap = 0; ap < d_first; ++ap) {
      Mat block = Mat::Zero(dou, dou);
      for (int c = 0; c < j.dim_in; ++c) {
        for (int cp = 0; cp < j.dim_in; ++cp) {
          const cxd w = rho(static_cast<long>(a) * j.dim_in + c,
                            static_cast<long>(ap) * j.dim_in + cp);
          if (w != cxd(0, 0)) {
            block += w * j.mat.block(static_cast<long>(c) * dou, static_cast<long>(cp) * dou,
                                     dou, dou);
          }
        }
      }
      out.block(static_cast<long>(a) * dou, static_cast<long>(ap) * dou, dou, dou) = block;
    }
  }
  return out;
}

Mat apply_choi_to_last_adjoint(const Mat& y, const Mat& rho, int d_first, int dim_in,
                               int dim_out) {
  const long din = dim_in;
  const long dou = dim_out;
  if (y.rows() != static_cast<long>(d_first) * dou ||
      rho.rows() != static_cast<long>(d_first) * din) {
    throw std::invalid_argument("apply_choi_to_last_adjoint: dimension mismatch");
  }
  Mat out = Mat::Zero(din * dou, din * dou);
  for (int c = 0; c < dim_in; ++c) {
    for (int cp = 0; cp < dim_in; ++cp) {
      Mat block = Mat::Zero(dou, dou);
      for (int a = 0; a < d_first; ++a) {
        for (int ap = 0; ap < d_first; ++ap) {
          const cxd w = std::conj(rho(static_cast<long>(a) * din + c,
                                      static_cast<long>(ap) * din + cp));
          if (w != cxd(0, 0)) {
            block += w * y.block(static_cast<long>(a) * dou, static_cast<long>(ap) * dou, dou,
                                 dou);
          }
        }
      }
      out.block(static_cast<long>(c) * dou, static_cast<long>(cp) * dou, dou, dou) = block;
    }
  }
  return out;
}

namespace {

// Completion sending the kernel of the input marginal to the maximally mixed
// output, so the Choi matrix is trace preserving on the whole input space.
void complete_choi(ChoiMatrix& j, const Mat& in_marginal) {
  const Mat proj = positive_part(in_marginal).projector;
  const Mat gap = Mat::Identity(j.dim_in, j.dim_in) - proj.transpose();
  if (gap.cwiseAbs().maxCoeff() > 1e-14) {
    j.mat += tensor(gap, Mat::Identity(j.dim_out, j.dim_out) / j.dim_out);
  }
}

}  // namespace

ChoiMatrix petz_choi(const DensityMatrix& ref_xy, bool input_on_second) {
  check_bipartite_ref(ref_xy);
  const int d_in = input_on_second ? ref_xy.dims[1] : ref_xy.dims[0];
  ChoiMatrix j = choi_of_map(
      [&](const Mat& x) { return petz_map_apply(ref_xy, x, input_on_second); }, d_in);
  complete_choi(j, input_marginal(ref_xy, input_on_second));
  return j;
}

ChoiMatrix averaged_rotated_choi(const RotatedPetzFamily& fam) {
  const int d_in = fam.input_on_second ? fam.ref_xy.dims[1] : fam.ref_xy.dims[0];
  ChoiMatrix acc;
  for (std::size_t i = 0; i < fam.t_grid.size(); ++i) {
    const double t = fam.t_grid[i];
    ChoiMatrix node = choi_of_map(
        [&](const Mat& x) { return rotated_petz_apply(fam, t, x); }, d_in);
    if (i == 0) {
      acc = node;
      acc.mat *= fam.weights[i];
    } else {
      acc.mat += fam.weights[i] * node.mat;
    }
  }
  complete_choi(acc, input_marginal(fam.ref_xy, fam.input_on_second));
  return acc;
}

ChoiMatrix project_to_cptp(const ChoiMatrix& j, int max_iters, double tol) {
  if (j.dim_in <= 0 || j.dim_out <= 0 ||
      j.mat.rows() != static_cast<long>(j.dim_in) * j.dim_out) {
    throw std::invalid_argument("project_to_cptp: dimension mismatch");
  }
  Mat x = herm(j.mat);
  Mat p = Mat::Zero(x.rows(), x.cols());
  Mat q = Mat::Zero(x.rows(), x.cols());
  ChoiMatrix out;
  out.dim_in = j.dim_in;
  out.dim_out = j.dim_out;
  for (int it = 0; it < max_iters; ++it) {
    const Mat y = psd_clip(x + p);
    p = x + p - y;
    const Mat z = tp_project(y + q, j.dim_in, j.dim_out);
    q = y + q - z;
    const double change = (z - x).norm() / std::max(1.0, x.norm());
    x = z;
    if (change < tol) break;
  }
  out.mat = x;
  return out;
}

double dual_trace_bound(const Mat& g, int d_in, int d_out, Mat* primal) {
  const long n = static_cast<long>(d_in) * d_out;
  if (g.rows() != n || g.cols() != n) {
    throw std::invalid_argument("dual_trace_bound: dimension mismatch");
  }
  const Mat gh = herm(g);
  const std::vector<Mat> basis = hermitian_basis(d_in);
  const int nb = static_cast<int>(basis.size());
  const Mat id_out = Mat::Identity(d_out, d_out);

  const double gmin = eigh(gh).vals.minCoeff();
  Mat lam = (gmin - 1.0) * Mat::Identity(d_in, d_in);

  const double scale = std::max(1.0, gh.cwiseAbs().maxCoeff());
  double mu = scale;
  const double mu_floor = 1e-13 * scale;
  Mat c_inv;  // barrier slack inverse at the current iterate

  while (true) {
    for (int newton = 0; newton < 60; ++newton) {
      const Mat c = gh - tensor(lam, id_out);
      const Eigh ec = eigh(c);
      if (ec.vals.minCoeff() <= 0) {
        throw std::runtime_error("dual_trace_bound: barrier iterate left the cone");
      }
      Mat inv_core = ec.vecs.adjoint();
      for (Eigen::Index r = 0; r < ec.vals.size(); ++r) inv_core.row(r) /= ec.vals(r);
      c_inv = ec.vecs * inv_core;
      const Mat w = partial_trace_mat(c_inv, {d_in, d_out}, {0});
      const Mat grad_mat = Mat::Identity(d_in, d_in) - mu * w;
      // Gradient in coordinates: d/d theta_k [Tr lam + mu logdet C].
      RVec grad(nb);
      for (int k = 0; k < nb; ++k) {
        grad(k) = (grad_mat * basis[k]).trace().real();
      }
      std::vector<Mat> lifted(nb);
      for (int k = 0; k < nb; ++k) lifted[k] = c_inv * tensor(basis[k], id_out);
      RMat hess(nb, nb);
      for (int k = 0; k < nb; ++k) {
        for (int l = k; l < nb; ++l) {
          // Tr[X_k X_l] as an entrywise sum, avoiding the full product.
          const double v =
              mu * lifted[k].cwiseProduct(lifted[l].transpose()).sum().real();
          hess(k, l) = v;
          hess(l, k) = v;
        }
      }
      const RVec dir = hess.ldlt().solve(grad);
      const double decrement = grad.dot(dir);
      if (!(decrement > 1e-14 * std::max(1.0, scale))) break;
      Mat step = Mat::Zero(d_in, d_in);
      for (int k = 0; k < nb; ++k) step += dir(k) * basis[k];
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        const Mat cand = lam + alpha * step;
        const Eigh et = eigh(gh - tensor(cand, id_out));
        if (et.vals.minCoeff() > 0) {
          lam = cand;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    if (mu < mu_floor) break;
    mu *= 0.2;
  }

  // Exact feasibility: shift down until g - lam (x) I is PSD, then report.
  const double slack = eigh(gh - tensor(lam, id_out)).vals.minCoeff();
  if (slack < 0) lam -= (1e-15 - slack) * Mat::Identity(d_in, d_in);
  if (primal != nullptr) {
    // Near the central path mu * C^{-1} is an almost-feasible channel Choi.
    *primal = herm(mu * c_inv);
  }
  return lam.trace().real();
}

namespace {

std::vector<ChoiMatrix> base_candidates(const DensityMatrix& rho, RecoverWhich which,
                                        const RecoverySolveOptions& opts) {
  const DensityMatrix ref = partial_trace(rho, {1, 2});
  const bool ios = (which == RecoverWhich::kRebuildMiddle);
  std::vector<ChoiMatrix> cands;
  cands.push_back(petz_choi(ref, ios));
  const RotatedPetzFamily fam = make_rotated_family(ref, ios, opts.truncation, opts.nodes);
  cands.push_back(averaged_rotated_choi(fam));
  return cands;
}

FidelityRecoveryResult fidelity_of_recovery_impl(const DensityMatrix& rho_abc,
                                                 RecoverWhich which,
                                                 const RecoverySolveOptions& opts,
                                                 const std::vector<ChoiMatrix>& extra) {
  const LiftContext ctx = make_context(rho_abc, which);
  std::vector<ChoiMatrix> cands = base_candidates(rho_abc, which, opts);
  for (const ChoiMatrix& e : extra) cands.push_back(e);

  FidelityRecoveryResult res;
  res.value = -kInf;
  for (const ChoiMatrix& c : cands) {
    const double v = fidelity_sq(ctx.rho, recovered_state(c, ctx));
    if (v > res.value) {
      res.value = v;
      res.choi = c;
    }
  }

  ChoiMatrix j = res.choi;
  double fval = res.value;
  double eta = 0.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    res.iterations = it + 1;
    if (fval >= 1.0 - 1e-12) {
      res.converged = true;
      break;
    }
    const Mat sigma = recovered_state(j, ctx);
    const Mat grad_sigma = fidelity_sq_grad_sigma(ctx.rho, sigma);
    const Mat grad_j =
        herm(apply_choi_to_last_adjoint(grad_sigma, ctx.marg, ctx.d_first, ctx.dim_in,
                                        ctx.dim_out));
    if (eta == 0.0) eta = 1.0 / std::max(1.0, grad_j.norm());
    bool accepted = false;
    double trial_val = fval;
    ChoiMatrix trial;
    for (int bt = 0; bt < 40; ++bt) {
      ChoiMatrix raw;
      raw.dim_in = ctx.dim_in;
      raw.dim_out = ctx.dim_out;
      raw.mat = j.mat + eta * grad_j;
      trial = project_to_cptp(raw);
      trial_val = fidelity_sq(ctx.rho, recovered_state(trial, ctx));
      if (trial_val > fval + 1e-14) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) {
      res.converged = true;
      break;
    }
    const double rel = (trial_val - fval) / std::max(1e-12, std::abs(fval));
    j = trial;
    fval = trial_val;
    eta *= 1.5;
    if (rel < opts.tol) {
      res.converged = true;
      break;
    }
  }
  if (fval > res.value) {
    res.value = fval;
    res.choi = j;
  }
  return res;
}

}  // namespace

FidelityRecoveryResult fidelity_of_recovery(const DensityMatrix& rho_abc, RecoverWhich which,
                                            const RecoverySolveOptions& opts) {
  return fidelity_of_recovery_impl(rho_abc, which, opts, {});
}

ReorResult relative_entropy_of_recovery(const DensityMatrix& rho_abc, RecoverWhich which,
                                        const RecoverySolveOptions& opts) {
  const LiftContext ctx = make_context(rho_abc, which);
  const double eps = opts.mix_eps;
  // Output of the depolarize-to-mixed channel; mixing any channel with it
  // keeps the objective finite (the state's support sits inside the support
  // of its first marginal tensored with anything full rank).
  ChoiMatrix dep;
  dep.dim_in = ctx.dim_in;
  dep.dim_out = ctx.dim_out;
  dep.mat = depolarize_choi(ctx.dim_in, ctx.dim_out);
  const Mat dep_state = recovered_state(dep, ctx);

  // Divergence at the eps-mixed channel, so the reported value is attained
  // exactly by the reported Choi matrix.
  const auto mixed_state = [&](const ChoiMatrix& j) {
    return herm((1.0 - eps) * recovered_state(j, ctx) + eps * dep_state);
  };
  const auto objective = [&](const ChoiMatrix& j) {
    return relative_entropy(ctx.rho, mixed_state(j)).value;
  };

  std::vector<ChoiMatrix> cands = base_candidates(rho_abc, which, opts);
  ChoiMatrix j = cands.front();
  double fval = kInf;
  for (const ChoiMatrix& c : cands) {
    const double v = objective(c);
    if (v < fval) {
      fval = v;
      j = c;
    }
  }

  ReorResult res;
  double eta = 0.0;
  int flat = 0;
  for (int it = 0; it < opts.max_iters; ++it) {
    res.iterations = it + 1;
    const Mat sigma = mixed_state(j);
    const Mat grad_sigma = -dlog_transform(sigma, ctx.rho);
    const Mat grad_j = herm((1.0 - eps) * apply_choi_to_last_adjoint(
                                grad_sigma, ctx.marg, ctx.d_first, ctx.dim_in, ctx.dim_out));
    if (eta == 0.0) eta = 1.0 / std::max(1.0, grad_j.norm());
    bool accepted = false;
    double trial_val = fval;
    ChoiMatrix trial;
    for (int bt = 0; bt < 50; ++bt) {
      ChoiMatrix raw;
      raw.dim_in = ctx.dim_in;
      raw.dim_out = ctx.dim_out;
      raw.mat = j.mat - eta * grad_j;
      trial = project_to_cptp(raw);
      trial_val = objective(trial);
      if (trial_val < fval - 1e-15) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) {
      res.converged = true;
      break;
    }
    const double rel = (fval - trial_val) / std::max(1e-12, std::abs(fval));
    j = trial;
    fval = trial_val;
    eta *= 1.3;
    if (rel < opts.tol) {
      if (++flat >= 3) {
        res.converged = true;
        break;
      }
    } else {
      flat = 0;
    }
  }

  // First-order certificate: the objective is convex in the Choi matrix, so
  //   f(S) >= f(J) + <grad, S - J>  for every channel S,
  // and the linear term is bounded below by the exact dual of the linear
  // minimization over channels. The mix shifts the unmixed optimum by at
  // most -ln(1 - eps).
  const auto certify = [&](const ChoiMatrix& at, double fat, Mat* lmo_primal) {
    const Mat sigma = mixed_state(at);
    const Mat grad_sigma = -dlog_transform(sigma, ctx.rho);
    const Mat grad_j = herm((1.0 - eps) * apply_choi_to_last_adjoint(
                                grad_sigma, ctx.marg, ctx.d_first, ctx.dim_in, ctx.dim_out));
    const double dual = dual_trace_bound(grad_j, ctx.dim_in, ctx.dim_out, lmo_primal);
    return fat - hs_real(grad_j, at.mat) + dual + std::log1p(-eps);
  };

  Mat lmo;
  double lower = certify(j, fval, &lmo);
  // Conditional-gradient refinement when the certificate is loose: the dual
  // solve also yields the linear minimizer, which is the ideal step target.
  for (int round = 0; round < 25 && fval - lower > 1e-7 * std::max(1.0, fval); ++round) {
    ChoiMatrix step;
    step.dim_in = ctx.dim_in;
    step.dim_out = ctx.dim_out;
    step.mat = lmo;
    step = project_to_cptp(step);
    bool improved = false;
    for (double gamma : {1.0, 0.5, 0.25, 0.1, 0.03, 0.01, 0.003, 0.001}) {
      ChoiMatrix cand;
      cand.dim_in = ctx.dim_in;
      cand.dim_out = ctx.dim_out;
      cand.mat = (1.0 - gamma) * j.mat + gamma * step.mat;
      const double v = objective(cand);
      if (v < fval - 1e-15) {
        j = cand;
        fval = v;
        improved = true;
        break;
      }
    }
    const double cert = certify(j, fval, &lmo);
    if (cert > lower) lower = cert;
    if (!improved) break;
  }

  res.value = fval;
  res.lower_bound = lower;
  res.gap = fval - lower;
  res.choi = mix_choi(j, eps);
  return res;
}

RecoveryAnalysis analyze_recovery(const DensityMatrix& rho_abc, RecoverWhich which,
                                  const RecoverySolveOptions& opts) {
  const LiftContext ctx = make_context(rho_abc, which);
  RecoveryAnalysis out;
  out.cqmi = (which == RecoverWhich::kRebuildMiddle)
                 ? cqmi(rho_abc, {0}, {1}, {2})
                 : cqmi(rho_abc, {0}, {2}, {1});

  const ReorResult reor = relative_entropy_of_recovery(rho_abc, which, opts);
  out.d_rec = reor.value;
  out.d_rec_lower = reor.lower_bound;
  out.gap = reor.gap;

  const DensityMatrix ref = partial_trace(rho_abc, {1, 2});
  const bool ios = (which == RecoverWhich::kRebuildMiddle);
  const RotatedPetzFamily fam = make_rotated_family(ref, ios, opts.truncation, opts.nodes);
  const ChoiMatrix avg_mixed = mix_choi(averaged_rotated_choi(fam), opts.mix_eps);

  const Mat omega = recovered_state(avg_mixed, ctx);
  const Mat sigma_star = recovered_state(reor.choi, ctx);
  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  const double dm_avg =
      measured_relative_entropy(ctx.rho, omega, opts.dm_restarts, 1e-7, rng);
  const double dm_star =
      measured_relative_entropy(ctx.rho, sigma_star, opts.dm_restarts, 1e-7, rng);
  out.d_m_rec = std::min(dm_avg, dm_star);

  const FidelityRecoveryResult fid =
      fidelity_of_recovery_impl(rho_abc, which, opts, {avg_mixed, reor.choi});
  out.neg2_log_f_opt = fid.value > 0 ? -std::log(fid.value) : kInf;
  out.flag = out.d_rec_lower > out.cqmi;
  return out;
}

RegularizedBoundReport cqmi_regularized_bound_check(const DensityMatrix& rho_abc, int n,
                                                    RecoverWhich which, double truncation,
                                                    int nodes) {
  check_tripartite(rho_abc);
  if (n < 1) throw std::invalid_argument("cqmi_regularized_bound_check: need n >= 1");
  double dim_n = 1.0;
  for (int i = 0; i < n; ++i) {
    dim_n *= rho_abc.dim();
    if (dim_n > kDenseDimCap) {
      throw cap_exceeded("cqmi_regularized_bound_check: copy dimension over the dense cap");
    }
  }

  const DensityMatrix ref = partial_trace(rho_abc, {1, 2});
  const bool ios = (which == RecoverWhich::kRebuildMiddle);
  const RotatedPetzFamily fam = make_rotated_family(ref, ios, truncation, nodes);

  Mat rho_n = rho_abc.mat;
  for (int i = 1; i < n; ++i) rho_n = tensor(rho_n, rho_abc.mat);
  Mat mix_n = Mat::Zero(rho_n.rows(), rho_n.cols());
  for (std::size_t k = 0; k < fam.t_grid.size(); ++k) {
    const Mat kr = rotated_kraus(fam.ref_xy, fam.input_on_second, fam.t_grid[k]);
    const Mat omega = herm(lifted_conjugate(kr, rho_abc, which));
    Mat omega_n = omega;
    for (int i = 1; i < n; ++i) omega_n = tensor(omega_n, omega);
    mix_n += fam.weights[k] * omega_n;
  }
  // A tiny uniform mix guards the eigenvalue clip in the divergence; it
  // shifts the reported value by less than 1e-6.
  const double delta = 3e-7;
  const long dn = rho_n.rows();
  const Mat guarded =
      (1.0 - delta) * mix_n + (delta / dn) * Mat::Identity(dn, dn);

  RegularizedBoundReport rep;
  rep.value_per_copy = relative_entropy(rho_n, guarded).value / n;
  rep.cqmi = (which == RecoverWhich::kRebuildMiddle) ? cqmi(rho_abc, {0}, {1}, {2})
                                                     : cqmi(rho_abc, {0}, {2}, {1});
  rep.holds = rep.value_per_copy <= rep.cqmi + 1e-6;
  return rep;
}

DensityMatrix fawzi_fawzi_state(double theta) {
  Vec psi = Vec::Zero(8);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  psi(0) = inv_sqrt2;
  psi(3) = std::cos(theta) * inv_sqrt2;
  psi(6) = std::sin(theta) * inv_sqrt2;
  return DensityMatrix(psi * psi.adjoint(), {2, 2, 2});
}

DensityMatrix ccq_state(const Mat& sigma0, const Mat& sigma1) {
  if (sigma0.rows() != 2 || sigma0.cols() != 2 || sigma1.rows() != 2 || sigma1.cols() != 2) {
    throw std::invalid_argument("ccq_state: the two states must be qubits");
  }
  const Mat* s[2] = {&sigma0, &sigma1};
  Mat out = Mat::Zero(16, 16);
  for (int a = 0; a < 2; ++a) {
    for (int c = 0; c < 2; ++c) {
      out += 0.25 * tensor(basis_proj(a, 2),
                           tensor(basis_proj(c, 2), tensor(*s[a ^ c], *s[c])));
    }
  }
  return DensityMatrix(std::move(out), {2, 2, 4});
}

std::pair<Mat, Mat> violation_family(double x) {
  const double u0 = -0.9;
  const double w0 = 0.4;
  const double v0_sq = 1.0 - u0 * u0 - w0 * w0;
  const double u1 = -0.9 + 0.01 * x;
  const double w1 = 0.4001;
  const double v1_sq = 1.0 - u1 * u1 - w1 * w1;
  if (v0_sq < 0 || v1_sq < 0) {
    throw std::invalid_argument("violation_family: parameter leaves the Bloch ball");
  }
  return {bloch_state(u0, std::sqrt(v0_sq), w0), bloch_state(u1, std::sqrt(v1_sq), w1)};
}

std::vector<ScanRow> counterexample_scan(const std::vector<double>& xs,
                                         const RecoverySolveOptions& opts) {
  std::vector<ScanRow> rows(xs.size());
  parallel_for(static_cast<int>(xs.size()), [&](int i) {
    const auto pair = violation_family(xs[i]);
    const DensityMatrix tau = ccq_state(pair.first, pair.second);
    RecoverySolveOptions local = opts;
    local.seed = opts.seed + static_cast<std::uint64_t>(i) * 0x9e3779b97f4a7c15ULL;
    const RecoveryAnalysis a = analyze_recovery(tau, RecoverWhich::kRebuildMiddle, local);
    rows[i] = ScanRow{xs[i], a.cqmi, a.d_rec, a.d_m_rec, a.gap, a.flag};
  });
  return rows;
}

}  // namespace entroscope
