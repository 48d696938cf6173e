#include "entroscope/combine.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "entroscope/entropy.hpp"

namespace entroscope {

namespace {

double checked_entropy_arg(double h, const char* who) {
  if (h < -1e-12 || h > kLn2 + 1e-12) {
    throw std::invalid_argument(std::string(who) + ": entropy outside [0, ln2]");
  }
  return std::min(kLn2, std::max(0.0, h));
}

// -2 ln cos( arccos(a b)/2 - arccos(b)/2 ); the half-angle difference stays
// in (-pi/4, pi/2) for a, b in [0, 1], so the cosine is positive.
double chain_term(double a, double b) {
  a = std::min(1.0, std::max(-1.0, a));
  b = std::min(1.0, std::max(-1.0, b));
  const double ang = 0.5 * std::acos(a * b) - 0.5 * std::acos(b);
  return -2.0 * std::log(std::cos(ang));
}

double iid_branch(double h, double t) {
  const double a = 1.0 - 2.0 * binary_entropy_inv(t);
  return h + chain_term(a, a);
}

}  // namespace

void BinaryCqChannel::validate() const {
  if (out0.dim() != out1.dim()) {
    throw std::invalid_argument("BinaryCqChannel: output dimensions differ");
  }
  out0.validate();
  out1.validate();
}

BinaryCqChannel make_cq_channel(const Mat& out0, const Mat& out1) {
  const int d = static_cast<int>(out0.rows());
  BinaryCqChannel w{DensityMatrix(herm(out0), {d}),
                    DensityMatrix(herm(out1), {static_cast<int>(out1.rows())})};
  w.validate();
  return w;
}

BinaryCqChannel bsc_channel(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("bsc_channel: p outside [0,1]");
  Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
  a(0, 0) = p;
  a(1, 1) = 1.0 - p;
  b(0, 0) = 1.0 - p;
  b(1, 1) = p;
  return make_cq_channel(a, b);
}

BinaryCqChannel bec_channel(double eps) {
  if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("bec_channel: eps outside [0,1]");
  Mat a = Mat::Zero(3, 3), b = Mat::Zero(3, 3);
  a(0, 0) = 1.0 - eps;
  a(2, 2) = eps;
  b(1, 1) = 1.0 - eps;
  b(2, 2) = eps;
  return make_cq_channel(a, b);
}

BinaryCqChannel pure_output_channel(double alpha) {
  Vec v0 = Vec::Zero(2), v1 = Vec::Zero(2);
  v0(0) = 1.0;
  v1(0) = std::cos(alpha);
  v1(1) = std::sin(alpha);
  return make_cq_channel(v0 * v0.adjoint(), v1 * v1.adjoint());
}

double convolve(double a, double b) { return a * (1.0 - b) + (1.0 - a) * b; }

double classical_mgl(double h1, double h2) {
  h1 = checked_entropy_arg(h1, "classical_mgl");
  h2 = checked_entropy_arg(h2, "classical_mgl");
  return binary_entropy(convolve(binary_entropy_inv(h1), binary_entropy_inv(h2)));
}

double classical_upper(double h1, double h2) {
  h1 = checked_entropy_arg(h1, "classical_upper");
  h2 = checked_entropy_arg(h2, "classical_upper");
  return kLn2 - (kLn2 - h1) * (kLn2 - h2) / kLn2;
}

double gx_lower(double h) {
  h = checked_entropy_arg(h, "gx_lower");
  return 0.799 * h * (kLn2 - h) / kLn2 + h;
}

std::array<double, 4> qmgl_two_branches(double h1, double h2) {
  h1 = checked_entropy_arg(h1, "qmgl_two_branches");
  h2 = checked_entropy_arg(h2, "qmgl_two_branches");
  return {
      h1 + chain_term(1.0 - 2.0 * binary_entropy_inv(kLn2 - h1), std::exp(h2) - 1.0),
      h2 + chain_term(1.0 - 2.0 * binary_entropy_inv(kLn2 - h2), std::exp(h1) - 1.0),
      h2 + chain_term(1.0 - 2.0 * binary_entropy_inv(h1), 2.0 * std::exp(-h2) - 1.0),
      h1 + chain_term(1.0 - 2.0 * binary_entropy_inv(h2), 2.0 * std::exp(-h1) - 1.0),
  };
}

double qmgl_two(double h1, double h2) {
  const auto b = qmgl_two_branches(h1, h2);
  return *std::max_element(b.begin(), b.end());
}

double qmgl_iid(double h) {
  h = checked_entropy_arg(h, "qmgl_iid");
  // The two half-interval expressions agree at h = ln2/2; evaluate both near
  // the seam and keep the larger to stay robust against roundoff.
  if (std::abs(h - 0.5 * kLn2) <= 1e-12) {
    return std::max(iid_branch(h, h), iid_branch(h, kLn2 - h));
  }
  return iid_branch(h, std::min(h, kLn2 - h));
}

double qmgl_iid_convenient(double h) {
  h = checked_entropy_arg(h, "qmgl_iid_convenient");
  const double t = std::min(h, kLn2 - h);
  if (t <= 0.0) return h;
  return h + 0.083 * t / (1.0 - std::log(t));
}

ConjectureBounds conjecture_bounds(double h1, double h2) {
  h1 = checked_entropy_arg(h1, "conjecture_bounds");
  h2 = checked_entropy_arg(h2, "conjecture_bounds");
  const double s = h1 + h2;
  ConjectureBounds out;
  const double low = classical_mgl(h1, h2);
  const double high = s - kLn2 + classical_mgl(kLn2 - h1, kLn2 - h2);
  if (std::abs(s - kLn2) <= 1e-12) {
    out.lower = std::max(low, high);  // branches agree on the seam
  } else {
    out.lower = (s < kLn2) ? low : high;
  }
  out.upper = classical_upper(h1, h2);
  return out;
}

double channel_entropy(const BinaryCqChannel& w) {
  const Mat mean = 0.5 * (w.out0.mat + w.out1.mat);
  return kLn2 + 0.5 * (von_neumann(w.out0.mat) + von_neumann(w.out1.mat)) -
         von_neumann(mean);
}

BinaryCqChannel box_combine(const BinaryCqChannel& w1, const BinaryCqChannel& w2) {
  w1.validate();
  w2.validate();
  const Mat o0 = 0.5 * (tensor(w1.out0.mat, w2.out0.mat) + tensor(w1.out1.mat, w2.out1.mat));
  const Mat o1 = 0.5 * (tensor(w1.out1.mat, w2.out0.mat) + tensor(w1.out0.mat, w2.out1.mat));
  const std::vector<int> dims{w1.dim(), w2.dim()};
  return {DensityMatrix(herm(o0), dims), DensityMatrix(herm(o1), dims)};
}

BinaryCqChannel varo_combine(const BinaryCqChannel& w1, const BinaryCqChannel& w2) {
  w1.validate();
  w2.validate();
  const Mat e0 = basis_proj(0, 2), e1 = basis_proj(1, 2);
  const Mat o0 = 0.5 * (tensor(e0, tensor(w1.out0.mat, w2.out0.mat)) +
                        tensor(e1, tensor(w1.out1.mat, w2.out0.mat)));
  const Mat o1 = 0.5 * (tensor(e0, tensor(w1.out1.mat, w2.out1.mat)) +
                        tensor(e1, tensor(w1.out0.mat, w2.out1.mat)));
  const std::vector<int> dims{2, w1.dim(), w2.dim()};
  return {DensityMatrix(herm(o0), dims), DensityMatrix(herm(o1), dims)};
}

BinaryCqChannel dual_channel(const BinaryCqChannel& w) {
  w.validate();
  const int d = w.dim();
  const Mat s[2] = {mat_sqrt(w.out0.mat), mat_sqrt(w.out1.mat)};
  Mat sigma[2];
  for (int x = 0; x < 2; ++x) {
    Mat acc = Mat::Zero(2 * d, 2 * d);
    for (int z = 0; z < 2; ++z) {
      for (int zp = 0; zp < 2; ++zp) {
        const double sign = (x * (z + zp)) % 2 == 0 ? 1.0 : -1.0;
        Mat ket = Mat::Zero(2, 2);
        ket(z, zp) = 1.0;
        acc += 0.5 * sign * tensor(Mat((s[zp] * s[z]).transpose()), ket);
      }
    }
    sigma[x] = herm(acc);
  }
  // Compress onto the joint support of the two outputs.
  Eigh es = eigh(sigma[0] + sigma[1]);
  std::vector<int> keep;
  for (int i = 0; i < 2 * d; ++i) {
    if (es.vals(i) > kEigEps) keep.push_back(i);
  }
  const int r = static_cast<int>(keep.size());
  Mat iso(2 * d, r);
  for (int c = 0; c < r; ++c) iso.col(c) = es.vecs.col(keep[c]);
  BinaryCqChannel out;
  for (int x = 0; x < 2; ++x) {
    Mat red = herm(iso.adjoint() * sigma[x] * iso);
    red /= red.trace().real();
    (x == 0 ? out.out0 : out.out1) = DensityMatrix(red, {r});
  }
  out.validate();
  return out;
}

DualityReport duality_swap_check(const BinaryCqChannel& w1, const BinaryCqChannel& w2) {
  const BinaryCqChannel d1 = dual_channel(w1), d2 = dual_channel(w2);
  DualityReport rep;
  rep.box_of_duals = channel_entropy(box_combine(d1, d2));
  rep.dual_of_varo = channel_entropy(dual_channel(varo_combine(w1, w2)));
  rep.varo_of_duals = channel_entropy(varo_combine(d1, d2));
  rep.dual_of_box = channel_entropy(dual_channel(box_combine(w1, w2)));
  rep.max_gap = std::max(std::abs(rep.box_of_duals - rep.dual_of_varo),
                         std::abs(rep.varo_of_duals - rep.dual_of_box));
  return rep;
}

namespace {

// Entropy of the flagged state sum_x p_x |x><x| (x) rho_x conditioned on
// everything but the flag.
double flagged_conditional_entropy(double p, const Mat& r0, const Mat& r1) {
  const int d = static_cast<int>(r0.rows());
  Mat joint = Mat::Zero(2 * d, 2 * d);
  joint.topLeftCorner(d, d) = p * r0;
  joint.bottomRightCorner(d, d) = (1.0 - p) * r1;
  return conditional_entropy(DensityMatrix(herm(joint), {2, d}), {1});
}

struct RandomPriorEntropies {
  double h_single = 0.0;
  double h_minus = 0.0;
  double h_plus = 0.0;
};

// Joint-state route used when the prior is not uniform: build the flagged
// states of the two combination steps explicitly and take conditional
// entropies, so the chain identity is checked by independent spectra.
RandomPriorEntropies random_prior_entropies(double p, const Mat& r0, const Mat& r1) {
  const int d = static_cast<int>(r0.rows());
  const double pr[2] = {p, 1.0 - p};
  const Mat* rho[2] = {&r0, &r1};
  RandomPriorEntropies out;
  out.h_single = flagged_conditional_entropy(p, r0, r1);

  Mat minus = Mat::Zero(2 * d * d, 2 * d * d);
  Mat plus = Mat::Zero(4 * d * d, 4 * d * d);
  for (int x1 = 0; x1 < 2; ++x1) {
    for (int x2 = 0; x2 < 2; ++x2) {
      const double weight = pr[x1] * pr[x2];
      const Mat pair = tensor(*rho[x1], *rho[x2]);
      const int u = x1 ^ x2;
      minus += weight * tensor(basis_proj(u, 2), pair);
      plus += weight * tensor(basis_proj(x2, 2), tensor(basis_proj(u, 2), pair));
    }
  }
  out.h_minus = conditional_entropy(DensityMatrix(herm(minus), {2, d, d}), {1, 2});
  out.h_plus = conditional_entropy(DensityMatrix(herm(plus), {2, 2, d, d}), {1, 2, 3});
  return out;
}

}  // namespace

CombineScanResult random_cq_scan(long count, int dim, PriorMode prior,
                                 std::uint64_t seed, double tol) {
  if (count < 0) throw std::invalid_argument("random_cq_scan: negative count");
  if (dim < 2) throw std::invalid_argument("random_cq_scan: dim < 2");
  CombineScanResult res;
  res.tolerance = tol;
  res.rows.resize(count);
  parallel_for(count, [&](long i) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(i) * 0x9e3779b97f4a7c15ULL);
    const DensityMatrix s0 = random_density(dim, rng);
    const DensityMatrix s1 = random_density(dim, rng);
    CombineScanRow row;
    if (prior == PriorMode::kUniform) {
      const BinaryCqChannel w = make_cq_channel(s0.mat, s1.mat);
      const double h = channel_entropy(w);
      row.h1 = row.h2 = h;
      row.h_minus = channel_entropy(box_combine(w, w));
      row.h_plus = channel_entropy(varo_combine(w, w));
    } else {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double p = unit(rng);
      const RandomPriorEntropies ent = random_prior_entropies(p, s0.mat, s1.mat);
      row.h1 = row.h2 = ent.h_single;
      row.h_minus = ent.h_minus;
      row.h_plus = ent.h_plus;
    }
    const double h1 = std::min(kLn2, std::max(0.0, row.h1));
    const double h2 = std::min(kLn2, std::max(0.0, row.h2));
    const auto branches = qmgl_two_branches(h1, h2);
    const int argmax = static_cast<int>(
        std::max_element(branches.begin(), branches.end()) - branches.begin());
    const ConjectureBounds conj = conjecture_bounds(h1, h2);
    row.bounds["classical_mgl"] = classical_mgl(h1, h2);
    row.bounds["classical_upper"] = classical_upper(h1, h2);
    row.bounds["gx_lower"] = gx_lower(h1);
    row.bounds["qmgl_two"] = branches[argmax];
    row.bounds["qmgl_branch"] = static_cast<double>(argmax);
    row.bounds["qmgl_iid"] = qmgl_iid(h1);
    row.bounds["qmgl_convenient"] = qmgl_iid_convenient(h1);
    row.bounds["conj_lower"] = conj.lower;
    row.bounds["conj_upper"] = conj.upper;
    res.rows[i] = std::move(row);
  });
  for (const CombineScanRow& row : res.rows) {
    if (std::abs(row.h_minus + row.h_plus - row.h1 - row.h2) > 1e-8) {
      ++res.violations_chain;
    }
    if (prior == PriorMode::kUniform) {
      const double proven = std::max({row.bounds.at("qmgl_two"),
                                      row.bounds.at("qmgl_iid"),
                                      std::max(row.h1, row.h2)});
      if (row.h_minus < proven - tol) ++res.violations_proven;
    }
    if (row.h_minus < row.bounds.at("conj_lower") - tol) ++res.violations_conj_lower;
    if (row.h_minus > row.bounds.at("conj_upper") + tol) ++res.violations_conj_upper;
  }
  return res;
}

ConcavityBounds concavity_bounds(const std::vector<Mat>& states,
                                 const std::vector<double>& probs) {
  if (states.empty() || states.size() != probs.size()) {
    throw std::invalid_argument("concavity_bounds: need matching nonempty lists");
  }
  double total = 0.0;
  for (double p : probs) {
    if (p < -1e-12) throw std::invalid_argument("concavity_bounds: negative weight");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("concavity_bounds: weights must sum to 1");
  }
  const int d = static_cast<int>(states[0].rows());
  std::vector<Mat> rho;
  std::vector<double> pw;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].rows() != d || states[i].cols() != d) {
      throw std::invalid_argument("concavity_bounds: dimension mismatch");
    }
    if (probs[i] > 0.0) {
      rho.push_back(herm(states[i]));
      pw.push_back(probs[i]);
    }
  }
  const int n = static_cast<int>(rho.size());

  ConcavityBounds out;
  Mat avg = Mat::Zero(d, d);
  double hp = 0.0, mix_entropy = 0.0;
  for (int i = 0; i < n; ++i) {
    avg += pw[i] * rho[i];
    hp -= pw[i] * std::log(pw[i]);
    mix_entropy += pw[i] * von_neumann(rho[i]);
  }
  out.lhs = von_neumann(avg) - mix_entropy;

  std::vector<Mat> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = mat_sqrt(rho[i]);
  Mat psi = Mat::Zero(n * d, n * d);
  Mat block_diag = Mat::Zero(n * d, n * d);
  for (int i = 0; i < n; ++i) {
    block_diag.block(i * d, i * d, d, d) = pw[i] * rho[i];
    for (int j = 0; j < n; ++j) {
      psi.block(i * d, j * d, d, d) = std::sqrt(pw[i] * pw[j]) * roots[i] * roots[j];
    }
  }
  out.eqform = hp - relative_entropy(herm(psi), block_diag).value;

  double sum_root = 0.0, sum_fid = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double w = std::sqrt(pw[i] * pw[j]);
      sum_root += w * (roots[i] * roots[j]).trace().real();
      sum_fid += w * fidelity(rho[i], rho[j]);
    }
  }
  out.lb_sqrt = hp - std::log1p(2.0 * sum_root);
  out.lb_fid = hp - std::log1p(2.0 * sum_fid);
  return out;
}

FidelityEntropyWindow fidelity_entropy_window(const Mat& s0, const Mat& s1,
                                              double slack) {
  const BinaryCqChannel w = make_cq_channel(s0, s1);
  FidelityEntropyWindow out;
  out.f = fidelity(w.out0.mat, w.out1.mat);
  out.h = channel_entropy(w);
  const double hc = std::min(kLn2, std::max(0.0, kLn2 - out.h));
  const double lo = std::exp(std::min(kLn2, std::max(0.0, out.h))) - 1.0;
  const double hi = 1.0 - 2.0 * binary_entropy_inv(hc);
  out.ok = (lo <= out.f + slack) && (out.f <= hi + slack);
  return out;
}

}  // namespace entroscope
