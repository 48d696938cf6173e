#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "entroscope/numkernel.hpp"

namespace entroscope {

// Binary-input channel with quantum outputs of equal dimension; the input
// prior is uniform unless a scan says otherwise.
struct BinaryCqChannel {
  DensityMatrix out0;
  DensityMatrix out1;

  int dim() const { return out0.dim(); }
  // Both outputs valid states of the same dimension.
  void validate() const;
};

BinaryCqChannel make_cq_channel(const Mat& out0, const Mat& out1);

// Binary symmetric channel with flip probability p, outputs embedded as
// diagonal qubit states diag(p, 1-p) and diag(1-p, p).
BinaryCqChannel bsc_channel(double p);

// Binary erasure channel with erasure probability eps, outputs embedded as
// diagonal 3-level states diag(1-eps, 0, eps) and diag(0, 1-eps, eps).
BinaryCqChannel bec_channel(double eps);

// Pure outputs |0> and cos(alpha)|0> + sin(alpha)|1>.
BinaryCqChannel pure_output_channel(double alpha);

// ---------------------------------------------------------------------------
// Scalar entropy-combining bounds. All entropies are in nats, in [0, ln 2].
// ---------------------------------------------------------------------------

// Probability combination a(1-b) + (1-a)b.
double convolve(double a, double b);

// Classical minimum of the check-node output entropy at given input
// entropies: h2(h2inv(h1) * h2inv(h2)) with * the probability convolution.
double classical_mgl(double h1, double h2);

// Classical maximum: ln2 - (ln2 - h1)(ln2 - h2)/ln2.
double classical_upper(double h1, double h2);

// Polynomial lower envelope 0.799 * h (ln2 - h) / ln2 + h.
double gx_lower(double h);

// The four candidate expressions whose maximum is the proven two-channel
// check-node lower bound; each has the form
//   X - 2 ln cos( arccos(a b)/2 - arccos(b)/2 ).
std::array<double, 4> qmgl_two_branches(double h1, double h2);

// Proven lower bound on the check-node output entropy for two channels.
double qmgl_two(double h1, double h2);

// Proven lower bound for two identical channels of entropy h; evaluates the
// duality-symmetric closed form with t = min(h, ln2 - h).
double qmgl_iid(double h);

// Weaker closed-form variant h + 0.083 t / (1 - ln t), t = min(h, ln2 - h).
double qmgl_iid_convenient(double h);

struct ConjectureBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Conjectured optimal envelope: lower is the classical minimum for
// h1 + h2 <= ln2 and its dual reflection otherwise; upper is the classical
// maximum in both regimes.
ConjectureBounds conjecture_bounds(double h1, double h2);

// ---------------------------------------------------------------------------
// Channel calculus.
// ---------------------------------------------------------------------------

// Conditional output entropy H(X|B) of the channel under a uniform prior:
// ln2 + (H(out0) + H(out1))/2 - H((out0 + out1)/2).
double channel_entropy(const BinaryCqChannel& w);

// Check-node combination: out_u = 1/2 sum_v rho1_{u xor v} (x) rho2_v.
BinaryCqChannel box_combine(const BinaryCqChannel& w1, const BinaryCqChannel& w2);

// Variable-node combination with the first input revealed:
// out_u = 1/2 sum_v |v><v| (x) rho1_{v xor u} (x) rho2_u.
BinaryCqChannel varo_combine(const BinaryCqChannel& w1, const BinaryCqChannel& w2);

// Complementary channel on the purifying side, compressed to the joint
// support of its two outputs. Satisfies H(dual) = ln2 - H(w).
BinaryCqChannel dual_channel(const BinaryCqChannel& w);

struct DualityReport {
  double box_of_duals = 0.0;  // H(dual(w1) box dual(w2))
  double dual_of_varo = 0.0;  // ln2 - H(w1 varo w2), computed via the dual
  double varo_of_duals = 0.0;
  double dual_of_box = 0.0;
  double max_gap = 0.0;
};

// Numerically checks that duals swap the two combination operations.
DualityReport duality_swap_check(const BinaryCqChannel& w1, const BinaryCqChannel& w2);

// ---------------------------------------------------------------------------
// Randomized scans.
// ---------------------------------------------------------------------------

enum class PriorMode {
  kUniform,  // p = 1/2; combination entropies via the channel calculus
  kRandom,   // p uniform in [0,1]; entropies via explicit joint states
};

struct CombineScanRow {
  double h1 = 0.0;
  double h2 = 0.0;
  double h_minus = 0.0;  // check-node output entropy
  double h_plus = 0.0;   // variable-node output entropy
  std::map<std::string, double> bounds;
};

struct CombineScanResult {
  std::vector<CombineScanRow> rows;
  long violations_proven = 0;      // against qmgl_two / qmgl_iid / max(h1,h2)
  long violations_conj_lower = 0;  // against conjecture_bounds().lower
  long violations_conj_upper = 0;  // against conjecture_bounds().upper
  long violations_chain = 0;       // h_minus + h_plus != h1 + h2 beyond 1e-8
  double tolerance = 0.0;
};

// Samples `count` channels with Ginibre outputs of dimension `dim`, pairs
// each with itself, and tallies bound violations at slack `tol`. Proven
// bounds are only scored under the uniform prior they assume.
CombineScanResult random_cq_scan(long count, int dim, PriorMode prior,
                                 std::uint64_t seed, double tol = 1e-7);

// ---------------------------------------------------------------------------
// Entropy concavity estimates.
// ---------------------------------------------------------------------------

struct ConcavityBounds {
  double lhs = 0.0;      // H(sum p rho) - sum p H(rho)
  double eqform = 0.0;   // H({p}) - D(psi || blockdiag), equal to lhs
  double lb_sqrt = 0.0;  // H({p}) - ln(1 + 2 sum_{i<j} sqrt(pi pj) Tr sqrt(ri) sqrt(rj))
  double lb_fid = 0.0;   // same with fidelities instead of root overlaps
};

ConcavityBounds concavity_bounds(const std::vector<Mat>& states,
                                 const std::vector<double>& probs);

struct FidelityEntropyWindow {
  double f = 0.0;  // fidelity of the two outputs
  double h = 0.0;  // channel entropy of the pair under a uniform prior
  bool ok = false;
};

// Checks exp(h) - 1 <= f <= 1 - 2 h2inv(ln2 - h) within `slack`.
FidelityEntropyWindow fidelity_entropy_window(const Mat& s0, const Mat& s1,
                                              double slack = 1e-9);

}  // namespace entroscope
