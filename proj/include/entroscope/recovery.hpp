#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "entroscope/types.hpp"

namespace entroscope {

// Tripartite recovery layout: states carry three slots (slot0, slot1, slot2).
//  - kRebuildMiddle: channel slot2 -> (slot1, slot2), applied to the
//    (slot0, slot2) marginal; reference for the transpose map is the
//    (slot1, slot2) marginal with the input acting on its second factor.
//  - kRebuildLast: channel slot1 -> (slot1, slot2), applied to the
//    (slot0, slot1) marginal; reference is the same (slot1, slot2) marginal
//    with the input acting on its first factor.
// Other patterns (e.g. rebuilding slot0 from slot2) are reached by permuting
// slots before the call.
enum class RecoverWhich { kRebuildMiddle, kRebuildLast };

// Transpose-map application for a bipartite reference ref_xy on X (x) Y:
//   input on Y:  K = ref^(1/2) (I (x) rho_Y^(-1/2)),  tau |-> K (I (x) tau) K+
//   input on X:  K = ref^(1/2) (rho_X^(-1/2) (x) I),  tau |-> K (tau (x) I) K+
// Output lives on X (x) Y. Trace-preserving on the marginal's support.
Mat petz_map_apply(const DensityMatrix& ref_xy, const Mat& input,
                   bool input_on_second = true);

// Lifted transpose-map recovery of a tripartite state from its own marginals.
DensityMatrix petz_recovered_state(const DensityMatrix& rho_abc, RecoverWhich which);

// Family of rotated transpose maps K_t = ref^((1+it)/2) (I (x) rho_in^((-1-it)/2))
// with the universal weight b0(t) = (pi/2) / (cosh(pi t) + 1), truncated to
// |t| <= truncation and discretized by a renormalized trapezoid rule.
struct RotatedPetzFamily {
  DensityMatrix ref_xy;
  bool input_on_second = true;
  std::vector<double> t_grid;
  std::vector<double> weights;  // renormalized to sum to one
  double tail_mass = 0.0;       // weight outside the truncation window
  bool tail_warning = false;    // set when tail_mass > 1e-4
};

double beta0_weight(double t);

RotatedPetzFamily make_rotated_family(const DensityMatrix& ref_xy,
                                      bool input_on_second = true,
                                      double truncation = 8.0, int nodes = 129);

// Single rotated map at parameter t applied to an input on the family's
// input factor; output on X (x) Y.
Mat rotated_petz_apply(const RotatedPetzFamily& fam, double t, const Mat& input);

// Weighted average over the family of the lifted recovery of rho_abc.
DensityMatrix averaged_rotated_recovery(const DensityMatrix& rho_abc, RecoverWhich which,
                                        const RotatedPetzFamily& fam);
DensityMatrix averaged_rotated_recovery(const DensityMatrix& rho_abc, RecoverWhich which,
                                        double truncation = 8.0, int nodes = 129);

// Choi representation with index order input (x) output:
//   J = sum_{ij} |i><j|_in (x) Map(|i><j|)_out.
struct ChoiMatrix {
  Mat mat;
  int dim_in = 0;
  int dim_out = 0;
  // Throws unless PSD within 1e-9 and Tr_out J = I_in within 1e-8.
  void validate() const;
};

ChoiMatrix choi_of_map(const std::function<Mat(const Mat&)>& map, int dim_in);

// Channel application from the Choi form.
Mat apply_choi(const ChoiMatrix& j, const Mat& x);
// Lifted application to the last factor of a bipartite operator whose first
// factor has dimension d_first.
Mat apply_choi_to_last(const ChoiMatrix& j, const Mat& rho, int d_first);
// Adjoint of J -> apply_choi_to_last(J, rho, d_first) for fixed Hermitian
// rho, in the real Hilbert-Schmidt pairing <X, Y> = Re Tr[X^dagger Y].
Mat apply_choi_to_last_adjoint(const Mat& y, const Mat& rho, int d_first, int dim_in,
                               int dim_out);

// Largest trace of a Hermitian lambda with lambda (x) I_out <= g; this is
// the exact dual value of min over channel Choi matrices of <g, J>, solved
// by a log-det barrier with Newton steps. Also returns (via out-param) the
// barrier's primal iterate, a near-optimal channel Choi matrix.
double dual_trace_bound(const Mat& g, int d_in, int d_out, Mat* primal = nullptr);

// Choi matrix of the transpose map (kernel of the input marginal is sent to
// the maximally mixed output so the channel is trace preserving everywhere).
ChoiMatrix petz_choi(const DensityMatrix& ref_xy, bool input_on_second = true);
// Weight-averaged Choi matrix of the rotated family.
ChoiMatrix averaged_rotated_choi(const RotatedPetzFamily& fam);

// Nearest point of the CPTP set (PSD cone intersected with the
// trace-preservation affine plane) in Frobenius norm, via Dykstra.
ChoiMatrix project_to_cptp(const ChoiMatrix& j, int max_iters = 200, double tol = 1e-11);

struct RecoverySolveOptions {
  int max_iters = 2000;
  double tol = 1e-8;        // relative objective-change stop
  double truncation = 8.0;  // rotated-family window
  int nodes = 129;          // rotated-family quadrature nodes
  int dm_restarts = 6;      // measured-divergence Jacobi restarts
  double mix_eps = 1e-6;    // interior mix keeping divergence objectives finite
  std::uint64_t seed = 1;
};

struct FidelityRecoveryResult {
  double value = 0.0;  // best squared fidelity found (lower estimate)
  ChoiMatrix choi;     // recovery channel achieving it
  bool converged = false;
  int iterations = 0;
};

// sup over recovery channels of F(rho, lifted(J))^2 by projected gradient
// ascent; the transpose map and the averaged rotated family are always
// evaluated as candidates, so the result dominates both.
FidelityRecoveryResult fidelity_of_recovery(const DensityMatrix& rho_abc,
                                            RecoverWhich which = RecoverWhich::kRebuildMiddle,
                                            const RecoverySolveOptions& opts = {});

struct ReorResult {
  double value = 0.0;        // primal estimate (upper bound up to roundoff)
  double lower_bound = 0.0;  // certified convex lower bound
  double gap = 0.0;          // value - lower_bound
  ChoiMatrix choi;
  bool converged = false;
  int iterations = 0;
};

// inf over recovery channels of D(rho || lifted(J)) by projected gradient
// descent on the convex objective, with a first-order duality certificate.
ReorResult relative_entropy_of_recovery(const DensityMatrix& rho_abc,
                                        RecoverWhich which = RecoverWhich::kRebuildMiddle,
                                        const RecoverySolveOptions& opts = {});

struct RecoveryAnalysis {
  double cqmi = 0.0;
  double d_rec = 0.0;           // relative-entropy-of-recovery estimate
  double d_rec_lower = 0.0;     // its certified lower bound
  double d_m_rec = 0.0;         // measured divergence at the best recovered state
  double neg2_log_f_opt = 0.0;  // -2 ln of the best recovery fidelity
  double gap = 0.0;             // d_rec - d_rec_lower
  bool flag = false;            // certified d_rec_lower > cqmi
};

// Full chain evaluation; by construction the estimates obey
//   cqmi-side: d_m_rec <= min over evaluated recoveries of the divergence
//   fidelity side: neg2_log_f_opt <= d_m_rec
// up to roundoff, independent of optimizer quality.
RecoveryAnalysis analyze_recovery(const DensityMatrix& rho_abc,
                                  RecoverWhich which = RecoverWhich::kRebuildMiddle,
                                  const RecoverySolveOptions& opts = {});

// Per-copy divergence (1/n) D(rho^(x)n || averaged recovery of the n-copy
// state by the n-fold product of the single-copy family members).
struct RegularizedBoundReport {
  double value_per_copy = 0.0;
  double cqmi = 0.0;
  bool holds = false;  // value_per_copy <= cqmi + 1e-6
};
RegularizedBoundReport cqmi_regularized_bound_check(const DensityMatrix& rho_abc, int n,
                                                    RecoverWhich which = RecoverWhich::kRebuildMiddle,
                                                    double truncation = 8.0, int nodes = 129);

// Pure three-qubit family (slots A, B, C):
//   (1/sqrt2)|000> + (cos(theta)/sqrt2)|011> + (sin(theta)/sqrt2)|110>.
DensityMatrix fawzi_fawzi_state(double theta);

// Classical-classical-quantum state on slots (A, C, B1B2), dims {2, 2, 4}:
// uniform bits a, c with B1 = sigma_(a xor c), B2 = sigma_c.
DensityMatrix ccq_state(const Mat& sigma0, const Mat& sigma1);

// One-parameter family of qubit pure-state pairs used for counterexample
// scans; x in [1, 9]. Components are fixed up to the two square roots
// v_i = sqrt(1 - u_i^2 - w_i^2).
std::pair<Mat, Mat> violation_family(double x);

struct ScanRow {
  double x = 0.0;
  double cqmi = 0.0;
  double d_rec = 0.0;
  double d_m_rec = 0.0;
  double gap = 0.0;
  bool flag = false;
};

// Evaluates analyze_recovery on ccq states built from violation_family(x)
// for each grid value; rows are flagged when the certified lower bound on
// the recovery divergence exceeds the conditional mutual information.
std::vector<ScanRow> counterexample_scan(const std::vector<double>& xs,
                                         const RecoverySolveOptions& opts = {});

}  // namespace entroscope
