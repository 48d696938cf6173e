#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "entroscope/types.hpp"

namespace entroscope {

// Result of an exponent computation. `value` is in nats per copy.
// `infinite` marks exponents that diverge (orthogonal pair or support
// violation); `value` is +inf in that case. `argmin_s` is the inner
// optimizer location when one exists (NaN otherwise). For the
// discrimination-power search, `witness` holds the best state pair found
// and `witness_orthogonal` records whether that pair is orthogonal
// (observed, never assumed).
struct ExponentResult {
  double value = 0.0;
  double argmin_s = std::numeric_limits<double>::quiet_NaN();
  bool infinite = false;
  std::vector<Mat> witness;
  bool witness_orthogonal = false;
};

// Finitely supported alternative hypothesis: states with mixing weights.
struct CompositeSet {
  std::vector<DensityMatrix> states;
  std::vector<double> weights;
  void validate() const;  // weights >= 0, sum 1, common dimension
};

// Classical exponents of finite outcome distributions. Entries of p and q
// must be nonnegative; they are normalized internally.
double classical_kl(const RVec& p, const RVec& q);
// -min_{s in [0,1]} ln sum_k p_k^s q_k^{1-s}; argmin returned if non-null.
double classical_chernoff(const RVec& p, const RVec& q, double s_tol = 1e-8,
                          double* argmin_s = nullptr);
// sup_{0 <= s < 1} (-s r - ln sum_k p_k^s q_k^{1-s}) / (1 - s).
double classical_hoeffding(const RVec& p, const RVec& q, double r,
                           double s_tol = 1e-8, double* argmax_s = nullptr);

// Best asymptotic exponent of the type-II error at vanishing type-I error.
ExponentResult stein_exponent(const DensityMatrix& rho, const DensityMatrix& sigma);

// Best symmetric-error exponent: -min_{s in [0,1]} ln Tr rho^s sigma^(1-s),
// located by coarse grid plus golden-section refinement to s_tol.
ExponentResult chernoff_exponent(const DensityMatrix& rho, const DensityMatrix& sigma,
                                 double s_tol = 1e-8);

// Best type-I exponent given the type-II exponent is at least r.
ExponentResult hoeffding_exponent(const DensityMatrix& rho, const DensityMatrix& sigma,
                                  double r, double s_tol = 1e-8);

// Optimal single-shot error probability for priors (prior, 1-prior).
double min_error_prob(const DensityMatrix& rho, const DensityMatrix& sigma,
                      double prior);

enum class PowerMode { kChernoff, kStein, kHoeffding };

// Largest classical exponent achievable through the measurement: optimizes
// the exponent of the outcome distributions over input state pairs by
// multi-start simplex ascent (Bloch parameterization in dimension two,
// square-root factors otherwise). Restarts run in parallel, each with its
// own RNG stream derived from `seed`; results merge deterministically.
ExponentResult discrimination_power(const Povm& povm, PowerMode mode,
                                    double r = 0.0, int restarts = 32,
                                    std::uint64_t seed = 1);

// Concatenates {p E_i} and {(1-p) G_j} into one measurement.
Povm mix_povms(const Povm& e, const Povm& g, double p);

// Rank-one qubit measurement over a Fibonacci-sphere direction set,
// symmetrized so the effects sum to the identity.
Povm covariant_qubit_povm(int n_dirs);

// Two-outcome qubit measurement {(I + r Z)/2, (I - r Z)/2} with
// visibility r in [0, 1].
Povm stern_gerlach_povm(double r);

struct FiniteNResult {
  double p_err = 0.0;
  // Outcome-index sequences assigned to the first hypothesis.
  std::vector<std::vector<int>> grouping;
};

// Exact minimum error of n product-measurement rounds with equal priors,
// by per-sequence likelihood comparison (optimal post-processing).
// Round t under the first/second hypothesis emits rho_rounds[t] /
// sigma_rounds[t]. Throws cap_exceeded when m^n > kSequenceCap.
FiniteNResult finite_n_error(const Povm& povm,
                             const std::vector<DensityMatrix>& rho_rounds,
                             const std::vector<DensityMatrix>& sigma_rounds);
FiniteNResult finite_n_error(const Povm& povm, const DensityMatrix& rho,
                             const DensityMatrix& sigma, int n);

// Maps the outcome history so far to the state pair used next round.
using AdaptivePolicy =
    std::function<std::pair<DensityMatrix, DensityMatrix>(const std::vector<int>&)>;

// Exact error of an adaptive protocol by forward enumeration of outcome
// histories. Throws cap_exceeded when m^n > kSequenceCap.
double adaptive_finite_n(const Povm& povm, const AdaptivePolicy& policy, int n);

struct CompositeSteinResult {
  double value = 0.0;              // (1/n) min_mu D(rho^n || sum_i mu_i sigma_i^n)
  std::vector<double> weights;     // optimal mixing weights
  bool infinite = false;           // alternative cannot cover rho's support
};

// Convex minimization over mixing weights by projected gradient on the
// simplex, to tolerance tol on the objective.
CompositeSteinResult composite_stein_finite_n(const DensityMatrix& rho,
                                              const CompositeSet& alt, int n,
                                              double tol = 1e-7);

struct PinchingResult {
  double d = 0.0;          // relative entropy before pinching
  double d_pinched = 0.0;  // after pinching to sigma's eigenspaces
  int spectrum_size = 0;   // number of distinct eigenvalues of sigma
};

// Dephases rho into the eigenspaces of a permutation-invariant sigma and
// reports both divergences. Throws if sigma is not permutation invariant.
PinchingResult pinching_gap(const DensityMatrix& rho_n, const DensityMatrix& sigma_n);

struct AudenaertResult {
  double type1 = 0.0;   // Tr[(1 - M) rho^n] for M = {rho^n - e^l sigma^n}_+
  double type2 = 0.0;   // Tr[M sigma^n]
  double bound1 = 0.0;  // e^((1-s) l) (Tr rho^s sigma^(1-s))^n
  double bound2 = 0.0;  // e^(-s l) (Tr rho^s sigma^(1-s))^n
  bool bounds_hold = false;
};

// Evaluates the Holevo-Helstrom projective test at threshold lambda on n
// copies and checks both exponential error bounds, s in (0,1).
AudenaertResult audenaert_test(const DensityMatrix& rho, const DensityMatrix& sigma,
                               int n, double s, double lambda);

}  // namespace entroscope
