#pragma once

#include <random>

#include "entroscope/types.hpp"

namespace entroscope {

// Divergence result in nats; value is +infinity exactly when the support
// condition failed and the flag is set.
struct EntropyReport {
  double value = 0.0;
  bool support_violation = false;
};

// H(rho) = -Tr rho ln rho, in nats.
double von_neumann(const DensityMatrix& rho);
double von_neumann(const Mat& rho);

// H(rest | cond) = H(all) - H(cond); cond lists zero-based subsystems.
double conditional_entropy(const DensityMatrix& rho, const std::vector<int>& cond);

// I(A:B) = H(A) + H(B) - H(AB); subsystems outside a,b are traced out first.
double mutual_information(const DensityMatrix& rho, const std::vector<int>& a,
                          const std::vector<int>& b);

// I(A:B|C) = H(AC) + H(BC) - H(ABC) - H(C).
double cqmi(const DensityMatrix& rho, const std::vector<int>& a, const std::vector<int>& b,
            const std::vector<int>& c);

// D(rho||sigma) = Tr rho (ln rho - ln sigma); infinity + flag on support failure.
EntropyReport relative_entropy(const Mat& rho, const Mat& sigma);
EntropyReport relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

// Maximum over rank-one projective measurements of the classical KL divergence
// of the outcome distributions. Multi-start Jacobi-rotation ascent; seeds
// include the eigenbases of rho, sigma, rho+sigma and the Fuchs-Caves basis,
// so the result always dominates -2 ln F(rho, sigma). Throws when
// supp(rho) is not contained in supp(sigma).
double measured_relative_entropy(const Mat& rho, const Mat& sigma, int restarts, double tol,
                                 std::mt19937_64& rng);

// Measured relative entropy for one fixed orthonormal basis (columns of u).
double measured_relative_entropy_in_basis(const Mat& rho, const Mat& sigma, const Mat& u);

// Petz-Renyi divergence (1/(s-1)) ln Tr[rho^s sigma^(1-s)], s in (0,1) u (1,inf).
EntropyReport petz_divergence(const Mat& rho, const Mat& sigma, double s);

// Sandwiched Renyi divergence (1/(s-1)) ln Tr[(sigma^((1-s)/2s) rho sigma^((1-s)/2s))^s].
EntropyReport sandwiched_divergence(const Mat& rho, const Mat& sigma, double s);

// phi(s) = ln Tr[rho^s sigma^(1-s)] for s in [0,1]; -infinity on orthogonal supports.
double chernoff_phi(double s, const Mat& rho, const Mat& sigma);

// Binary entropy in nats and its inverse on [0, ln2] -> [0, 1/2].
double binary_entropy(double p);
double binary_entropy_inv(double h);

// D_C(rho) = H(diag rho) - H(rho), computational basis.
double coherence_relative_entropy(const DensityMatrix& rho);

struct RenyiMiReport {
  double value = 0.0;
  bool converged = false;
  int iters = 0;
};

// inf over product states sigma_A (x) sigma_B of the Petz divergence, via
// alternating closed-form marginal updates; s in (0,1).
RenyiMiReport renyi_mutual_information(const DensityMatrix& rho_ab, double s, double tol,
                                       int max_iters = 500);

}  // namespace entroscope
