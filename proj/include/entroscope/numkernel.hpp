#pragma once

#include <functional>
#include <random>
#include <utility>

#include "entroscope/types.hpp"

namespace entroscope {

// Kronecker product; the first factor owns the most significant index.
Mat tensor(const Mat& a, const Mat& b);
Mat tensor(const std::vector<Mat>& factors);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

// Reduced state on the kept subsystems (zero-based indices, ascending order
// of the original layout is preserved).
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

// Same contraction for a general operator with an explicit dimension list.
Mat partial_trace_mat(const Mat& m, const std::vector<int>& dims, const std::vector<int>& keep);

struct Eigh {
  RVec vals;  // ascending
  Mat vecs;   // unitary, columns are eigenvectors
};
// Hermitian eigendecomposition; throws if the input is not Hermitian.
Eigh eigh(const Mat& h);

// U f(Lambda) U^dagger on a Hermitian input.
Mat matfun(const Mat& h, const std::function<cxd(double)>& f);

// Pseudo-powers: eigenvalues inside [-kEigEps, kEigEps] map to 0, so negative
// and fractional exponents act on the support only.
Mat mat_pow(const Mat& h, double p);
Mat mat_pow(const Mat& h, cxd p);
Mat mat_sqrt(const Mat& h);
Mat mat_exp(const Mat& h);
// Natural log on the support; the kernel contributes nothing.
Mat mat_log_support(const Mat& h);

// Uhlmann fidelity F = ||sqrt(rho) sqrt(sigma)||_1, in [0,1].
double fidelity(const Mat& rho, const Mat& sigma);
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// Sum of singular values.
double trace_norm(const Mat& m);

struct PositivePart {
  Mat projector;  // spectral projector onto eigenvalues > kEigEps
  Mat projected;  // the operator restricted to that eigenspace
};
PositivePart positive_part(const Mat& h);

// Hermitization helper for operators polluted by roundoff.
Mat herm(const Mat& m);

// Reorders tensor factors: slot i of the result is factor perm[i] of the
// input, so the result dimensions are dims[perm[0]], dims[perm[1]], ...
Mat permute_subsystems(const Mat& m, const std::vector<int>& dims,
                       const std::vector<int>& perm);
DensityMatrix permute_subsystems(const DensityMatrix& rho,
                                 const std::vector<int>& perm);

// Frechet derivative of the matrix log at sigma, applied to x: the Loewner
// divided-difference kernel of ln in sigma's eigenbasis, with eigenvalues
// clamped to kEigEps. Hermitian for Hermitian x.
Mat dlog_transform(const Mat& sigma, const Mat& x);

// Computational-basis helpers.
Vec basis_ket(int i, int d);
Mat basis_proj(int i, int d);

// Pauli matrices and Bloch-ball states (I + u.sigma)/2.
Mat pauli_x();
Mat pauli_y();
Mat pauli_z();
Mat bloch_state(double ux, double uy, double uz);

// Samplers; the RNG is always passed in, no global state anywhere.
Mat haar_unitary(int d, std::mt19937_64& rng);
Vec random_ket(int d, std::mt19937_64& rng);
DensityMatrix random_density(int d, std::mt19937_64& rng);
DensityMatrix random_density(const std::vector<int>& dims, std::mt19937_64& rng);

// Golden-section minimizer for a unimodal function on [lo, hi].
// Returns {argmin, min value}; stops when the bracket is narrower than xtol.
std::pair<double, double> golden_min(const std::function<double(double)>& f,
                                     double lo, double hi, double xtol,
                                     int max_iter = 200);

struct NelderMeadResult {
  RVec x;
  double value;
  int iterations;
};
// Downhill-simplex minimizer; step sets the initial simplex edge length.
NelderMeadResult nelder_mead(const std::function<double(const RVec&)>& f,
                             const RVec& x0, double step, int max_iter,
                             double tol);

// Worker count: ENTROSCOPE_THREADS if set, else hardware concurrency.
int thread_count();
// Runs body(0..n-1) across worker threads. Results must be written to
// per-index slots by the caller so the merge is deterministic.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace entroscope
