#include "doctest.h"
#include "entroscope/entropy.hpp"
#include "entroscope/hypotest.hpp"
#include "entroscope/numkernel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <set>
#include <vector>

using namespace entroscope;

namespace {

DensityMatrix diag_state(const std::vector<double>& p) {
  Mat m = Mat::Zero(p.size(), p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m(i, i) = p[i];
  return DensityMatrix(std::move(m), {static_cast<int>(p.size())});
}

// Scalar fine-grid oracle for the classical Chernoff exponent.
double scalar_chernoff_grid(const std::vector<double>& p, const std::vector<double>& q) {
  double best = 1e300;
  for (int i = 0; i <= 20000; ++i) {
    const double s = i / 20000.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p[k] > 0 && q[k] > 0) acc += std::pow(p[k], s) * std::pow(q[k], 1.0 - s);
    }
    best = std::min(best, std::log(acc));
  }
  return -best;
}

// Scalar oracle for the type-I exponent at type-II rate r, scanned in the
// substitution t = s/(1-s) so the s->1 end is covered log-densely.
double scalar_hoeffding_grid(const std::vector<double>& p, const std::vector<double>& q,
                             double r) {
  double best = 0.0;  // s = 0 gives 0 for full-support pairs
  for (int i = 0; i <= 4000; ++i) {
    const double t = std::pow(10.0, -4.0 + 10.0 * i / 4000.0);
    const double s = t / (1.0 + t);
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p[k] > 0 && q[k] > 0) acc += std::exp(s * std::log(p[k]) + (1.0 - s) * std::log(q[k]));
    }
    best = std::max(best, (-s * r - std::log(acc)) / (1.0 - s));
  }
  return best;
}

Povm random_qubit_povm(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Mat> raw;
  Mat sum = Mat::Zero(2, 2);
  for (int i = 0; i < m; ++i) {
    Mat z(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) z(a, b) = cxd(g(rng), g(rng));
    Mat e = z * z.adjoint();
    sum += e;
    raw.push_back(std::move(e));
  }
  const Mat s_half = mat_pow(sum, -0.5);
  Povm out;
  for (const Mat& e : raw) out.effects.push_back(herm(s_half * e * s_half));
  out.validate();
  return out;
}

Povm fixture_povm() {
  Povm p;
  Mat e1 = Mat::Zero(2, 2), e2 = Mat::Zero(2, 2);
  e1(0, 0) = 0.4;
  e1(1, 1) = 0.2;
  e2(0, 0) = 0.6;
  e2(1, 1) = 0.8;
  p.effects = {e1, e2};
  return p;
}

}  // namespace

TEST_CASE("stein exponent: identity, classical KL oracle, support flag") {
  std::mt19937_64 rng(41);
  const DensityMatrix rho = random_density(2, rng);
  CHECK(std::abs(stein_exponent(rho, rho).value) < 1e-10);

  const std::vector<double> p{0.2, 0.5, 0.3}, q{0.4, 0.4, 0.2};
  double kl = 0.0;
  for (int i = 0; i < 3; ++i) kl += p[i] * std::log(p[i] / q[i]);
  CHECK(stein_exponent(diag_state(p), diag_state(q)).value ==
        doctest::Approx(kl).epsilon(1e-12));

  const Vec psi = random_ket(2, rng);
  const ExponentResult viol =
      stein_exponent(rho, DensityMatrix(Mat(psi * psi.adjoint()), {2}));
  CHECK(viol.infinite);
  CHECK(std::isinf(viol.value));
}

TEST_CASE("chernoff exponent: identity, orthogonal pair, grid oracle, symmetry") {
  std::mt19937_64 rng(43);
  const DensityMatrix rho = random_density(2, rng);
  CHECK(std::abs(chernoff_exponent(rho, rho).value) < 1e-10);

  const ExponentResult orth = chernoff_exponent(
      DensityMatrix(basis_proj(0, 2), {2}), DensityMatrix(basis_proj(1, 2), {2}));
  CHECK(orth.infinite);

  const std::vector<double> p{0.8, 0.2}, q{0.3, 0.7};
  const ExponentResult cl = chernoff_exponent(diag_state(p), diag_state(q));
  CHECK(cl.value == doctest::Approx(scalar_chernoff_grid(p, q)).epsilon(1e-8));
  CHECK(cl.argmin_s > 0.0);
  CHECK(cl.argmin_s < 1.0);

  const DensityMatrix sig = random_density(2, rng);
  CHECK(std::abs(chernoff_exponent(rho, sig).value - chernoff_exponent(sig, rho).value) <
        1e-9);
}

TEST_CASE("hoeffding exponent: large-r clamp, r=0 Stein limit, grid oracle") {
  std::mt19937_64 rng(47);
  const DensityMatrix rho = random_density(2, rng);
  const DensityMatrix sig = random_density(2, rng);
  CHECK(hoeffding_exponent(rho, sig, 50.0).value == doctest::Approx(0.0));

  // Near r = 0 the exponent dips below the Stein value like sqrt(2 r V),
  // so the probe rate must be tiny for a 1e-4 comparison.
  const double stein = stein_exponent(rho, sig).value;
  CHECK(std::abs(hoeffding_exponent(rho, sig, 0.0).value - stein) < 1e-6);
  CHECK(std::abs(hoeffding_exponent(rho, sig, 1e-10).value - stein) < 1e-4);

  const std::vector<double> p{0.7, 0.3}, q{0.4, 0.6};
  const double r = 0.05;
  CHECK(hoeffding_exponent(diag_state(p), diag_state(q), r).value ==
        doctest::Approx(scalar_hoeffding_grid(p, q, r)).epsilon(1e-5));
}

TEST_CASE("minimum error probability: trivial cases and eigen-sum oracle") {
  std::mt19937_64 rng(53);
  const DensityMatrix rho = random_density(3, rng);
  CHECK(min_error_prob(rho, rho, 0.5) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK(min_error_prob(DensityMatrix(basis_proj(0, 2), {2}),
                       DensityMatrix(basis_proj(1, 2), {2}), 0.5) ==
        doctest::Approx(0.0));

  // Independent oracle: p_err = p - sum of positive eigenvalues of
  // p rho - (1-p) sigma.
  const DensityMatrix sig = random_density(3, rng);
  const double p = 0.3;
  Eigen::SelfAdjointEigenSolver<Mat> es(p * rho.mat - (1.0 - p) * sig.mat);
  double pos = 0.0;
  for (int i = 0; i < 3; ++i) pos += std::max(0.0, es.eigenvalues()(i));
  CHECK(min_error_prob(rho, sig, p) == doctest::Approx(p - pos).epsilon(1e-12));
}

TEST_CASE("discrimination power: two-axis measurement hits the closed form") {
  const Povm sg = stern_gerlach_povm(0.6);
  const ExponentResult res = discrimination_power(sg, PowerMode::kChernoff, 0.0, 8, 7);
  CHECK(std::abs(res.value - (-0.5 * std::log(1.0 - 0.36))) < 1e-6);
  CHECK(std::abs(res.argmin_s - 0.5) < 1e-3);
  CHECK(res.witness_orthogonal);

  // Closed form for other visibilities.
  for (double r : {0.3, 0.9}) {
    const ExponentResult rr =
        discrimination_power(stern_gerlach_povm(r), PowerMode::kChernoff, 0.0, 8, 7);
    CHECK(std::abs(rr.value - (-0.5 * std::log(1.0 - r * r))) < 1e-6);
  }
}

TEST_CASE("discrimination power: diagonal two-outcome POVM vs exhaustive oracle") {
  const Povm povm = fixture_povm();
  // Outcome law depends only on the top diagonal entry a of the state:
  // P = (0.2 + 0.2 a, 0.8 - 0.2 a). Exhaustive scan over diagonal pairs.
  double oracle = 0.0;
  for (int ia = 0; ia <= 100; ++ia) {
    for (int ib = 0; ib <= 100; ++ib) {
      const double a = ia / 100.0, b = ib / 100.0;
      const double v = scalar_chernoff_grid({0.2 + 0.2 * a, 0.8 - 0.2 * a},
                                            {0.2 + 0.2 * b, 0.8 - 0.2 * b});
      oracle = std::max(oracle, v);
    }
  }
  const ExponentResult res = discrimination_power(povm, PowerMode::kChernoff, 0.0, 8, 11);
  CHECK(res.value == doctest::Approx(oracle).epsilon(1e-6));
  // The optimal pair separates the diagonal as far as possible.
  const double w0 = std::real((povm.effects[0] * res.witness[0]).trace());
  const double w1 = std::real((povm.effects[0] * res.witness[1]).trace());
  CHECK(std::abs(std::abs(w0 - w1) - 0.2) < 1e-4);
}

TEST_CASE("discrimination power: degenerate POVM and unitary covariance") {
  Povm degenerate;
  degenerate.effects = {0.3 * Mat::Identity(2, 2), 0.7 * Mat::Identity(2, 2)};
  CHECK(discrimination_power(degenerate, PowerMode::kChernoff).value == 0.0);

  std::mt19937_64 rng(59);
  const Povm povm = random_qubit_povm(3, rng);
  Povm rotated;
  const Mat u = haar_unitary(2, rng);
  for (const Mat& e : povm.effects) rotated.effects.push_back(herm(u * e * u.adjoint()));
  const double v0 = discrimination_power(povm, PowerMode::kChernoff, 0.0, 12, 3).value;
  const double v1 = discrimination_power(rotated, PowerMode::kChernoff, 0.0, 12, 3).value;
  CHECK(std::abs(v0 - v1) < 1e-4);
}

TEST_CASE("mixed POVM: construction and exponent subadditivity") {
  std::mt19937_64 rng(61);
  const Povm e = random_qubit_povm(2, rng);
  const Povm g = random_qubit_povm(3, rng);
  const Povm full = mix_povms(e, g, 1.0);
  CHECK(full.effects.size() == 5);
  CHECK((full.effects[0] - e.effects[0]).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(full.effects[2].cwiseAbs().maxCoeff() < 1e-14);
  const Povm none = mix_povms(e, g, 0.0);
  CHECK(none.effects[2].cwiseAbs().maxCoeff() ==
        doctest::Approx(g.effects[0].cwiseAbs().maxCoeff()));

  for (double p : {0.25, 0.6}) {
    const Povm mixed = mix_povms(e, g, p);
    const double lhs = discrimination_power(mixed, PowerMode::kChernoff, 0.0, 10, 5).value;
    const double re = discrimination_power(e, PowerMode::kChernoff, 0.0, 10, 5).value;
    const double rg = discrimination_power(g, PowerMode::kChernoff, 0.0, 10, 5).value;
    CHECK(lhs <= p * re + (1.0 - p) * rg + 1e-3);
  }
}

TEST_CASE("finite-n discrimination: three-round reference values") {
  const Povm povm = fixture_povm();
  const DensityMatrix rho0(basis_proj(0, 2), {2});
  const DensityMatrix rho1(basis_proj(1, 2), {2});

  // (i) i.i.d. three rounds. Scalar oracle: per-sequence products of
  // (0.4, 0.6) vs (0.2, 0.8), summed over the smaller branch.
  const double oracle_iid =
      0.5 * (std::min(0.064, 0.008) + 3.0 * std::min(0.096, 0.032) +
             3.0 * std::min(0.144, 0.128) + std::min(0.216, 0.512));
  const FiniteNResult iid = finite_n_error(povm, rho0, rho1, 3);
  CHECK(iid.p_err == doctest::Approx(oracle_iid).epsilon(1e-12));
  CHECK(std::abs(iid.p_err - 0.352) < 1e-3);

  // (ii) third round swapped. Scalar oracle as above with round-3 tables
  // exchanged.
  const double oracle_swap =
      0.5 * (std::min(0.032, 0.016) + std::min(0.128, 0.024) + std::min(0.048, 0.064) +
             std::min(0.192, 0.096) + std::min(0.048, 0.064) + std::min(0.192, 0.096) +
             std::min(0.072, 0.256) + std::min(0.288, 0.384));
  const FiniteNResult sw =
      finite_n_error(povm, {rho0, rho0, rho1}, {rho1, rho1, rho0});
  CHECK(sw.p_err == doctest::Approx(oracle_swap).epsilon(1e-12));
  CHECK(std::abs(sw.p_err - 0.344) < 1e-3);

  // Acceptance region of (ii) from the hand enumeration.
  const std::set<std::vector<int>> expected{{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 0, 1}};
  const std::set<std::vector<int>> got(sw.grouping.begin(), sw.grouping.end());
  CHECK(got == expected);
}

TEST_CASE("finite-n discrimination: single round matches bipartition search") {
  std::mt19937_64 rng(67);
  const Povm povm = random_qubit_povm(3, rng);
  const DensityMatrix rho = random_density(2, rng);
  const DensityMatrix sig = random_density(2, rng);
  RVec p(3), q(3);
  for (int k = 0; k < 3; ++k) {
    p(k) = std::real((povm.effects[k] * rho.mat).trace());
    q(k) = std::real((povm.effects[k] * sig.mat).trace());
  }
  double best = 1.0;
  for (int mask = 0; mask < 8; ++mask) {
    double err = 0.0;
    for (int k = 0; k < 3; ++k) {
      if (mask & (1 << k)) err += 0.5 * q(k);
      else err += 0.5 * p(k);
    }
    best = std::min(best, err);
  }
  const FiniteNResult res = finite_n_error(povm, rho, sig, 1);
  CHECK(res.p_err == doctest::Approx(best).epsilon(1e-12));
  CHECK(res.p_err >= min_error_prob(rho, sig, 0.5) - 1e-12);
}

TEST_CASE("finite-n discrimination: error never grows with more rounds") {
  const Povm povm = fixture_povm();
  const DensityMatrix rho0(basis_proj(0, 2), {2});
  const DensityMatrix rho1(basis_proj(1, 2), {2});
  double prev = 1.0;
  for (int n = 1; n <= 5; ++n) {
    const double e = finite_n_error(povm, rho0, rho1, n).p_err;
    CHECK(e <= prev + 1e-12);
    prev = e;
  }
  CHECK_THROWS_AS((void)finite_n_error(povm, rho0, rho1, 25), cap_exceeded);
}

TEST_CASE("adaptive protocol: swap policy reference value and consistency") {
  const Povm povm = fixture_povm();
  const DensityMatrix rho0(basis_proj(0, 2), {2});
  const DensityMatrix rho1(basis_proj(1, 2), {2});

  // Keep the original orientation in round three only when both earlier
  // outcomes landed on the second effect; otherwise swap the pair.
  const AdaptivePolicy swap_policy = [&](const std::vector<int>& hist) {
    if (hist.size() < 2 || (hist[0] == 1 && hist[1] == 1)) {
      return std::make_pair(rho0, rho1);
    }
    return std::make_pair(rho1, rho0);
  };
  // Scalar oracle: forward products over the eight histories.
  const double oracle =
      0.5 * (std::min(0.032, 0.016) + std::min(0.128, 0.024) + std::min(0.048, 0.064) +
             std::min(0.192, 0.096) + std::min(0.048, 0.064) + std::min(0.192, 0.096) +
             std::min(0.144, 0.128) + std::min(0.216, 0.512));
  const double err = adaptive_finite_n(povm, swap_policy, 3);
  CHECK(err == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(std::abs(err - 0.336) < 1e-3);

  const AdaptivePolicy constant = [&](const std::vector<int>&) {
    return std::make_pair(rho0, rho1);
  };
  CHECK(adaptive_finite_n(povm, constant, 3) ==
        doctest::Approx(finite_n_error(povm, rho0, rho1, 3).p_err).epsilon(1e-12));
}

TEST_CASE("composite alternative: singleton, membership, simplex grid oracle") {
  std::mt19937_64 rng(71);
  const DensityMatrix rho = random_density(2, rng);
  const DensityMatrix s1 = random_density(2, rng);
  const DensityMatrix s2 = random_density(2, rng);

  CompositeSet single{{s1}, {1.0}};
  const double d = relative_entropy(rho, s1).value;
  for (int n : {1, 2}) {
    CHECK(composite_stein_finite_n(rho, single, n).value ==
          doctest::Approx(d).epsilon(1e-9));
  }

  CompositeSet contains{{rho, s1}, {0.5, 0.5}};
  CHECK(composite_stein_finite_n(rho, contains, 1).value < 1e-6);

  CompositeSet pair{{s1, s2}, {0.5, 0.5}};
  for (int n : {1, 2, 3}) {
    Mat s1n = s1.mat, s2n = s2.mat;
    for (int t = 1; t < n; ++t) {
      s1n = tensor(s1n, s1.mat);
      s2n = tensor(s2n, s2.mat);
    }
    Mat rn = rho.mat;
    for (int t = 1; t < n; ++t) rn = tensor(rn, rho.mat);
    double grid_best = 1e300;
    for (int i = 0; i <= 1000; ++i) {
      const double mu = i / 1000.0;
      grid_best = std::min(
          grid_best, relative_entropy(rn, Mat(mu * s1n + (1.0 - mu) * s2n)).value);
    }
    const CompositeSteinResult res = composite_stein_finite_n(rho, pair, n);
    CHECK(std::abs(res.value - grid_best / n) < 1e-5);
    CHECK(res.weights.size() == 2);
  }
}

TEST_CASE("pinching: commuting collapse, tensor-square spectrum bound") {
  const DensityMatrix rho = diag_state({0.7, 0.3});
  const DensityMatrix sig = diag_state({0.4, 0.6});
  const PinchingResult comm = pinching_gap(rho, sig);
  CHECK(std::abs(comm.d - comm.d_pinched) < 1e-12);

  std::mt19937_64 rng(73);
  const DensityMatrix s = random_density(2, rng);
  const DensityMatrix s2 = tensor(s, s);
  const DensityMatrix r2 = random_density({2, 2}, rng);
  const PinchingResult res = pinching_gap(r2, s2);
  CHECK(res.spectrum_size == 3);
  CHECK(res.d - res.d_pinched >= -1e-10);
  CHECK(res.d - res.d_pinched <= std::log(3.0) + 1e-9);

  const PinchingResult same = pinching_gap(s2, s2);
  CHECK(std::abs(same.d) < 1e-10);
  CHECK(std::abs(same.d_pinched) < 1e-10);

  CHECK_THROWS_AS((void)pinching_gap(r2, random_density({2, 2}, rng)),
                  std::invalid_argument);
}

TEST_CASE("projective threshold test: limits and exponential bounds") {
  std::mt19937_64 rng(79);
  const DensityMatrix rho = random_density(2, rng);
  const DensityMatrix sig = random_density(2, rng);

  const AudenaertResult low = audenaert_test(rho, sig, 2, 0.5, -50.0);
  CHECK(low.type1 < 1e-12);
  const AudenaertResult high = audenaert_test(rho, sig, 2, 0.5, 50.0);
  CHECK(high.type2 < 1e-12);

  // Threshold chosen so the type-I bound equals eps.
  const double s = 0.5, eps = 0.05;
  const double q = std::real((mat_pow(rho.mat, s) * mat_pow(sig.mat, 1.0 - s)).trace());
  const double lambda = (std::log(eps) - 2.0 * std::log(q)) / (1.0 - s);
  const AudenaertResult res = audenaert_test(rho, sig, 2, s, lambda);
  CHECK(res.bounds_hold);
  CHECK(res.type1 <= eps + 1e-12);
  CHECK(res.bound1 == doctest::Approx(eps).epsilon(1e-9));
}
