#include "doctest.h"
#include "entroscope/recovery.hpp"

#include <cmath>
#include <random>

#include "entroscope/entropy.hpp"
#include "entroscope/numkernel.hpp"

using namespace entroscope;

namespace {

Mat random_herm(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = cxd(g(rng), g(rng));
  return herm(m);
}

// Classical slot2 conditioning the other two: zero conditional mutual
// information between slots 0 and 1 given slot 2.
DensityMatrix markov_middle(std::mt19937_64& rng) {
  const double p[2] = {0.3, 0.7};
  Mat acc = Mat::Zero(8, 8);
  for (int c = 0; c < 2; ++c) {
    acc += p[c] * tensor(tensor(random_density(2, rng).mat, random_density(2, rng).mat),
                         basis_proj(c, 2));
  }
  return DensityMatrix(std::move(acc), {2, 2, 2});
}

// Classical slot1: zero conditional mutual information between slots 0 and 2
// given slot 1.
DensityMatrix markov_last(std::mt19937_64& rng) {
  const double p[2] = {0.4, 0.6};
  Mat acc = Mat::Zero(8, 8);
  for (int b = 0; b < 2; ++b) {
    acc += p[b] * tensor(tensor(random_density(2, rng).mat, basis_proj(b, 2)),
                         random_density(2, rng).mat);
  }
  return DensityMatrix(std::move(acc), {2, 2, 2});
}

Mat pure_pair_second(double f) {
  Vec psi(2);
  psi << f, std::sqrt(1.0 - f * f);
  return Mat(psi * psi.adjoint());
}

RecoverySolveOptions quick_opts(int iters) {
  RecoverySolveOptions o;
  o.max_iters = iters;
  o.nodes = 65;
  o.dm_restarts = 3;
  return o;
}

}  // namespace

TEST_CASE("transpose map rebuilds product and conditioned states") {
  std::mt19937_64 rng(11);
  const DensityMatrix rb = random_density(2, rng);
  const DensityMatrix rc = random_density(3, rng);
  const DensityMatrix ref(tensor(rb.mat, rc.mat), {2, 3});
  const DensityMatrix tau = random_density(3, rng);
  // Product reference: the map tensors the input with the other marginal.
  CHECK((petz_map_apply(ref, tau.mat) - tensor(rb.mat, tau.mat)).cwiseAbs().maxCoeff() < 1e-10);

  // Trace preservation on a full-rank reference.
  const DensityMatrix ref2 = random_density({2, 2}, rng);
  const DensityMatrix in2 = random_density(2, rng);
  CHECK(petz_map_apply(ref2, in2.mat).trace().real() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(petz_map_apply(ref2, in2.mat, false).trace().real() ==
        doctest::Approx(1.0).epsilon(1e-9));

  // Independently composed factors reproduce the same action.
  const Mat k = mat_sqrt(ref2.mat) *
                tensor(Mat::Identity(2, 2), mat_pow(partial_trace(ref2, {1}).mat, -0.5));
  const Mat direct = k * tensor(Mat::Identity(2, 2), in2.mat) * k.adjoint();
  CHECK((petz_map_apply(ref2, in2.mat) - direct).cwiseAbs().maxCoeff() < 1e-11);

  // States with a classical conditioning slot are rebuilt exactly.
  const DensityMatrix mm = markov_middle(rng);
  CHECK(cqmi(mm, {0}, {1}, {2}) < 1e-10);
  const DensityMatrix rec = petz_recovered_state(mm, RecoverWhich::kRebuildMiddle);
  CHECK((rec.mat - mm.mat).cwiseAbs().maxCoeff() < 1e-8);
  CHECK_NOTHROW(rec.validate());

  const DensityMatrix ml = markov_last(rng);
  CHECK(cqmi(ml, {0}, {2}, {1}) < 1e-10);
  const DensityMatrix rec2 = petz_recovered_state(ml, RecoverWhich::kRebuildLast);
  CHECK((rec2.mat - ml.mat).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("transpose-map recovery of pure-pair ccq states matches closed forms") {
  for (double f : {0.6, 0.25}) {
    const Mat s0 = basis_proj(0, 2);
    const Mat s1 = pure_pair_second(f);
    const DensityMatrix tau = ccq_state(s0, s1);

    // Rebuilding the middle slot from the last.
    const DensityMatrix recm = petz_recovered_state(tau, RecoverWhich::kRebuildMiddle);
    const double got_mid = -2.0 * std::log(fidelity(tau.mat, recm.mat));
    const double want_mid =
        -std::log(0.5 * (1.0 + f * f + std::pow(1.0 - f * f, 1.5)));
    CHECK(got_mid == doctest::Approx(want_mid).epsilon(1e-7));

    // Rebuilding the first slot, reached by swapping the two classical slots.
    const DensityMatrix taup = permute_subsystems(tau, {1, 0, 2});
    const DensityMatrix reca = petz_recovered_state(taup, RecoverWhich::kRebuildMiddle);
    const double got_first = -2.0 * std::log(fidelity(taup.mat, reca.mat));
    const double want_first = -std::log(
        0.5 * (1.0 + std::pow(f, 4) + (1.0 - f * f) * std::sqrt(1.0 + f * f)));
    CHECK(got_first == doctest::Approx(want_first).epsilon(1e-7));
  }
}

TEST_CASE("rotated family weights, reduction and covariance") {
  CHECK(beta0_weight(0.0) == doctest::Approx(3.14159265358979323846 / 4.0).epsilon(1e-14));

  std::mt19937_64 rng(13);
  const DensityMatrix ref = random_density({2, 2}, rng);
  const RotatedPetzFamily fam = make_rotated_family(ref, true, 8.0, 129);
  double wsum = 0.0;
  for (double w : fam.weights) wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fam.tail_mass < 1e-10);
  CHECK_FALSE(fam.tail_warning);
  // Raw trapezoid mass agrees with the analytic window weight.
  double raw = 0.0;
  const double h = 16.0 / 128.0;
  for (int i = 0; i < 129; ++i) {
    const double t = -8.0 + h * i;
    raw += beta0_weight(t) * h * ((i == 0 || i == 128) ? 0.5 : 1.0);
  }
  CHECK(raw == doctest::Approx(1.0 - fam.tail_mass).epsilon(1e-9));

  const RotatedPetzFamily narrow = make_rotated_family(ref, true, 1.0, 65);
  CHECK(narrow.tail_mass == doctest::Approx(1.0 - std::tanh(1.5707963267948966)).epsilon(1e-12));
  CHECK(narrow.tail_warning);

  const DensityMatrix tau = random_density(2, rng);
  CHECK((rotated_petz_apply(fam, 0.0, tau.mat) - petz_map_apply(ref, tau.mat))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  CHECK(rotated_petz_apply(fam, 1.7, tau.mat).trace().real() ==
        doctest::Approx(1.0).epsilon(1e-9));

  // Covariance under a unitary on the input factor.
  const Mat u = haar_unitary(2, rng);
  const Mat lift = tensor(Mat::Identity(2, 2), u);
  const DensityMatrix refu(lift * ref.mat * lift.adjoint(), {2, 2});
  const RotatedPetzFamily famu = make_rotated_family(refu, true, 8.0, 129);
  const Mat lhs = rotated_petz_apply(famu, 0.9, Mat(u * tau.mat * u.adjoint()));
  const Mat rhs = lift * rotated_petz_apply(fam, 0.9, tau.mat) * lift.adjoint();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("averaged rotated recovery is exact on conditioned states and refines stably") {
  std::mt19937_64 rng(17);
  const DensityMatrix mm = markov_middle(rng);
  const DensityMatrix avg = averaged_rotated_recovery(mm, RecoverWhich::kRebuildMiddle);
  CHECK((avg.mat - mm.mat).cwiseAbs().maxCoeff() < 1e-6);
  CHECK_NOTHROW(avg.validate());

  const DensityMatrix rho = random_density({2, 2, 2}, rng);
  const DensityMatrix a129 = averaged_rotated_recovery(rho, RecoverWhich::kRebuildMiddle, 8.0, 129);
  const DensityMatrix a257 = averaged_rotated_recovery(rho, RecoverWhich::kRebuildMiddle, 8.0, 257);
  CHECK((a129.mat - a257.mat).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(a129.mat.trace().real() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("choi calculus") {
  std::mt19937_64 rng(19);

  ChoiMatrix ident = choi_of_map([](const Mat& x) { return x; }, 3);
  CHECK_NOTHROW(ident.validate());
  const Mat x3 = random_herm(3, rng);
  CHECK((apply_choi(ident, x3) - x3).cwiseAbs().maxCoeff() < 1e-12);

  ChoiMatrix dep;
  dep.dim_in = 2;
  dep.dim_out = 2;
  dep.mat = tensor(Mat::Identity(2, 2), Mat::Identity(2, 2) / 2.0);
  CHECK_NOTHROW(dep.validate());
  const Mat x2 = random_herm(2, rng);
  CHECK((apply_choi(dep, x2) - x2.trace() * Mat::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() <
        1e-12);

  // Transpose-map Choi matrices are channels, also on rank-deficient
  // references thanks to the kernel completion.
  const DensityMatrix ref = random_density({2, 2}, rng);
  const ChoiMatrix jp = petz_choi(ref);
  CHECK_NOTHROW(jp.validate());
  const DensityMatrix tau = random_density(2, rng);
  CHECK((apply_choi(jp, tau.mat) - petz_map_apply(ref, tau.mat)).cwiseAbs().maxCoeff() < 1e-11);

  const DensityMatrix lowrank(tensor(random_density(2, rng).mat, basis_proj(0, 2)), {2, 2});
  CHECK_NOTHROW(petz_choi(lowrank).validate());

  // Lifted application agrees with the directly recovered state.
  const DensityMatrix rho = random_density({2, 2, 2}, rng);
  const DensityMatrix ref3 = partial_trace(rho, {1, 2});
  const ChoiMatrix j3 = petz_choi(ref3);
  const Mat marg = partial_trace(rho, {0, 2}).mat;
  const Mat lifted = apply_choi_to_last(j3, marg, 2);
  const Mat direct = petz_recovered_state(rho, RecoverWhich::kRebuildMiddle).mat;
  CHECK((lifted - direct).cwiseAbs().maxCoeff() < 1e-11);

  // Adjoint identity of the lifting in the real pairing.
  const Mat y = random_herm(8, rng);
  const Mat jrand = random_herm(8, rng);
  ChoiMatrix jr;
  jr.dim_in = 2;
  jr.dim_out = 4;
  jr.mat = jrand;
  const double lhs = (y.adjoint() * apply_choi_to_last(jr, marg, 2)).trace().real();
  const Mat adj = apply_choi_to_last_adjoint(y, marg, 2, 2, 4);
  const double rhs = (adj.adjoint() * jrand).trace().real();
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

  // Projection returns members of the channel set unchanged and repairs
  // perturbed ones.
  const ChoiMatrix fixed = project_to_cptp(jp);
  CHECK((fixed.mat - jp.mat).cwiseAbs().maxCoeff() < 1e-9);
  ChoiMatrix noisy = jp;
  noisy.mat += 0.05 * random_herm(static_cast<int>(jp.mat.rows()), rng);
  const ChoiMatrix repaired = project_to_cptp(noisy);
  CHECK_NOTHROW(repaired.validate());
}

TEST_CASE("dual trace bound solves the channel linear program") {
  std::mt19937_64 rng(23);

  // g = lam0 (x) I makes the answer Tr lam0.
  const Mat lam0 = random_herm(2, rng);
  const Mat g1 = tensor(lam0, Mat::Identity(3, 3));
  CHECK(dual_trace_bound(g1, 2, 3) == doctest::Approx(lam0.trace().real()).epsilon(1e-7));

  // Block-diagonal g decouples into per-block smallest eigenvalues.
  Mat g2 = Mat::Zero(6, 6);
  double want = 0.0;
  for (int c = 0; c < 2; ++c) {
    const Mat block = random_herm(3, rng);
    g2.block(3 * c, 3 * c, 3, 3) = block;
    want += eigh(block).vals.minCoeff();
  }
  CHECK(dual_trace_bound(g2, 2, 3) == doctest::Approx(want).epsilon(1e-7));

  // The bound sits below <g, J> for every channel.
  const Mat g3 = random_herm(8, rng);
  Mat primal;
  const double dual = dual_trace_bound(g3, 2, 4, &primal);
  for (int trial = 0; trial < 5; ++trial) {
    ChoiMatrix raw;
    raw.dim_in = 2;
    raw.dim_out = 4;
    raw.mat = random_herm(8, rng);
    const ChoiMatrix feas = project_to_cptp(raw);
    const double val = (g3.adjoint() * feas.mat).trace().real();
    CHECK(dual <= val + 1e-8);
  }
  // The barrier primal is nearly feasible and nearly optimal.
  ChoiMatrix prim;
  prim.dim_in = 2;
  prim.dim_out = 4;
  prim.mat = primal;
  const ChoiMatrix prim_feas = project_to_cptp(prim);
  const double pval = (g3.adjoint() * prim_feas.mat).trace().real();
  CHECK(pval - dual < 1e-5);
  CHECK(dual <= pval + 1e-8);
}

TEST_CASE("relative entropy of recovery") {
  std::mt19937_64 rng(29);
  const RecoverySolveOptions opts = quick_opts(400);

  const DensityMatrix mm = markov_middle(rng);
  const ReorResult rm = relative_entropy_of_recovery(mm, RecoverWhich::kRebuildMiddle, opts);
  CHECK(rm.value < 1e-5);
  CHECK(rm.lower_bound <= rm.value + 1e-9);
  CHECK(rm.gap == doctest::Approx(rm.value - rm.lower_bound).epsilon(1e-12));
  CHECK_NOTHROW(rm.choi.validate());

  for (std::uint64_t seed : {101ULL, 202ULL}) {
    std::mt19937_64 r2(seed);
    const DensityMatrix rho = random_density({2, 2, 2}, r2);
    const ReorResult res = relative_entropy_of_recovery(rho, RecoverWhich::kRebuildMiddle, opts);
    CHECK(res.value >= -1e-12);
    CHECK(res.lower_bound <= res.value + 1e-9);
    CHECK_NOTHROW(res.choi.validate());

    // The reported value is attained by the reported channel.
    const Mat marg = partial_trace(rho, {0, 2}).mat;
    const Mat sigma = herm(apply_choi_to_last(res.choi, marg, 2));
    CHECK(relative_entropy(rho.mat, sigma).value == doctest::Approx(res.value).epsilon(1e-8));

    // Measured divergence at the recovered state stays below the value.
    std::mt19937_64 r3(7);
    CHECK(measured_relative_entropy(rho.mat, sigma, 4, 1e-7, r3) <= res.value + 1e-6);

    // The optimizer never does worse than the plain transpose-map candidate.
    const Mat petz_rec = petz_recovered_state(rho, RecoverWhich::kRebuildMiddle).mat;
    const Mat dep_state = tensor(partial_trace(rho, {0}).mat, Mat::Identity(4, 4) / 4.0);
    const Mat petz_mixed = (1.0 - opts.mix_eps) * petz_rec + opts.mix_eps * dep_state;
    CHECK(res.value <= relative_entropy(rho.mat, petz_mixed).value + 1e-9);
    // Against the unmixed candidate the interior mixing costs at most
    // -log1p(-mix_eps).
    CHECK(res.value <= relative_entropy(rho.mat, petz_rec).value + 2.0 * opts.mix_eps);
  }
}

TEST_CASE("fidelity of recovery") {
  std::mt19937_64 rng(31);
  const RecoverySolveOptions opts = quick_opts(400);

  const DensityMatrix mm = markov_middle(rng);
  const FidelityRecoveryResult fm = fidelity_of_recovery(mm, RecoverWhich::kRebuildMiddle, opts);
  CHECK(fm.value > 1.0 - 1e-6);
  CHECK_NOTHROW(fm.choi.validate());

  for (std::uint64_t seed : {303ULL, 404ULL}) {
    std::mt19937_64 r2(seed);
    const DensityMatrix rho = random_density({2, 2, 2}, r2);
    const FidelityRecoveryResult res =
        fidelity_of_recovery(rho, RecoverWhich::kRebuildMiddle, opts);
    CHECK(res.value <= 1.0 + 1e-12);
    const double fpetz = fidelity(rho.mat, petz_recovered_state(rho, RecoverWhich::kRebuildMiddle).mat);
    CHECK(res.value >= fpetz * fpetz - 1e-9);
    // Squared recovery fidelity dominates exp(-cqmi).
    CHECK(res.value >= std::exp(-cqmi(rho, {0}, {1}, {2})) - 1e-6);
    CHECK_NOTHROW(res.choi.validate());
  }
}

TEST_CASE("analysis chain holds by construction") {
  std::mt19937_64 rng(37);
  const RecoverySolveOptions opts = quick_opts(300);

  const DensityMatrix mm = markov_middle(rng);
  const RecoveryAnalysis am = analyze_recovery(mm, RecoverWhich::kRebuildMiddle, opts);
  CHECK(am.cqmi < 1e-10);
  CHECK(am.d_m_rec <= 1e-5);
  CHECK(am.neg2_log_f_opt <= 1e-5);
  CHECK_FALSE(am.flag);

  for (std::uint64_t seed : {505ULL, 606ULL, 707ULL}) {
    std::mt19937_64 r2(seed);
    const DensityMatrix rho = random_density({2, 2, 2}, r2);
    const RecoveryAnalysis a = analyze_recovery(rho, RecoverWhich::kRebuildMiddle, opts);
    CHECK(a.cqmi >= -1e-9);
    CHECK(a.neg2_log_f_opt <= a.d_m_rec + 1e-5);
    CHECK(a.d_m_rec <= a.cqmi + 1e-5);
    CHECK(a.d_m_rec <= a.d_rec + 1e-5);
    CHECK(a.gap >= -1e-9);
  }
}

TEST_CASE("ccq states and their conditional mutual information") {
  std::mt19937_64 rng(41);

  // Identical pure letters make the state a full product.
  const Mat s = pure_pair_second(0.8);
  const DensityMatrix same = ccq_state(s, s);
  CHECK_NOTHROW(same.validate());
  CHECK(cqmi(same, {0}, {1}, {2}) < 1e-10);

  // Orthogonal letters reveal both classical bits through the quantum pair,
  // so conditioning on the full pair leaves nothing; conditioning on the
  // first letter alone leaves one bit.
  const DensityMatrix orth = ccq_state(basis_proj(0, 2), basis_proj(1, 2));
  CHECK(cqmi(orth, {0}, {1}, {2}) < 1e-10);
  const DensityMatrix orth4(orth.mat, {2, 2, 2, 2});
  CHECK(cqmi(orth4, {0}, {1}, {2}) == doctest::Approx(kLn2).epsilon(1e-10));

  const DensityMatrix rnd = ccq_state(random_density(2, rng).mat, random_density(2, rng).mat);
  CHECK_NOTHROW(rnd.validate());
  CHECK(cqmi(rnd, {0}, {1}, {2}) >= -1e-9);

  CHECK_THROWS_AS(ccq_state(Mat::Identity(3, 3) / 3.0, basis_proj(0, 2)),
                  std::invalid_argument);
}

TEST_CASE("pure three-qubit family") {
  const double theta = 0.7;
  const DensityMatrix rho = fawzi_fawzi_state(theta);
  CHECK_NOTHROW(rho.validate());
  CHECK((rho.mat * rho.mat).trace().real() == doctest::Approx(1.0).epsilon(1e-12));

  const double c2 = std::cos(theta) * std::cos(theta);
  const double s2 = std::sin(theta) * std::sin(theta);
  const Mat ra = partial_trace(rho, {0}).mat;
  CHECK(ra(0, 0).real() == doctest::Approx((1.0 + c2) / 2.0).epsilon(1e-12));
  CHECK(ra(1, 1).real() == doctest::Approx(s2 / 2.0).epsilon(1e-12));
  CHECK(std::abs(ra(0, 1)) < 1e-12);
  const Mat rc = partial_trace(rho, {2}).mat;
  CHECK(rc(0, 0).real() == doctest::Approx((1.0 + s2) / 2.0).epsilon(1e-12));
  CHECK(rc(1, 1).real() == doctest::Approx(c2 / 2.0).epsilon(1e-12));
  const Mat rb = partial_trace(rho, {1}).mat;
  CHECK((rb - Mat::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() < 1e-12);

  // theta = 0 splits off the first qubit, so the last is rebuilt exactly.
  const DensityMatrix flat = fawzi_fawzi_state(0.0);
  CHECK(cqmi(flat, {0}, {2}, {1}) < 1e-9);
  const DensityMatrix rec = petz_recovered_state(flat, RecoverWhich::kRebuildLast);
  CHECK(fidelity(flat.mat, rec.mat) > 1.0 - 1e-9);

  CHECK(cqmi(rho, {0}, {2}, {1}) > 1e-3);
}

TEST_CASE("violation family geometry") {
  const auto p1 = violation_family(1.0);
  CHECK((p1.first * p1.first).trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((p1.second * p1.second).trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((p1.first * pauli_x()).trace().real() == doctest::Approx(-0.9).epsilon(1e-12));
  CHECK((p1.first * pauli_z()).trace().real() == doctest::Approx(0.4).epsilon(1e-12));
  CHECK((p1.first * pauli_y()).trace().real() ==
        doctest::Approx(std::sqrt(0.03)).epsilon(1e-12));

  const auto p5 = violation_family(5.0);
  CHECK((p5.second * pauli_x()).trace().real() == doctest::Approx(-0.85).epsilon(1e-12));
  CHECK((p5.second * pauli_z()).trace().real() == doctest::Approx(0.4001).epsilon(1e-12));
  CHECK((p5.second * pauli_y()).trace().real() ==
        doctest::Approx(std::sqrt(1.0 - 0.7225 - 0.4001 * 0.4001)).epsilon(1e-12));

  CHECK_THROWS_AS(violation_family(200.0), std::invalid_argument);
}

TEST_CASE("regularized per-copy bound") {
  std::mt19937_64 rng(43);

  const DensityMatrix mm = markov_middle(rng);
  for (int n : {1, 2}) {
    const RegularizedBoundReport rep = cqmi_regularized_bound_check(mm, n);
    CHECK(rep.holds);
    CHECK(rep.value_per_copy >= -1e-9);
    CHECK(rep.value_per_copy <= 1e-5);
  }

  // A product state is in particular conditioned: value collapses.
  const DensityMatrix prod(
      tensor(tensor(random_density(2, rng).mat, random_density(2, rng).mat),
             random_density(2, rng).mat),
      {2, 2, 2});
  const RegularizedBoundReport rp = cqmi_regularized_bound_check(prod, 1);
  CHECK(rp.holds);
  CHECK(rp.value_per_copy < 1e-5);

  // Random classical-classical-quantum pair: per-copy values shrink with n.
  const DensityMatrix rnd =
      ccq_state(random_density(2, rng).mat, random_density(2, rng).mat);
  const RegularizedBoundReport r1 = cqmi_regularized_bound_check(rnd, 1);
  const RegularizedBoundReport r2 = cqmi_regularized_bound_check(rnd, 2);
  CHECK(r1.holds);
  CHECK(r2.holds);
  CHECK(r1.value_per_copy >= -1e-9);
  CHECK(r2.value_per_copy <= r1.value_per_copy + 1e-6);

  // Orthogonal pure letters give a conditioned state: the bound collapses.
  const DensityMatrix orth = ccq_state(basis_proj(0, 2), basis_proj(1, 2));
  const RegularizedBoundReport ro = cqmi_regularized_bound_check(orth, 1);
  CHECK(ro.cqmi < 1e-9);
  CHECK(ro.value_per_copy < 1e-5);

  CHECK_THROWS_AS(cqmi_regularized_bound_check(orth, 4), cap_exceeded);
}

TEST_CASE("counterexample scan smoke") {
  RecoverySolveOptions opts = quick_opts(150);
  const std::vector<ScanRow> rows = counterexample_scan({5.0}, opts);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].x == 5.0);
  CHECK(std::isfinite(rows[0].cqmi));
  CHECK(std::isfinite(rows[0].d_rec));
  CHECK(std::isfinite(rows[0].d_m_rec));
  CHECK(rows[0].gap >= -1e-9);
  CHECK(rows[0].d_m_rec <= rows[0].cqmi + 1e-4);
}
