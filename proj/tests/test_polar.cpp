#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "entroscope/combine.hpp"
#include "entroscope/entropy.hpp"
#include "entroscope/numkernel.hpp"
#include "entroscope/polar.hpp"
#include "entroscope/types.hpp"

using namespace entroscope;

namespace {

double h2(double p) { return binary_entropy(p); }

}  // namespace

// Reference values in this file come from tools/oracles/polar_oracle.py:
// closed-form erasure recursions, brute-force table/dense constructions with
// no merging, and an independent grid+golden floor search.

TEST_CASE("erasure synthesis tree matches the closed-form recursion") {
  const SynthesizedChannel w = synth_erasure(0.5);
  const double a = 0.05 * kLn2;
  const double b = 0.95 * kLn2;
  const std::vector<PolarStats> st = polarization_run(w, 20, a, b);
  REQUIRE(st.size() == 21);

  // level 0: a single channel sitting mid-band
  CHECK(st[0].n == 0);
  CHECK(st[0].alpha == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(st[0].theta == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(st[0].beta == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(st[0].mu == doctest::Approx(0.5 * kLn2).epsilon(1e-15));
  CHECK(st[0].nu == doctest::Approx(0.25 * kLn2 * kLn2).epsilon(1e-15));

  // depth 20 population
  CHECK(st[20].alpha == doctest::Approx(0.48698329925537109).epsilon(1e-12));
  CHECK(st[20].beta == doctest::Approx(0.48698329925537109).epsilon(1e-12));
  CHECK(st[20].theta == doctest::Approx(0.0260334014892578).epsilon(1e-12));
  CHECK(st[20].mu == doctest::Approx(0.34657359027997264).epsilon(1e-11));
  CHECK(st[20].nu == doctest::Approx(0.23808651533686009).epsilon(1e-10));

  for (const PolarStats& s : st) {
    CHECK(std::abs(s.alpha + s.theta + s.beta - 1.0) < 1e-12);
    CHECK(std::abs(s.mu - 0.5 * kLn2) < 1e-10);  // closed under the recursion
  }
  for (std::size_t i = 1; i < st.size(); ++i) CHECK(st[i].nu >= st[i - 1].nu - 1e-12);

  // perfect channel: everything pins to I = ln 2
  const std::vector<PolarStats> perfect = polarization_run(synth_erasure(0.0), 3, a, b);
  CHECK(perfect[3].beta == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(perfect[3].mu == doctest::Approx(kLn2).epsilon(1e-15));
  CHECK(perfect[3].nu == doctest::Approx(kLn2 * kLn2).epsilon(1e-15));

  CHECK_THROWS_AS(polarization_run(w, 21, a, b), cap_exceeded);
  CHECK_THROWS_AS(polarization_run(w, -1, a, b), std::invalid_argument);
  CHECK_THROWS_AS(polarization_run(w, 3, 0.5, 0.4), std::invalid_argument);
  CHECK_THROWS_AS(polarization_run(w, 3, 0.1, kLn2 + 0.1), std::invalid_argument);
  CHECK_THROWS_AS(polarization_run(w, 3, -0.1, 0.5), std::invalid_argument);
}

TEST_CASE("combining promotes representations and conserves the pair entropy") {
  const SynthesizedChannel e1 = synth_erasure(0.3);
  const SynthesizedChannel e2 = synth_erasure(0.6);

  // erasure algebra stays scalar
  const SynthesizedChannel em = combine_minus(e1, e2);
  const SynthesizedChannel ep = combine_plus(e1, e2);
  CHECK(em.rep == ChannelRep::kErasure);
  CHECK(ep.rep == ChannelRep::kErasure);
  CHECK(em.entropy() == doctest::Approx((0.3 + 0.6 - 0.18) * kLn2).epsilon(1e-15));
  CHECK(ep.entropy() == doctest::Approx(0.18 * kLn2).epsilon(1e-15));

  // mixed types promote to the coarser side and keep the chain identity
  const SynthesizedChannel flip = synth_table({0.89, 0.11}, {0.11, 0.89});
  const SynthesizedChannel bm = combine_minus(e1, flip);
  const SynthesizedChannel bp = combine_plus(e1, flip);
  CHECK(bm.rep == ChannelRep::kClassical);
  CHECK(bp.rep == ChannelRep::kClassical);
  CHECK(bm.entropy() + bp.entropy() ==
        doctest::Approx(e1.entropy() + flip.entropy()).epsilon(1e-12));

  const SynthesizedChannel pd = synth_dense(pure_output_channel(0.6));
  const SynthesizedChannel dm = combine_minus(flip, pd);
  const SynthesizedChannel dp = combine_plus(flip, pd);
  CHECK(dm.rep == ChannelRep::kDense);
  CHECK(dp.rep == ChannelRep::kDense);
  CHECK(dm.entropy() + dp.entropy() ==
        doctest::Approx(flip.entropy() + pd.entropy()).epsilon(1e-10));
  CHECK(dm.entropy() >= std::max(flip.entropy(), pd.entropy()) - 1e-9);

  // the same erasure channel pushed through all three representations
  const SynthesizedChannel wb = synth_erasure(0.35);
  const SynthesizedChannel wt = promote_to_table(wb);
  const SynthesizedChannel wd = promote_to_dense(wb);
  for (const std::string path : {"-", "+", "-+", "+-"}) {
    const double hb = synthesize(wb, path).entropy();
    CHECK(synthesize(wt, path).entropy() == doctest::Approx(hb).epsilon(1e-10));
    CHECK(synthesize(wd, path).entropy() == doctest::Approx(hb).epsilon(1e-10));
  }

  // bookkeeping
  const SynthesizedChannel two = synthesize(wb, "-+");
  CHECK(two.depth == 2);
  CHECK(two.path == "-+");
  CHECK(combine_minus(e1, e2).path == "-");
}

TEST_CASE("classical tables merge equivalent symbols without losing entropy") {
  const SynthesizedChannel flip = synth_table({0.89, 0.11}, {0.11, 0.89});
  CHECK(flip.size() == 2);
  CHECK(flip.entropy() == doctest::Approx(h2(0.11)).epsilon(1e-14));

  // check node of two flip channels is a flip channel with crossover p*p
  const SynthesizedChannel fm = combine_minus(flip, flip);
  CHECK(fm.size() == 2);
  CHECK(fm.entropy() == doctest::Approx(h2(2.0 * 0.11 * 0.89)).epsilon(1e-13));
  const SynthesizedChannel fp = combine_plus(flip, flip);
  CHECK(fp.size() == 3);
  CHECK(fp.entropy() == doctest::Approx(2.0 * h2(0.11) - h2(2.0 * 0.11 * 0.89)).epsilon(1e-12));

  // depth-2 leaves agree with the unmerged brute-force tables
  CHECK(synthesize(flip, "--").entropy() == doctest::Approx(0.622984499428064).epsilon(1e-12));
  CHECK(synthesize(flip, "-+").entropy() == doctest::Approx(0.366064639535888).epsilon(1e-12));
  CHECK(synthesize(flip, "+-").entropy() == doctest::Approx(0.331193183085636).epsilon(1e-12));
  CHECK(synthesize(flip, "++").entropy() == doctest::Approx(0.0658190256250776).epsilon(1e-12));
  // posterior merging keeps the alphabets below the raw product sizes
  CHECK(synthesize(flip, "--").size() <= 16);
  CHECK(synthesize(flip, "++").size() <= 128);

  // a deep stationary run stays inside the caps through depth 6 and trips
  // them at depth 7, where the worst alphabet would square past the cap
  const std::vector<PolarStats> st = polarization_run(flip, 6, 0.05 * kLn2, 0.95 * kLn2);
  CHECK(st.size() == 7);
  CHECK(st[6].mu == doctest::Approx(kLn2 - h2(0.11)).epsilon(1e-10));
  CHECK_THROWS_AS(polarization_run(flip, 7, 0.05 * kLn2, 0.95 * kLn2), cap_exceeded);

  // zero-probability symbols drop; equal-posterior symbols fold
  const SynthesizedChannel folded = synth_table({0.5, 0.5, 0.0}, {0.5, 0.5, 0.0});
  CHECK(folded.size() == 1);
  CHECK(folded.entropy() == doctest::Approx(kLn2).epsilon(1e-15));
}

TEST_CASE("dense flagged blocks match explicit node constructions") {
  // random qubit cq channel vs the explicit tensor constructions
  std::mt19937_64 rng(41);
  const Mat r0 = random_density(2, rng).mat;
  const Mat r1 = random_density(2, rng).mat;
  const BinaryCqChannel w = make_cq_channel(r0, r1);
  const SynthesizedChannel wd = synth_dense(w);
  CHECK(combine_minus(wd, wd).entropy() ==
        doctest::Approx(channel_entropy(box_combine(w, w))).epsilon(1e-10));
  CHECK(combine_plus(wd, wd).entropy() ==
        doctest::Approx(channel_entropy(varo_combine(w, w))).epsilon(1e-10));

  // better/worse ordering around the base channel
  CHECK(combine_plus(wd, wd).entropy() <= wd.entropy() + 1e-9);
  CHECK(wd.entropy() <= combine_minus(wd, wd).entropy() + 1e-9);

  // pure-output channel at angle 0.6: depth-2 leaves against brute force
  const SynthesizedChannel pd = synth_dense(pure_output_channel(0.6));
  CHECK(pd.entropy() == doctest::Approx(0.396825533268081).epsilon(1e-12));
  const SynthesizedChannel mm = synthesize(pd, "--");
  const SynthesizedChannel mp = synthesize(pd, "-+");
  const SynthesizedChannel pm = synthesize(pd, "+-");
  const SynthesizedChannel pp = synthesize(pd, "++");
  CHECK(mm.entropy() == doctest::Approx(0.652266832877331).epsilon(1e-11));
  CHECK(mp.entropy() == doctest::Approx(0.426123262864202).epsilon(1e-11));
  CHECK(pm.entropy() == doctest::Approx(0.397021946169064).epsilon(1e-11));
  CHECK(pp.entropy() == doctest::Approx(0.111890091161726).epsilon(1e-11));
  // flag decomposition reproduces the explicit output dimensions
  CHECK(mm.size() == 16);
  CHECK(mp.size() == 32);
  CHECK(pm.size() == 64);
  CHECK(pp.size() == 128);
  // two levels conserve the mean entropy exactly
  const double mean =
      0.25 * (mm.entropy() + mp.entropy() + pm.entropy() + pp.entropy());
  CHECK(mean == doctest::Approx(pd.entropy()).epsilon(1e-10));

  // a fourth qubit synthesis step would need 65536-dimensional blocks
  CHECK_THROWS_AS(synthesize(pd, "----"), cap_exceeded);
}

TEST_CASE("stationary dense run conserves the information mean at depth three") {
  // heaviest dense case: 255 blocks of dimension 256 at the last level
  const SynthesizedChannel pd = synth_dense(pure_output_channel(0.6));
  const std::vector<PolarStats> st = polarization_run(pd, 3, 0.05 * kLn2, 0.95 * kLn2);
  REQUIRE(st.size() == 4);
  CHECK(st[0].mu == doctest::Approx(kLn2 - 0.396825533268081).epsilon(1e-12));
  for (const PolarStats& s : st) CHECK(std::abs(s.mu - st[0].mu) < 1e-8);
  for (std::size_t i = 1; i < st.size(); ++i) CHECK(st[i].nu >= st[i - 1].nu - 1e-10);
}

TEST_CASE("butterfly schedule handles alternating and mixed channel lists") {
  const double a = 0.05 * kLn2;
  const double b = 0.95 * kLn2;

  // alternating erasure list, depth 12
  std::vector<SynthesizedChannel> alt;
  alt.reserve(4096);
  for (int i = 0; i < 4096; ++i) alt.push_back(synth_erasure(i % 2 == 0 ? 0.3 : 0.7));
  const std::vector<PolarStats> st = nonstationary_run(alt, 12, a, b);
  REQUIRE(st.size() == 13);
  CHECK(st[0].mu == doctest::Approx(0.5 * kLn2).epsilon(1e-12));
  CHECK(st[12].mu == doctest::Approx(0.5 * kLn2).epsilon(1e-10));
  CHECK(st[12].theta == doctest::Approx(0.11181640625).epsilon(1e-12));
  for (std::size_t i = 1; i < st.size(); ++i) CHECK(st[i].nu >= st[i - 1].nu - 1e-12);

  // alternating erasure/flip tables, depth 5, stays exactly conservative
  std::vector<SynthesizedChannel> mixed;
  mixed.reserve(64);
  for (int t = 0; t < 64; ++t) {
    if (t % 2 == 0)
      mixed.push_back(synth_table({0.6, 0.0, 0.4}, {0.0, 0.6, 0.4}));
    else
      mixed.push_back(synth_table({0.89, 0.11}, {0.11, 0.89}));
  }
  const std::vector<PolarStats> ms = nonstationary_run(mixed, 5, a, b);
  REQUIRE(ms.size() == 6);
  CHECK(ms[0].mu == doctest::Approx(0.381260075988623).epsilon(1e-12));
  for (const PolarStats& s : ms) CHECK(std::abs(s.mu - ms[0].mu) < 1e-10);
  CHECK(ms[5].theta == doctest::Approx(0.5).epsilon(1e-12));

  // an all-identical list reduces to the stationary tree
  std::vector<SynthesizedChannel> same(8, synth_erasure(0.5));
  const std::vector<PolarStats> ns = nonstationary_run(same, 3, a, b);
  const std::vector<PolarStats> ss = polarization_run(synth_erasure(0.5), 3, a, b);
  REQUIRE(ns.size() == ss.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    CHECK(ns[i].alpha == doctest::Approx(ss[i].alpha).epsilon(1e-12));
    CHECK(ns[i].theta == doctest::Approx(ss[i].theta).epsilon(1e-12));
    CHECK(ns[i].mu == doctest::Approx(ss[i].mu).epsilon(1e-12));
    CHECK(ns[i].nu == doctest::Approx(ss[i].nu).epsilon(1e-12));
  }

  // a mixed-representation pair still satisfies the chain identity
  std::vector<SynthesizedChannel> pair{synth_erasure(0.5),
                                       synth_table({0.89, 0.11}, {0.11, 0.89})};
  const std::vector<PolarStats> ps = nonstationary_run(pair, 1, a, b);
  CHECK(ps[1].mu == doctest::Approx(ps[0].mu).epsilon(1e-12));

  CHECK_THROWS_AS(nonstationary_run({}, 1, a, b), std::invalid_argument);
  std::vector<SynthesizedChannel> six(6, synth_erasure(0.5));
  CHECK_THROWS_AS(nonstationary_run(six, 2, a, b), std::invalid_argument);
}

TEST_CASE("single-step entropy gap stays above the refined band floor") {
  CHECK(kappa_floor(0.10 * kLn2, 0.90 * kLn2) ==
        doctest::Approx(1.74643099959404e-06).epsilon(1e-10));
  CHECK(kappa_floor(0.05 * kLn2, 0.95 * kLn2) ==
        doctest::Approx(7.82956701694815e-08).epsilon(1e-11));
  CHECK_THROWS_AS(kappa_floor(0.5, 0.4), std::invalid_argument);

  // the symmetric erasure pair polarizes by exactly half a bit
  const SynthesizedChannel w = synth_erasure(0.5);
  const EntropyGapReport r = entropy_gap(w, w, 0.10 * kLn2, 0.90 * kLn2);
  CHECK(r.i_minus == doctest::Approx(0.25 * kLn2).epsilon(1e-14));
  CHECK(r.i_plus == doctest::Approx(0.75 * kLn2).epsilon(1e-14));
  CHECK(r.gap == doctest::Approx(0.5 * kLn2).epsilon(1e-14));
  CHECK(r.gap >= r.floor_val);

  // a dense/classical pair with both informations inside the band
  const SynthesizedChannel pd = synth_dense(pure_output_channel(0.6));
  const SynthesizedChannel flip = synth_table({0.89, 0.11}, {0.11, 0.89});
  const EntropyGapReport g = entropy_gap(pd, flip, 0.10 * kLn2, 0.90 * kLn2);
  CHECK(g.i1 > 0.10 * kLn2);
  CHECK(g.i1 < 0.90 * kLn2);
  CHECK(g.i2 > 0.10 * kLn2);
  CHECK(g.i2 < 0.90 * kLn2);
  CHECK(g.gap >= g.floor_val - 1e-9);
  CHECK(g.i_plus + g.i_minus == doctest::Approx(g.i1 + g.i2).epsilon(1e-10));
}

TEST_CASE("t-functional expectation decreases along the synthesis tree") {
  const TFunctionalSeries ts = t_functional_run(synth_erasure(0.5), 20);
  REQUIRE(ts.expectation.size() == 21);
  CHECK(ts.expectation[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(ts.expectation[1] == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK(ts.expectation[2] == doctest::Approx(0.15234375).epsilon(1e-15));
  CHECK(ts.expectation[8] == doctest::Approx(0.044759719469043786).epsilon(1e-13));
  CHECK(ts.expectation[16] == doctest::Approx(0.0095776789277046206).epsilon(1e-13));
  CHECK(ts.expectation[20] == doctest::Approx(0.0044541121821436496).epsilon(1e-13));
  CHECK(ts.monotone);
  CHECK(ts.shape_rate == doctest::Approx(0.85448395327917581).epsilon(1e-9));

  // dense case at depth 2, cross-checked against the population moments:
  // E[T] = mu/ln2 - nu/ln2^2 because T is a quadratic in the information
  const SynthesizedChannel pd = synth_dense(pure_output_channel(0.6));
  const TFunctionalSeries dts = t_functional_run(pd, 2);
  const std::vector<PolarStats> st = polarization_run(pd, 2, 0.05 * kLn2, 0.95 * kLn2);
  REQUIRE(dts.expectation.size() == 3);
  CHECK(dts.monotone);
  CHECK(dts.expectation[2] < dts.expectation[0]);
  for (int n = 0; n <= 2; ++n) {
    const double from_moments = st[n].mu / kLn2 - st[n].nu / (kLn2 * kLn2);
    CHECK(dts.expectation[n] == doctest::Approx(from_moments).epsilon(1e-12));
  }

  // degenerate channels keep T pinned at zero
  const TFunctionalSeries zs = t_functional_run(synth_erasure(0.0), 4);
  for (double e : zs.expectation) CHECK(e == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(zs.monotone);
  CHECK(zs.shape_rate == 0.0);
}

TEST_CASE("representation promotions are exact and capped") {
  const SynthesizedChannel wb = synth_erasure(0.35);
  const SynthesizedChannel wt = promote_to_table(wb);
  CHECK(wt.rep == ChannelRep::kClassical);
  CHECK(wt.size() == 3);
  CHECK(wt.entropy() == doctest::Approx(wb.entropy()).epsilon(1e-15));
  const SynthesizedChannel wd = promote_to_dense(wb);
  CHECK(wd.rep == ChannelRep::kDense);
  CHECK(wd.entropy() == doctest::Approx(wb.entropy()).epsilon(1e-12));
  CHECK_THROWS_AS(promote_to_table(wd), std::invalid_argument);

  // erasure endpoints collapse to tiny alphabets after the fold
  CHECK(promote_to_table(synth_erasure(0.0)).size() == 2);
  CHECK(promote_to_table(synth_erasure(1.0)).size() == 1);

  // a table with more symbols than the dense cap cannot embed diagonally
  const long big = 5000;
  std::vector<double> g0(big), g1(big);
  const double norm = 0.5 * big * (big + 1);
  for (long i = 0; i < big; ++i) {
    g0[i] = (i + 1) / norm;
    g1[i] = (big - i) / norm;
  }
  const SynthesizedChannel wide = synth_table(g0, g1);
  CHECK(wide.size() == big);  // all posteriors distinct, nothing folds
  CHECK_THROWS_AS(promote_to_dense(wide), cap_exceeded);
}

TEST_CASE("synthesized channel validation rejects malformed inputs") {
  CHECK_THROWS_AS(synth_erasure(1.2), std::invalid_argument);
  CHECK_THROWS_AS(synth_erasure(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(synth_table({0.7, 0.1}, {0.1, 0.9}), std::invalid_argument);
  CHECK_THROWS_AS(synth_table({1.2, -0.2}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(synth_table({0.5, 0.5}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(synth_table({}, {}), std::invalid_argument);

  SynthesizedChannel bad;
  bad.rep = ChannelRep::kDense;
  bad.blocks.push_back({0.5, 0.5 * Mat::Identity(2, 2), 0.5 * Mat::Identity(2, 2)});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // weights sum to 0.5

  CHECK_THROWS_AS(synthesize(synth_erasure(0.5), "-x"), std::invalid_argument);
}
