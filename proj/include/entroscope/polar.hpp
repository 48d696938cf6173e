#pragma once

#include <string>
#include <vector>

#include "entroscope/combine.hpp"
#include "entroscope/types.hpp"

namespace entroscope {

// Representation ladder for synthesized binary-input channels, ordered by
// generality. Combining two channels of different kinds promotes the finer
// one first: erasure < classical table < dense cq.
enum class ChannelRep { kErasure = 0, kClassical = 1, kDense = 2 };

// One block of a flag-decomposed binary cq channel. The flag value is drawn
// with probability `weight` independently of the input bit, and the receiver
// sees the unit-trace state out0/out1 together with the flag, so conditional
// entropy is the weight-average of the per-block channel entropies. Keeping
// the flag implicit caps the eigensolver cost at the largest block dimension
// instead of the summed dimension.
struct FlaggedBlock {
  double weight = 0.0;
  Mat out0;
  Mat out1;
};

// A binary-input channel tracked through check/variable-node synthesis in
// whichever representation stays exact: a scalar erasure probability, a
// classical likelihood table, or a flagged list of dense cq blocks.
struct SynthesizedChannel {
  ChannelRep rep = ChannelRep::kErasure;
  int depth = 0;     // number of synthesis steps applied
  std::string path;  // '-'/'+' per step while self-paired, "" once ambiguous

  double erasure = 0.0;                // kErasure: erasure probability
  std::vector<double> table0, table1;  // kClassical: per-symbol P(y | x)
  std::vector<FlaggedBlock> blocks;    // kDense

  // Conditional entropy H(X|Y) of a uniform input bit, in nats, in [0, ln 2].
  double entropy() const;
  // ln 2 - entropy().
  double mutual_info() const;
  // Output footprint: symbol count (classical), summed block dimension
  // (dense), 3 for the erasure embedding.
  long size() const;
  // Structural checks plus entropy() within [0, ln 2] (1e-9 slack).
  void validate() const;
};

// Constructors validate their input. synth_table compacts the table on entry
// (symbols with equal posteriors within 1e-12 merge, zero-probability symbols
// drop); both operations leave the conditional entropy unchanged.
SynthesizedChannel synth_erasure(double eps);
SynthesizedChannel synth_table(std::vector<double> given0, std::vector<double> given1);
SynthesizedChannel synth_dense(const BinaryCqChannel& w);

// Exact promotions up the representation ladder. The erasure channel becomes
// the table {(1-e, 0), (0, 1-e), (e, e)}; a K-symbol table becomes a single
// diagonal dense block (cap_exceeded past the dense dimension cap). Demotions
// throw std::invalid_argument. Depth and path are preserved.
SynthesizedChannel promote_to_table(const SynthesizedChannel& w);
SynthesizedChannel promote_to_dense(const SynthesizedChannel& w);

// Check-node ('-', worse) and variable-node ('+', better) synthesis. Mixed
// representations are promoted to the coarser one first. Classical results
// are compacted as in synth_table; dense results keep one flagged block per
// input block pair for '-' and two for '+', whose revealed bit joins the
// flag. Throws cap_exceeded when a block dimension would pass the dense cap
// or a symbol/block count would pass the sequence cap; the message names the
// representation to fall back to.
SynthesizedChannel combine_minus(const SynthesizedChannel& w1, const SynthesizedChannel& w2);
SynthesizedChannel combine_plus(const SynthesizedChannel& w1, const SynthesizedChannel& w2);

// Self-paired synthesis along a path of '-'/'+' characters, root step first.
SynthesizedChannel synthesize(const SynthesizedChannel& w, const std::string& path);

// Per-level summary of a synthesized-channel population, measured on the
// mutual information I = ln 2 - H in nats: alpha/theta/beta are the fractions
// with I < a, a <= I <= b and I > b, mu and nu the mean of I and of I^2.
struct PolarStats {
  int n = 0;
  double alpha = 0.0;
  double theta = 0.0;
  double beta = 0.0;
  double mu = 0.0;
  double nu = 0.0;
};

// Full self-paired synthesis tree of one channel (2^n nodes at level n),
// returning stats for levels 0..depth. Requires 0 <= a < b <= ln 2. The mean
// of I is conserved across levels (1e-8) and the mean of I^2 never decreases
// (1e-10); both are enforced and a violation throws std::runtime_error.
// Throws cap_exceeded when 2^depth would pass the sequence cap.
std::vector<PolarStats> polarization_run(const SynthesizedChannel& w, int depth,
                                         double a, double b);

// Butterfly schedule over an explicit channel list: building level n uses
// block size N = 2^n, and entries Nm+j, Nm+N/2+j (0 <= j < N/2) combine into
// the check node at Nm+j and the variable node at Nm+N/2+j. The list length
// must be a positive multiple of 2^depth. Same stats and conservation
// guarantees as polarization_run.
std::vector<PolarStats> nonstationary_run(std::vector<SynthesizedChannel> channels,
                                          int depth, double a, double b);

// Empirical floor, over the closed entropy band [ln2-b, ln2-a]^2, of the
// guaranteed single-step gap 2*(two-channel lower bound - max(h1, h2)),
// located by a 97x97 grid scan plus coordinate golden-section refinement.
double kappa_floor(double a, double b);

// One synthesis step on a channel pair, reported against the band floor:
// gap = (i_plus - i_minus) - |i1 - i2| must stay above kappa_floor(a, b)
// whenever both inputs' informations lie inside [a, b].
struct EntropyGapReport {
  double i1 = 0.0;
  double i2 = 0.0;
  double i_minus = 0.0;
  double i_plus = 0.0;
  double gap = 0.0;
  double floor_val = 0.0;
};
EntropyGapReport entropy_gap(const SynthesizedChannel& w1, const SynthesizedChannel& w2,
                             double a, double b);

// Level means of T = Ht*(1 - Ht) with Ht = H/ln2 over the self-paired
// synthesis tree; nonincreasing in the level by concavity of T. shape_rate is
// half the least-squares slope of (ln E[T_n])^2 against n over the back half
// of the levels (n >= depth/2, positive E[T] only), 0 when fewer than two
// points qualify.
struct TFunctionalSeries {
  std::vector<double> expectation;
  bool monotone = false;  // nonincreasing within 1e-10
  double shape_rate = 0.0;
};
TFunctionalSeries t_functional_run(const SynthesizedChannel& w, int depth);

}  // namespace entroscope
