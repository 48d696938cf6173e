#include "entroscope/polar.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "entroscope/entropy.hpp"
#include "entroscope/numkernel.hpp"

namespace entroscope {
namespace {

constexpr double kPosteriorTol = 1e-12;  // fold symbols whose posteriors agree
constexpr double kDropTol = 1e-15;       // drop symbols with negligible mass

void check_symbol_cap(long count, const std::string& who) {
  if (count > kSequenceCap)
    throw cap_exceeded(who +
                       ": classical symbol count would exceed the sequence cap; "
                       "use the erasure representation or a smaller depth");
}

void check_block_dim_cap(long dim, const std::string& who) {
  if (dim > kDenseDimCap)
    throw cap_exceeded(who +
                       ": dense block dimension would exceed the dense cap; "
                       "use the classical or erasure representation");
}

void check_block_count_cap(long count, const std::string& who) {
  if (count > kSequenceCap)
    throw cap_exceeded(who +
                       ": dense block count would exceed the sequence cap; "
                       "use the classical or erasure representation");
}

// ---- classical tables ------------------------------------------------------

double table_entropy(const std::vector<double>& t0, const std::vector<double>& t1) {
  double h = 0.0;
  for (std::size_t y = 0; y < t0.size(); ++y) {
    const double s = t0[y] + t1[y];
    if (s <= kDropTol) continue;
    h += 0.5 * s * binary_entropy(t0[y] / s);
  }
  return h;
}

// Sort symbols by posterior and fold runs that agree with the run's first
// member within kPosteriorTol. Symbols with the same posterior carry the same
// evidence, so folding them (and dropping zero-mass symbols) leaves the
// conditional entropy unchanged while keeping alphabet growth in check.
void merge_table(std::vector<double>& t0, std::vector<double>& t1) {
  const std::size_t k = t0.size();
  std::vector<int> idx;
  idx.reserve(k);
  std::vector<double> post(k, 0.0);
  for (std::size_t y = 0; y < k; ++y) {
    const double s = t0[y] + t1[y];
    if (s <= kDropTol) continue;
    post[y] = t0[y] / s;
    idx.push_back(static_cast<int>(y));
  }
  std::sort(idx.begin(), idx.end(), [&](int u, int v) { return post[u] < post[v]; });
  std::vector<double> m0, m1;
  m0.reserve(idx.size());
  m1.reserve(idx.size());
  double rep = -1.0;
  for (int y : idx) {
    if (!m0.empty() && std::abs(post[y] - rep) <= kPosteriorTol) {
      m0.back() += t0[y];
      m1.back() += t1[y];
    } else {
      rep = post[y];
      m0.push_back(t0[y]);
      m1.push_back(t1[y]);
    }
  }
  t0 = std::move(m0);
  t1 = std::move(m1);
}

struct TablePair {
  std::vector<double> t0, t1;
};

// Check node on tables: symbols (i, j), W(y|u) = 1/2 sum_v A_{u xor v}(i) B_v(j).
TablePair table_minus(const std::vector<double>& a0, const std::vector<double>& a1,
                      const std::vector<double>& b0, const std::vector<double>& b1) {
  const long ka = static_cast<long>(a0.size());
  const long kb = static_cast<long>(b0.size());
  check_symbol_cap(ka * kb, "combine_minus");
  TablePair r;
  r.t0.resize(ka * kb);
  r.t1.resize(ka * kb);
  for (long i = 0; i < ka; ++i)
    for (long j = 0; j < kb; ++j) {
      const long y = i * kb + j;
      r.t0[y] = 0.5 * (a0[i] * b0[j] + a1[i] * b1[j]);
      r.t1[y] = 0.5 * (a1[i] * b0[j] + a0[i] * b1[j]);
    }
  merge_table(r.t0, r.t1);
  return r;
}

// Variable node on tables: symbols (v, i, j), W(y|u) = 1/2 A_{v xor u}(i) B_u(j).
TablePair table_plus(const std::vector<double>& a0, const std::vector<double>& a1,
                     const std::vector<double>& b0, const std::vector<double>& b1) {
  const long ka = static_cast<long>(a0.size());
  const long kb = static_cast<long>(b0.size());
  check_symbol_cap(2 * ka * kb, "combine_plus");
  TablePair r;
  r.t0.resize(2 * ka * kb);
  r.t1.resize(2 * ka * kb);
  for (long v = 0; v < 2; ++v)
    for (long i = 0; i < ka; ++i)
      for (long j = 0; j < kb; ++j) {
        const long y = (v * ka + i) * kb + j;
        r.t0[y] = 0.5 * (v == 0 ? a0[i] : a1[i]) * b0[j];
        r.t1[y] = 0.5 * (v == 0 ? a1[i] : a0[i]) * b1[j];
      }
  merge_table(r.t0, r.t1);
  return r;
}

// ---- dense flagged blocks --------------------------------------------------

double block_channel_entropy(const FlaggedBlock& blk) {
  const Mat mean = 0.5 * (blk.out0 + blk.out1);
  return kLn2 + 0.5 * (von_neumann(blk.out0) + von_neumann(blk.out1)) - von_neumann(mean);
}

double dense_entropy(const std::vector<FlaggedBlock>& blocks) {
  double h = 0.0;
  for (const FlaggedBlock& blk : blocks) h += blk.weight * block_channel_entropy(blk);
  return h;
}

long max_block_dim(const std::vector<FlaggedBlock>& blocks) {
  long d = 0;
  for (const FlaggedBlock& blk : blocks) d = std::max(d, static_cast<long>(blk.out0.rows()));
  return d;
}

void check_dense_pair_caps(const std::vector<FlaggedBlock>& a, const std::vector<FlaggedBlock>& b,
                           bool variable, const std::string& who) {
  check_block_dim_cap(max_block_dim(a) * max_block_dim(b), who);
  const long count = (variable ? 2L : 1L) * static_cast<long>(a.size()) * static_cast<long>(b.size());
  check_block_count_cap(count, who);
}

// Check node on blocks: flags (k, l), out_u = 1/2 sum_v a_{u xor v} (x) b_v.
std::vector<FlaggedBlock> dense_minus(const std::vector<FlaggedBlock>& a,
                                      const std::vector<FlaggedBlock>& b) {
  check_dense_pair_caps(a, b, false, "combine_minus");
  std::vector<FlaggedBlock> r;
  r.reserve(a.size() * b.size());
  for (const FlaggedBlock& ba : a)
    for (const FlaggedBlock& bb : b) {
      FlaggedBlock blk;
      blk.weight = ba.weight * bb.weight;
      blk.out0 = 0.5 * (tensor(ba.out0, bb.out0) + tensor(ba.out1, bb.out1));
      blk.out1 = 0.5 * (tensor(ba.out1, bb.out0) + tensor(ba.out0, bb.out1));
      r.push_back(std::move(blk));
    }
  return r;
}

// Variable node on blocks: the revealed bit v joins the flag, so flags are
// (v, k, l) with out_u = a_{v xor u} (x) b_u at half the pair weight.
std::vector<FlaggedBlock> dense_plus(const std::vector<FlaggedBlock>& a,
                                     const std::vector<FlaggedBlock>& b) {
  check_dense_pair_caps(a, b, true, "combine_plus");
  std::vector<FlaggedBlock> r;
  r.reserve(2 * a.size() * b.size());
  for (const FlaggedBlock& ba : a)
    for (const FlaggedBlock& bb : b) {
      FlaggedBlock v0;
      v0.weight = 0.5 * ba.weight * bb.weight;
      v0.out0 = tensor(ba.out0, bb.out0);
      v0.out1 = tensor(ba.out1, bb.out1);
      r.push_back(std::move(v0));
      FlaggedBlock v1;
      v1.weight = 0.5 * ba.weight * bb.weight;
      v1.out0 = tensor(ba.out1, bb.out0);
      v1.out1 = tensor(ba.out0, bb.out1);
      r.push_back(std::move(v1));
    }
  return r;
}

// ---- cap prechecks for parallel sections ------------------------------------

// parallel_for workers must not throw, so every level build runs these checks
// serially first; they mirror the throwing checks inside the combine helpers.
long promoted_symbol_count(const SynthesizedChannel& w) {
  return w.rep == ChannelRep::kErasure ? 3 : static_cast<long>(w.table0.size());
}

long promoted_max_block_dim(const SynthesizedChannel& w) {
  switch (w.rep) {
    case ChannelRep::kErasure:
      return 3;
    case ChannelRep::kClassical:
      return static_cast<long>(w.table0.size());
    case ChannelRep::kDense:
      return max_block_dim(w.blocks);
  }
  return 0;
}

long promoted_block_count(const SynthesizedChannel& w) {
  return w.rep == ChannelRep::kDense ? static_cast<long>(w.blocks.size()) : 1;
}

void precheck_pair(const SynthesizedChannel& a, const SynthesizedChannel& b,
                   const std::string& who) {
  const int rep = std::max(static_cast<int>(a.rep), static_cast<int>(b.rep));
  if (rep == static_cast<int>(ChannelRep::kErasure)) return;
  if (rep == static_cast<int>(ChannelRep::kClassical)) {
    check_symbol_cap(2 * promoted_symbol_count(a) * promoted_symbol_count(b), who);
    return;
  }
  const long da = promoted_max_block_dim(a);
  const long db = promoted_max_block_dim(b);
  check_block_dim_cap(da, who);  // the promotion itself must fit
  check_block_dim_cap(db, who);
  check_block_dim_cap(da * db, who);
  check_block_count_cap(2 * promoted_block_count(a) * promoted_block_count(b), who);
}

}  // namespace

// ---- SynthesizedChannel ------------------------------------------------------

double SynthesizedChannel::entropy() const {
  switch (rep) {
    case ChannelRep::kErasure:
      return erasure * kLn2;
    case ChannelRep::kClassical:
      return table_entropy(table0, table1);
    case ChannelRep::kDense:
      return dense_entropy(blocks);
  }
  return 0.0;
}

double SynthesizedChannel::mutual_info() const { return kLn2 - entropy(); }

long SynthesizedChannel::size() const {
  switch (rep) {
    case ChannelRep::kErasure:
      return 3;
    case ChannelRep::kClassical:
      return static_cast<long>(table0.size());
    case ChannelRep::kDense: {
      long total = 0;
      for (const FlaggedBlock& blk : blocks) total += static_cast<long>(blk.out0.rows());
      return total;
    }
  }
  return 0;
}

void SynthesizedChannel::validate() const {
  switch (rep) {
    case ChannelRep::kErasure:
      if (!(erasure >= -1e-12 && erasure <= 1.0 + 1e-12))
        throw std::invalid_argument("synthesized channel: erasure probability outside [0, 1]");
      break;
    case ChannelRep::kClassical: {
      if (table0.empty() || table0.size() != table1.size())
        throw std::invalid_argument(
            "synthesized channel: table columns must be nonempty and equally long");
      double s0 = 0.0, s1 = 0.0;
      for (std::size_t y = 0; y < table0.size(); ++y) {
        if (table0[y] < -1e-12 || table1[y] < -1e-12)
          throw std::invalid_argument("synthesized channel: negative table entry");
        s0 += table0[y];
        s1 += table1[y];
      }
      if (std::abs(s0 - 1.0) > 1e-9 || std::abs(s1 - 1.0) > 1e-9)
        throw std::invalid_argument("synthesized channel: table columns must each sum to 1");
      break;
    }
    case ChannelRep::kDense: {
      if (blocks.empty())
        throw std::invalid_argument("synthesized channel: dense block list is empty");
      double wsum = 0.0;
      for (const FlaggedBlock& blk : blocks) {
        if (blk.weight < -1e-12)
          throw std::invalid_argument("synthesized channel: negative block weight");
        if (blk.out0.rows() < 1 || blk.out0.rows() != blk.out0.cols() ||
            blk.out1.rows() != blk.out1.cols() || blk.out0.rows() != blk.out1.rows())
          throw std::invalid_argument(
              "synthesized channel: dense blocks must be square with matching dimensions");
        check_block_dim_cap(blk.out0.rows(), "synthesized channel");
        if (std::abs(blk.out0.trace() - cxd(1.0, 0.0)) > 1e-9 ||
            std::abs(blk.out1.trace() - cxd(1.0, 0.0)) > 1e-9)
          throw std::invalid_argument("synthesized channel: block states must have unit trace");
        wsum += blk.weight;
      }
      if (std::abs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("synthesized channel: block weights must sum to 1");
      break;
    }
  }
  const double h = entropy();
  if (h < -1e-9 || h > kLn2 + 1e-9)
    throw std::invalid_argument("synthesized channel: conditional entropy outside [0, ln 2]");
}

// ---- constructors and promotions ---------------------------------------------

SynthesizedChannel synth_erasure(double eps) {
  SynthesizedChannel w;
  w.rep = ChannelRep::kErasure;
  w.erasure = eps;
  w.validate();
  return w;
}

SynthesizedChannel synth_table(std::vector<double> given0, std::vector<double> given1) {
  SynthesizedChannel w;
  w.rep = ChannelRep::kClassical;
  w.table0 = std::move(given0);
  w.table1 = std::move(given1);
  w.validate();
  merge_table(w.table0, w.table1);
  return w;
}

SynthesizedChannel synth_dense(const BinaryCqChannel& w) {
  w.validate();
  check_block_dim_cap(w.dim(), "synth_dense");
  SynthesizedChannel r;
  r.rep = ChannelRep::kDense;
  r.blocks.push_back({1.0, w.out0.mat, w.out1.mat});
  return r;
}

SynthesizedChannel promote_to_table(const SynthesizedChannel& w) {
  if (w.rep == ChannelRep::kClassical) return w;
  if (w.rep == ChannelRep::kDense)
    throw std::invalid_argument("promote_to_table: cannot demote a dense channel");
  SynthesizedChannel r;
  r.rep = ChannelRep::kClassical;
  r.depth = w.depth;
  r.path = w.path;
  const double e = w.erasure;
  r.table0 = {1.0 - e, 0.0, e};
  r.table1 = {0.0, 1.0 - e, e};
  merge_table(r.table0, r.table1);
  return r;
}

SynthesizedChannel promote_to_dense(const SynthesizedChannel& w) {
  if (w.rep == ChannelRep::kDense) return w;
  const SynthesizedChannel t =
      (w.rep == ChannelRep::kErasure) ? promote_to_table(w) : w;
  const long k = static_cast<long>(t.table0.size());
  check_block_dim_cap(k, "promote_to_dense");
  Mat d0 = Mat::Zero(k, k);
  Mat d1 = Mat::Zero(k, k);
  for (long y = 0; y < k; ++y) {
    d0(y, y) = t.table0[y];
    d1(y, y) = t.table1[y];
  }
  SynthesizedChannel r;
  r.rep = ChannelRep::kDense;
  r.depth = w.depth;
  r.path = w.path;
  r.blocks.push_back({1.0, std::move(d0), std::move(d1)});
  return r;
}

// ---- combining -----------------------------------------------------------------

namespace {

SynthesizedChannel combine_impl(const SynthesizedChannel& a, const SynthesizedChannel& b,
                                bool variable) {
  const ChannelRep rep =
      static_cast<ChannelRep>(std::max(static_cast<int>(a.rep), static_cast<int>(b.rep)));
  SynthesizedChannel r;
  r.rep = rep;
  if (rep == ChannelRep::kErasure) {
    const double e1 = a.erasure, e2 = b.erasure;
    r.erasure = variable ? e1 * e2 : e1 + e2 - e1 * e2;
  } else if (rep == ChannelRep::kClassical) {
    const SynthesizedChannel* pa = &a;
    const SynthesizedChannel* pb = &b;
    SynthesizedChannel ta, tb;
    if (a.rep != ChannelRep::kClassical) { ta = promote_to_table(a); pa = &ta; }
    if (b.rep != ChannelRep::kClassical) { tb = promote_to_table(b); pb = &tb; }
    TablePair t = variable ? table_plus(pa->table0, pa->table1, pb->table0, pb->table1)
                           : table_minus(pa->table0, pa->table1, pb->table0, pb->table1);
    r.table0 = std::move(t.t0);
    r.table1 = std::move(t.t1);
  } else {
    const SynthesizedChannel* pa = &a;
    const SynthesizedChannel* pb = &b;
    SynthesizedChannel da, db;
    if (a.rep != ChannelRep::kDense) { da = promote_to_dense(a); pa = &da; }
    if (b.rep != ChannelRep::kDense) { db = promote_to_dense(b); pb = &db; }
    r.blocks = variable ? dense_plus(pa->blocks, pb->blocks)
                        : dense_minus(pa->blocks, pb->blocks);
  }
  r.depth = std::max(a.depth, b.depth) + 1;
  r.path = (a.path == b.path ? a.path : std::string()) + (variable ? '+' : '-');
  return r;
}

}  // namespace

SynthesizedChannel combine_minus(const SynthesizedChannel& w1, const SynthesizedChannel& w2) {
  return combine_impl(w1, w2, false);
}

SynthesizedChannel combine_plus(const SynthesizedChannel& w1, const SynthesizedChannel& w2) {
  return combine_impl(w1, w2, true);
}

SynthesizedChannel synthesize(const SynthesizedChannel& w, const std::string& path) {
  SynthesizedChannel cur = w;
  for (char c : path) {
    if (c == '-')
      cur = combine_minus(cur, cur);
    else if (c == '+')
      cur = combine_plus(cur, cur);
    else
      throw std::invalid_argument("synthesize: path characters must be '-' or '+'");
  }
  return cur;
}

// ---- level engine ---------------------------------------------------------------

namespace {

using LevelSink = std::function<void(int, const std::vector<double>&)>;

void run_levels_erasure(double e0, int depth, const LevelSink& sink) {
  std::vector<double> eps{e0};
  for (int n = 0;; ++n) {
    std::vector<double> ents(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) ents[i] = eps[i] * kLn2;
    sink(n, ents);
    if (n == depth) break;
    const std::size_t half = eps.size();
    std::vector<double> next(2 * half);
    for (std::size_t i = 0; i < half; ++i) {
      const double e = eps[i];
      next[i] = e + e - e * e;
      next[half + i] = e * e;
    }
    eps = std::move(next);
  }
}

void run_levels_classical(std::vector<double> t0, std::vector<double> t1, int depth,
                          const LevelSink& sink) {
  std::vector<TablePair> cur;
  cur.push_back({std::move(t0), std::move(t1)});
  for (int n = 0;; ++n) {
    std::vector<double> ents(cur.size());
    parallel_for(static_cast<int>(cur.size()),
                 [&](int i) { ents[i] = table_entropy(cur[i].t0, cur[i].t1); });
    sink(n, ents);
    if (n == depth) break;
    for (const TablePair& t : cur) {
      const long k = static_cast<long>(t.t0.size());
      check_symbol_cap(2 * k * k, "polarization_run");
    }
    std::vector<TablePair> next(2 * cur.size());
    parallel_for(static_cast<int>(cur.size()), [&](int i) {
      next[2 * i] = table_minus(cur[i].t0, cur[i].t1, cur[i].t0, cur[i].t1);
      next[2 * i + 1] = table_plus(cur[i].t0, cur[i].t1, cur[i].t0, cur[i].t1);
    });
    cur = std::move(next);
  }
}

void run_levels_dense(std::vector<FlaggedBlock> root, int depth, const LevelSink& sink) {
  std::vector<std::vector<FlaggedBlock>> cur;
  cur.push_back(std::move(root));
  for (int n = 0;; ++n) {
    // flatten (node, block) pairs so uneven nodes still balance across threads
    std::vector<std::pair<int, int>> tasks;
    for (std::size_t i = 0; i < cur.size(); ++i)
      for (std::size_t k = 0; k < cur[i].size(); ++k)
        tasks.emplace_back(static_cast<int>(i), static_cast<int>(k));
    std::vector<double> contrib(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), [&](int t) {
      const FlaggedBlock& blk = cur[tasks[t].first][tasks[t].second];
      contrib[t] = blk.weight * block_channel_entropy(blk);
    });
    std::vector<double> ents(cur.size(), 0.0);
    for (std::size_t t = 0; t < tasks.size(); ++t) ents[tasks[t].first] += contrib[t];
    sink(n, ents);
    if (n == depth) break;
    for (const std::vector<FlaggedBlock>& blocks : cur) {
      const long d = max_block_dim(blocks);
      check_block_dim_cap(d * d, "polarization_run");
      check_block_count_cap(2L * static_cast<long>(blocks.size()) *
                                static_cast<long>(blocks.size()),
                            "polarization_run");
    }
    std::vector<std::vector<FlaggedBlock>> next(2 * cur.size());
    parallel_for(static_cast<int>(cur.size()), [&](int i) {
      next[2 * i] = dense_minus(cur[i], cur[i]);
      next[2 * i + 1] = dense_plus(cur[i], cur[i]);
    });
    cur = std::move(next);
  }
}

void run_levels(const SynthesizedChannel& w, int depth, const LevelSink& sink) {
  switch (w.rep) {
    case ChannelRep::kErasure:
      run_levels_erasure(w.erasure, depth, sink);
      break;
    case ChannelRep::kClassical:
      run_levels_classical(w.table0, w.table1, depth, sink);
      break;
    case ChannelRep::kDense:
      run_levels_dense(w.blocks, depth, sink);
      break;
  }
}

PolarStats stats_from(int n, const std::vector<double>& ents, double a, double b) {
  PolarStats s;
  s.n = n;
  const double m = static_cast<double>(ents.size());
  for (double h : ents) {
    const double info = kLn2 - h;
    s.mu += info;
    s.nu += info * info;
    if (info < a)
      s.alpha += 1.0;
    else if (info > b)
      s.beta += 1.0;
  }
  s.mu /= m;
  s.nu /= m;
  s.alpha /= m;
  s.beta /= m;
  s.theta = 1.0 - s.alpha - s.beta;
  return s;
}

void enforce_conservation(const std::vector<PolarStats>& st, const std::string& who) {
  for (std::size_t i = 1; i < st.size(); ++i) {
    if (std::abs(st[i].mu - st[0].mu) > 1e-8)
      throw std::runtime_error(who + ": mean information drifted across levels");
    if (st[i].nu < st[i - 1].nu - 1e-10)
      throw std::runtime_error(who + ": information second moment decreased across levels");
  }
}

void check_thresholds(double a, double b, const std::string& who) {
  if (!(a < b) || a < -1e-12 || b > kLn2 + 1e-12)
    throw std::invalid_argument(who + ": thresholds must satisfy 0 <= a < b <= ln 2");
}

void check_tree_depth(int depth, const std::string& who) {
  if (depth < 0) throw std::invalid_argument(who + ": depth must be nonnegative");
  if (depth > 62 || (1L << depth) > kSequenceCap)
    throw cap_exceeded(who + ": 2^depth synthesized channels would exceed the sequence cap");
}

}  // namespace

// ---- population runs --------------------------------------------------------------

std::vector<PolarStats> polarization_run(const SynthesizedChannel& w, int depth,
                                         double a, double b) {
  check_thresholds(a, b, "polarization_run");
  check_tree_depth(depth, "polarization_run");
  w.validate();
  std::vector<PolarStats> out;
  out.reserve(depth + 1);
  run_levels(w, depth,
             [&](int n, const std::vector<double>& ents) { out.push_back(stats_from(n, ents, a, b)); });
  enforce_conservation(out, "polarization_run");
  return out;
}

std::vector<PolarStats> nonstationary_run(std::vector<SynthesizedChannel> channels,
                                          int depth, double a, double b) {
  check_thresholds(a, b, "nonstationary_run");
  if (depth < 0) throw std::invalid_argument("nonstationary_run: depth must be nonnegative");
  const long total = static_cast<long>(channels.size());
  if (total == 0) throw std::invalid_argument("nonstationary_run: channel list is empty");
  if (total > kSequenceCap)
    throw cap_exceeded("nonstationary_run: channel list exceeds the sequence cap");
  if (depth > 62 || total % (1L << depth) != 0)
    throw std::invalid_argument(
        "nonstationary_run: list length must be a positive multiple of 2^depth");
  for (const SynthesizedChannel& w : channels) w.validate();

  std::vector<PolarStats> out;
  out.reserve(depth + 1);
  for (int n = 0;; ++n) {
    std::vector<double> ents(total);
    parallel_for(static_cast<int>(total), [&](int i) { ents[i] = channels[i].entropy(); });
    out.push_back(stats_from(n, ents, a, b));
    if (n == depth) break;
    const long block = 1L << (n + 1);
    const long half = block / 2;
    for (long m = 0; m < total / block; ++m)
      for (long j = 0; j < half; ++j)
        precheck_pair(channels[block * m + j], channels[block * m + half + j],
                      "nonstationary_run");
    std::vector<SynthesizedChannel> next(total);
    parallel_for(static_cast<int>(total / 2), [&](int p) {
      const long m = p / half;
      const long j = p % half;
      const long lo = block * m + j;
      const long hi = lo + half;
      next[lo] = combine_minus(channels[lo], channels[hi]);
      next[hi] = combine_plus(channels[lo], channels[hi]);
    });
    channels = std::move(next);
  }
  enforce_conservation(out, "nonstationary_run");
  return out;
}

// ---- band floor and single-step gap --------------------------------------------------

double kappa_floor(double a, double b) {
  check_thresholds(a, b, "kappa_floor");
  const double lo = kLn2 - b;
  const double hi = kLn2 - a;
  const auto objective = [](double h1, double h2) {
    return 2.0 * (qmgl_two(h1, h2) - std::max(h1, h2));
  };
  const int grid = 97;
  double bx = lo, by = lo;
  double bv = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double x = lo + (hi - lo) * i / (grid - 1);
    for (int j = 0; j < grid; ++j) {
      const double y = lo + (hi - lo) * j / (grid - 1);
      const double v = objective(x, y);
      if (v < bv) {
        bv = v;
        bx = x;
        by = y;
      }
    }
  }
  for (int round = 0; round < 4; ++round) {
    bx = golden_min([&](double x) { return objective(x, by); }, lo, hi, 1e-12).first;
    const auto ry = golden_min([&](double y) { return objective(bx, y); }, lo, hi, 1e-12);
    by = ry.first;
    bv = ry.second;
  }
  return bv;
}

EntropyGapReport entropy_gap(const SynthesizedChannel& w1, const SynthesizedChannel& w2,
                             double a, double b) {
  check_thresholds(a, b, "entropy_gap");
  w1.validate();
  w2.validate();
  EntropyGapReport r;
  r.i1 = w1.mutual_info();
  r.i2 = w2.mutual_info();
  r.i_minus = combine_minus(w1, w2).mutual_info();
  r.i_plus = combine_plus(w1, w2).mutual_info();
  r.gap = (r.i_plus - r.i_minus) - std::abs(r.i1 - r.i2);
  r.floor_val = kappa_floor(a, b);
  return r;
}

// ---- T functional ---------------------------------------------------------------------

TFunctionalSeries t_functional_run(const SynthesizedChannel& w, int depth) {
  check_tree_depth(depth, "t_functional_run");
  w.validate();
  TFunctionalSeries ts;
  ts.expectation.reserve(depth + 1);
  run_levels(w, depth, [&](int, const std::vector<double>& ents) {
    double acc = 0.0;
    for (double h : ents) {
      const double ht = h / kLn2;
      acc += ht * (1.0 - ht);
    }
    ts.expectation.push_back(acc / static_cast<double>(ents.size()));
  });
  ts.monotone = true;
  for (std::size_t i = 1; i < ts.expectation.size(); ++i)
    if (ts.expectation[i] > ts.expectation[i - 1] + 1e-10) ts.monotone = false;

  std::vector<double> xs, ys;
  for (int n = depth / 2; n <= depth; ++n) {
    const double e = ts.expectation[n];
    if (e > 0.0) {
      xs.push_back(static_cast<double>(n));
      ys.push_back(std::log(e) * std::log(e));
    }
  }
  if (xs.size() >= 2) {
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      xm += xs[i];
      ym += ys[i];
    }
    xm /= xs.size();
    ym /= ys.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      num += (xs[i] - xm) * (ys[i] - ym);
      den += (xs[i] - xm) * (xs[i] - xm);
    }
    ts.shape_rate = 0.5 * num / den;
  }
  return ts;
}

}  // namespace entroscope
