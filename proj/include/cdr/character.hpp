#pragma once

#include <array>
#include <functional>
#include <future>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdr/modes.hpp"
#include "cdr/monoid.hpp"
#include "cdr/rational.hpp"

namespace cdr {

// --- the cyclic action and its invariants -------------------------------------

/// Order-N cyclic action on the two-species system: gamma^1 and beta^2 carry
/// +1, gamma^2 and beta^1 carry -1, fermionic modes follow their bosonic
/// partners through mode_g_charge.
struct GAction {
  long order;

  explicit GAction(long n) : order(n) {
    if (n < 1) throw std::invalid_argument("GAction: order must be >= 1");
  }

  long mode_weight_of(const Mode& m) const { return mode_g_charge(m); }

  bool invariant(const NormalMonomial& m) const {
    return ((m.g_charge() % order) + order) % order == 0;
  }
};

/// Number of partitions of m into at most n parts, with the boundary
/// convention p_n(m) = 0 for m <= 0.
inline mpz_class partitions_at_most(long n, long m) {
  if (n < 1) throw std::invalid_argument("partitions_at_most: n must be >= 1");
  if (m <= 0) return 0;
  std::vector<mpz_class> dp(static_cast<size_t>(m) + 1, 0);
  dp[0] = 1;
  // conjugate form: partitions with parts of size at most n
  for (long part = 1; part <= std::min(n, m); ++part)
    for (long v = part; v <= m; ++v)
      dp[static_cast<size_t>(v)] += dp[static_cast<size_t>(v - part)];
  return dp[static_cast<size_t>(m)];
}

/// The submonoid of N^4 describing which bosonic mode-count vectors
/// (#gamma^1, #gamma^2, #beta^1, #beta^2) occur in the invariant subalgebra:
/// species blocks of size N, the mixed pairs, and the beta-gamma pairs.
inline FinGenMonoid vq_basis_monoid(long n) {
  if (n < 1) throw std::invalid_argument("vq_basis_monoid: n must be >= 1");
  return FinGenMonoid::make(4, {{n, 0, 0, 0},
                                {0, n, 0, 0},
                                {1, 1, 0, 0},
                                {0, 0, n, 0},
                                {0, 0, 0, n},
                                {0, 0, 1, 1},
                                {1, 0, 1, 0},
                                {0, 1, 0, 1}});
}

/// Mode-count vector of a purely bosonic monomial.
inline std::array<long, 4> bosonic_count_vector(const NormalMonomial& m) {
  std::array<long, 4> out{0, 0, 0, 0};
  for (const auto& mode : m.modes()) {
    if (mode.species > 2)
      throw std::invalid_argument("bosonic_count_vector: species beyond 2");
    if (mode.kind == ModeKind::Gamma)
      ++out[mode.species == 1 ? 0 : 1];
    else if (mode.kind == ModeKind::Beta)
      ++out[mode.species == 1 ? 2 : 3];
    else
      throw std::invalid_argument("bosonic_count_vector: fermionic mode present");
  }
  return out;
}

/// Memoizing front end for count-vector membership queries.
class MembershipOracle {
 public:
  explicit MembershipOracle(FinGenMonoid q) : q_(std::move(q)) {}

  bool contains(const std::array<long, 4>& v) {
    auto it = memo_.find(v);
    if (it != memo_.end()) return it->second;
    bool m = membership(q_, std::vector<long>(v.begin(), v.end())).member;
    memo_.emplace(v, m);
    return m;
  }

  const FinGenMonoid& monoid() const { return q_; }

 private:
  FinGenMonoid q_;
  std::map<std::array<long, 4>, bool> memo_;
};

// --- graded slices of the invariant subalgebra --------------------------------

struct GradedSlice {
  long group_order = 0;
  long weight = 0;
  long gamma0_cutoff = 0;
  std::map<long, std::vector<NormalMonomial>> strata;  // gamma_0-degree -> monomials
  long total = 0;
  // G-invariant by charge, but outside the block-monoid basis: reported as a
  // diagnostic, never mixed into the slice
  long charge_only_extras = 0;
};

/// All beta/gamma-mode monomials of weight r with gamma_0-degree <= cutoff
/// whose count vector lies in the block monoid, stratified by gamma_0-degree.
inline GradedSlice enumerate_invariant_slice(long n, long r, long gamma0_cutoff,
                                             MembershipOracle* shared_oracle = nullptr) {
  if (n < 1) throw std::invalid_argument("enumerate_invariant_slice: order must be >= 1");
  if (r < 0) throw std::invalid_argument("enumerate_invariant_slice: weight must be >= 0");
  if (gamma0_cutoff < 0)
    throw std::invalid_argument("enumerate_invariant_slice: negative cutoff");
  MembershipOracle local(vq_basis_monoid(n));
  MembershipOracle& oracle = shared_oracle ? *shared_oracle : local;
  GAction action(n);

  // multisets of positive-weight modes summing to weight r
  std::vector<Mode> options;
  for (long k = 1; k <= r; ++k) {
    options.push_back(Mode{ModeKind::Gamma, 1, -k});
    options.push_back(Mode{ModeKind::Gamma, 2, -k});
    options.push_back(Mode{ModeKind::Beta, 1, -k});
    options.push_back(Mode{ModeKind::Beta, 2, -k});
  }
  std::vector<std::vector<Mode>> positive;
  std::vector<Mode> cur;
  std::function<void(size_t, long)> collect = [&](size_t opt, long remaining) {
    if (remaining == 0) {
      positive.push_back(cur);
      return;
    }
    if (opt == options.size()) return;
    long w = mode_weight(options[opt]);
    long max_count = remaining / w;
    for (long c = 0; c <= max_count; ++c) {
      for (long t = 0; t < c; ++t) cur.push_back(options[opt]);
      collect(opt + 1, remaining - c * w);
      for (long t = 0; t < c; ++t) cur.pop_back();
    }
  };
  collect(0, r);

  GradedSlice slice;
  slice.group_order = n;
  slice.weight = r;
  slice.gamma0_cutoff = gamma0_cutoff;
  for (long d1 = 0; d1 <= gamma0_cutoff; ++d1)
    for (long d2 = 0; d1 + d2 <= gamma0_cutoff; ++d2)
      for (const auto& pos : positive) {
        std::array<long, 4> count{d1, d2, 0, 0};
        for (const auto& m : pos) {
          if (m.kind == ModeKind::Gamma)
            ++count[m.species == 1 ? 0 : 1];
          else
            ++count[m.species == 1 ? 2 : 3];
        }
        bool in_basis = oracle.contains(count);
        if (!in_basis) {
          long charge = count[0] - count[1] - count[2] + count[3];
          if (((charge % n) + n) % n == 0) ++slice.charge_only_extras;
          continue;
        }
        std::vector<Mode> modes = pos;
        for (long t = 0; t < d1; ++t) modes.push_back(Mode{ModeKind::Gamma, 1, 0});
        for (long t = 0; t < d2; ++t) modes.push_back(Mode{ModeKind::Gamma, 2, 0});
        std::sort(modes.begin(), modes.end());
        NormalMonomial mono = NormalMonomial::from_sorted(std::move(modes));
        if (!action.invariant(mono))
          throw std::logic_error("enumerate_invariant_slice: basis monomial fails invariance");
        slice.strata[d1 + d2].push_back(mono);
        ++slice.total;
      }
  for (auto& [d, list] : slice.strata) std::sort(list.begin(), list.end());
  return slice;
}

// --- minimal generators over the weight-zero subalgebra -----------------------

namespace detail {

/// Exact sparse row reduction over Q; returns the set of pivot columns.
inline std::set<size_t> sparse_pivot_columns(std::vector<std::map<size_t, Rational>> rows) {
  std::map<size_t, std::map<size_t, Rational>> pivots;
  std::set<size_t> out;
  for (auto& row : rows) {
    while (!row.empty()) {
      size_t lead = row.begin()->first;
      auto it = pivots.find(lead);
      if (it == pivots.end()) {
        Rational inv = row.begin()->second.inverse();
        for (auto& [c, val] : row) val = val * inv;
        out.insert(lead);
        pivots.emplace(lead, row);
        break;
      }
      Rational factor = row.begin()->second;
      for (const auto& [c, val] : it->second) {
        auto jt = row.find(c);
        Rational nv = (jt == row.end() ? Rational(0) : jt->second) - factor * val;
        if (nv.is_zero()) {
          if (jt != row.end()) row.erase(jt);
        } else if (jt == row.end()) {
          row.emplace(c, std::move(nv));
        } else {
          jt->second = std::move(nv);
        }
      }
    }
  }
  return out;
}

}  // namespace detail

struct MinimalGeneratorsResult {
  long group_order = 0;
  long weight = 0;
  long count = 0;
  std::vector<NormalMonomial> witnesses;
  bool stable = false;
  long gamma0_cutoff = 0;
  std::string note;
};

/// Number of homogeneous module generators of the weight-r slice over the
/// weight-zero subalgebra: the dimension of the quotient by the irrelevant
/// ideal ((gamma_0^1)^N, (gamma_0^2)^N, gamma_0^1 gamma_0^2), computed by
/// exact linear algebra on the monomial basis. Stability is certified by
/// recomputing at cutoff + N and cutoff + 2N.
inline MinimalGeneratorsResult minimal_generators(long n, long r, long gamma0_cutoff) {
  if (n < 1) throw std::invalid_argument("minimal_generators: order must be >= 1");
  if (r < 1) throw std::invalid_argument("minimal_generators: weight must be >= 1");
  MembershipOracle oracle(vq_basis_monoid(n));

  std::vector<std::vector<Mode>> ideal_gens = {
      std::vector<Mode>(static_cast<size_t>(n), Mode{ModeKind::Gamma, 1, 0}),
      std::vector<Mode>(static_cast<size_t>(n), Mode{ModeKind::Gamma, 2, 0}),
      {Mode{ModeKind::Gamma, 1, 0}, Mode{ModeKind::Gamma, 2, 0}}};

  auto run = [&](long cut) {
    GradedSlice s = enumerate_invariant_slice(n, r, cut, &oracle);
    std::vector<NormalMonomial> basis;
    std::map<NormalMonomial, size_t> index;
    for (const auto& [d, list] : s.strata)
      for (const auto& m : list) {
        index.emplace(m, basis.size());
        basis.push_back(m);
      }
    std::vector<std::map<size_t, Rational>> rows;
    for (const auto& x : basis)
      for (const auto& g : ideal_gens) {
        std::vector<Mode> prod = x.modes();
        prod.insert(prod.end(), g.begin(), g.end());
        std::sort(prod.begin(), prod.end());
        NormalMonomial y = NormalMonomial::from_sorted(std::move(prod));
        auto it = index.find(y);
        if (it == index.end()) continue;  // product left the truncation window
        rows.push_back({{it->second, Rational(1)}});
      }
    std::set<size_t> pivots = detail::sparse_pivot_columns(std::move(rows));
    std::vector<NormalMonomial> wit;
    for (size_t i = 0; i < basis.size(); ++i)
      if (!pivots.count(i)) wit.push_back(basis[i]);
    std::sort(wit.begin(), wit.end());
    return wit;
  };

  std::vector<NormalMonomial> w0 = run(gamma0_cutoff);
  std::vector<NormalMonomial> w1 = run(gamma0_cutoff + n);
  std::vector<NormalMonomial> w2 = run(gamma0_cutoff + 2 * n);

  MinimalGeneratorsResult out;
  out.group_order = n;
  out.weight = r;
  out.gamma0_cutoff = gamma0_cutoff;
  out.stable = w0 == w1 && w1 == w2;
  out.witnesses = std::move(w2);
  out.count = static_cast<long>(out.witnesses.size());
  if (!out.stable)
    out.note = "generator set not stable through cutoff " +
               std::to_string(gamma0_cutoff + 2 * n) + "; raise gamma0_cutoff";
  return out;
}

// --- the recursive length formula ----------------------------------------------

/// Recursive slice-length formula:
///   len(r) = 4r + 2 p_N(r) + 2 p_N(r - N)
///            + sum over (n_1, ..., n_{r-1}) with sum k n_k = r of
///              prod_k C(len(k), n_k),
/// self-consistently from len(1) = 6 upward. The multichoose variant replaces
/// the binomial C with the multiset coefficient and recurses on its own
/// values; both readings are reported side by side.
inline mpz_class formula_length(long n, long r, bool multichoose_variant = false) {
  if (n < 2) throw std::invalid_argument("formula_length: order must be >= 2");
  if (r < 1) throw std::invalid_argument("formula_length: weight must be >= 1");
  std::vector<mpz_class> len(static_cast<size_t>(r) + 1, 0);
  for (long k = 1; k <= r; ++k) {
    mpz_class total = 4 * k;
    total += 2 * partitions_at_most(n, k);
    total += 2 * partitions_at_most(n, k - n);
    std::function<mpz_class(long, long)> walk = [&](long j, long budget) -> mpz_class {
      if (budget == 0) return 1;
      if (j < 1) return 0;
      mpz_class acc = 0;
      for (long c = 0; c * j <= budget; ++c) {
        mpz_class ways = multichoose_variant
                             ? multichoose(len[static_cast<size_t>(j)],
                                           static_cast<unsigned long>(c))
                             : binomial(len[static_cast<size_t>(j)],
                                        static_cast<unsigned long>(c));
        if (ways != 0) acc += ways * walk(j - 1, budget - c * j);
      }
      return acc;
    };
    len[static_cast<size_t>(k)] = total + walk(k - 1, k);
  }
  return len[static_cast<size_t>(r)];
}

// --- formula-versus-oracle comparison -------------------------------------------

struct CharacterRow {
  long group_order = 0;
  long weight = 0;
  mpz_class formula;
  mpz_class formula_multichoose;
  long oracle = 0;
  bool stable = false;
  long witness_count = 0;
  std::vector<NormalMonomial> witnesses;
};

struct CharacterReport {
  long group_order = 0;
  long r_max = 0;
  long gamma0_cutoff = 0;
  bool all_stable = true;
  std::vector<CharacterRow> rows;
};

/// Table of formula vs oracle values for r = 1..r_max. Distinct weights are
/// independent; `threads` > 1 runs them concurrently (results are joined in
/// weight order, so output is deterministic).
inline CharacterReport compare(long n, long r_max, long gamma0_cutoff, long threads = 1) {
  if (n < 2) throw std::invalid_argument("compare: order must be >= 2");
  if (r_max < 1) throw std::invalid_argument("compare: r_max must be >= 1");
  if (gamma0_cutoff < 0) throw std::invalid_argument("compare: negative cutoff");
  if (threads < 1) threads = 1;

  CharacterReport rep;
  rep.group_order = n;
  rep.r_max = r_max;
  rep.gamma0_cutoff = gamma0_cutoff;

  std::vector<MinimalGeneratorsResult> oracle_rows(static_cast<size_t>(r_max));
  if (threads == 1) {
    for (long r = 1; r <= r_max; ++r)
      oracle_rows[static_cast<size_t>(r - 1)] = minimal_generators(n, r, gamma0_cutoff);
  } else {
    long next = 1;
    while (next <= r_max) {
      long batch = std::min(threads, r_max - next + 1);
      std::vector<std::future<MinimalGeneratorsResult>> futs;
      for (long i = 0; i < batch; ++i)
        futs.push_back(std::async(std::launch::async, [n, gamma0_cutoff, r = next + i]() {
          return minimal_generators(n, r, gamma0_cutoff);
        }));
      for (long i = 0; i < batch; ++i)
        oracle_rows[static_cast<size_t>(next - 1 + i)] = futs[static_cast<size_t>(i)].get();
      next += batch;
    }
  }

  for (long r = 1; r <= r_max; ++r) {
    const auto& res = oracle_rows[static_cast<size_t>(r - 1)];
    CharacterRow row;
    row.group_order = n;
    row.weight = r;
    row.formula = formula_length(n, r);
    row.formula_multichoose = formula_length(n, r, true);
    row.oracle = res.count;
    row.stable = res.stable;
    row.witness_count = static_cast<long>(res.witnesses.size());
    row.witnesses = res.witnesses;
    rep.all_stable = rep.all_stable && res.stable;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

inline std::string character_csv(const CharacterReport& rep) {
  std::string out = "N,r,formula,formula_multichoose_variant,oracle,stable,witness_count\n";
  for (const auto& row : rep.rows) {
    out += std::to_string(row.group_order) + "," + std::to_string(row.weight) + "," +
           row.formula.get_str() + "," + row.formula_multichoose.get_str() + "," +
           std::to_string(row.oracle) + "," + (row.stable ? "true" : "false") + "," +
           std::to_string(row.witness_count) + "\n";
  }
  return out;
}

inline nlohmann::json to_json(const CharacterReport& rep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : rep.rows) {
    nlohmann::json wits = nlohmann::json::array();
    for (const auto& w : row.witnesses) wits.push_back(monomial_str(w));
    rows.push_back({{"N", row.group_order},
                    {"r", row.weight},
                    {"formula", row.formula.get_str()},
                    {"formula_multichoose_variant", row.formula_multichoose.get_str()},
                    {"oracle", row.oracle},
                    {"stable", row.stable},
                    {"witness_count", row.witness_count},
                    {"witnesses", std::move(wits)}});
  }
  return {{"N", rep.group_order},
          {"r_max", rep.r_max},
          {"gamma0_cutoff", rep.gamma0_cutoff},
          {"all_stable", rep.all_stable},
          {"rows", std::move(rows)}};
}

}  // namespace cdr
