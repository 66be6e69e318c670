#pragma once

#include <map>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "cdr/modes.hpp"
#include "cdr/rational.hpp"

namespace cdr {

/// Translation between field labels (gamma(z) = sum gamma_n z^-n, beta(z) =
/// sum beta_n z^-n-1, and likewise c, b) and the uniform indexing
/// Y(A, z) = sum_n A_(n) z^-n-1 used by every product computed here.
inline long uniform_index(const Mode& m) {
  return (m.kind == ModeKind::Gamma || m.kind == ModeKind::C) ? m.index - 1 : m.index;
}

inline long field_label_from_uniform(ModeKind k, long u) {
  return (k == ModeKind::Gamma || k == ModeKind::C) ? u + 1 : u;
}

inline Mode mode_from_uniform(ModeKind k, int species, long u) {
  return Mode{k, species, field_label_from_uniform(k, u)};
}

/// Memo for the nth-product recursion; reuse across calls that share a
/// configuration to make repeated products over the same tails cheap.
struct NthCache {
  std::map<std::tuple<NormalMonomial, long, NormalMonomial>, StateVector> memo;
};

namespace detail {

inline StateVector nth_mono(const NormalMonomial& a, long n, const NormalMonomial& b,
                            const AlgebraConfig& cfg, NthCache& cache);

inline StateVector nth_state(const NormalMonomial& a, long n, const StateVector& B,
                             const AlgebraConfig& cfg, NthCache& cache) {
  StateVector out;
  if (B.truncated()) out.mark_truncated();
  for (const auto& [bm, bc] : B.terms()) out += bc * nth_mono(a, n, bm, cfg, cache);
  return out;
}

/// Core recursion. Writing the monomial a = x_(j0) a' with x the leading
/// generator mode, a is the normal-ordered product of the field
/// d^(m) x(z) / m! (m = -j0 - 1) with the field of a', so
///   a_(n) = sum_{j<0} T^(m)x_(j) a'_(n-1-j)
///         + (-1)^{|x||a'|} sum_{j>=0} a'_(n-1-j) T^(m)x_(j)
/// with T^(m)x_(j) = (-1)^m binom(j, m) x_(j-m). Both sums are finite on a
/// non-negatively graded module.
inline StateVector nth_mono(const NormalMonomial& a, long n, const NormalMonomial& b,
                            const AlgebraConfig& cfg, NthCache& cache) {
  if (a.is_vacuum()) {
    return n == -1 ? StateVector::monomial(b) : StateVector::zero();
  }
  auto key = std::make_tuple(a, n, b);
  if (auto it = cache.memo.find(key); it != cache.memo.end()) return it->second;

  const Mode x = a.modes().front();
  NormalMonomial aprime =
      NormalMonomial::from_sorted({a.modes().begin() + 1, a.modes().end()});
  const long j0 = uniform_index(x);
  const unsigned long m = static_cast<unsigned long>(-j0 - 1);
  const int eps = (is_odd(x) && aprime.parity() == 1) ? -1 : 1;
  const StateVector bstate = StateVector::monomial(b);

  StateVector out;

  // Creation half: j runs over [n - W, -1] with W bounding the weight of
  // a'_(n-1-j) b.
  const long W = aprime.weight() + b.weight();
  for (long j = -1; j >= n - W; --j) {
    StateVector inner = nth_mono(aprime, n - 1 - j, b, cfg, cache);
    if (inner.is_zero() && !inner.truncated()) continue;
    Rational coef(mpz_class((m % 2 ? -1 : 1) * binomial(j, m)));
    if (coef.is_zero()) continue;
    out += coef * apply_mode(mode_from_uniform(x.kind, x.species, j + j0 + 1), inner, cfg);
  }

  // Annihilation half: modes of weight -p acting on b vanish once p exceeds
  // the weight of b.
  for (long j = 0;; ++j) {
    Mode xm = mode_from_uniform(x.kind, x.species, j + j0 + 1);
    if (xm.index > b.weight()) break;
    StateVector t = apply_mode(xm, bstate, cfg);
    if (t.is_zero() && !t.truncated()) continue;
    Rational coef(mpz_class((m % 2 ? -1 : 1) * binomial(j, m)));
    if (coef.is_zero()) continue;
    out += Rational(eps) * coef * nth_state(aprime, n - 1 - j, t, cfg, cache);
  }

  cache.memo.emplace(std::move(key), out);
  return out;
}

}  // namespace detail

/// A_(n) B in the uniform indexing. The optional cache persists work across
/// calls; products over a non-negatively graded state space are always
/// finite sums.
inline StateVector nth_product(const StateVector& A, long n, const StateVector& B,
                               const AlgebraConfig& cfg, NthCache* cache = nullptr) {
  NthCache local;
  NthCache& c = cache ? *cache : local;
  StateVector out;
  if (A.truncated() || B.truncated()) out.mark_truncated();
  for (const auto& [am, ac] : A.terms())
    for (const auto& [bm, bc] : B.terms())
      out += (ac * bc) * detail::nth_mono(am, n, bm, cfg, c);
  return out;
}

/// Singular part of the operator product: the list of A_(n) B for n >= 0.
/// Poles are indexed by n (order n+1 pole); trailing zeros are trimmed.
struct OpeSingularPart {
  std::vector<StateVector> poles;  // poles[n] multiplies (z-w)^{-n-1}

  bool all_zero() const {
    for (const auto& p : poles)
      if (!p.is_zero()) return false;
    return true;
  }
};

inline OpeSingularPart ope_singular(const StateVector& A, const StateVector& B,
                                    const AlgebraConfig& cfg, NthCache* cache = nullptr) {
  OpeSingularPart out;
  long bound = A.max_weight() + B.max_weight();
  for (long n = 0; n <= bound; ++n) out.poles.push_back(nth_product(A, n, B, cfg, cache));
  while (!out.poles.empty() && out.poles.back().is_zero() && !out.poles.back().truncated())
    out.poles.pop_back();
  return out;
}

/// Translation operator T: the derivation with T|0> = 0 and
/// [T, x_(j)] = -j x_(j-1) on every generator mode.
inline StateVector translate(const StateVector& v) {
  StateVector out;
  if (v.truncated()) out.mark_truncated();
  for (const auto& [mono, c] : v.terms()) {
    for (size_t i = 0; i < mono.size(); ++i) {
      const Mode& x = mono.modes()[i];
      long j = uniform_index(x);
      auto [sign1, rest] = mono.remove_at(i);
      Mode moved{x.kind, x.species, x.index - 1};  // uniform index j-1 for every kind
      auto ins = rest.insert_creation(moved);
      if (!ins) continue;
      out.add_term(ins->second, c * Rational(-j) * Rational(sign1 * ins->first));
    }
  }
  return out;
}

/// One term of a U'(V)-bracket expansion: coefficient * state placed at the
/// given uniform mode index.
struct LieBracketTerm {
  StateVector state;
  long index;
};

/// [A_[m], B_[k]] = sum_{n>=0} binom(m, n) (A_(n) B)_[m+k-n]; indices are
/// uniform. The expansion is finite by the grading bound on A_(n) B.
inline std::vector<LieBracketTerm> lie_bracket(const StateVector& A, long m,
                                               const StateVector& B, long k,
                                               const AlgebraConfig& cfg,
                                               NthCache* cache = nullptr) {
  std::vector<LieBracketTerm> out;
  long bound = A.max_weight() + B.max_weight();
  for (long n = 0; n <= bound; ++n) {
    StateVector s = Rational(binomial(m, static_cast<unsigned long>(n))) *
                    nth_product(A, n, B, cfg, cache);
    if (!s.is_zero()) out.push_back({std::move(s), m + k - n});
  }
  return out;
}

// --- distinguished states -------------------------------------------------

/// L = sum_i gamma^i_-1 beta^i_-1 |0> + c^i_-1 b^i_-1 |0>; its field is the
/// Virasoro element with T = L_(0) and weight grading L_(1).
inline StateVector virasoro_state(int n_species) {
  StateVector out;
  for (int i = 1; i <= n_species; ++i) {
    out.add_term(NormalMonomial::from_sorted({Mode{ModeKind::Beta, i, -1},
                                              Mode{ModeKind::Gamma, i, -1}}),
                 Rational(1));
    out.add_term(
        NormalMonomial::from_sorted({Mode{ModeKind::B, i, -1}, Mode{ModeKind::C, i, -1}}),
        Rational(-1));  // c_-1 b_-1 reordered
  }
  return out;
}

/// Q = sum_i beta^i_-1 c^i_0 |0>; its zero-mode is the chiral differential.
inline StateVector q_state(int n_species) {
  StateVector out;
  for (int i = 1; i <= n_species; ++i)
    out.add_term(
        NormalMonomial::from_sorted({Mode{ModeKind::Beta, i, -1}, Mode{ModeKind::C, i, 0}}),
        Rational(1));
  return out;
}

/// G = sum_i b^i_-1 gamma^i_-1 |0>; the partner with Q_(0) G = L.
inline StateVector g_state(int n_species) {
  StateVector out;
  for (int i = 1; i <= n_species; ++i)
    out.add_term(NormalMonomial::from_sorted({Mode{ModeKind::Gamma, i, -1},
                                              Mode{ModeKind::B, i, -1}}),
                 Rational(1));
  return out;
}

struct DistinguishedStates {
  StateVector L, Q, G;
};

inline DistinguishedStates distinguished_states(int n_species) {
  return {virasoro_state(n_species), q_state(n_species), g_state(n_species)};
}

/// Action of the fermion number operator F = sum :c_n b_-n:, diagonal on
/// monomials with eigenvalue (#c - #b).
inline StateVector fermion_charge_apply(const StateVector& v) {
  StateVector out;
  if (v.truncated()) out.mark_truncated();
  for (const auto& [m, c] : v.terms()) out.add_term(m, Rational(m.fermion_charge()) * c);
  return out;
}

/// The chiral de Rham differential d = Q_(0).
inline StateVector chiral_differential(const StateVector& v, const AlgebraConfig& cfg,
                                       NthCache* cache = nullptr) {
  return nth_product(q_state(cfg.species), 0, v, cfg, cache);
}

/// Virasoro-label access: L_n = L_(n+1) in the uniform indexing.
inline StateVector virasoro_mode(const StateVector& L, long n, const StateVector& v,
                                 const AlgebraConfig& cfg, NthCache* cache = nullptr) {
  return nth_product(L, n + 1, v, cfg, cache);
}

/// Central charge read off from L_(3) L = (c/2) |0>.
inline Rational central_charge(const StateVector& L, const AlgebraConfig& cfg) {
  StateVector s = nth_product(L, 3, L, cfg);
  return Rational(2) * s.coeff(NormalMonomial());
}

}  // namespace cdr
