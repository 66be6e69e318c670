#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdr/modes.hpp"
#include "cdr/rational.hpp"

namespace cdr {

// --- exact integer matrices and Smith normal form ---------------------------

using MatZ = std::vector<std::vector<mpz_class>>;

inline MatZ mat_identity(long n) {
  MatZ m(static_cast<size_t>(n), std::vector<mpz_class>(static_cast<size_t>(n), 0));
  for (long i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline MatZ mat_mul(const MatZ& a, const MatZ& b) {
  size_t m = a.size(), k = b.size(), n = k ? b[0].size() : 0;
  for (const auto& row : a)
    if (row.size() != k) throw std::invalid_argument("mat_mul: shape mismatch");
  MatZ out(m, std::vector<mpz_class>(n, 0));
  for (size_t i = 0; i < m; ++i)
    for (size_t t = 0; t < k; ++t) {
      if (a[i][t] == 0) continue;
      for (size_t j = 0; j < n; ++j) out[i][j] += a[i][t] * b[t][j];
    }
  return out;
}

/// Fraction-free determinant (Bareiss); exact over Z.
inline mpz_class det_bareiss(MatZ a) {
  long n = static_cast<long>(a.size());
  if (n == 0) return 1;
  mpz_class sign = 1, prev = 1;
  for (long k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      long swap_row = -1;
      for (long i = k + 1; i < n; ++i)
        if (a[i][k] != 0) { swap_row = i; break; }
      if (swap_row < 0) return 0;
      std::swap(a[k], a[swap_row]);
      sign = -sign;
    }
    for (long i = k + 1; i < n; ++i)
      for (long j = k + 1; j < n; ++j)
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

/// U * A * V = diag(d_1, ..., d_r, 0, ...) with d_1 | d_2 | ... and d_i > 0.
/// U, V are unimodular; Vinv = V^{-1} is tracked so lattice bases can be read
/// off directly.
struct SmithForm {
  MatZ U, V, Vinv;
  std::vector<mpz_class> diag;  // min(m, n) entries, invariant-factor chain
  long rank = 0;                // number of nonzero diagonal entries
};

inline SmithForm smith_form(const MatZ& a_in) {
  MatZ d = a_in;
  long m = static_cast<long>(d.size());
  long n = m ? static_cast<long>(d[0].size()) : 0;
  for (const auto& row : d)
    if (static_cast<long>(row.size()) != n)
      throw std::invalid_argument("smith_form: ragged matrix");
  SmithForm out;
  out.U = mat_identity(m);
  out.V = mat_identity(n);
  out.Vinv = mat_identity(n);

  auto swap_rows = [&](long i, long j) {
    std::swap(d[i], d[j]);
    std::swap(out.U[i], out.U[j]);
  };
  auto swap_cols = [&](long i, long j) {
    for (long r = 0; r < m; ++r) std::swap(d[r][i], d[r][j]);
    for (long r = 0; r < n; ++r) std::swap(out.V[r][i], out.V[r][j]);
    std::swap(out.Vinv[i], out.Vinv[j]);
  };
  auto row_sub = [&](long dst, long src, const mpz_class& q) {  // row_dst -= q row_src
    for (long j = 0; j < n; ++j) d[dst][j] -= q * d[src][j];
    for (long j = 0; j < m; ++j) out.U[dst][j] -= q * out.U[src][j];
  };
  auto col_sub = [&](long dst, long src, const mpz_class& q) {  // col_dst -= q col_src
    for (long r = 0; r < m; ++r) d[r][dst] -= q * d[r][src];
    for (long r = 0; r < n; ++r) out.V[r][dst] -= q * out.V[r][src];
    for (long j = 0; j < n; ++j) out.Vinv[src][j] += q * out.Vinv[dst][j];
  };
  auto negate_row = [&](long i) {
    for (auto& x : d[i]) x = -x;
    for (auto& x : out.U[i]) x = -x;
  };

  long lim = std::min(m, n);
  for (long t = 0; t < lim; ++t) {
    long pi = -1, pj = -1;
    for (long i = t; i < m; ++i)
      for (long j = t; j < n; ++j)
        if (d[i][j] != 0 &&
            (pi < 0 || mpz_cmpabs(d[i][j].get_mpz_t(), d[pi][pj].get_mpz_t()) < 0)) {
          pi = i;
          pj = j;
        }
    if (pi < 0) break;
    if (pi != t) swap_rows(t, pi);
    if (pj != t) swap_cols(t, pj);

    for (;;) {
      // clear column t by the Euclidean algorithm on rows
      bool dirty = true;
      while (dirty) {
        dirty = false;
        for (long i = t + 1; i < m; ++i)
          while (d[i][t] != 0) {
            mpz_class q = d[i][t] / d[t][t];
            row_sub(i, t, q);
            if (d[i][t] != 0) swap_rows(t, i);
          }
        for (long j = t + 1; j < n; ++j)
          while (d[t][j] != 0) {
            mpz_class q = d[t][j] / d[t][t];
            col_sub(j, t, q);
            if (d[t][j] != 0) swap_cols(t, j);  // may dirty column t below the pivot
          }
        for (long i = t + 1; i < m && !dirty; ++i)
          if (d[i][t] != 0) dirty = true;
      }
      // enforce the divisibility chain: pivot must divide the residual block
      long bad_row = -1;
      for (long i = t + 1; i < m && bad_row < 0; ++i)
        for (long j = t + 1; j < n && bad_row < 0; ++j)
          if (d[i][j] % d[t][t] != 0) bad_row = i;
      if (bad_row < 0) break;
      row_sub(t, bad_row, mpz_class(-1));  // row_t += row_bad, then re-clear
    }
    if (d[t][t] < 0) negate_row(t);
  }

  for (long t = 0; t < lim; ++t) {
    out.diag.push_back(d[t][t]);
    if (d[t][t] != 0) ++out.rank;
  }
  return out;
}

/// Solves x * A = v over Z given the Smith form of A (row-vector convention:
/// the lattice is the row span of A). Returns std::nullopt when v is not in
/// the lattice.
inline std::optional<std::vector<mpz_class>> lattice_solve(const SmithForm& s,
                                                           const std::vector<mpz_class>& v) {
  long k = static_cast<long>(s.U.size());
  long d = static_cast<long>(s.V.size());
  if (static_cast<long>(v.size()) != d)
    throw std::invalid_argument("lattice_solve: vector arity mismatch");
  std::vector<mpz_class> w(d, 0);
  for (long j = 0; j < d; ++j)
    for (long i = 0; i < d; ++i) w[j] += v[i] * s.V[i][j];
  long lim = std::min(k, d);
  std::vector<mpz_class> z(k, 0);
  for (long j = 0; j < d; ++j) {
    if (j < lim && s.diag[j] != 0) {
      if (w[j] % s.diag[j] != 0) return std::nullopt;
      z[j] = w[j] / s.diag[j];
    } else if (w[j] != 0) {
      return std::nullopt;
    }
  }
  std::vector<mpz_class> x(k, 0);
  for (long j = 0; j < k; ++j)
    for (long i = 0; i < k; ++i) x[j] += z[i] * s.U[i][j];
  return x;
}

inline bool in_lattice(const SmithForm& s, const std::vector<mpz_class>& v) {
  return lattice_solve(s, v).has_value();
}

// --- finitely generated submonoids of Z^d -----------------------------------

class FinGenMonoid {
 public:
  static FinGenMonoid make(long ambient_rank, std::vector<std::vector<long>> gens) {
    if (ambient_rank < 1)
      throw std::invalid_argument("FinGenMonoid: ambient rank must be >= 1");
    if (gens.empty()) throw std::invalid_argument("FinGenMonoid: generator list is empty");
    for (const auto& g : gens)
      if (static_cast<long>(g.size()) != ambient_rank)
        throw std::invalid_argument("FinGenMonoid: generator arity mismatch");
    std::sort(gens.begin(), gens.end());
    gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
    return FinGenMonoid(ambient_rank, std::move(gens));
  }

  long ambient_rank() const { return ambient_rank_; }
  const std::vector<std::vector<long>>& generators() const { return gens_; }

  MatZ generator_matrix() const {
    MatZ m;
    for (const auto& g : gens_) m.emplace_back(g.begin(), g.end());
    return m;
  }

  friend bool operator==(const FinGenMonoid& a, const FinGenMonoid& b) {
    return a.ambient_rank_ == b.ambient_rank_ && a.gens_ == b.gens_;
  }

 private:
  FinGenMonoid(long rank, std::vector<std::vector<long>> gens)
      : ambient_rank_(rank), gens_(std::move(gens)) {}
  long ambient_rank_;
  std::vector<std::vector<long>> gens_;
};

/// The chart monoid of the N-fold cyclic quotient surface:
/// generated by (N,0), (0,N) and (1,1) inside N^2.
inline FinGenMonoid an_chart_monoid(long n) {
  if (n < 1) throw std::invalid_argument("an_chart_monoid: n must be >= 1");
  return FinGenMonoid::make(2, {{n, 0}, {0, n}, {1, 1}});
}

inline FinGenMonoid free_monoid(long d) {
  std::vector<std::vector<long>> gens;
  for (long i = 0; i < d; ++i) {
    std::vector<long> e(static_cast<size_t>(d), 0);
    e[static_cast<size_t>(i)] = 1;
    gens.push_back(std::move(e));
  }
  return FinGenMonoid::make(d, std::move(gens));
}

/// Rank and invariant factors (each > 1, successively dividing) of a finitely
/// generated abelian group.
struct AbelianGroupData {
  long rank = 0;
  std::vector<mpz_class> torsion;
};

/// Presents Z^n modulo the row span of an integer relation matrix.
inline AbelianGroupData group_from_presentation(const MatZ& relations, long n_generators) {
  if (n_generators < 0)
    throw std::invalid_argument("group_from_presentation: negative generator count");
  AbelianGroupData g;
  if (relations.empty()) {
    g.rank = n_generators;
    return g;
  }
  for (const auto& row : relations)
    if (static_cast<long>(row.size()) != n_generators)
      throw std::invalid_argument("group_from_presentation: relation arity mismatch");
  SmithForm s = smith_form(relations);
  g.rank = n_generators - s.rank;
  for (long i = 0; i < s.rank; ++i)
    if (s.diag[i] > 1) g.torsion.push_back(s.diag[i]);
  return g;
}

struct GroupifyResult {
  AbelianGroupData group;     // the difference group itself (free: it sits in Z^d)
  AbelianGroupData cokernel;  // Z^d modulo the difference group
  MatZ basis;                 // rows: a lattice basis of the difference group in Z^d
  mpz_class ambient_index;    // [Z^d : difference group] when finite, 0 otherwise
  SmithForm snf;              // certificate for the generator matrix
};

inline GroupifyResult groupify(const FinGenMonoid& q) {
  GroupifyResult out;
  out.snf = smith_form(q.generator_matrix());
  long d = q.ambient_rank();
  out.group.rank = out.snf.rank;
  out.cokernel.rank = d - out.snf.rank;
  mpz_class idx = 1;
  for (long i = 0; i < out.snf.rank; ++i) {
    if (out.snf.diag[i] > 1) out.cokernel.torsion.push_back(out.snf.diag[i]);
    idx *= out.snf.diag[i];
  }
  out.ambient_index = (out.snf.rank == d) ? idx : 0;
  for (long i = 0; i < out.snf.rank; ++i) {
    std::vector<mpz_class> row;
    for (long j = 0; j < d; ++j) row.push_back(out.snf.diag[i] * out.snf.Vinv[i][j]);
    out.basis.push_back(std::move(row));
  }
  return out;
}

// --- membership and saturation ----------------------------------------------

namespace detail {

inline bool is_zero_vec(const std::vector<long>& v) {
  return std::all_of(v.begin(), v.end(), [](long x) { return x == 0; });
}

/// Bounded search needs every generator inside the nonnegative orthant, which
/// makes the monoid pointed and the descent strictly decreasing.
inline void require_orthant_pointed(const FinGenMonoid& q, const char* who) {
  for (const auto& g : q.generators())
    for (long x : g)
      if (x < 0)
        throw std::domain_error(std::string(who) +
                                ": generator outside the nonnegative orthant; "
                                "bounded search supports pointed submonoids of N^d only");
}

}  // namespace detail

struct MembershipResult {
  bool member = false;
  std::vector<std::pair<std::vector<long>, long>> witness;  // (generator, multiplicity)
};

/// Exact decision of v in Q by descent over N^d, memoizing dead ends.
inline MembershipResult membership(const FinGenMonoid& q, const std::vector<long>& v) {
  if (static_cast<long>(v.size()) != q.ambient_rank())
    throw std::invalid_argument("membership: vector arity mismatch");
  detail::require_orthant_pointed(q, "membership");
  MembershipResult out;
  for (long x : v)
    if (x < 0) return out;

  const auto& gens = q.generators();
  std::vector<long> counts(gens.size(), 0);
  std::set<std::vector<long>> dead;
  std::vector<long> rest = v;
  std::function<bool()> descend = [&]() -> bool {
    if (detail::is_zero_vec(rest)) return true;
    if (dead.count(rest)) return false;
    for (size_t gi = 0; gi < gens.size(); ++gi) {
      const auto& g = gens[gi];
      if (detail::is_zero_vec(g)) continue;  // the identity contributes nothing
      bool fits = true;
      for (size_t j = 0; j < g.size() && fits; ++j)
        if (rest[j] < g[j]) fits = false;
      if (!fits) continue;
      for (size_t j = 0; j < g.size(); ++j) rest[j] -= g[j];
      ++counts[gi];
      if (descend()) return true;
      --counts[gi];
      for (size_t j = 0; j < g.size(); ++j) rest[j] += g[j];
    }
    dead.insert(rest);
    return false;
  };
  out.member = descend();
  if (out.member)
    for (size_t gi = 0; gi < gens.size(); ++gi)
      if (counts[gi] > 0) out.witness.emplace_back(gens[gi], counts[gi]);
  return out;
}

/// Integrality is automatic for submonoids of Z^d (they are cancellative).
inline bool is_integral(const FinGenMonoid&) { return true; }

struct SaturationResult {
  bool saturated = true;
  std::optional<std::vector<long>> counterexample;  // v in Q^gp \ Q with m v in Q
  long witness_multiple = 0;                        // the m above, 0 when saturated
  long box_bound = 0;                               // edge of the searched box after doubling
  long multiple_bound = 0;
  bool stable = true;  // base box and doubled box reached the same verdict
};

/// Searches the box [0, B]^d with B = (#generators) * (max generator
/// coordinate), then doubles the box once as a stabilization check. A negative
/// verdict carries a verified counterexample; a positive verdict is a bounded
/// certificate.
inline SaturationResult is_saturated(const FinGenMonoid& q, long multiple_bound = 8) {
  detail::require_orthant_pointed(q, "is_saturated");
  if (multiple_bound < 2) throw std::invalid_argument("is_saturated: multiple bound < 2");
  long d = q.ambient_rank();
  long maxc = 0;
  for (const auto& g : q.generators())
    for (long x : g) maxc = std::max(maxc, x);
  long base = std::max<long>(1, maxc * static_cast<long>(q.generators().size()));
  SmithForm snf = smith_form(q.generator_matrix());

  auto scan = [&](long bound) -> std::optional<std::pair<std::vector<long>, long>> {
    std::vector<long> v(static_cast<size_t>(d), 0);
    for (;;) {
      // odometer step over [0, bound]^d
      long pos = 0;
      while (pos < d && v[pos] == bound) v[pos++] = 0;
      if (pos == d) return std::nullopt;
      ++v[pos];
      std::vector<mpz_class> vz(v.begin(), v.end());
      if (!in_lattice(snf, vz)) continue;
      if (membership(q, v).member) continue;
      for (long mult = 2; mult <= multiple_bound; ++mult) {
        std::vector<long> mv(v.size());
        for (size_t j = 0; j < v.size(); ++j) mv[j] = mult * v[j];
        if (membership(q, mv).member) return std::make_pair(v, mult);
      }
    }
  };

  auto first = scan(base);
  auto second = first ? first : scan(2 * base);
  SaturationResult out;
  out.box_bound = 2 * base;
  out.multiple_bound = multiple_bound;
  out.stable = first.has_value() == second.has_value();
  if (second) {
    out.saturated = false;
    out.counterexample = second->first;
    out.witness_multiple = second->second;
  }
  return out;
}

// --- smoothness and etaleness criteria --------------------------------------

inline void require_characteristic(long c) {
  if (c == 0) return;
  if (c < 2) throw std::invalid_argument("characteristic must be 0 or a prime");
  for (long p = 2; p * p <= c; ++p)
    if (c % p == 0) throw std::invalid_argument("characteristic must be 0 or a prime");
}

struct SmoothnessVerdict {
  bool smooth = false;
  mpz_class torsion_order = 1;
  long characteristic = 0;
  std::string reason;
};

/// Group-level criterion: smooth iff the torsion order of the difference
/// group is invertible in the base (characteristic 0, or a prime not dividing
/// the order).
inline SmoothnessVerdict smoothness_check(const AbelianGroupData& g, long characteristic) {
  require_characteristic(characteristic);
  SmoothnessVerdict v;
  v.characteristic = characteristic;
  for (const auto& t : g.torsion) v.torsion_order *= t;
  v.smooth = characteristic == 0 || v.torsion_order % characteristic != 0;
  v.reason = v.smooth ? "torsion order " + v.torsion_order.get_str() + " invertible"
                      : "torsion order " + v.torsion_order.get_str() +
                            " vanishes in characteristic " + std::to_string(characteristic);
  return v;
}

inline SmoothnessVerdict smoothness_check(const FinGenMonoid& q, long characteristic) {
  return smoothness_check(groupify(q).group, characteristic);
}

// --- monoid homomorphisms ----------------------------------------------------

class MonoidHom {
 public:
  /// matrix has target-rank rows and source-rank columns and must map every
  /// source generator to a member of the target monoid.
  static MonoidHom make(FinGenMonoid source, FinGenMonoid target,
                        std::vector<std::vector<long>> matrix) {
    if (static_cast<long>(matrix.size()) != target.ambient_rank())
      throw std::invalid_argument("MonoidHom: matrix row count != target rank");
    for (const auto& row : matrix)
      if (static_cast<long>(row.size()) != source.ambient_rank())
        throw std::invalid_argument("MonoidHom: matrix column count != source rank");
    MonoidHom h(std::move(source), std::move(target), std::move(matrix));
    for (const auto& g : h.source_.generators())
      if (!membership(h.target_, h.apply(g)).member)
        throw std::invalid_argument("MonoidHom: a generator image lies outside the target monoid");
    return h;
  }

  const FinGenMonoid& source() const { return source_; }
  const FinGenMonoid& target() const { return target_; }
  const std::vector<std::vector<long>>& matrix() const { return matrix_; }

  std::vector<long> apply(const std::vector<long>& v) const {
    if (v.size() != matrix_[0].size())
      throw std::invalid_argument("MonoidHom: vector arity mismatch");
    std::vector<long> out(matrix_.size(), 0);
    for (size_t i = 0; i < matrix_.size(); ++i)
      for (size_t j = 0; j < v.size(); ++j) out[i] += matrix_[i][j] * v[j];
    return out;
  }

 private:
  MonoidHom(FinGenMonoid s, FinGenMonoid t, std::vector<std::vector<long>> m)
      : source_(std::move(s)), target_(std::move(t)), matrix_(std::move(m)) {}
  FinGenMonoid source_, target_;
  std::vector<std::vector<long>> matrix_;
};

inline MonoidHom identity_hom(const FinGenMonoid& q) {
  std::vector<std::vector<long>> m(static_cast<size_t>(q.ambient_rank()),
                                   std::vector<long>(static_cast<size_t>(q.ambient_rank()), 0));
  for (long i = 0; i < q.ambient_rank(); ++i) m[i][i] = 1;
  return MonoidHom::make(q, q, std::move(m));
}

inline MonoidHom compose(const MonoidHom& outer, const MonoidHom& inner) {
  if (!(inner.target() == outer.source()))
    throw std::invalid_argument("compose: inner target and outer source differ");
  size_t rows = outer.matrix().size(), mid = inner.matrix().size(),
         cols = inner.matrix()[0].size();
  std::vector<std::vector<long>> m(rows, std::vector<long>(cols, 0));
  for (size_t i = 0; i < rows; ++i)
    for (size_t t = 0; t < mid; ++t)
      for (size_t j = 0; j < cols; ++j) m[i][j] += outer.matrix()[i][t] * inner.matrix()[t][j];
  return MonoidHom::make(inner.source(), outer.target(), std::move(m));
}

struct EtaleVerdict {
  bool etale = false;
  long kernel_rank = 0;        // free rank of ker on the difference groups (0 required)
  AbelianGroupData cokernel;   // coker on the difference groups
  mpz_class cokernel_order = 0;  // 0 encodes infinite
  long characteristic = 0;
  std::string reason;
};

/// Criterion on the induced map of difference groups: the map must have
/// trivial kernel and finite cokernel of order invertible in the base.
inline EtaleVerdict etale_check(const MonoidHom& h, long characteristic) {
  require_characteristic(characteristic);
  EtaleVerdict out;
  out.characteristic = characteristic;
  GroupifyResult gs = groupify(h.source());
  GroupifyResult gt = groupify(h.target());
  SmithForm target_basis = smith_form(gt.basis);

  // the map written in the two lattice bases
  MatZ k;
  for (const auto& b : gs.basis) {
    std::vector<mpz_class> image(h.target().ambient_rank(), 0);
    for (size_t i = 0; i < image.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) image[i] += h.matrix()[i][j] * b[j];
    auto coords = lattice_solve(target_basis, image);
    if (!coords)
      throw std::logic_error("etale_check: generator image escapes the target difference group");
    k.push_back(std::move(*coords));
  }

  SmithForm sk = smith_form(k);
  out.kernel_rank = gs.group.rank - sk.rank;
  out.cokernel.rank = gt.group.rank - sk.rank;
  mpz_class order = 1;
  for (long i = 0; i < sk.rank; ++i) {
    if (sk.diag[i] > 1) out.cokernel.torsion.push_back(sk.diag[i]);
    order *= sk.diag[i];
  }
  out.cokernel_order = (out.cokernel.rank == 0) ? order : 0;
  bool finite = out.kernel_rank == 0 && out.cokernel.rank == 0;
  bool invertible = characteristic == 0 || out.cokernel_order % characteristic != 0;
  out.etale = finite && invertible;
  if (!finite)
    out.reason = "kernel or cokernel of the difference-group map is infinite";
  else if (!invertible)
    out.reason = "cokernel order " + out.cokernel_order.get_str() +
                 " vanishes in characteristic " + std::to_string(characteristic);
  else
    out.reason = "kernel trivial, cokernel order " + out.cokernel_order.get_str();
  return out;
}

// --- log differentials -------------------------------------------------------

/// A presentation of the module of log differentials over the chart: the SNF
/// lattice basis of the difference group, each generator's differential in
/// that basis, and the pullback of each generator's dlog under the monomial
/// chart (coordinates a_i meaning sum_i a_i * dgamma^i / gamma^i).
struct LogDiffPresentation {
  std::vector<std::string> basis_labels;
  MatZ basis;
  std::vector<std::vector<mpz_class>> generator_coords;  // parallel to generators()
  std::vector<std::vector<long>> chart_pullback;         // parallel to generators()
  // rank-2 diagnostic: whether (1,1) and (-1,1) span the full difference group
  std::optional<bool> diagonal_pair_spans;
};

inline LogDiffPresentation log_differentials(const FinGenMonoid& q) {
  GroupifyResult g = groupify(q);
  LogDiffPresentation out;
  out.basis = g.basis;
  for (long i = 0; i < g.group.rank; ++i)
    out.basis_labels.push_back("e" + std::to_string(i + 1));
  SmithForm basis_snf = smith_form(g.basis);
  for (const auto& gen : q.generators()) {
    std::vector<mpz_class> genz(gen.begin(), gen.end());
    auto coords = lattice_solve(basis_snf, genz);
    if (!coords) throw std::logic_error("log_differentials: generator escapes its own lattice");
    out.generator_coords.push_back(std::move(*coords));
    out.chart_pullback.push_back(gen);
  }
  if (q.ambient_rank() == 2 && g.group.rank == 2) {
    bool inside = in_lattice(basis_snf, {mpz_class(1), mpz_class(1)}) &&
                  in_lattice(basis_snf, {mpz_class(-1), mpz_class(1)});
    // det[(1,1),(-1,1)] = 2, so the pair spans iff it lies inside and the
    // ambient index is exactly 2
    out.diagonal_pair_spans = inside && g.ambient_index == 2;
  }
  return out;
}

// --- Clifford generators of the fermionic side --------------------------------

/// The two-species surface case: dp, dq are the degree-zero odd fields and
/// dp*, dq* their conjugate partners; their singular pairings form the
/// identity pattern (checked in the test suite via ope_singular).
struct CliffordGenerators {
  StateVector dp, dq, dp_star, dq_star;
};

inline CliffordGenerators clifford_generators() {
  auto one = [](ModeKind k, int species, long index) {
    return StateVector::monomial(NormalMonomial::from_sorted({Mode{k, species, index}}));
  };
  CliffordGenerators g;
  g.dp = one(ModeKind::C, 1, 0) + one(ModeKind::C, 2, 0);
  g.dq = one(ModeKind::C, 2, 0) - one(ModeKind::C, 1, 0);
  g.dp_star = Rational(1, 2) * (one(ModeKind::B, 1, -1) + one(ModeKind::B, 2, -1));
  g.dq_star = Rational(1, 2) * (one(ModeKind::B, 2, -1) - one(ModeKind::B, 1, -1));
  return g;
}

// --- CLI literal and JSON plumbing -------------------------------------------

/// Parses "gens=(3,0);(0,3);(1,1)" (the "gens=" prefix is optional).
inline FinGenMonoid parse_monoid_literal(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.rfind("gens=", 0) == 0) s = s.substr(5);
  if (s.empty()) throw std::invalid_argument("monoid literal: empty generator list");
  std::vector<std::vector<long>> gens;
  size_t pos = 0;
  while (pos < s.size()) {
    if (s[pos] != '(')
      throw std::invalid_argument("monoid literal: expected '(' at \"" + s.substr(pos) + "\"");
    size_t close = s.find(')', pos);
    if (close == std::string::npos)
      throw std::invalid_argument("monoid literal: unbalanced '(' at \"" + s.substr(pos) + "\"");
    std::string body = s.substr(pos + 1, close - pos - 1);
    std::vector<long> v;
    size_t start = 0;
    while (start <= body.size()) {
      size_t comma = body.find(',', start);
      std::string tok = body.substr(start, comma == std::string::npos ? comma : comma - start);
      try {
        size_t used = 0;
        v.push_back(std::stol(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw std::invalid_argument("monoid literal: bad integer \"" + tok + "\"");
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    gens.push_back(std::move(v));
    pos = close + 1;
    if (pos < s.size()) {
      if (s[pos] != ';')
        throw std::invalid_argument("monoid literal: expected ';' at \"" + s.substr(pos) + "\"");
      ++pos;
    }
  }
  long rank = static_cast<long>(gens.front().size());
  for (const auto& g : gens)
    if (static_cast<long>(g.size()) != rank)
      throw std::invalid_argument("monoid literal: mixed tuple arities");
  return FinGenMonoid::make(rank, std::move(gens));
}

inline nlohmann::json to_json(const MatZ& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : m) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& x : r) row.push_back(x.get_str());
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json to_json(const AbelianGroupData& g) {
  nlohmann::json t = nlohmann::json::array();
  for (const auto& x : g.torsion) t.push_back(x.get_str());
  return {{"rank", g.rank}, {"torsion", std::move(t)}};
}

inline nlohmann::json to_json(const SmithForm& s) {
  nlohmann::json diag = nlohmann::json::array();
  for (const auto& x : s.diag) diag.push_back(x.get_str());
  return {{"U", to_json(s.U)},
          {"V", to_json(s.V)},
          {"Vinv", to_json(s.Vinv)},
          {"diag", std::move(diag)},
          {"rank", s.rank}};
}

inline nlohmann::json to_json(const GroupifyResult& g) {
  return {{"group", to_json(g.group)},
          {"cokernel", to_json(g.cokernel)},
          {"basis", to_json(g.basis)},
          {"ambient_index", g.ambient_index.get_str()},
          {"snf", to_json(g.snf)}};
}

inline nlohmann::json to_json(const MembershipResult& m) {
  nlohmann::json w = nlohmann::json::array();
  for (const auto& [g, mult] : m.witness) w.push_back({{"generator", g}, {"multiplicity", mult}});
  return {{"member", m.member}, {"witness", std::move(w)}};
}

inline nlohmann::json to_json(const SaturationResult& s) {
  nlohmann::json j{{"saturated", s.saturated},
                   {"box_bound", s.box_bound},
                   {"multiple_bound", s.multiple_bound},
                   {"stable", s.stable}};
  if (s.counterexample) {
    j["counterexample"] = *s.counterexample;
    j["witness_multiple"] = s.witness_multiple;
  }
  return j;
}

inline nlohmann::json to_json(const SmoothnessVerdict& v) {
  return {{"smooth", v.smooth},
          {"torsion_order", v.torsion_order.get_str()},
          {"characteristic", v.characteristic},
          {"reason", v.reason}};
}

inline nlohmann::json to_json(const EtaleVerdict& v) {
  return {{"etale", v.etale},
          {"kernel_rank", v.kernel_rank},
          {"cokernel", to_json(v.cokernel)},
          {"cokernel_order", v.cokernel_order.get_str()},
          {"characteristic", v.characteristic},
          {"reason", v.reason}};
}

inline nlohmann::json to_json(const LogDiffPresentation& p) {
  nlohmann::json coords = nlohmann::json::array();
  for (const auto& c : p.generator_coords) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& x : c) row.push_back(x.get_str());
    coords.push_back(std::move(row));
  }
  nlohmann::json j{{"basis_labels", p.basis_labels},
                   {"basis", to_json(p.basis)},
                   {"generator_coords", std::move(coords)},
                   {"chart_pullback", p.chart_pullback}};
  if (p.diagonal_pair_spans) j["diagonal_pair_spans"] = *p.diagonal_pair_spans;
  return j;
}

}  // namespace cdr
