#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cdr/modes.hpp"
#include "cdr/series.hpp"
#include "cdr/vertex.hpp"

namespace cdr {

// --- one-variable disc transformations -------------------------------------

/// A formal change of coordinate gamma~ = f(gamma) on the disc, with
/// f(0) = 0 and f'(0) != 0, together with its compositional inverse g.
class CoordTransform1 {
 public:
  static CoordTransform1 make(TruncatedSeries1 f) {
    if (f.order() < 1)
      throw std::invalid_argument("CoordTransform1: truncation order must be >= 1");
    if (!f.coeff(0).is_zero())
      throw std::invalid_argument("CoordTransform1: f must have zero constant term");
    if (f.coeff(1).is_zero())
      throw std::invalid_argument("CoordTransform1: f must have nonzero linear term");
    TruncatedSeries1 g = comp_invert1(f);
    return CoordTransform1(std::move(f), std::move(g));
  }

  const TruncatedSeries1& f() const { return f_; }
  const TruncatedSeries1& g() const { return g_; }
  long order() const { return f_.order(); }

  /// True when f = a*gamma: the only case in which every transformed field
  /// is a finite polynomial expression.
  bool is_linear() const {
    for (long k = 2; k <= f_.order(); ++k)
      if (!f_.coeff(k).is_zero()) return false;
    return true;
  }

 private:
  CoordTransform1(TruncatedSeries1 f, TruncatedSeries1 g)
      : f_(std::move(f)), g_(std::move(g)) {}
  TruncatedSeries1 f_, g_;
};

inline CoordTransform1 compose(const CoordTransform1& t1, const CoordTransform1& t2) {
  return CoordTransform1::make(compose1(t1.f(), t2.f()));
}

inline CoordTransform1 inverse(const CoordTransform1& t) {
  return CoordTransform1::make(t.g());
}

/// The four series entering the field transform, all at the same order:
///   gamma~ = f(gamma)
///   c~     = u(gamma) c        u = f'/f'(0)
///   b~     = v(gamma) b        v = 1/u = f'(0) (g' o f)
///   beta~  = w(gamma) beta + s(gamma) c b,   w = g' o f,  s = (g'' o f) f'
/// The fermion dressing is normalized so that u(0) = v(0) = 1; with this
/// choice all singular pairings keep the flat-space delta pattern and the
/// Virasoro state is invariant (checked by verify_tilde_ope and
/// verify_virasoro_invariance below).
struct FieldChangeSeries {
  TruncatedSeries1 f, u, v, w, s;
};

inline FieldChangeSeries field_change_series(const CoordTransform1& t, long order) {
  if (order < 0) throw std::invalid_argument("field_change_series: negative order");
  // two formal derivatives are taken, so expand with a margin of two
  TruncatedSeries1 f_hi = t.f().retruncate(order + 2);
  TruncatedSeries1 g_hi = comp_invert1(f_hi);
  TruncatedSeries1 fp = derive(f_hi);            // order + 1
  TruncatedSeries1 gp = derive(g_hi);            // order + 1
  TruncatedSeries1 gpp = derive(gp);             // order

  TruncatedSeries1 f = f_hi.retruncate(order);
  TruncatedSeries1 fpD = fp.retruncate(order);
  Rational a1 = t.f().coeff(1);
  TruncatedSeries1 w = compose1(gp.retruncate(order), f);
  TruncatedSeries1 u = a1.inverse() * fpD;
  TruncatedSeries1 v = a1 * w;
  TruncatedSeries1 s = compose1(gpp, f) * fpD;
  return {std::move(f), std::move(u), std::move(v), std::move(w), std::move(s)};
}

/// The transformed generating states of the species-1 system, as
/// polynomial-in-gamma_0 multiples of mode monomials through the cutoff.
struct TransformedFields {
  StateVector gamma_t, c_t, b_t, beta_t;
};

inline TransformedFields transform_fields1(const CoordTransform1& t, long gamma0_cutoff) {
  FieldChangeSeries sv = field_change_series(t, gamma0_cutoff);
  auto gpow = [](long k) {
    return std::vector<Mode>(static_cast<size_t>(k), Mode{ModeKind::Gamma, 1, 0});
  };
  TransformedFields out;
  for (long k = 0; k <= gamma0_cutoff; ++k) {
    if (k >= 1 && !sv.f.coeff(k).is_zero())
      out.gamma_t.add_term(NormalMonomial::from_sorted(gpow(k)), sv.f.coeff(k));
    if (!sv.u.coeff(k).is_zero()) {
      auto ms = gpow(k);
      ms.push_back(Mode{ModeKind::C, 1, 0});
      out.c_t.add_term(NormalMonomial::from_sorted(std::move(ms)), sv.u.coeff(k));
    }
    if (!sv.v.coeff(k).is_zero()) {
      auto ms = gpow(k);
      ms.push_back(Mode{ModeKind::B, 1, -1});
      out.b_t.add_term(NormalMonomial::from_sorted(std::move(ms)), sv.v.coeff(k));
    }
    if (!sv.w.coeff(k).is_zero()) {
      auto ms = gpow(k);
      ms.insert(ms.begin(), Mode{ModeKind::Beta, 1, -1});
      out.beta_t.add_term(NormalMonomial::from_sorted(std::move(ms)), sv.w.coeff(k));
    }
    if (!sv.s.coeff(k).is_zero()) {
      // the composite c b contributes the state c_0 b_-1 |0> = -(b_-1 c_0)|0>
      auto ms = gpow(k);
      ms.push_back(Mode{ModeKind::B, 1, -1});
      ms.push_back(Mode{ModeKind::C, 1, 0});
      out.beta_t.add_term(NormalMonomial::from_sorted(std::move(ms)),
                          Rational(-1) * sv.s.coeff(k));
    }
  }
  // gamma~ and c~ are exact polynomials; b~ and beta~ are infinite series
  // cut at the requested gamma_0 degree unless the transform is linear.
  if (!t.is_linear()) {
    out.b_t.mark_truncated();
    out.beta_t.mark_truncated();
  }
  return out;
}

// --- machine verification of the covariance properties -----------------------

struct TildeOpeReport {
  bool ok = true;
  long cutoff = 0;
  std::vector<std::string> mismatches;  // "(beta~, c~) pole 0" style entries
};

namespace detail {

/// Internal margin added to the requested cutoff before products are taken,
/// so every asserted coefficient is exact.
inline constexpr long kVerifyMargin = 4;

inline AlgebraConfig verify_config(long cutoff) {
  return AlgebraConfig{1, 4 * (cutoff + kVerifyMargin) + 16};
}

}  // namespace detail

/// Computes the singular operator products of all pairs among
/// {gamma~, c~, b~, beta~} and checks the delta pattern through the cutoff:
/// beta~(z)gamma~(w) ~ 1/(z-w), c~(z)b~(w) ~ 1/(z-w) (and their reverses
/// with the dictated signs); every other pairing regular.
inline TildeOpeReport verify_tilde_ope(const CoordTransform1& t, long gamma0_cutoff) {
  TildeOpeReport rep;
  rep.cutoff = gamma0_cutoff;
  AlgebraConfig cfg = detail::verify_config(gamma0_cutoff);
  TransformedFields F = transform_fields1(t, gamma0_cutoff + detail::kVerifyMargin);

  const StateVector* fields[4] = {&F.beta_t, &F.gamma_t, &F.b_t, &F.c_t};
  const char* names[4] = {"beta~", "gamma~", "b~", "c~"};
  StateVector vac = StateVector::vacuum();

  NthCache cache;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      OpeSingularPart part = ope_singular(*fields[i], *fields[j], cfg, &cache);
      for (size_t n = 0; n < part.poles.size(); ++n) {
        StateVector got = part.poles[n].restrict_gamma0(gamma0_cutoff);
        StateVector want;
        if (n == 0) {
          if (i == 0 && j == 1) want = vac;                      // beta~ gamma~
          if (i == 1 && j == 0) want = Rational(-1) * vac;       // gamma~ beta~
          if ((i == 2 && j == 3) || (i == 3 && j == 2)) want = vac;  // b~ c~ / c~ b~
        }
        if (!(got == want)) {
          rep.ok = false;
          rep.mismatches.push_back(std::string("(") + names[i] + ", " + names[j] +
                                   ") pole " + std::to_string(n));
        }
      }
    }
  }
  return rep;
}

struct VirasoroInvarianceReport {
  bool ok = true;
  long cutoff = 0;
  StateVector difference;  // (L~ - L) restricted to the cutoff
};

/// Rebuilds the Virasoro state from the transformed fields,
/// L~ = (T gamma~)_(-1) beta~ + (T c~)_(-1) b~, and compares with L.
inline VirasoroInvarianceReport verify_virasoro_invariance(const CoordTransform1& t,
                                                           long gamma0_cutoff) {
  VirasoroInvarianceReport rep;
  rep.cutoff = gamma0_cutoff;
  AlgebraConfig cfg = detail::verify_config(gamma0_cutoff);
  TransformedFields F = transform_fields1(t, gamma0_cutoff + detail::kVerifyMargin);
  NthCache cache;
  StateVector lt = nth_product(translate(F.gamma_t), -1, F.beta_t, cfg, &cache) +
                   nth_product(translate(F.c_t), -1, F.b_t, cfg, &cache);
  rep.difference = (lt - virasoro_state(1)).restrict_gamma0(gamma0_cutoff);
  rep.ok = rep.difference.is_zero();
  return rep;
}

// --- two-variable bidisc transformations ------------------------------------

/// An automorphism of the formal bidisc fixing the origin and the two axes:
///   rho_x = a10 x + (mixed terms),  a10 != 0, no pure-y terms
///   rho_y = a01' y + (mixed terms), a01' != 0, no pure-x terms
/// The inverse pair (theta_x, theta_y) is computed on construction.
class CoordTransform2 {
 public:
  const TruncatedSeries2& rho_x() const { return rx_; }
  const TruncatedSeries2& rho_y() const { return ry_; }
  const TruncatedSeries2& theta_x() const { return tx_; }
  const TruncatedSeries2& theta_y() const { return ty_; }
  long order() const { return rx_.order(); }

  friend CoordTransform2 validate2(const TruncatedSeries2& rho_x,
                                   const TruncatedSeries2& rho_y);

 private:
  CoordTransform2(TruncatedSeries2 rx, TruncatedSeries2 ry, TruncatedSeries2 tx,
                  TruncatedSeries2 ty)
      : rx_(std::move(rx)), ry_(std::move(ry)), tx_(std::move(tx)), ty_(std::move(ty)) {}
  TruncatedSeries2 rx_, ry_, tx_, ty_;
};

/// Checks the five coefficient constraints and computes the inverse pair by
/// stepwise degree-by-degree correction.
inline CoordTransform2 validate2(const TruncatedSeries2& rho_x,
                                 const TruncatedSeries2& rho_y) {
  if (rho_x.order() != rho_y.order())
    throw std::invalid_argument("validate2: truncation order mismatch");
  long d = rho_x.order();
  if (d < 1)
    throw std::invalid_argument("validate2: truncation order must be >= 1");
  if (!rho_x.coeff(0, 0).is_zero())
    throw std::invalid_argument("validate2: rho_x has a nonzero constant term");
  if (!rho_y.coeff(0, 0).is_zero())
    throw std::invalid_argument("validate2: rho_y has a nonzero constant term");
  for (long j = 1; j <= d; ++j)
    if (!rho_x.coeff(0, j).is_zero())
      throw std::invalid_argument("validate2: rho_x has a pure-y term of degree " +
                                  std::to_string(j));
  for (long i = 1; i <= d; ++i)
    if (!rho_y.coeff(i, 0).is_zero())
      throw std::invalid_argument("validate2: rho_y has a pure-x term of degree " +
                                  std::to_string(i));
  Rational a10 = rho_x.coeff(1, 0);
  Rational a01 = rho_y.coeff(0, 1);
  if (a10.is_zero())
    throw std::invalid_argument("validate2: rho_x has zero linear coefficient");
  if (a01.is_zero())
    throw std::invalid_argument("validate2: rho_y has zero linear coefficient");

  TruncatedSeries2 x = TruncatedSeries2::variable_x(d);
  TruncatedSeries2 y = TruncatedSeries2::variable_y(d);
  TruncatedSeries2 tx = a10.inverse() * x;
  TruncatedSeries2 ty = a01.inverse() * y;
  for (long step = 0; step <= d + 2; ++step) {
    TruncatedSeries2 ex = subst2(rho_x, tx, ty) - x;
    TruncatedSeries2 ey = subst2(rho_y, tx, ty) - y;
    if (ex == TruncatedSeries2(d) && ey == TruncatedSeries2(d)) break;
    tx = tx - a10.inverse() * ex;
    ty = ty - a01.inverse() * ey;
  }
  if (!(subst2(rho_x, tx, ty) == x) || !(subst2(rho_y, tx, ty) == y))
    throw std::logic_error("validate2: inverse recursion failed to converge");
  return CoordTransform2(rho_x, rho_y, std::move(tx), std::move(ty));
}

inline CoordTransform2 identity_transform2(long order) {
  return validate2(TruncatedSeries2::variable_x(order),
                   TruncatedSeries2::variable_y(order));
}

/// (t1 . t2)(x) = rho_x[t1](rho_x[t2], rho_y[t2]); matches one-variable
/// composition f1 o f2.
inline CoordTransform2 compose2(const CoordTransform2& t1, const CoordTransform2& t2) {
  if (t1.order() != t2.order())
    throw std::invalid_argument("compose2: truncation order mismatch");
  return validate2(subst2(t1.rho_x(), t2.rho_x(), t2.rho_y()),
                   subst2(t1.rho_y(), t2.rho_x(), t2.rho_y()));
}

inline CoordTransform2 invert2(const CoordTransform2& t) {
  return validate2(t.theta_x(), t.theta_y());
}

/// The unit g_{m,n} with rho_x^m rho_y^n = x^m y^n g_{m,n}, returned at
/// order D-1 (one order is consumed by the exact division by x resp. y).
inline TruncatedSeries2 unit_factor(const CoordTransform2& t, long m, long n) {
  if (m < 0 || n < 0) throw std::invalid_argument("unit_factor: m, n must be >= 0");
  TruncatedSeries2 hx = divide_by_var(t.rho_x(), Var2::X);
  TruncatedSeries2 hy = divide_by_var(t.rho_y(), Var2::Y);
  long d = t.order() - 1;
  TruncatedSeries2 out = TruncatedSeries2::constant(Rational(1), d);
  for (long k = 0; k < m; ++k) out = out * hx;
  for (long k = 0; k < n; ++k) out = out * hy;
  return out;
}

}  // namespace cdr
