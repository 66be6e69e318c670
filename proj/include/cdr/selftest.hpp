#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <future>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdr/character.hpp"
#include "cdr/coord.hpp"
#include "cdr/modes.hpp"
#include "cdr/monoid.hpp"
#include "cdr/series.hpp"
#include "cdr/vertex.hpp"

namespace cdr {

struct SelftestOptions {
  std::uint64_t seed = 12345;
  long threads = 1;
  // negative control: deliberately corrupts one expected value so the runner
  // must report a failure
  bool corrupt = false;
};

struct SelftestSection {
  std::string name;
  long checks = 0;
  long failures = 0;
  std::vector<std::string> details;
};

struct SelftestReport {
  std::uint64_t seed = 0;
  long threads = 1;
  bool corrupt = false;
  std::vector<SelftestSection> sections;
  long total_checks = 0;
  long total_failures = 0;
  bool passed = false;
};

namespace detail {

inline void st_check(SelftestSection& sec, bool ok, const std::string& what) {
  ++sec.checks;
  if (!ok) {
    ++sec.failures;
    if (sec.details.size() < 12) sec.details.push_back(what);
  }
}

/// Random canonical monomial with creation modes of small index; weight-0
/// gamma_0 factors allowed, total length capped.
inline NormalMonomial random_monomial(std::mt19937_64& rng, long weight_budget) {
  std::vector<Mode> pool;
  for (int sp : {1, 2}) {
    for (long k = 0; k <= 3; ++k) {
      pool.push_back(Mode{ModeKind::Gamma, sp, -k});
      pool.push_back(Mode{ModeKind::C, sp, -k});
    }
    for (long k = 1; k <= 3; ++k) {
      pool.push_back(Mode{ModeKind::Beta, sp, -k});
      pool.push_back(Mode{ModeKind::B, sp, -k});
    }
  }
  NormalMonomial mono;
  for (int tries = 0; tries < 6; ++tries) {
    const Mode& m = pool[rng() % pool.size()];
    if (mode_weight(m) > weight_budget) continue;
    auto ins = mono.insert_creation(m);
    if (!ins) continue;  // repeated odd mode
    mono = std::move(ins->second);
    weight_budget -= mode_weight(m);
  }
  return mono;
}

inline StateVector random_state(std::mt19937_64& rng, long weight_budget, int n_terms) {
  StateVector v;
  for (int t = 0; t < n_terms; ++t) {
    long num = static_cast<long>(rng() % 7) - 3;
    if (num == 0) num = 1;
    long den = 1 + static_cast<long>(rng() % 3);
    v = v + StateVector::monomial(random_monomial(rng, weight_budget), Rational(num, den));
  }
  return v;
}

inline SelftestSection section_series(std::uint64_t seed) {
  SelftestSection sec{"series"};
  std::mt19937_64 rng(seed ^ 0x5e71e5ULL);
  for (int trial = 0; trial < 25; ++trial) {
    long d = 6 + static_cast<long>(rng() % 5);
    TruncatedSeries1 f(d);
    f.set(1, Rational(1 + static_cast<long>(rng() % 3)));
    for (long k = 2; k <= d; ++k)
      f.set(k, Rational(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 2)));
    TruncatedSeries1 g = comp_invert1(f);
    TruncatedSeries1 t = TruncatedSeries1::variable(d);
    st_check(sec, compose1(g, f) == t, "compositional inverse: g(f) != t");
    st_check(sec, compose1(f, g) == t, "compositional inverse: f(g) != t");
  }
  TruncatedSeries1 f(7);
  f.set(1, Rational(1));
  f.set(2, Rational(1));
  TruncatedSeries1 g = comp_invert1(f);
  const long catalan[] = {0, 1, -1, 2, -5, 14, -42, 132};
  bool ok = true;
  for (long k = 0; k <= 7; ++k) ok = ok && g.coeff(k) == Rational(catalan[k]);
  st_check(sec, ok, "signed Catalan inverse of g+g^2");
  return sec;
}

inline SelftestSection section_modes(std::uint64_t seed, bool corrupt) {
  SelftestSection sec{"mode-algebra"};
  std::mt19937_64 rng(seed ^ 0xab0de5ULL);
  AlgebraConfig cfg{2, 64};
  for (int trial = 0; trial < 80; ++trial) {
    long m = static_cast<long>(rng() % 13) - 6;
    long n = static_cast<long>(rng() % 13) - 6;
    int si = 1 + static_cast<int>(rng() % 2);
    int sj = 1 + static_cast<int>(rng() % 2);
    StateVector psi = random_state(rng, 4, 2);
    StateVector delta = (si == sj && m + n == 0) ? psi : StateVector::zero();
    std::string at = " at (m,n)=(" + std::to_string(m) + "," + std::to_string(n) + ")";

    Mode beta_m{ModeKind::Beta, si, m}, gamma_n{ModeKind::Gamma, sj, n};
    StateVector comm = apply_mode(beta_m, apply_mode(gamma_n, psi, cfg), cfg) -
                       apply_mode(gamma_n, apply_mode(beta_m, psi, cfg), cfg);
    StateVector want = delta;
    if (corrupt && trial == 0) want = want + StateVector::vacuum();
    st_check(sec, comm == want, "beta-gamma commutator" + at);

    Mode b_m{ModeKind::B, si, m}, c_n{ModeKind::C, sj, n};
    StateVector anti = apply_mode(b_m, apply_mode(c_n, psi, cfg), cfg) +
                       apply_mode(c_n, apply_mode(b_m, psi, cfg), cfg);
    st_check(sec, anti == delta, "b-c anticommutator" + at);

    Mode gamma_m{ModeKind::Gamma, si, m};
    StateVector gg = apply_mode(gamma_m, apply_mode(gamma_n, psi, cfg), cfg) -
                     apply_mode(gamma_n, apply_mode(gamma_m, psi, cfg), cfg);
    st_check(sec, gg.is_zero(), "gamma-gamma commutator" + at);

    StateVector bb = apply_mode(b_m, apply_mode(b_m, psi, cfg), cfg);
    st_check(sec, bb.is_zero(), "b mode squares to zero" + at);

    StateVector mixed = apply_mode(beta_m, apply_mode(c_n, psi, cfg), cfg) -
                        apply_mode(c_n, apply_mode(beta_m, psi, cfg), cfg);
    st_check(sec, mixed.is_zero(), "boson-fermion commutator" + at);
  }
  return sec;
}

inline SelftestSection section_vertex(std::uint64_t seed) {
  SelftestSection sec{"vertex"};
  std::mt19937_64 rng(seed ^ 0x7e47e7ULL);
  AlgebraConfig cfg{2, 64};
  NthCache cache;
  StateVector vac = StateVector::vacuum();
  st_check(sec, translate(vac).is_zero(), "T|0> = 0");

  for (int trial = 0; trial < 20; ++trial) {
    StateVector a = random_state(rng, 4, 2);
    StateVector b = random_state(rng, 4, 2);
    for (long n = 0; n <= 2; ++n)
      st_check(sec, nth_product(a, n, vac, cfg, &cache).is_zero(), "A_(n)|0> = 0 for n >= 0");
    st_check(sec, nth_product(a, -1, vac, cfg, &cache) == a, "A_(-1)|0> = A");
    for (long n = -2; n <= 1; ++n) {
      StateVector got = nth_product(vac, n, b, cfg, &cache);
      StateVector want = n == -1 ? b : StateVector::zero();
      st_check(sec, got == want, "vacuum field acts as identity");
    }
    for (long n : {-2L, 0L, 1L, 2L}) {
      StateVector lhs = nth_product(translate(a), n, b, cfg, &cache);
      StateVector rhs = Rational(-n) * nth_product(a, n - 1, b, cfg, &cache);
      st_check(sec, lhs == rhs, "translation axiom (TA)_(n) = -n A_(n-1)");
    }
    StateVector dd = chiral_differential(chiral_differential(a, cfg, &cache), cfg, &cache);
    st_check(sec, dd.is_zero(), "differential squares to zero");
  }

  auto [L, Q, G] = distinguished_states(2);
  st_check(sec, nth_product(Q, 0, G, cfg, &cache) == L, "Q_(0) G = L");
  st_check(sec, nth_product(L, 1, L, cfg, &cache) == Rational(2) * L, "weight of L is 2");
  st_check(sec, nth_product(L, 3, L, cfg, &cache).is_zero(), "central charge vanishes");
  for (int trial = 0; trial < 10; ++trial) {
    NormalMonomial m = random_monomial(rng, 4);
    StateVector s = StateVector::monomial(m);
    st_check(sec, nth_product(L, 1, s, cfg, &cache) == Rational(m.weight()) * s,
             "L_(1) grades by conformal weight");
  }
  return sec;
}

inline SelftestSection section_coord(std::uint64_t seed) {
  SelftestSection sec{"coordinate-change"};
  std::mt19937_64 rng(seed ^ 0xc00dd1ULL);
  std::vector<TruncatedSeries1> transforms;
  transforms.push_back(TruncatedSeries1::variable(4));  // identity
  {
    TruncatedSeries1 f(4);
    f.set(1, Rational(-3));
    transforms.push_back(f);  // pure scaling
  }
  for (int trial = 0; trial < 2; ++trial) {
    TruncatedSeries1 f(4);
    f.set(1, Rational(trial == 0 ? 1 : 2));
    for (long k = 2; k <= 4; ++k)
      f.set(k, Rational(static_cast<long>(rng() % 5) - 2, 1 + static_cast<long>(rng() % 2)));
    transforms.push_back(f);
  }
  for (const auto& f : transforms) {
    CoordTransform1 t = CoordTransform1::make(f);
    TildeOpeReport ope = verify_tilde_ope(t, 4);
    st_check(sec, ope.ok, "transformed fields keep the delta-pattern OPE");
    VirasoroInvarianceReport vir = verify_virasoro_invariance(t, 4);
    st_check(sec, vir.ok, "transformed Virasoro state equals L");
  }
  return sec;
}

inline SelftestSection section_monoid(std::uint64_t seed) {
  SelftestSection sec{"monoid"};
  std::mt19937_64 rng(seed ^ 0x30c01dULL);
  for (long n : {2L, 3L, 5L, 7L}) {
    GroupifyResult g = groupify(an_chart_monoid(n));
    st_check(sec, g.group.rank == 2 && g.group.torsion.empty(), "chart group is Z^2");
    st_check(sec,
             g.cokernel.rank == 0 && g.cokernel.torsion.size() == 1 &&
                 g.cokernel.torsion[0] == n,
             "cokernel in Z^2 is Z/" + std::to_string(n));
  }
  for (int trial = 0; trial < 6; ++trial) {
    MatZ a(3, std::vector<mpz_class>(3));
    for (auto& row : a)
      for (auto& x : row) x = static_cast<long>(rng() % 11) - 5;
    SmithForm s = smith_form(a);
    MatZ uav = mat_mul(mat_mul(s.U, a), s.V);
    bool diag_ok = true;
    for (size_t i = 0; i < uav.size(); ++i)
      for (size_t j = 0; j < uav[i].size(); ++j) {
        mpz_class want = (i == j && i < s.diag.size()) ? s.diag[i] : 0;
        diag_ok = diag_ok && uav[i][j] == want;
      }
    st_check(sec, diag_ok, "Smith form certificate U A V = diag");
    mpz_class du = det_bareiss(s.U), dv = det_bareiss(s.V);
    st_check(sec, (du == 1 || du == -1) && (dv == 1 || dv == -1),
             "Smith form certificates are unimodular");
    st_check(sec, mat_mul(s.V, s.Vinv) == mat_identity(3), "V Vinv = 1");
  }
  FinGenMonoid q3 = an_chart_monoid(3);
  bool member_ok = true;
  for (long x = 0; x <= 8; ++x)
    for (long y = 0; y <= 8; ++y)
      member_ok = member_ok && membership(q3, {x, y}).member == ((x - y) % 3 == 0);
  st_check(sec, member_ok, "membership matches x = y (mod 3)");
  st_check(sec, is_saturated(an_chart_monoid(4)).saturated, "Q(4) is saturated");

  MonoidHom incl = MonoidHom::make(an_chart_monoid(2), free_monoid(2), {{1, 0}, {0, 1}});
  st_check(sec, etale_check(incl, 0).etale, "chart inclusion is etale in char 0");
  st_check(sec, !etale_check(incl, 2).etale, "chart inclusion fails at the bad prime");
  return sec;
}

inline SelftestSection section_character(std::uint64_t seed) {
  SelftestSection sec{"character"};
  (void)seed;
  st_check(sec, partitions_at_most(2, 3) == 2, "p_2(3) = 2");
  st_check(sec, partitions_at_most(5, 5) == 7, "p_5(5) = 7");
  st_check(sec, partitions_at_most(3, 0) == 0, "p_n(0) = 0");
  st_check(sec, formula_length(2, 1) == 6, "formula anchor at r = 1");
  st_check(sec, formula_length(2, 2) == 27, "formula value at (2,2)");
  st_check(sec, formula_length(2, 2, true) == 33, "multichoose variant at (2,2)");
  st_check(sec, formula_length(2, 3) == 200, "formula value at (2,3)");
  auto res = minimal_generators(2, 1, 4);
  st_check(sec, res.count == 6 && res.stable, "six weight-one generators");
  return sec;
}

}  // namespace detail

inline SelftestReport run_selftest(const SelftestOptions& opts = {}) {
  SelftestReport rep;
  rep.seed = opts.seed;
  rep.threads = std::max(1L, opts.threads);
  rep.corrupt = opts.corrupt;

  std::vector<std::function<SelftestSection()>> jobs = {
      [&] { return detail::section_series(opts.seed); },
      [&] { return detail::section_modes(opts.seed, opts.corrupt); },
      [&] { return detail::section_vertex(opts.seed); },
      [&] { return detail::section_coord(opts.seed); },
      [&] { return detail::section_monoid(opts.seed); },
      [&] { return detail::section_character(opts.seed); },
  };

  if (rep.threads == 1) {
    for (auto& job : jobs) rep.sections.push_back(job());
  } else {
    size_t next = 0;
    rep.sections.resize(jobs.size());
    while (next < jobs.size()) {
      size_t batch = std::min(static_cast<size_t>(rep.threads), jobs.size() - next);
      std::vector<std::future<SelftestSection>> futs;
      for (size_t i = 0; i < batch; ++i)
        futs.push_back(std::async(std::launch::async, jobs[next + i]));
      for (size_t i = 0; i < batch; ++i) rep.sections[next + i] = futs[i].get();
      next += batch;
    }
  }

  for (const auto& sec : rep.sections) {
    rep.total_checks += sec.checks;
    rep.total_failures += sec.failures;
  }
  rep.passed = rep.total_failures == 0;
  return rep;
}

inline std::string selftest_text(const SelftestReport& rep) {
  std::string out = "[selftest] seed=" + std::to_string(rep.seed) +
                    " threads=" + std::to_string(rep.threads) +
                    (rep.corrupt ? " corrupt=1" : "") + "\n";
  for (const auto& sec : rep.sections) {
    out += "[selftest] " + sec.name + ": " + std::to_string(sec.checks) + " checks, " +
           std::to_string(sec.failures) + " failures\n";
    for (const auto& d : sec.details) out += "[selftest]   failed: " + d + "\n";
  }
  out += rep.passed ? "[selftest] PASS (" + std::to_string(rep.total_checks) + " checks)\n"
                    : "[selftest] FAIL (" + std::to_string(rep.total_failures) + " of " +
                          std::to_string(rep.total_checks) + " checks failed)\n";
  return out;
}

inline nlohmann::json to_json(const SelftestReport& rep) {
  nlohmann::json sections = nlohmann::json::array();
  for (const auto& sec : rep.sections)
    sections.push_back({{"name", sec.name},
                        {"checks", sec.checks},
                        {"failures", sec.failures},
                        {"details", sec.details}});
  return {{"seed", rep.seed},          {"threads", rep.threads},
          {"corrupt", rep.corrupt},    {"sections", std::move(sections)},
          {"total_checks", rep.total_checks}, {"total_failures", rep.total_failures},
          {"passed", rep.passed}};
}

}  // namespace cdr
