#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <vector>

#include "cdr/modes.hpp"
#include "cdr/vertex.hpp"

using namespace cdr;

namespace {

const AlgebraConfig kCfg{2, 24};

Mode beta(int sp, long n) { return Mode{ModeKind::Beta, sp, n}; }
Mode gamma(int sp, long n) { return Mode{ModeKind::Gamma, sp, n}; }
Mode bm(int sp, long n) { return Mode{ModeKind::B, sp, n}; }
Mode cm(int sp, long n) { return Mode{ModeKind::C, sp, n}; }

StateVector gen_state(ModeKind k, int sp, long classic_index) {
  return StateVector::monomial(
      NormalMonomial::from_sorted({Mode{k, sp, classic_index}}));
}

NormalMonomial random_monomial(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nmodes(0, 3);
  std::uniform_int_distribution<int> kindd(0, 3);
  std::uniform_int_distribution<int> spd(1, 2);
  std::uniform_int_distribution<long> depth(1, 2);
  NormalMonomial m;
  int want = nmodes(rng);
  for (int i = 0; i < want; ++i) {
    ModeKind k = static_cast<ModeKind>(kindd(rng));
    long d = depth(rng);
    long idx = (k == ModeKind::Gamma || k == ModeKind::C) ? 1 - d : -d;
    auto ins = m.insert_creation(Mode{k, spd(rng), idx});
    if (!ins) continue;
    m = ins->second;
  }
  return m;
}

StateVector random_state(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nterms(1, 2);
  std::uniform_int_distribution<long> numd(-5, 5);
  StateVector v;
  int want = nterms(rng);
  for (int i = 0; i < want; ++i) {
    long num = numd(rng);
    if (num == 0) num = 1;
    v.add_term(random_monomial(rng), Rational(num));
  }
  if (v.is_zero()) v = StateVector::vacuum();
  return v;
}

StateVector apply_at(const StateVector& A, long m, const StateVector& v) {
  return nth_product(A, m, v, kCfg);
}

}  // namespace

TEST_CASE("uniform index translation", "[vertex]") {
  CHECK(uniform_index(gamma(1, 0)) == -1);
  CHECK(uniform_index(gamma(1, 1)) == 0);
  CHECK(uniform_index(beta(1, -1)) == -1);
  CHECK(uniform_index(beta(1, 0)) == 0);
  CHECK(uniform_index(cm(1, 0)) == -1);
  CHECK(uniform_index(bm(1, -1)) == -1);
  CHECK(mode_from_uniform(ModeKind::Gamma, 1, -1) == gamma(1, 0));
  CHECK(mode_from_uniform(ModeKind::Beta, 2, -1) == beta(2, -1));
  CHECK(mode_from_uniform(ModeKind::C, 1, 0) == cm(1, 1));
}

TEST_CASE("vacuum axioms", "[vertex]") {
  std::mt19937_64 rng(901);
  StateVector vac = StateVector::vacuum();
  for (int t = 0; t < 20; ++t) {
    StateVector v = random_state(rng);
    CHECK(nth_product(vac, -1, v, kCfg) == v);
    CHECK(nth_product(vac, 0, v, kCfg).is_zero());
    CHECK(nth_product(vac, 2, v, kCfg).is_zero());
    // creation axiom: A_(-1)|0> = A, A_(n>=0)|0> = 0
    CHECK(nth_product(v, -1, vac, kCfg) == v);
    long bound = v.max_weight() + 1;
    for (long n = 0; n <= bound; ++n)
      CHECK(nth_product(v, n, vac, kCfg).is_zero());
  }
  CHECK(translate(vac).is_zero());
}

TEST_CASE("single generator states act by their modes", "[vertex]") {
  StateVector g1 = gen_state(ModeKind::Gamma, 1, 0);
  StateVector b1 = gen_state(ModeKind::Beta, 1, -1);
  StateVector v = StateVector::monomial(
      NormalMonomial::from_sorted({beta(1, -2), gamma(1, -1)}));

  // (gamma^1 state)_(n) acts as the mode gamma^1_{n+1}
  CHECK(apply_at(g1, -1, v) ==
        apply_mode(gamma(1, 0), v, kCfg));
  CHECK(apply_at(g1, 0, v) == apply_mode(gamma(1, 1), v, kCfg));
  CHECK(apply_at(g1, 1, v) == apply_mode(gamma(1, 2), v, kCfg));
  // (beta^1 state)_(n) acts as beta^1_n
  CHECK(apply_at(b1, 0, v) == apply_mode(beta(1, 0), v, kCfg));
  CHECK(apply_at(b1, 1, v) == apply_mode(beta(1, 1), v, kCfg));
  CHECK(apply_at(b1, -2, v) == apply_mode(beta(1, -2), v, kCfg));
}

TEST_CASE("pairwise singular operator products", "[vertex]") {
  StateVector g1 = gen_state(ModeKind::Gamma, 1, 0);
  StateVector g2 = gen_state(ModeKind::Gamma, 2, 0);
  StateVector be1 = gen_state(ModeKind::Beta, 1, -1);
  StateVector be2 = gen_state(ModeKind::Beta, 2, -1);
  StateVector c1 = gen_state(ModeKind::C, 1, 0);
  StateVector b1 = gen_state(ModeKind::B, 1, -1);
  StateVector vac = StateVector::vacuum();

  auto single_pole = [&](const OpeSingularPart& p, const StateVector& want) {
    REQUIRE(p.poles.size() == 1);
    CHECK(p.poles[0] == want);
  };

  single_pole(ope_singular(be1, g1, kCfg), vac);
  single_pole(ope_singular(g1, be1, kCfg), Rational(-1) * vac);
  single_pole(ope_singular(b1, c1, kCfg), vac);
  single_pole(ope_singular(c1, b1, kCfg), vac);

  CHECK(ope_singular(be1, g2, kCfg).all_zero());
  CHECK(ope_singular(be2, g1, kCfg).all_zero());
  CHECK(ope_singular(g1, g2, kCfg).all_zero());
  CHECK(ope_singular(g1, g1, kCfg).all_zero());
  CHECK(ope_singular(be1, be1, kCfg).all_zero());
  CHECK(ope_singular(c1, g1, kCfg).all_zero());
  CHECK(ope_singular(b1, be1, kCfg).all_zero());
}

TEST_CASE("translation operator", "[vertex]") {
  auto mono = [](std::vector<Mode> ms) {
    return StateVector::monomial(NormalMonomial::from_sorted(std::move(ms)));
  };
  CHECK(translate(mono({gamma(1, 0)})) == mono({gamma(1, -1)}));
  CHECK(translate(mono({beta(1, -1)})) == mono({beta(1, -2)}));
  CHECK(translate(mono({cm(1, 0)})) == mono({cm(1, -1)}));
  CHECK(translate(mono({bm(1, -1)})) == mono({bm(1, -2)}));
  CHECK(translate(mono({gamma(1, -1)})) == Rational(2) * mono({gamma(1, -2)}));

  // Leibniz over a product monomial
  StateVector got = translate(mono({beta(1, -1), gamma(1, 0)}));
  StateVector want = mono({beta(1, -2), gamma(1, 0)}) + mono({beta(1, -1), gamma(1, -1)});
  CHECK(got == want);

  // d/dz covariance: (Tv)_(n) = -n v_(n-1)
  std::mt19937_64 rng(902);
  for (int t = 0; t < 12; ++t) {
    StateVector a = StateVector::monomial(random_monomial(rng));
    StateVector v = random_state(rng);
    for (long n = -2; n <= 2; ++n) {
      CHECK(apply_at(translate(a), n, v) == Rational(-n) * apply_at(a, n - 1, v));
    }
  }
}

TEST_CASE("commutator expansion matches iterated actions", "[vertex]") {
  std::mt19937_64 rng(903);
  std::uniform_int_distribution<long> idxd(-2, 2);
  int done = 0;
  while (done < 25) {
    NormalMonomial am = random_monomial(rng);
    NormalMonomial bmono = random_monomial(rng);
    if (am.is_vacuum() && bmono.is_vacuum()) continue;
    StateVector A = StateVector::monomial(am);
    StateVector B = StateVector::monomial(bmono);
    StateVector v = random_state(rng);
    long m = idxd(rng), k = idxd(rng);

    StateVector lhs = apply_at(A, m, apply_at(B, k, v));
    int sign = (am.parity() == 1 && bmono.parity() == 1) ? -1 : 1;
    lhs -= Rational(sign) * apply_at(B, k, apply_at(A, m, v));

    StateVector rhs;
    for (const auto& term : lie_bracket(A, m, B, k, kCfg))
      rhs += apply_at(term.state, term.index, v);

    CHECK(lhs == rhs);
    ++done;
  }
}

TEST_CASE("virasoro element data", "[vertex]") {
  for (int nsp = 1; nsp <= 2; ++nsp) {
    AlgebraConfig cfg{nsp, 24};
    StateVector L = virasoro_state(nsp);

    // L_(0) = T
    std::mt19937_64 rng(904 + nsp);
    for (int t = 0; t < 10; ++t) {
      StateVector v = random_state(rng);
      if (v.max_species() > nsp) continue;
      CHECK(nth_product(L, 0, v, cfg) == translate(v));
    }

    // L_(1) is the weight operator
    StateVector w = StateVector::monomial(
        NormalMonomial::from_sorted({beta(1, -1), gamma(1, -2), cm(1, -1)}));
    CHECK(nth_product(L, 1, w, cfg) == Rational(4) * w);
    CHECK(nth_product(L, 1, StateVector::vacuum(), cfg).is_zero());

    // Virasoro OPE of L with itself: weight 2, no derivative pole anomaly,
    // vanishing central term.
    CHECK(nth_product(L, 0, L, cfg) == translate(L));
    CHECK(nth_product(L, 1, L, cfg) == Rational(2) * L);
    CHECK(nth_product(L, 2, L, cfg).is_zero());
    CHECK(nth_product(L, 3, L, cfg).is_zero());
    CHECK(central_charge(L, cfg) == Rational(0));
  }
}

TEST_CASE("central charges of the two subsystems", "[vertex]") {
  AlgebraConfig cfg{1, 24};
  StateVector Lbg = StateVector::monomial(
      NormalMonomial::from_sorted({beta(1, -1), gamma(1, -1)}));
  StateVector Lbc = Rational(-1) * StateVector::monomial(
      NormalMonomial::from_sorted({bm(1, -1), cm(1, -1)}));

  CHECK(nth_product(Lbg, 1, Lbg, cfg) == Rational(2) * Lbg);
  CHECK(nth_product(Lbc, 1, Lbc, cfg) == Rational(2) * Lbc);
  CHECK(central_charge(Lbg, cfg) == Rational(2));
  CHECK(central_charge(Lbc, cfg) == Rational(-2));
  CHECK(nth_product(Lbg, 3, Lbg, cfg) == StateVector::vacuum());
  CHECK(nth_product(Lbc, 3, Lbc, cfg) == Rational(-1) * StateVector::vacuum());
}

TEST_CASE("differential and homotopy", "[vertex]") {
  for (int nsp = 1; nsp <= 2; ++nsp) {
    AlgebraConfig cfg{nsp, 24};
    auto [L, Q, G] = distinguished_states(nsp);

    CHECK(nth_product(Q, 0, G, cfg) == L);

    // d gamma^i = c^i, d c^i = 0, d b^i = beta^i, d beta^i = 0
    for (int i = 1; i <= nsp; ++i) {
      CHECK(chiral_differential(gen_state(ModeKind::Gamma, i, 0), cfg) ==
            gen_state(ModeKind::C, i, 0));
      CHECK(chiral_differential(gen_state(ModeKind::C, i, 0), cfg).is_zero());
      CHECK(chiral_differential(gen_state(ModeKind::B, i, -1), cfg) ==
            gen_state(ModeKind::Beta, i, -1));
      CHECK(chiral_differential(gen_state(ModeKind::Beta, i, -1), cfg).is_zero());
    }

    // d^2 = 0 and [d, T] = 0 on random states
    std::mt19937_64 rng(905 + nsp);
    NthCache cache;
    for (int t = 0; t < 15; ++t) {
      StateVector v = random_state(rng);
      if (v.max_species() > nsp) continue;
      StateVector dv = chiral_differential(v, cfg, &cache);
      CHECK(chiral_differential(dv, cfg, &cache).is_zero());
      CHECK(chiral_differential(translate(v), cfg, &cache) == translate(dv));
    }
  }
}

TEST_CASE("fermion number", "[vertex]") {
  StateVector c1 = gen_state(ModeKind::C, 1, 0);
  CHECK(fermion_charge_apply(c1) == c1);
  StateVector b1 = gen_state(ModeKind::B, 1, -1);
  CHECK(fermion_charge_apply(b1) == Rational(-1) * b1);
  CHECK(fermion_charge_apply(StateVector::vacuum()).is_zero());

  // the differential raises fermion number by one
  std::mt19937_64 rng(906);
  for (int t = 0; t < 10; ++t) {
    StateVector v = StateVector::monomial(random_monomial(rng));
    StateVector dv = chiral_differential(v, kCfg);
    if (dv.is_zero()) continue;
    CHECK(fermion_charge_apply(dv) ==
          Rational(v.terms().begin()->first.fermion_charge() + 1) * dv);
  }
}

TEST_CASE("virasoro mode helper and shared cache", "[vertex]") {
  StateVector L = virasoro_state(2);
  StateVector v = StateVector::monomial(
      NormalMonomial::from_sorted({beta(2, -1), gamma(1, -1)}));
  // L_{-1} = T, L_0 = weight
  CHECK(virasoro_mode(L, -1, v, kCfg) == translate(v));
  CHECK(virasoro_mode(L, 0, v, kCfg) == Rational(2) * v);

  NthCache cache;
  std::mt19937_64 rng(907);
  for (int t = 0; t < 10; ++t) {
    StateVector a = StateVector::monomial(random_monomial(rng));
    StateVector b = random_state(rng);
    for (long n = -2; n <= 1; ++n)
      CHECK(nth_product(a, n, b, kCfg, &cache) == nth_product(a, n, b, kCfg));
  }
}
