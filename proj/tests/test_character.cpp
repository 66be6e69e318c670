#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "cdr/character.hpp"

using namespace cdr;

namespace {

NormalMonomial mono(std::vector<Mode> ms) {
  std::sort(ms.begin(), ms.end());
  return NormalMonomial::from_sorted(std::move(ms));
}

Mode g1(long k) { return Mode{ModeKind::Gamma, 1, k}; }
Mode g2(long k) { return Mode{ModeKind::Gamma, 2, k}; }
Mode b1(long k) { return Mode{ModeKind::Beta, 1, k}; }
Mode b2(long k) { return Mode{ModeKind::Beta, 2, k}; }

std::vector<NormalMonomial> flatten(const GradedSlice& s) {
  std::vector<NormalMonomial> out;
  for (const auto& [d, list] : s.strata) out.insert(out.end(), list.begin(), list.end());
  return out;
}

}  // namespace

TEST_CASE("partition counts with the zero boundary convention", "[character]") {
  CHECK(partitions_at_most(1, 0) == 0);
  CHECK(partitions_at_most(4, 0) == 0);
  CHECK(partitions_at_most(4, -3) == 0);
  CHECK(partitions_at_most(2, 3) == 2);  // 3, 2+1
  for (long m = 1; m <= 7; ++m) CHECK(partitions_at_most(1, m) == 1);
  CHECK(partitions_at_most(3, 5) == 5);  // 5, 41, 32, 311, 221
  CHECK(partitions_at_most(5, 5) == 7);  // all partitions of 5
  CHECK(partitions_at_most(6, 2) == 2);
  CHECK_THROWS_AS(partitions_at_most(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(partitions_at_most(-1, 3), std::invalid_argument);

  // against a brute-force count of weakly decreasing tuples
  auto brute = [](long n, long m) {
    std::function<long(long, long, long)> rec = [&](long parts_left, long remaining,
                                                    long max_part) -> long {
      if (remaining == 0) return 1;
      if (parts_left == 0) return 0;
      long acc = 0;
      for (long p = std::min(max_part, remaining); p >= 1; --p)
        acc += rec(parts_left - 1, remaining - p, p);
      return acc;
    };
    return rec(n, m, m);
  };
  for (long n = 1; n <= 5; ++n)
    for (long m = 1; m <= 9; ++m)
      CHECK(partitions_at_most(n, m) == brute(n, m));
}

TEST_CASE("recursive length formula", "[character]") {
  for (long n = 2; n <= 6; ++n) {
    CHECK(formula_length(n, 1) == 6);
    CHECK(formula_length(n, 1, true) == 6);
  }
  CHECK(formula_length(2, 2) == 27);  // 8 + 2*2 + 0 + C(6,2)
  CHECK(formula_length(3, 2) == 27);
  CHECK(formula_length(6, 2) == 27);
  CHECK(formula_length(2, 3) == 200);  // 12 + 2*2 + 2*1 + C(6,3) + 27*6
  CHECK(formula_length(2, 4) == 1997);
  // multiset-coefficient variant of the same recursion
  CHECK(formula_length(2, 2, true) == 33);  // C(6,2) -> multichoose(6,2) = 21
  CHECK(formula_length(2, 3, true) == 272);
  CHECK(formula_length(2, 4, true) == 3038);
  CHECK_THROWS_AS(formula_length(1, 2), std::invalid_argument);
  CHECK_THROWS_AS(formula_length(2, 0), std::invalid_argument);
}

TEST_CASE("count-vector monoid of the invariant subalgebra", "[character]") {
  auto q = vq_basis_monoid(2);
  CHECK(q.ambient_rank() == 4);
  CHECK(q.generators().size() == 8);

  MembershipOracle oracle(q);
  CHECK(oracle.contains({2, 0, 0, 0}));
  CHECK(oracle.contains({1, 1, 0, 0}));
  CHECK(oracle.contains({1, 0, 1, 0}));
  CHECK(oracle.contains({0, 1, 0, 1}));
  CHECK(oracle.contains({3, 1, 0, 0}));   // (2,0,0,0) + (1,1,0,0)
  CHECK_FALSE(oracle.contains({1, 0, 0, 0}));
  CHECK_FALSE(oracle.contains({0, 0, 1, 0}));
  // charge-invariant but outside the block monoid: gamma^1 paired with beta^2
  CHECK_FALSE(oracle.contains({1, 0, 0, 1}));
  CHECK_FALSE(oracle.contains({0, 1, 1, 0}));
}

TEST_CASE("invariant slice enumeration", "[character]") {
  SECTION("weight-zero slice is the monomial algebra on u, v, w") {
    GradedSlice s = enumerate_invariant_slice(2, 0, 4);
    REQUIRE(s.strata.count(2) == 1);
    std::vector<NormalMonomial> want = {mono({g1(0), g1(0)}), mono({g2(0), g2(0)}),
                                        mono({g1(0), g2(0)})};
    std::sort(want.begin(), want.end());
    CHECK(s.strata.at(2) == want);
    CHECK(s.strata.at(0) == std::vector<NormalMonomial>{mono({})});
    REQUIRE(s.strata.count(1) == 0);  // no invariant degree-1 monomial at N=2
    REQUIRE(s.strata.count(3) == 0);
  }

  SECTION("weight-one slice contains the six proof generators") {
    GradedSlice s = enumerate_invariant_slice(2, 1, 2);
    auto all = flatten(s);
    std::set<NormalMonomial> have(all.begin(), all.end());
    CHECK(have.count(mono({g1(0), g1(-1)})) == 1);
    CHECK(have.count(mono({g2(0), g2(-1)})) == 1);
    CHECK(have.count(mono({g1(0), g2(-1)})) == 1);
    CHECK(have.count(mono({g1(-1), g2(0)})) == 1);
    CHECK(have.count(mono({b1(-1), g1(0)})) == 1);
    CHECK(have.count(mono({b2(-1), g2(0)})) == 1);
    // invariant in charge but not in the block monoid: counted, not included
    CHECK(have.count(mono({b2(-1), g1(0)})) == 0);
    CHECK(s.charge_only_extras >= 1);
  }

  SECTION("every slice monomial is charge-invariant with the stated weight") {
    for (long n : {2L, 3L}) {
      GAction action(n);
      for (long r : {0L, 1L, 2L}) {
        GradedSlice s = enumerate_invariant_slice(n, r, 4);
        CHECK(s.total > 0);
        for (const auto& m : flatten(s)) {
          CHECK(action.invariant(m));
          CHECK(m.weight() == r);
          CHECK(m.fermion_charge() == 0);
        }
      }
    }
  }

  SECTION("multiplicative closure on count vectors") {
    std::mt19937 rng(2026);
    GradedSlice s1 = enumerate_invariant_slice(3, 1, 5);
    GradedSlice s2 = enumerate_invariant_slice(3, 2, 5);
    auto a = flatten(s1);
    auto b = flatten(s2);
    MembershipOracle oracle(vq_basis_monoid(3));
    for (int trial = 0; trial < 40; ++trial) {
      const auto& x = a[rng() % a.size()];
      const auto& y = b[rng() % b.size()];
      std::array<long, 4> cx = bosonic_count_vector(x);
      std::array<long, 4> cy = bosonic_count_vector(y);
      std::array<long, 4> sum{cx[0] + cy[0], cx[1] + cy[1], cx[2] + cy[2], cx[3] + cy[3]};
      CHECK(oracle.contains(sum));
    }
  }

  SECTION("mode weights of the action negate between beta and gamma") {
    for (int sp : {1, 2})
      for (long k : {-2L, -1L, 0L, 1L}) {
        Mode gm{ModeKind::Gamma, sp, k};
        Mode bm{ModeKind::Beta, sp, k};
        CHECK(mode_g_charge(gm) == -mode_g_charge(bm));
      }
  }

  CHECK_THROWS_AS(enumerate_invariant_slice(0, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_invariant_slice(2, -1, 2), std::invalid_argument);
}

TEST_CASE("minimal generator counts over the weight-zero subalgebra", "[character]") {
  SECTION("weight one gives the six proof generators for N = 2..5") {
    for (long n = 2; n <= 5; ++n) {
      auto res = minimal_generators(n, 1, n + 2);
      CHECK(res.count == 6);
      CHECK(res.stable);
      std::vector<NormalMonomial> want;
      std::vector<Mode> u1(static_cast<size_t>(n - 1), g1(0));
      u1.push_back(g1(-1));
      std::vector<Mode> u2(static_cast<size_t>(n - 1), g2(0));
      u2.push_back(g2(-1));
      want.push_back(mono(u1));
      want.push_back(mono(u2));
      want.push_back(mono({g1(0), g2(-1)}));
      want.push_back(mono({g1(-1), g2(0)}));
      want.push_back(mono({b1(-1), g1(0)}));
      want.push_back(mono({b2(-1), g2(0)}));
      std::sort(want.begin(), want.end());
      CHECK(res.witnesses == want);
    }
  }

  SECTION("higher-weight values are cutoff-stable; regression pins") {
    auto res = minimal_generators(2, 2, 8);
    CHECK(res.stable);
    CHECK(res.count == 18);
    CHECK(res.count == static_cast<long>(res.witnesses.size()));
    // every witness must itself lie in the slice and be G-invariant
    GAction action(2);
    for (const auto& w : res.witnesses) {
      CHECK(action.invariant(w));
      CHECK(w.weight() == 2);
    }
    // a witness that is monomial-divisible by (gamma_0^1)^2, whose quotient
    // beta^1 gamma^2 is charge-invariant yet outside the block monoid
    CHECK(std::find(res.witnesses.begin(), res.witnesses.end(),
                    mono({b1(-1), g1(0), g1(0), g2(-1)})) != res.witnesses.end());
    CHECK(minimal_generators(3, 2, 12).count == 20);
    CHECK(minimal_generators(2, 3, 12).count == 62);
  }

  CHECK_THROWS_AS(minimal_generators(2, 0, 4), std::invalid_argument);
}

TEST_CASE("formula-versus-oracle comparison report", "[character]") {
  CharacterReport rep = compare(2, 2, 8);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].formula == 6);
  CHECK(rep.rows[0].formula_multichoose == 6);
  CHECK(rep.rows[0].oracle == 6);
  CHECK(rep.rows[0].stable);
  CHECK(rep.rows[1].formula == 27);
  CHECK(rep.rows[1].formula_multichoose == 33);
  CHECK(rep.rows[1].stable);
  CHECK(rep.all_stable);

  SECTION("CSV output is byte-deterministic") {
    std::string csv1 = character_csv(rep);
    std::string csv2 = character_csv(compare(2, 2, 8));
    CHECK(csv1 == csv2);
    CHECK(csv1.rfind("N,r,formula,formula_multichoose_variant,oracle,stable,witness_count\n",
                     0) == 0);
    CHECK(csv1.find("2,1,6,6,6,true,6\n") != std::string::npos);
  }

  SECTION("threaded run matches the serial one") {
    CharacterReport par = compare(2, 2, 8, 2);
    CHECK(character_csv(par) == character_csv(rep));
  }

  SECTION("JSON carries full witness lists") {
    auto j = to_json(rep);
    CHECK(j["N"] == 2);
    CHECK(j["r_max"] == 2);
    CHECK(j["all_stable"].get<bool>());
    REQUIRE(j["rows"].size() == 2);
    CHECK(j["rows"][0]["witnesses"].size() == 6);
    CHECK(j["rows"][0]["formula"] == "6");
  }

  CHECK_THROWS_AS(compare(1, 2, 4), std::invalid_argument);
  CHECK_THROWS_AS(compare(2, 0, 4), std::invalid_argument);
}
