// A guided tour of the library: states and singular products, a nonlinear
// coordinate change with its verification reports, the chart monoid of an
// A_1 singularity, and the character table of the invariant subalgebra.

#include <cstdio>

#include "cdr/character.hpp"
#include "cdr/coord.hpp"
#include "cdr/modes.hpp"
#include "cdr/monoid.hpp"
#include "cdr/series.hpp"
#include "cdr/vertex.hpp"

using namespace cdr;

int main() {
  AlgebraConfig cfg{2, 24};

  // states parse from the canonical text form
  StateVector beta = state_from_text("B[1,-1]|0>");
  StateVector gamma = state_from_text("g[1,0]|0>");
  OpeSingularPart pair = ope_singular(beta, gamma, cfg);
  std::printf("beta(z) gamma(w) has a first-order pole with residue %s\n",
              state_str(pair.poles.at(0)).c_str());

  // the distinguished states and their relations
  DistinguishedStates ds = distinguished_states(2);
  StateVector L = virasoro_state(2);
  std::printf("Q_(0) G == L: %s;  central charge: %s\n",
              nth_product(ds.Q, 0, ds.G, cfg) == L ? "yes" : "no",
              central_charge(L, cfg).str().c_str());

  // a nonlinear coordinate change and its covariance reports
  CoordTransform1 t = CoordTransform1::make(series1_from_text("g+g^2", 8));
  TildeOpeReport ope = verify_tilde_ope(t, 6);
  VirasoroInvarianceReport vir = verify_virasoro_invariance(t, 6);
  std::printf("under f = g+g^2: delta-pattern %s, Virasoro state %s\n",
              ope.ok ? "preserved" : "broken", vir.ok ? "invariant" : "moved");

  // the A_1 chart monoid: x^2, y^2, xy inside N^2
  FinGenMonoid q = an_chart_monoid(2);
  GroupifyResult g = groupify(q);
  std::printf("A_1 chart: cokernel in the ambient lattice has torsion Z/%s\n",
              g.cokernel.torsion.at(0).get_str().c_str());
  MembershipResult m = membership(q, {3, 1});
  std::printf("(3,1) in the monoid: %s\n", m.member ? "yes" : "no");

  // character of the invariant subalgebra: formula vs generator oracle
  CharacterReport rep = compare(2, 2, 12);
  for (const auto& row : rep.rows)
    std::printf("N=2 r=%ld: formula %s, multichoose %s, oracle %ld (%s)\n", row.weight,
                row.formula.get_str().c_str(), row.formula_multichoose.get_str().c_str(),
                row.oracle, row.stable ? "stable" : "unstable");
  return 0;
}
