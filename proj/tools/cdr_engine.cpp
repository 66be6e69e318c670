#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdr/character.hpp"
#include "cdr/coord.hpp"
#include "cdr/modes.hpp"
#include "cdr/monoid.hpp"
#include "cdr/selftest.hpp"
#include "cdr/series.hpp"
#include "cdr/vertex.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitUsage = 2;

long env_threads() {
  const char* s = std::getenv("CDR_ENGINE_THREADS");
  if (!s) return 1;
  char* end = nullptr;
  long v = std::strtol(s, &end, 10);
  if (end == s || v < 1) return 1;
  return v;
}

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot open output file '" << out_path << "'\n";
    return kExitUsage;
  }
  f << text;
  return kExitOk;
}

std::vector<long> parse_point(const std::string& text) {
  std::string s = text;
  if (!s.empty() && s.front() == '(') s.erase(s.begin());
  if (!s.empty() && s.back() == ')') s.pop_back();
  std::vector<long> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t used = 0;
    long v = std::stol(tok, &used);
    while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
    if (used != tok.size())
      throw std::invalid_argument("point parse error: bad token '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("point parse error: empty literal");
  return out;
}

std::string group_str(const cdr::AbelianGroupData& g) {
  std::string out;
  if (g.rank > 0) out = "Z^" + std::to_string(g.rank);
  for (const auto& t : g.torsion) {
    if (!out.empty()) out += " + ";
    out += "Z/" + t.get_str();
  }
  if (out.empty()) out = "0";
  return out;
}

// --- char ---------------------------------------------------------------

std::string char_text(const cdr::CharacterReport& rep) {
  std::string out = "character table: N=" + std::to_string(rep.group_order) +
                    " r_max=" + std::to_string(rep.r_max) +
                    " gamma0_cutoff=" + std::to_string(rep.gamma0_cutoff) + "\n";
  out += "  r  formula  multichoose  oracle  stable  witnesses\n";
  for (const auto& row : rep.rows) {
    out += "  " + std::to_string(row.weight) + "  " + row.formula.get_str() + "  " +
           row.formula_multichoose.get_str() + "  " + std::to_string(row.oracle) + "  " +
           (row.stable ? "yes" : "NO") + "  " + std::to_string(row.witness_count) + "\n";
  }
  out += rep.all_stable ? "all rows stable\n" : "WARNING: non-stabilized rows present\n";
  return out;
}

int run_char(long n, long r_max, long cutoff, const std::string& format,
             const std::string& out_path) {
  if (cutoff < 0) cutoff = 3 * n + 6;
  cdr::CharacterReport rep = cdr::compare(n, r_max, cutoff, env_threads());
  std::string text;
  if (format == "csv")
    text = cdr::character_csv(rep);
  else if (format == "json")
    text = cdr::to_json(rep).dump(2) + "\n";
  else
    text = char_text(rep);
  int rc = emit(text, out_path);
  if (rc != kExitOk) return rc;
  return rep.all_stable ? kExitOk : kExitVerificationFailure;
}

// --- ope ----------------------------------------------------------------

int run_ope(const std::string& a_text, const std::string& b_text, long cutoff,
            const std::string& format, const std::string& out_path) {
  cdr::StateVector a = cdr::state_from_text(a_text);
  cdr::StateVector b = cdr::state_from_text(b_text);
  cdr::AlgebraConfig cfg{2, cutoff};
  cdr::OpeSingularPart part = cdr::ope_singular(a, b, cfg);

  std::string text;
  if (format == "json") {
    nlohmann::json poles = nlohmann::json::array();
    for (size_t n = 0; n < part.poles.size(); ++n)
      if (!part.poles[n].is_zero())
        poles.push_back({{"n", n}, {"state", cdr::state_str(part.poles[n])}});
    text = nlohmann::json{{"A", a_text}, {"B", b_text}, {"poles", std::move(poles)}}.dump(2) +
           "\n";
  } else if (format == "csv") {
    text = "n,state\n";
    for (size_t n = 0; n < part.poles.size(); ++n)
      if (!part.poles[n].is_zero())
        text += std::to_string(n) + ",\"" + cdr::state_str(part.poles[n]) + "\"\n";
  } else {
    text = "singular part of Y(A,z)Y(B,w):\n";
    bool any = false;
    for (size_t n = 0; n < part.poles.size(); ++n)
      if (!part.poles[n].is_zero()) {
        text += "  (z-w)^-" + std::to_string(n + 1) + ":  " +
                cdr::state_str(part.poles[n]) + "\n";
        any = true;
      }
    if (!any) text += "  regular (no poles)\n";
  }
  return emit(text, out_path);
}

// --- transform ------------------------------------------------------------

int run_transform(const std::string& f_text, long order, long cutoff,
                  const std::string& format, const std::string& out_path) {
  cdr::TruncatedSeries1 f = cdr::series1_from_text(f_text, order);
  cdr::CoordTransform1 t = cdr::CoordTransform1::make(f);
  cdr::TildeOpeReport ope = cdr::verify_tilde_ope(t, cutoff);
  cdr::VirasoroInvarianceReport vir = cdr::verify_virasoro_invariance(t, cutoff);
  bool passed = ope.ok && vir.ok;

  std::string text;
  if (format == "json") {
    nlohmann::json j{{"f", f_text},
                     {"order", order},
                     {"cutoff", cutoff},
                     {"ope_delta_pattern", ope.ok},
                     {"ope_mismatches", ope.mismatches},
                     {"virasoro_invariant", vir.ok},
                     {"passed", passed}};
    if (!vir.ok) j["virasoro_difference"] = cdr::state_str(vir.difference);
    text = j.dump(2) + "\n";
  } else if (format == "csv") {
    text = "check,result\n";
    text += std::string("ope_delta_pattern,") + (ope.ok ? "pass" : "fail") + "\n";
    text += std::string("virasoro_invariant,") + (vir.ok ? "pass" : "fail") + "\n";
  } else {
    text = "transform f = " + f_text + " (order " + std::to_string(order) + ", cutoff " +
           std::to_string(cutoff) + ")\n";
    text += std::string("  delta-pattern OPE: ") + (ope.ok ? "pass" : "FAIL") + "\n";
    for (const auto& m : ope.mismatches) text += "    mismatch " + m + "\n";
    text += std::string("  virasoro invariance: ") + (vir.ok ? "pass" : "FAIL") + "\n";
    text += passed ? "result: PASS\n" : "result: FAIL\n";
  }
  int rc = emit(text, out_path);
  if (rc != kExitOk) return rc;
  return passed ? kExitOk : kExitVerificationFailure;
}

// --- monoid ----------------------------------------------------------------

cdr::FinGenMonoid parse_target(const std::string& text) {
  if (text.size() >= 2 && text[0] == 'N') {
    long d = std::stol(text.substr(1));
    if (d < 1) throw std::invalid_argument("target rank must be >= 1");
    return cdr::free_monoid(d);
  }
  return cdr::parse_monoid_literal(text);
}

int run_monoid_groupify(const cdr::FinGenMonoid& q, const std::string& format,
                        const std::string& out_path) {
  cdr::GroupifyResult g = cdr::groupify(q);
  std::string text;
  if (format == "json") {
    nlohmann::json j{{"group", cdr::to_json(g.group)},
                     {"cokernel_in_ambient", cdr::to_json(g.cokernel)},
                     {"ambient_index", g.ambient_index.get_str()}};
    text = j.dump(2) + "\n";
  } else if (format == "csv") {
    text = "field,value\n";
    text += "group," + group_str(g.group) + "\n";
    text += "cokernel_in_ambient," + group_str(g.cokernel) + "\n";
    text += "ambient_index," + g.ambient_index.get_str() + "\n";
  } else {
    text = "groupification: " + group_str(g.group) + "\n";
    text += "cokernel in ambient lattice: " + group_str(g.cokernel) + "\n";
    text += "index in ambient lattice: " + g.ambient_index.get_str() + "\n";
  }
  return emit(text, out_path);
}

int run_monoid_member(const cdr::FinGenMonoid& q, const std::vector<long>& point,
                      const std::string& format, const std::string& out_path) {
  cdr::MembershipResult res = cdr::membership(q, point);
  std::string text;
  if (format == "json") {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& [gen, mult] : res.witness) w.push_back({{"generator", gen}, {"times", mult}});
    text = nlohmann::json{{"member", res.member}, {"witness", std::move(w)}}.dump(2) + "\n";
  } else {
    text = res.member ? "member\n" : "not a member\n";
    for (const auto& [gen, mult] : res.witness) {
      text += "  + " + std::to_string(mult) + " * (";
      for (size_t i = 0; i < gen.size(); ++i)
        text += (i ? "," : "") + std::to_string(gen[i]);
      text += ")\n";
    }
  }
  return emit(text, out_path);
}

int run_monoid_saturated(const cdr::FinGenMonoid& q, long multiple_bound,
                         const std::string& format, const std::string& out_path) {
  cdr::SaturationResult res = cdr::is_saturated(q, multiple_bound);
  std::string text;
  if (format == "json")
    text = cdr::to_json(res).dump(2) + "\n";
  else {
    text = res.saturated ? "saturated" : "not saturated";
    text += res.stable ? "\n" : " (bound not stable; raise multiple_bound)\n";
    if (!res.saturated && res.counterexample) {
      text += "counterexample: (";
      for (size_t i = 0; i < res.counterexample->size(); ++i)
        text += (i ? "," : "") + std::to_string((*res.counterexample)[i]);
      text += ") with multiple " + std::to_string(res.witness_multiple) + "\n";
    }
  }
  return emit(text, out_path);
}

int run_monoid_smooth(const cdr::FinGenMonoid& q, long characteristic,
                      const std::string& format, const std::string& out_path) {
  cdr::SmoothnessVerdict res = cdr::smoothness_check(q, characteristic);
  std::string text;
  if (format == "json")
    text = cdr::to_json(res).dump(2) + "\n";
  else
    text = std::string(res.smooth ? "smooth" : "not smooth") + " (torsion order " +
           res.torsion_order.get_str() + ", characteristic " +
           std::to_string(res.characteristic) + "): " + res.reason + "\n";
  return emit(text, out_path);
}

int run_monoid_etale(const cdr::FinGenMonoid& q, const std::string& into,
                     const std::string& matrix_text, long characteristic,
                     const std::string& format, const std::string& out_path) {
  cdr::FinGenMonoid target = parse_target(into);
  std::vector<std::vector<long>> matrix;
  if (matrix_text.empty()) {
    if (q.ambient_rank() != target.ambient_rank())
      throw std::invalid_argument(
          "no --matrix given and ambient ranks differ; cannot use the identity");
    for (long i = 0; i < q.ambient_rank(); ++i) {
      std::vector<long> row(static_cast<size_t>(q.ambient_rank()), 0);
      row[static_cast<size_t>(i)] = 1;
      matrix.push_back(std::move(row));
    }
  } else {
    cdr::FinGenMonoid rows = cdr::parse_monoid_literal(matrix_text);
    matrix = rows.generators();
  }
  cdr::MonoidHom hom = cdr::MonoidHom::make(q, target, matrix);
  cdr::EtaleVerdict res = cdr::etale_check(hom, characteristic);
  std::string text;
  if (format == "json")
    text = cdr::to_json(res).dump(2) + "\n";
  else {
    text = std::string(res.etale ? "etale" : "not etale") + " (characteristic " +
           std::to_string(res.characteristic) + ")\n";
    text += "kernel rank: " + std::to_string(res.kernel_rank) + "\n";
    text += "cokernel: " + group_str(res.cokernel) + " (order " +
            res.cokernel_order.get_str() + ")\n";
    text += res.reason + "\n";
  }
  return emit(text, out_path);
}

int run_monoid_logdiff(const cdr::FinGenMonoid& q, const std::string& format,
                       const std::string& out_path) {
  cdr::LogDiffPresentation res = cdr::log_differentials(q);
  std::string text;
  if (format == "json")
    text = cdr::to_json(res).dump(2) + "\n";
  else {
    text = "log differential basis:\n";
    for (size_t i = 0; i < res.basis_labels.size(); ++i) {
      text += "  " + res.basis_labels[i] + " = (";
      for (size_t j = 0; j < res.basis[i].size(); ++j)
        text += (j ? "," : "") + res.basis[i][j].get_str();
      text += ")\n";
    }
    text += "generator coordinates:\n";
    for (size_t i = 0; i < res.generator_coords.size(); ++i) {
      text += "  gen " + std::to_string(i) + ": (";
      for (size_t j = 0; j < res.generator_coords[i].size(); ++j)
        text += (j ? "," : "") + res.generator_coords[i][j].get_str();
      text += ")\n";
    }
    if (res.diagonal_pair_spans)
      text += std::string("diagonal pair spans: ") +
              (*res.diagonal_pair_spans ? "yes" : "no") + "\n";
  }
  return emit(text, out_path);
}

// --- selftest ----------------------------------------------------------------

int run_selftest_cmd(std::uint64_t seed, bool corrupt, const std::string& format,
                     const std::string& out_path) {
  cdr::SelftestOptions opts;
  opts.seed = seed;
  opts.threads = env_threads();
  opts.corrupt = corrupt;
  cdr::SelftestReport rep = cdr::run_selftest(opts);
  std::string text =
      format == "json" ? cdr::to_json(rep).dump(2) + "\n" : cdr::selftest_text(rep);
  int rc = emit(text, out_path);
  if (rc != kExitOk) return rc;
  return rep.passed ? kExitOk : kExitVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cdr-engine: exact calculations in the chiral de Rham complex over "
      "A_N-type surface charts"};
  app.require_subcommand(1);

  std::string format = "text", out_path;
  auto add_io = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    cmd->add_option("--out", out_path, "write output to this file instead of stdout");
  };

  // char
  long n = 2, r_max = 1, char_cutoff = -1;
  CLI::App* cmd_char =
      app.add_subcommand("char", "formula-versus-oracle character table of the invariants");
  cmd_char->add_option("--N", n, "cyclic group order (>= 2)")->required();
  cmd_char->add_option("--r-max", r_max, "largest conformal weight (>= 1)");
  cmd_char->add_option("--cutoff", char_cutoff, "gamma_0-degree cutoff (default 3N+6)");
  add_io(cmd_char);

  // ope
  std::string state_a, state_b;
  long ope_cutoff = 24;
  CLI::App* cmd_ope =
      app.add_subcommand("ope", "singular operator product of two states");
  cmd_ope->add_option("A", state_a, "left state, e.g. \"b[1,-1]|0>\"")->required();
  cmd_ope->add_option("B", state_b, "right state, e.g. \"g[1,0]|0>\"")->required();
  cmd_ope->add_option("--cutoff", ope_cutoff, "gamma_0-degree cutoff");
  add_io(cmd_ope);

  // transform
  std::string f_text;
  long order = 8, tf_cutoff = 8;
  CLI::App* cmd_transform = app.add_subcommand(
      "transform", "verify field covariance under a coordinate change");
  cmd_transform->add_option("--f", f_text, "coordinate change, e.g. \"g+g^2\"")->required();
  cmd_transform->add_option("--order", order, "series truncation order");
  cmd_transform->add_option("--cutoff", tf_cutoff, "gamma_0-degree cutoff");
  add_io(cmd_transform);

  // monoid
  CLI::App* cmd_monoid = app.add_subcommand("monoid", "log-geometry monoid calculus");
  cmd_monoid->require_subcommand(1);
  std::string gens_text, point_text, into_text = "N2", matrix_text;
  long characteristic = 0, multiple_bound = 8;
  auto add_gens = [&](CLI::App* cmd) {
    cmd->add_option("--gens", gens_text, "generator literal, e.g. \"(2,0);(0,2);(1,1)\"")
        ->required();
  };
  CLI::App* m_groupify = cmd_monoid->add_subcommand("groupify", "groupification and cokernel");
  add_gens(m_groupify);
  add_io(m_groupify);
  CLI::App* m_member = cmd_monoid->add_subcommand("member", "membership with witness");
  add_gens(m_member);
  m_member->add_option("--point", point_text, "query point, e.g. \"(3,1)\"")->required();
  add_io(m_member);
  CLI::App* m_sat = cmd_monoid->add_subcommand("saturated", "saturation check");
  add_gens(m_sat);
  m_sat->add_option("--multiple-bound", multiple_bound, "largest multiple tested");
  add_io(m_sat);
  CLI::App* m_smooth = cmd_monoid->add_subcommand("smooth", "smoothness of the chart");
  add_gens(m_smooth);
  m_smooth->add_option("--char", characteristic, "base field characteristic");
  add_io(m_smooth);
  CLI::App* m_etale = cmd_monoid->add_subcommand("etale", "etale check of a chart map");
  add_gens(m_etale);
  m_etale->add_option("--into", into_text, "target monoid: N<d> or a generator literal");
  m_etale->add_option("--matrix", matrix_text,
                      "hom matrix rows as a literal (default identity)");
  m_etale->add_option("--char", characteristic, "base field characteristic");
  add_io(m_etale);
  CLI::App* m_logdiff = cmd_monoid->add_subcommand("logdiff", "log differential presentation");
  add_gens(m_logdiff);
  add_io(m_logdiff);

  // selftest
  std::uint64_t seed = 12345;
  bool corrupt = false;
  CLI::App* cmd_selftest =
      app.add_subcommand("selftest", "run the cross-module invariant suite");
  cmd_selftest->add_option("--seed", seed, "seed for the randomized suites (default 12345)");
  cmd_selftest->add_flag("--corrupt", corrupt)->group("");  // hidden negative control
  add_io(cmd_selftest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*cmd_char) {
      if (n < 2) throw std::invalid_argument("char: --N must be >= 2");
      if (r_max < 1) throw std::invalid_argument("char: --r-max must be >= 1");
      return run_char(n, r_max, char_cutoff, format, out_path);
    }
    if (*cmd_ope) {
      if (ope_cutoff < 0) throw std::invalid_argument("ope: --cutoff must be >= 0");
      return run_ope(state_a, state_b, ope_cutoff, format, out_path);
    }
    if (*cmd_transform) {
      if (order < 1) throw std::invalid_argument("transform: --order must be >= 1");
      if (tf_cutoff < 0) throw std::invalid_argument("transform: --cutoff must be >= 0");
      return run_transform(f_text, order, tf_cutoff, format, out_path);
    }
    if (*cmd_monoid) {
      cdr::FinGenMonoid q = cdr::parse_monoid_literal(gens_text);
      if (*m_groupify) return run_monoid_groupify(q, format, out_path);
      if (*m_member) return run_monoid_member(q, parse_point(point_text), format, out_path);
      if (*m_sat) return run_monoid_saturated(q, multiple_bound, format, out_path);
      if (*m_smooth) return run_monoid_smooth(q, characteristic, format, out_path);
      if (*m_etale)
        return run_monoid_etale(q, into_text, matrix_text, characteristic, format, out_path);
      if (*m_logdiff) return run_monoid_logdiff(q, format, out_path);
    }
    if (*cmd_selftest) return run_selftest_cmd(seed, corrupt, format, out_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitVerificationFailure;
  }
  return kExitUsage;
}
