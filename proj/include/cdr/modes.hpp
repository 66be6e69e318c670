#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdr/rational.hpp"

namespace cdr {

/// Generator kinds of the rank-N beta-gamma b-c system. The declaration
/// order fixes the canonical normal ordering: Beta < Gamma < B < C.
enum class ModeKind { Beta, Gamma, B, C };

inline bool is_odd(ModeKind k) { return k == ModeKind::B || k == ModeKind::C; }

inline std::string_view kind_letter(ModeKind k) {
  switch (k) {
    case ModeKind::Beta: return "B";
    case ModeKind::Gamma: return "g";
    case ModeKind::B: return "b";
    case ModeKind::C: return "c";
  }
  throw std::logic_error("kind_letter: bad kind");
}

inline std::string_view kind_name(ModeKind k) {
  switch (k) {
    case ModeKind::Beta: return "beta";
    case ModeKind::Gamma: return "gamma";
    case ModeKind::B: return "b";
    case ModeKind::C: return "c";
  }
  throw std::logic_error("kind_name: bad kind");
}

/// A single Fourier mode x^i_n in field labels: gamma(z) = sum gamma_n z^-n,
/// beta(z) = sum beta_n z^-n-1, c(z) = sum c_n z^-n, b(z) = sum b_n z^-n-1.
struct Mode {
  ModeKind kind;
  int species;  // 1-based
  long index;   // field label n

  friend auto operator<=>(const Mode&, const Mode&) = default;
};

inline bool is_odd(const Mode& m) { return is_odd(m.kind); }

/// Vacuum annihilators: beta_{n>=0}, gamma_{n>0}, b_{n>=0}, c_{n>0}.
inline bool is_annihilator(const Mode& m) {
  switch (m.kind) {
    case ModeKind::Beta:
    case ModeKind::B: return m.index >= 0;
    case ModeKind::Gamma:
    case ModeKind::C: return m.index > 0;
  }
  throw std::logic_error("is_annihilator: bad kind");
}

inline bool is_creation(const Mode& m) { return !is_annihilator(m); }

/// Conformal weight contributed by the mode: deg x_n = -n for all kinds.
inline long mode_weight(const Mode& m) { return -m.index; }

/// Charge of the mode under the order-N cyclic action on the two-species
/// system: gamma^1, beta^2 carry +1; gamma^2, beta^1 carry -1. Fermionic
/// modes and species beyond 2 are fixed by the action.
inline long mode_g_charge(const Mode& m) {
  if (m.species == 1) {
    if (m.kind == ModeKind::Gamma) return 1;
    if (m.kind == ModeKind::Beta) return -1;
  } else if (m.species == 2) {
    if (m.kind == ModeKind::Gamma) return -1;
    if (m.kind == ModeKind::Beta) return 1;
  }
  return 0;
}

inline std::string mode_str(const Mode& m) {
  return std::string(kind_letter(m.kind)) + "[" + std::to_string(m.species) + "," +
         std::to_string(m.index) + "]";
}

/// A normally ordered product of creation modes applied to the vacuum.
/// Invariants: modes sorted by (kind, species, index); every mode is a
/// creation mode; odd modes appear at most once.
class NormalMonomial {
public:
  NormalMonomial() = default;

  /// Builds from a list already in canonical order; validates invariants.
  static NormalMonomial from_sorted(std::vector<Mode> modes) {
    for (size_t i = 0; i < modes.size(); ++i) {
      if (!is_creation(modes[i]))
        throw std::invalid_argument("NormalMonomial: " + mode_str(modes[i]) +
                                    " is not a creation mode");
      if (modes[i].species < 1)
        throw std::invalid_argument("NormalMonomial: species must be >= 1");
      if (i > 0) {
        if (modes[i] < modes[i - 1])
          throw std::invalid_argument("NormalMonomial: modes not in canonical order");
        if (modes[i] == modes[i - 1] && is_odd(modes[i]))
          throw std::invalid_argument("NormalMonomial: repeated odd mode");
      }
    }
    NormalMonomial m;
    m.modes_ = std::move(modes);
    return m;
  }

  const std::vector<Mode>& modes() const { return modes_; }
  bool is_vacuum() const { return modes_.empty(); }
  size_t size() const { return modes_.size(); }

  long weight() const {
    long w = 0;
    for (const auto& m : modes_) w += mode_weight(m);
    return w;
  }

  /// Count of gamma_0 modes (any species): the degree tracked by the cutoff.
  long gamma0_degree() const {
    long d = 0;
    for (const auto& m : modes_)
      if (m.kind == ModeKind::Gamma && m.index == 0) ++d;
    return d;
  }

  long fermion_charge() const {
    long f = 0;
    for (const auto& m : modes_) {
      if (m.kind == ModeKind::C) ++f;
      if (m.kind == ModeKind::B) --f;
    }
    return f;
  }

  long g_charge() const {
    long c = 0;
    for (const auto& m : modes_) c += mode_g_charge(m);
    return c;
  }

  int parity() const {
    size_t odd = 0;
    for (const auto& m : modes_)
      if (is_odd(m)) ++odd;
    return static_cast<int>(odd % 2);
  }

  int max_species() const {
    int s = 0;
    for (const auto& m : modes_) s = std::max(s, m.species);
    return s;
  }

  /// Normal-orders m * (this monomial) when no contraction is possible, i.e.
  /// for creation m. Returns the Koszul sign and the sorted monomial, or
  /// nullopt when an odd mode collides (square zero).
  std::optional<std::pair<int, NormalMonomial>> insert_creation(const Mode& m) const {
    if (!is_creation(m))
      throw std::invalid_argument("insert_creation: " + mode_str(m) + " is not a creation mode");
    auto pos = std::lower_bound(modes_.begin(), modes_.end(), m);
    if (pos != modes_.end() && *pos == m && is_odd(m)) return std::nullopt;
    int sign = 1;
    if (is_odd(m)) {
      for (auto it = modes_.begin(); it != pos; ++it)
        if (is_odd(*it)) sign = -sign;
    }
    NormalMonomial out;
    out.modes_.reserve(modes_.size() + 1);
    out.modes_.assign(modes_.begin(), pos);
    out.modes_.push_back(m);
    out.modes_.insert(out.modes_.end(), pos, modes_.end());
    return std::make_pair(sign, out);
  }

  /// Removes the mode at position i, returning the Koszul sign picked up by
  /// moving it to the front.
  std::pair<int, NormalMonomial> remove_at(size_t i) const {
    int sign = 1;
    if (is_odd(modes_[i])) {
      for (size_t t = 0; t < i; ++t)
        if (is_odd(modes_[t])) sign = -sign;
    }
    NormalMonomial out;
    out.modes_ = modes_;
    out.modes_.erase(out.modes_.begin() + static_cast<std::ptrdiff_t>(i));
    return {sign, out};
  }

  friend auto operator<=>(const NormalMonomial&, const NormalMonomial&) = default;

private:
  std::vector<Mode> modes_;
};

/// Three-part grading of a monomial or homogeneous state. g_charge is the
/// raw integer charge; reduce mod N where a cyclic group order is fixed.
struct Grading {
  long weight = 0;
  long fermion_charge = 0;
  long g_charge = 0;

  friend bool operator==(const Grading&, const Grading&) = default;
};

inline Grading monomial_grading(const NormalMonomial& m) {
  return {m.weight(), m.fermion_charge(), m.g_charge()};
}

/// Finite linear combination of normal monomials over Q, with a sticky flag
/// recording that some gamma_0-degree terms were dropped by the cutoff.
class StateVector {
public:
  StateVector() = default;

  static StateVector zero() { return StateVector(); }

  static StateVector vacuum() {
    StateVector v;
    v.terms_[NormalMonomial()] = Rational(1);
    return v;
  }

  static StateVector monomial(NormalMonomial m, Rational coeff = Rational(1)) {
    StateVector v;
    if (!coeff.is_zero()) v.terms_[std::move(m)] = std::move(coeff);
    return v;
  }

  const std::map<NormalMonomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool truncated() const { return truncated_; }
  void mark_truncated() { truncated_ = true; }

  void add_term(const NormalMonomial& m, const Rational& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.try_emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  StateVector& operator+=(const StateVector& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    truncated_ = truncated_ || o.truncated_;
    return *this;
  }

  StateVector& operator-=(const StateVector& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    truncated_ = truncated_ || o.truncated_;
    return *this;
  }

  friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
  friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }

  friend StateVector operator*(const Rational& c, const StateVector& v) {
    StateVector r;
    r.truncated_ = v.truncated_;
    if (c.is_zero()) return r;
    for (const auto& [m, x] : v.terms_) r.terms_[m] = c * x;
    return r;
  }

  /// Equality of the coefficient data; the truncation flag is diagnostic
  /// metadata and deliberately not part of the value.
  friend bool operator==(const StateVector& a, const StateVector& b) {
    return a.terms_ == b.terms_;
  }

  Rational coeff(const NormalMonomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  /// Maximum weight over the support (0 for the zero state).
  long max_weight() const {
    long w = 0;
    for (const auto& [m, c] : terms_) w = std::max(w, m.weight());
    return w;
  }

  int max_species() const {
    int s = 0;
    for (const auto& [m, c] : terms_) s = std::max(s, m.max_species());
    return s;
  }

  /// Restriction to monomials of gamma_0-degree <= bound (no flag change).
  StateVector restrict_gamma0(long bound) const {
    StateVector r;
    r.truncated_ = truncated_;
    for (const auto& [m, c] : terms_)
      if (m.gamma0_degree() <= bound) r.terms_[m] = c;
    return r;
  }

private:
  std::map<NormalMonomial, Rational> terms_;
  bool truncated_ = false;
};

/// Shared parameters of the mode-algebra operations.
struct AlgebraConfig {
  int species = 2;          // rank N of the system
  long gamma0_cutoff = 24;  // max stored gamma_0-degree
};

namespace detail {

/// Scalar produced when moving m rightward past x: m x = sign x m + delta.
inline int contraction(const Mode& m, const Mode& x) {
  if (m.species != x.species || m.index != -x.index) return 0;
  if (m.kind == ModeKind::Beta && x.kind == ModeKind::Gamma) return 1;
  if (m.kind == ModeKind::Gamma && x.kind == ModeKind::Beta) return -1;
  if (m.kind == ModeKind::B && x.kind == ModeKind::C) return 1;
  if (m.kind == ModeKind::C && x.kind == ModeKind::B) return 1;
  return 0;
}

inline void prepend_all(const Mode& x, const StateVector& inner, const Rational& scale,
                        StateVector& out) {
  for (const auto& [m, c] : inner.terms()) {
    std::vector<Mode> modes;
    modes.reserve(m.modes().size() + 1);
    modes.push_back(x);
    modes.insert(modes.end(), m.modes().begin(), m.modes().end());
    out.add_term(NormalMonomial::from_sorted(std::move(modes)), scale * c);
  }
}

/// m applied to the tail modes[pos..] * |0>.
inline StateVector apply_tail(const Mode& m, const std::vector<Mode>& modes, size_t pos) {
  StateVector out;
  if (pos == modes.size()) {
    if (is_creation(m)) out.add_term(NormalMonomial::from_sorted({m}), Rational(1));
    return out;
  }
  const Mode& x = modes[pos];
  if (is_creation(m) && (m < x || (m == x && !is_odd(m)))) {
    std::vector<Mode> ms;
    ms.reserve(modes.size() - pos + 1);
    ms.push_back(m);
    ms.insert(ms.end(), modes.begin() + static_cast<std::ptrdiff_t>(pos), modes.end());
    out.add_term(NormalMonomial::from_sorted(std::move(ms)), Rational(1));
    return out;
  }
  if (is_creation(m) && m == x && is_odd(m)) return out;  // square zero
  int sign = (is_odd(m) && is_odd(x)) ? -1 : 1;
  StateVector inner = apply_tail(m, modes, pos + 1);
  prepend_all(x, inner, Rational(sign), out);
  int delta = contraction(m, x);
  if (delta != 0) {
    std::vector<Mode> rest(modes.begin() + static_cast<std::ptrdiff_t>(pos + 1), modes.end());
    out.add_term(NormalMonomial::from_sorted(std::move(rest)), Rational(delta));
  }
  return out;
}

}  // namespace detail

/// Normal-ordered action of a single mode on a state. Relations imposed for
/// all index pairs: [beta^i_m, gamma^j_n] = delta_ij delta_{m,-n},
/// {b^i_m, c^j_n} = delta_ij delta_{m,-n}, all other pairs (super)commute.
/// Result terms above the gamma_0-cutoff are dropped and the state flagged.
inline StateVector apply_mode(const Mode& m, const StateVector& v, const AlgebraConfig& cfg) {
  if (m.species < 1 || m.species > cfg.species)
    throw std::invalid_argument("apply_mode: species " + std::to_string(m.species) +
                                " out of range for N=" + std::to_string(cfg.species));
  StateVector out;
  if (v.truncated()) out.mark_truncated();
  for (const auto& [mono, c] : v.terms()) {
    StateVector part = detail::apply_tail(m, mono.modes(), 0);
    for (const auto& [pm, pc] : part.terms()) {
      if (pm.gamma0_degree() > cfg.gamma0_cutoff) {
        out.mark_truncated();
        continue;
      }
      out.add_term(pm, c * pc);
    }
  }
  return out;
}

/// Grading of a state if homogeneous. g-charges are compared mod
/// group_order when it is positive, raw otherwise. The zero state reports
/// the trivial grading.
inline std::optional<Grading> grading_of(const StateVector& v, int group_order = 0) {
  std::optional<Grading> g;
  for (const auto& [m, c] : v.terms()) {
    Grading h = monomial_grading(m);
    if (group_order > 0) h.g_charge = ((h.g_charge % group_order) + group_order) % group_order;
    if (!g)
      g = h;
    else if (!(*g == h))
      return std::nullopt;
  }
  return g ? g : std::optional<Grading>(Grading{});
}

// --- canonical text form ------------------------------------------------

inline std::string monomial_str(const NormalMonomial& m) {
  if (m.is_vacuum()) return "|0>";
  std::string out;
  const auto& ms = m.modes();
  for (size_t i = 0; i < ms.size();) {
    size_t j = i;
    while (j < ms.size() && ms[j] == ms[i]) ++j;
    out += mode_str(ms[i]);
    if (j - i > 1) out += "^" + std::to_string(j - i);
    out += " ";
    i = j;
  }
  return out + "|0>";
}

inline std::string state_str(const StateVector& v) {
  if (v.is_zero()) return "0";
  std::string out;
  for (const auto& [m, c] : v.terms()) {
    Rational mag = c.abs();
    if (out.empty())
      out += c.sign() < 0 ? "-" : "";
    else
      out += c.sign() < 0 ? " - " : " + ";
    if (!mag.is_one()) out += mag.str() + "*";
    out += monomial_str(m);
  }
  return out;
}

namespace detail {

struct StateParser {
  std::string_view src;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("state parse error at offset " + std::to_string(pos) + ": " +
                                what + " (input: '" + std::string(src) + "')");
  }

  void skip_ws() {
    while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t')) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  bool peek_digit() {
    skip_ws();
    return pos < src.size() && (std::isdigit(static_cast<unsigned char>(src[pos])) != 0);
  }

  long parse_int() {
    skip_ws();
    size_t start = pos;
    if (pos < src.size() && (src[pos] == '-' || src[pos] == '+')) ++pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    if (pos == start || (pos == start + 1 && !std::isdigit(static_cast<unsigned char>(src[start]))))
      fail("expected integer");
    return std::stol(std::string(src.substr(start, pos - start)));
  }

  Rational parse_coeff() {
    long num = parse_int();
    if (eat('/')) {
      long den = parse_int();
      return Rational(num, den);
    }
    return Rational(num);
  }

  std::optional<ModeKind> peek_kind() {
    skip_ws();
    if (pos >= src.size()) return std::nullopt;
    switch (src[pos]) {
      case 'B': return ModeKind::Beta;
      case 'g': return ModeKind::Gamma;
      case 'b': return ModeKind::B;
      case 'c': return ModeKind::C;
      default: return std::nullopt;
    }
  }

  Mode parse_mode() {
    auto k = peek_kind();
    if (!k) fail("expected mode letter B, g, b or c");
    ++pos;
    if (!eat('[')) fail("expected '['");
    long species = parse_int();
    if (!eat(',')) fail("expected ','");
    long index = parse_int();
    if (!eat(']')) fail("expected ']'");
    if (species < 1) fail("species must be >= 1");
    return Mode{*k, static_cast<int>(species), index};
  }

  // term := [coeff ['*']] mode-atoms "|0>"
  std::pair<Rational, NormalMonomial> parse_term() {
    Rational coeff(1);
    skip_ws();
    if (peek_digit()) {
      coeff = parse_coeff();
      eat('*');
    }
    std::vector<std::pair<Mode, long>> atoms;
    while (peek_kind()) {
      Mode m = parse_mode();
      long power = 1;
      if (eat('^')) {
        power = parse_int();
        if (power < 1) fail("power must be >= 1");
      }
      atoms.emplace_back(m, power);
    }
    skip_ws();
    if (pos + 3 > src.size() || src.substr(pos, 3) != "|0>") fail("expected '|0>'");
    pos += 3;
    // Normalize the listed operator order into the canonical monomial,
    // inserting from the right and tracking Koszul signs.
    NormalMonomial mono;
    int sign = 1;
    for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
      for (long p = 0; p < it->second; ++p) {
        if (!is_creation(it->first)) fail(mode_str(it->first) + " is not a creation mode");
        auto ins = mono.insert_creation(it->first);
        if (!ins) fail("repeated odd mode " + mode_str(it->first));
        sign *= ins->first;
        mono = std::move(ins->second);
      }
    }
    return {Rational(sign) * coeff, mono};
  }

  StateVector parse_state() {
    skip_ws();
    StateVector out;
    if (pos < src.size() && src[pos] == '0' && pos + 1 == src.size()) {
      ++pos;
      return out;
    }
    bool negative = eat('-');
    while (true) {
      auto [coeff, mono] = parse_term();
      out.add_term(mono, negative ? -coeff : coeff);
      skip_ws();
      if (pos == src.size()) break;
      if (eat('+'))
        negative = false;
      else if (eat('-'))
        negative = true;
      else
        fail("expected '+', '-' or end of input");
    }
    return out;
  }
};

}  // namespace detail

/// Parses the canonical text form, e.g. "B[1,-1] g[2,0]^3 |0>" or
/// "3/2*g[1,0] |0> - c[1,0] b[1,-1] |0>". Letters: B=beta, g=gamma,
/// b and c the fermions. Mode order in a term is operator order; the parser
/// normal-orders it with Koszul signs.
inline StateVector state_from_text(std::string_view text) {
  detail::StateParser p{text};
  StateVector v = p.parse_state();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing characters");
  return v;
}

// --- JSON serialization ---------------------------------------------------

inline nlohmann::json to_json(const Mode& m) {
  return {{"kind", std::string(kind_name(m.kind))}, {"species", m.species}, {"index", m.index}};
}

inline nlohmann::json to_json(const StateVector& v) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [m, c] : v.terms()) {
    nlohmann::json modes = nlohmann::json::array();
    for (const auto& mode : m.modes()) modes.push_back(to_json(mode));
    terms.push_back({{"coeff", c.fraction_str()}, {"modes", modes}});
  }
  return {{"terms", terms}, {"truncated", v.truncated()}};
}

inline ModeKind kind_from_name(std::string_view s) {
  if (s == "beta") return ModeKind::Beta;
  if (s == "gamma") return ModeKind::Gamma;
  if (s == "b") return ModeKind::B;
  if (s == "c") return ModeKind::C;
  throw std::invalid_argument("unknown mode kind '" + std::string(s) + "'");
}

inline StateVector state_from_json(const nlohmann::json& j) {
  StateVector v;
  for (const auto& t : j.at("terms")) {
    std::vector<Mode> modes;
    for (const auto& m : t.at("modes"))
      modes.push_back(Mode{kind_from_name(m.at("kind").get<std::string>()),
                           m.at("species").get<int>(), m.at("index").get<long>()});
    v.add_term(NormalMonomial::from_sorted(std::move(modes)),
               Rational::parse(t.at("coeff").get<std::string>()));
  }
  if (j.value("truncated", false)) v.mark_truncated();
  return v;
}

}  // namespace cdr
