#pragma once

// Exact Laurent characters of tori with rational exponents, the fixed-point
// weights of admissible classes, and vanishing/degree bounds.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gkinv/atlas.hpp"
#include "gkinv/error.hpp"
#include "gkinv/rational.hpp"

namespace gkinv {

using Exponent = std::vector<Rational>;

// Immutable in spirit: every operation returns a new value. Zero
// coefficients are never stored.
class LaurentCharacter {
 public:
  explicit LaurentCharacter(std::size_t arity = 1) : arity_(arity) {}

  static LaurentCharacter zero(std::size_t arity) { return LaurentCharacter(arity); }
  static LaurentCharacter constant(std::size_t arity, std::int64_t c) {
    LaurentCharacter out(arity);
    out.add_term(Exponent(arity, Rational(0)), c);
    return out;
  }
  static LaurentCharacter one(std::size_t arity) { return constant(arity, 1); }
  static LaurentCharacter monomial(const Exponent& e, std::int64_t c = 1) {
    LaurentCharacter out(e.size());
    out.add_term(e, c);
    return out;
  }
  // c * t_r^x with every other variable at exponent zero.
  static LaurentCharacter variable_power(std::size_t arity, std::size_t r, Rational x, std::int64_t c = 1) {
    if (r >= arity) throw DomainError("variable index out of range");
    Exponent e(arity, Rational(0));
    e[r] = x;
    return monomial(e, c);
  }

  std::size_t arity() const { return arity_; }
  const std::map<Exponent, std::int64_t>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  std::int64_t coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0 : it->second;
  }

  LaurentCharacter& add_term(const Exponent& e, std::int64_t c) {
    if (e.size() != arity_) throw DomainError("character arity mismatch");
    if (c == 0) return *this;
    auto [it, fresh] = terms_.emplace(e, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
    return *this;
  }

  LaurentCharacter& operator+=(const LaurentCharacter& o) {
    require_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  LaurentCharacter& operator-=(const LaurentCharacter& o) {
    require_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }

  friend LaurentCharacter operator+(LaurentCharacter a, const LaurentCharacter& b) { return a += b; }
  friend LaurentCharacter operator-(LaurentCharacter a, const LaurentCharacter& b) { return a -= b; }
  friend LaurentCharacter operator-(const LaurentCharacter& a) {
    LaurentCharacter out(a.arity_);
    for (const auto& [e, c] : a.terms_) out.terms_.emplace(e, -c);
    return out;
  }
  friend LaurentCharacter operator*(const LaurentCharacter& a, const LaurentCharacter& b) {
    a.require_arity(b);
    LaurentCharacter out(a.arity_);
    Exponent sum(a.arity_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t i = 0; i < a.arity_; ++i) sum[i] = ea[i] + eb[i];
        out.add_term(sum, ca * cb);
      }
    return out;
  }
  friend LaurentCharacter operator*(std::int64_t k, const LaurentCharacter& a) {
    LaurentCharacter out(a.arity_);
    if (k == 0) return out;
    for (const auto& [e, c] : a.terms_) out.terms_.emplace(e, k * c);
    return out;
  }

  bool operator==(const LaurentCharacter& o) const { return arity_ == o.arity_ && terms_ == o.terms_; }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [e, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += std::to_string(c);
      for (std::size_t i = 0; i < arity_; ++i)
        if (e[i] != Rational(0)) s += "*t" + std::to_string(i) + "^(" + gkinv::to_string(e[i]) + ")";
    }
    return s;
  }

 private:
  void require_arity(const LaurentCharacter& o) const {
    if (o.arity_ != arity_)
      throw DomainError("character arity mismatch: " + std::to_string(arity_) + " vs " + std::to_string(o.arity_));
  }

  std::size_t arity_;
  std::map<Exponent, std::int64_t> terms_;
};

inline LaurentCharacter char_add(const LaurentCharacter& a, const LaurentCharacter& b) { return a + b; }
inline LaurentCharacter char_mul(const LaurentCharacter& a, const LaurentCharacter& b) { return a * b; }

// Negative powers exist only for single-term units (coefficient +-1).
inline LaurentCharacter char_pow(const LaurentCharacter& c, std::int64_t k) {
  if (k < 0) {
    if (c.size() != 1 || (c.terms().begin()->second != 1 && c.terms().begin()->second != -1))
      throw DomainError("char_pow: negative power of a non-unit character");
    const auto& [e, coef] = *c.terms().begin();
    Exponent inv(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) inv[i] = -e[i];
    return char_pow(LaurentCharacter::monomial(inv, coef), -k);
  }
  LaurentCharacter result = LaurentCharacter::one(c.arity());
  LaurentCharacter base = c;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

inline std::int64_t weight_zero_part(const LaurentCharacter& c) {
  return c.coefficient(Exponent(c.arity(), Rational(0)));
}

inline Rational dot(const Exponent& a, const Exponent& b) {
  if (a.size() != b.size()) throw DomainError("exponent arity mismatch");
  Rational s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Exact quotient of c by (1 - t^u); throws when the division is not exact.
// Terms are peeled off in increasing order of <e,u>, so each quotient term is
// the lowest remaining term of the running remainder.
inline LaurentCharacter divide_by_one_minus(const LaurentCharacter& c, const Exponent& u) {
  if (u.size() != c.arity()) throw DomainError("divide_by_one_minus: arity mismatch");
  const Rational uu = dot(u, u);
  if (uu == Rational(0)) throw DomainError("divide_by_one_minus: zero direction");
  if (c.is_zero()) return c;
  Rational top = dot(c.terms().begin()->first, u);
  for (const auto& [e, coef] : c.terms()) top = std::max(top, dot(e, u));

  LaurentCharacter rest = c, quotient(c.arity());
  while (!rest.is_zero()) {
    auto lowest = rest.terms().begin();
    Rational key = dot(lowest->first, u);
    for (auto it = rest.terms().begin(); it != rest.terms().end(); ++it) {
      Rational k = dot(it->first, u);
      if (k < key) {
        key = k;
        lowest = it;
      }
    }
    if (key + uu > top) throw DomainError("divide_by_one_minus: character is not divisible");
    Exponent e = lowest->first;
    const std::int64_t coef = lowest->second;
    Exponent shifted(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) shifted[i] = e[i] + u[i];
    quotient.add_term(e, coef);
    rest.add_term(e, -coef);
    rest.add_term(shifted, coef);
  }
  return quotient;
}

// ---------------------------------------------------------------------------
// Admissible classes

struct EvaluationInsertion {
  std::string label;
  std::int64_t lambda = 0;
  std::int64_t descendant = 0;
};

struct IndexInsertion {
  std::int64_t lambda = 0;
  std::int64_t power = 0;
};

struct AdmissibleClassSpec {
  Rational q{1};
  std::vector<EvaluationInsertion> evaluations;
  std::vector<IndexInsertion> indices;
};

inline void require_valid(const AdmissibleClassSpec& spec) {
  if (spec.q <= Rational(0)) throw DomainError("spec: q must be positive");
  std::set<std::string> labels;
  for (const auto& ev : spec.evaluations) {
    if (ev.descendant < 0) throw DomainError("spec: descendant exponent must be non-negative");
    if (!labels.insert(ev.label).second) throw DomainError("spec: duplicate evaluation label '" + ev.label + "'");
  }
  for (const auto& ix : spec.indices)
    if (ix.power < 0) throw DomainError("spec: index class powers must be non-negative");
}

inline void require_valid(const AdmissibleClassSpec& spec, const std::vector<std::string>& markings) {
  require_valid(spec);
  const std::set<std::string> known(markings.begin(), markings.end());
  for (const auto& ev : spec.evaluations)
    if (!known.count(ev.label)) throw DomainError("spec: evaluation label '" + ev.label + "' is not a marked point");
}

inline LaurentCharacter line_bundle_weight(const FixedComponentLabel& label, const std::vector<int>& genera,
                                           const Rational& q) {
  if (q <= Rational(0)) throw DomainError("line_bundle_weight: q must be positive");
  const std::size_t n = label.sums.size();
  if (genera.size() != n) throw DomainError("line_bundle_weight: genera do not match the blocks");
  Exponent e(n);
  for (std::size_t r = 0; r < n; ++r) e[r] = q * Rational(label.sums[r] + 1 - genera[r]);
  return LaurentCharacter::monomial(e);
}

inline LaurentCharacter evaluation_weight(std::size_t arity, std::size_t block, std::int64_t lambda) {
  return LaurentCharacter::variable_power(arity, block, Rational(-lambda));
}

inline LaurentCharacter index_character(const FixedComponentLabel& label, const std::vector<int>& genera,
                                        std::int64_t lambda) {
  const std::size_t n = label.sums.size();
  if (genera.size() != n) throw DomainError("index_character: genera do not match the blocks");
  LaurentCharacter out(n);
  for (std::size_t r = 0; r < n; ++r)
    out += LaurentCharacter::variable_power(n, r, Rational(-lambda), lambda * label.sums[r] + 1 - genera[r]);
  return out;
}

// Stable components are fixed pointwise, so cotangent lines carry weight 0.
inline LaurentCharacter descendant_weight(std::size_t arity, std::int64_t /*power*/) {
  return LaurentCharacter::one(arity);
}

// `blocks` maps each marked point to the block of the component carrying it.
inline LaurentCharacter class_weight(const AdmissibleClassSpec& spec, const FixedComponentLabel& label,
                                     const std::vector<int>& genera, const std::map<std::string, std::size_t>& blocks) {
  require_valid(spec);
  const std::size_t n = label.sums.size();
  LaurentCharacter out = line_bundle_weight(label, genera, spec.q);
  for (const auto& ev : spec.evaluations) {
    auto it = blocks.find(ev.label);
    if (it == blocks.end()) throw DomainError("class_weight: marked point '" + ev.label + "' has no stable component");
    if (it->second >= n) throw DomainError("class_weight: block index out of range for '" + ev.label + "'");
    out = out * evaluation_weight(n, it->second, ev.lambda) * descendant_weight(n, ev.descendant);
  }
  for (const auto& ix : spec.indices) out = out * char_pow(index_character(label, genera, ix.lambda), ix.power);
  return out;
}

// Marked point -> block of R, read off the tails of the base.
inline std::map<std::string, std::size_t> marking_blocks(const ModularGraph& base, const Partition& r) {
  std::map<std::string, std::size_t> out;
  for (const auto& [h, lab] : base.tails) out[lab] = r.block_of(base.attach.at(h));
  return out;
}

// Lowest exponent the insertions can add to block `block` of R.
inline Rational insertion_floor(const AdmissibleClassSpec& spec, const std::map<std::string, std::size_t>& blocks,
                                std::size_t block) {
  Rational lo(0);
  for (const auto& ev : spec.evaluations) {
    auto it = blocks.find(ev.label);
    if (it != blocks.end() && it->second == block) lo -= Rational(ev.lambda);
  }
  for (const auto& ix : spec.indices) lo += Rational(ix.power * std::min<std::int64_t>(-ix.lambda, 0));
  return lo;
}

// Beyond these bounds the block exponent of every fixed-point character is
// strictly positive, so no weight-zero term survives. Labels are
// (d + N - k, -N); N_u is clamped so that N_u > N_l always holds.
inline MultidegreeBounds vanishing_bounds(const AdmissibleClassSpec& spec, const ModularGraph& base,
                                          std::int64_t d) {
  require_valid(spec);
  require_valid(base);
  MultidegreeBounds out;
  for (const auto& r : nt2b(base)) {
    const auto genera = block_genera(base, r);
    const auto blocks = marking_blocks(base, r);
    const std::int64_t k = split_edge_count(base, r);
    const Rational slack_plus = -std::min(insertion_floor(spec, blocks, 0), Rational(0)) / spec.q;
    const Rational slack_minus = -std::min(insertion_floor(spec, blocks, 1), Rational(0)) / spec.q;
    // smallest N with d + N - k + 1 - g_+ > slack_plus
    const std::int64_t upper_raw = floor_of(Rational(k - 1 + genera[0] - d) + slack_plus) + 1;
    // largest N with 1 - N - g_- > slack_minus
    const std::int64_t lower = ceil_of(Rational(1 - genera[1]) - slack_minus) - 1;
    const std::int64_t upper = std::max<std::int64_t>(upper_raw, 1 - genera[1]);
    out.per_partition[r] = {upper, lower};
  }
  return out;
}

// Total degrees whose diagonal weight q(d + 1 - g) + (insertion weights) can
// be zero. Every insertion term has the same diagonal weight, so the band
// is a single value and the range is at most one degree.
inline std::vector<std::int64_t> degree_range(const AdmissibleClassSpec& spec, int genus, std::size_t marking_count) {
  require_valid(spec);
  if (spec.evaluations.size() > marking_count) throw DomainError("degree_range: more evaluations than marked points");
  Rational diagonal(0);
  for (const auto& ev : spec.evaluations) diagonal += Rational(ev.lambda);
  for (const auto& ix : spec.indices) diagonal += Rational(ix.power * ix.lambda);
  const Rational shift = diagonal / spec.q;
  if (!is_integer(shift)) return {};
  return {genus - 1 + shift.numerator()};
}

}  // namespace gkinv
