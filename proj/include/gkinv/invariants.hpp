#pragma once

// Twisted K-theoretic invariants of [pt/C*] in genus 0 with three marked
// points, and over the boundary chain of the four-pointed family.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gkinv/atlas.hpp"
#include "gkinv/character.hpp"
#include "gkinv/degeneration.hpp"
#include "gkinv/error.hpp"

namespace gkinv {

struct InvariantResult {
  std::int64_t value = 0;
  std::set<std::int64_t> contributing_degrees;
  std::map<std::int64_t, std::int64_t> breakdown;  // nonzero entries only
  std::int64_t stabilization_truncation = 0;
  std::int64_t predicted_truncation = 0;
  std::map<std::int64_t, DegreeInterval> windows;  // chain window used per degree
  bool operator==(const InvariantResult&) const = default;
};

struct InvariantOptions {
  std::optional<DegreeInterval> degree_scan;  // replaces degree_range when set
  std::optional<DegreeInterval> window;       // fixed chain window; skips the stabilization re-run
  std::int64_t padding = 2;
  std::int64_t recheck_padding = 3;
  std::vector<std::string> markings;  // defaults to "1".."n"
  unsigned threads = 1;
};

inline std::vector<std::string> default_markings(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(std::to_string(i));
  return out;
}

// Threads requested through GK_THREADS, at least 1.
inline unsigned threads_from_environment() {
  const char* raw = std::getenv("GK_THREADS");
  if (!raw || !*raw) return 1;
  char* end = nullptr;
  long n = std::strtol(raw, &end, 10);
  if (*end != '\0' || n < 1) throw DomainError("GK_THREADS must be a positive integer");
  return static_cast<unsigned>(std::min<long>(n, 64));
}

namespace detail {

// Results land in index order regardless of scheduling.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, unsigned threads, Fn fn) {
  std::vector<T> out(count);
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < count; i += stride) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline std::vector<std::int64_t> degrees_to_evaluate(const AdmissibleClassSpec& spec, std::size_t markings,
                                                     const InvariantOptions& options) {
  if (options.degree_scan) {
    if (options.degree_scan->empty()) throw DomainError("degree scan range is empty");
    std::vector<std::int64_t> out;
    for (std::int64_t d = options.degree_scan->lo; d <= options.degree_scan->hi; ++d) out.push_back(d);
    return out;
  }
  return degree_range(spec, 0, markings);
}

inline std::vector<std::string> resolve_markings(const InvariantOptions& options, std::size_t n) {
  auto m = options.markings.empty() ? default_markings(n) : options.markings;
  if (m.size() != n) throw DomainError("expected " + std::to_string(n) + " marked points, got " + std::to_string(m.size()));
  if (std::set<std::string>(m.begin(), m.end()).size() != n) throw DomainError("marked point labels must be distinct");
  return m;
}

// Smallest T from which partial sums over |key| <= T stay at the total.
inline std::int64_t settled_radius(const std::map<std::int64_t, std::int64_t>& by_radius, std::int64_t total) {
  std::int64_t settled = 0;
  for (const auto& [radius, value] : by_radius)
    if (value != total) settled = radius + 1;
  return settled;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// (0,3)

inline InvariantResult invariant_g0_n3(const AdmissibleClassSpec& spec, const InvariantOptions& options = {}) {
  const auto markings = detail::resolve_markings(options, 3);
  require_valid(spec, markings);
  const auto degrees = detail::degrees_to_evaluate(spec, 3, options);
  std::map<std::string, std::size_t> blocks;
  for (const auto& m : markings) blocks[m] = 0;
  const std::vector<int> genera{0};
  auto values = detail::parallel_map<std::int64_t>(degrees.size(), options.threads, [&](std::size_t i) {
    FixedComponentLabel label{Partition{{{0}}}, {degrees[i]}};
    return weight_zero_part(class_weight(spec, label, genera, blocks));
  });
  InvariantResult out;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (values[i] == 0) continue;
    out.breakdown[degrees[i]] = values[i];
    out.contributing_degrees.insert(degrees[i]);
    out.value += values[i];
  }
  std::map<std::int64_t, std::int64_t> partial;
  std::int64_t radius_max = 0;
  for (auto d : degrees) radius_max = std::max(radius_max, std::abs(d));
  for (std::int64_t t = 0; t <= radius_max; ++t) {
    std::int64_t s = 0;
    for (const auto& [d, v] : out.breakdown)
      if (std::abs(d) <= t) s += v;
    partial[t] = s;
  }
  out.stabilization_truncation = detail::settled_radius(partial, out.value);
  for (auto d : degree_range(spec, 0, 3)) out.predicted_truncation = std::max(out.predicted_truncation, std::abs(d));
  return out;
}

// ---------------------------------------------------------------------------
// Boundary chain of the four-pointed family

struct ChainFixedPoint {
  std::int64_t n = 0;
  Exponent z_weight, w_weight;
  FixedComponentLabel label;
  DegeneracyType stratum;
  LaurentCharacter character{2};  // class_weight at pt_n
};

struct ChainComponent {
  std::int64_t n = 0;  // P^1_n joins pt_n and pt_{n+1}
  std::optional<std::size_t> left, right;  // a half-component misses one end
  DegeneracyType open_stratum;
  bool full() const { return left && right; }
};

struct ChainModel {
  std::int64_t total_degree = 0;
  std::int64_t n_min = 0, n_max = 0;
  ModularGraph base;
  Partition partition;
  std::vector<std::string> markings;
  Exponent direction;  // weight of z_n, shared by every fixed point
  std::vector<ChainFixedPoint> points;
  std::vector<ChainComponent> components;  // half, full..., half
  std::vector<std::int64_t> line_degrees;  // degree of the admissible bundle on each full component
};

// Two genus-0 components; the first two markings sit on the "+" component.
inline ModularGraph boundary_base(const std::vector<std::string>& markings) {
  if (markings.size() != 4) throw DomainError("boundary base needs four marked points");
  ModularGraph g;
  VertexId plus = g.add_vertex(0), minus = g.add_vertex(0);
  g.add_tail(plus, markings[0]);
  g.add_tail(plus, markings[1]);
  g.add_tail(minus, markings[2]);
  g.add_tail(minus, markings[3]);
  g.add_edge(plus, minus);
  return g;
}

inline ChainModel build_chain_model(std::int64_t d, const AdmissibleClassSpec& spec, const DegreeInterval& window,
                                    const std::vector<std::string>& markings = default_markings(4)) {
  if (window.empty()) throw DomainError("chain window is empty");
  require_valid(spec, markings);
  ChainModel model;
  model.total_degree = d;
  model.n_min = window.lo;
  model.n_max = window.hi;
  model.base = boundary_base(markings);
  model.markings = markings;
  model.partition = nt2b(model.base).front();
  model.direction = {Rational(1), Rational(-1)};
  const auto verts = model.base.vertices();
  const EdgeId edge = model.base.edges().front().first;
  const auto genera = block_genera(model.base, model.partition);
  const auto blocks = marking_blocks(model.base, model.partition);

  auto deformation = [&](std::int64_t plus_degree, std::int64_t minus_degree, bool bubbled) {
    DeformationOfBase def;
    def.base = model.base;
    def.kept_edges = {edge};
    def.blocks = {{verts[0]}, {verts[1]}};
    def.block_degree = {plus_degree, minus_degree};
    if (bubbled) def.bubbled_edges = {edge};
    return def;
  };

  for (std::int64_t n = window.lo; n <= window.hi; ++n) {
    ChainFixedPoint pt;
    pt.n = n;
    pt.z_weight = {Rational(1), Rational(-1)};
    pt.w_weight = {Rational(-1), Rational(1)};
    auto def = deformation(d + n - 1, -n, true);
    pt.stratum = stratum_of(def);
    auto label = fixed_label(def, model.partition);
    if (!label) throw DomainError("chain point is not a fixed component");
    pt.label = *label;
    pt.character = class_weight(spec, pt.label, genera, blocks);
    model.points.push_back(std::move(pt));
  }
  for (std::int64_t n = window.lo - 1; n <= window.hi; ++n) {
    ChainComponent c;
    c.n = n;
    if (n >= window.lo) c.left = static_cast<std::size_t>(n - window.lo);
    if (n + 1 <= window.hi) c.right = static_cast<std::size_t>(n + 1 - window.lo);
    c.open_stratum = stratum_of(deformation(d + n, -n, false));
    model.components.push_back(std::move(c));
  }
  // The admissible bundle's fixed-point exponents differ by a multiple of
  // the tangent direction along every full component.
  for (std::size_t i = 0; i + 1 < model.points.size(); ++i) {
    auto a = line_bundle_weight(model.points[i].label, genera, spec.q).terms().begin()->first;
    auto b = line_bundle_weight(model.points[i + 1].label, genera, spec.q).terms().begin()->first;
    const Rational m = b[0] - a[0];
    if (b[1] - a[1] != -m || !is_integer(m)) throw DomainError("admissible bundle has fractional degree on the chain");
    model.line_degrees.push_back(m.numerator());
  }
  return model;
}

// A line bundle on the window's chain: fiber weights at each fixed point and
// degrees on each full component.
struct ChainLineData {
  std::vector<Exponent> fibers;
  std::vector<std::int64_t> degrees;
};

// Per-component Euler characters and fixed-point fibers; any sub-window's
// Euler character is assembled from these by Mayer-Vietoris.
struct ChainContributions {
  std::int64_t n_min = 0, n_max = 0;
  std::vector<LaurentCharacter> components;  // P^1_n for n in [n_min, n_max)
  std::vector<LaurentCharacter> fibers;      // pt_n for n in [n_min, n_max]

  LaurentCharacter euler_character(std::int64_t a, std::int64_t b) const {
    if (a > b || a < n_min || b > n_max) throw DomainError("sub-window outside the computed chain");
    if (a == b) return fibers[a - n_min];
    LaurentCharacter out(fibers.front().arity());
    for (std::int64_t n = a; n < b; ++n) out += components[n - n_min];
    for (std::int64_t n = a + 1; n < b; ++n) out -= fibers[n - n_min];
    return out;
  }
  LaurentCharacter euler_character() const { return euler_character(n_min, n_max); }
};

inline void require_consistent(const ChainModel& model, const ChainLineData& line) {
  const std::size_t points = model.points.size();
  if (line.fibers.size() != points || line.degrees.size() + 1 != points)
    throw DomainError("line data does not match the chain window");
  const std::size_t arity = model.direction.size();
  for (std::size_t i = 0; i < points; ++i)
    if (line.fibers[i].size() != arity) throw DomainError("line data fiber has the wrong arity");
  for (std::size_t i = 0; i + 1 < points; ++i)
    for (std::size_t j = 0; j < arity; ++j)
      if (line.fibers[i + 1][j] - line.fibers[i][j] != Rational(line.degrees[i]) * model.direction[j])
        throw DomainError("inconsistent fiber weights on component " + std::to_string(model.n_min + std::int64_t(i)));
}

// Weights of H^0 - H^1 of a degree-m bundle on P^1 with fiber weight a at
// the left fixed point.
inline LaurentCharacter progression(const Exponent& a, std::int64_t m, const Exponent& u, std::int64_t coef = 1) {
  LaurentCharacter out(a.size());
  Exponent e(a.size());
  auto put = [&](std::int64_t j, std::int64_t c) {
    for (std::size_t i = 0; i < a.size(); ++i) e[i] = a[i] + Rational(j) * u[i];
    out.add_term(e, c);
  };
  if (m >= 0)
    for (std::int64_t j = 0; j <= m; ++j) put(j, coef);
  else
    for (std::int64_t j = 1; j <= -m - 1; ++j) put(-j, -coef);
  return out;
}

inline void accumulate_cech(ChainContributions& acc, const ChainModel& model, const ChainLineData& line,
                            std::int64_t coef) {
  for (std::size_t i = 0; i + 1 < line.fibers.size(); ++i)
    acc.components[i] += progression(line.fibers[i], line.degrees[i], model.direction, coef);
  for (std::size_t i = 0; i < line.fibers.size(); ++i) acc.fibers[i].add_term(line.fibers[i], coef);
}

inline ChainContributions empty_contributions(const ChainModel& model) {
  ChainContributions acc;
  acc.n_min = model.n_min;
  acc.n_max = model.n_max;
  const std::size_t arity = model.direction.size();
  acc.components.assign(model.points.size() - 1, LaurentCharacter(arity));
  acc.fibers.assign(model.points.size(), LaurentCharacter(arity));
  return acc;
}

inline LaurentCharacter chain_euler_character_cech(const ChainModel& model, const ChainLineData& line) {
  require_consistent(model, line);
  auto acc = empty_contributions(model);
  accumulate_cech(acc, model, line, 1);
  return acc.euler_character();
}

// Fixed-point route: each component contributes
// alpha_n / (1 - t^u) + alpha_{n+1} / (1 - t^-u), expanded exactly.
inline ChainContributions localization_contributions(const ChainModel& model,
                                                     const std::vector<LaurentCharacter>& alphas) {
  if (alphas.size() != model.points.size()) throw DomainError("one fixed-point character per chain point is required");
  auto acc = empty_contributions(model);
  const Exponent& u = model.direction;
  const auto shift = LaurentCharacter::monomial(u);
  for (std::size_t i = 0; i + 1 < alphas.size(); ++i)
    acc.components[i] = divide_by_one_minus(alphas[i] - shift * alphas[i + 1], u);
  for (std::size_t i = 0; i < alphas.size(); ++i) acc.fibers[i] = alphas[i];
  return acc;
}

inline LaurentCharacter chain_euler_character_localization(const ChainModel& model,
                                                           const std::vector<LaurentCharacter>& alphas) {
  return localization_contributions(model, alphas).euler_character();
}

inline LaurentCharacter chain_euler_character_localization(const ChainModel& model, const ChainLineData& line) {
  require_consistent(model, line);
  std::vector<LaurentCharacter> alphas;
  for (const auto& f : line.fibers) alphas.push_back(LaurentCharacter::monomial(f));
  return chain_euler_character_localization(model, alphas);
}

namespace detail {

// Integer combination of chain line bundles keyed by (first fiber, degrees).
using LineCombination = std::map<std::pair<Exponent, std::vector<std::int64_t>>, std::int64_t>;

inline LineCombination combine(const LineCombination& a, const LineCombination& b) {
  LineCombination out;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) {
      Exponent fiber(ka.first.size());
      for (std::size_t i = 0; i < fiber.size(); ++i) fiber[i] = ka.first[i] + kb.first[i];
      std::vector<std::int64_t> deg(ka.second.size());
      for (std::size_t i = 0; i < deg.size(); ++i) deg[i] = ka.second[i] + kb.second[i];
      auto& slot = out[{fiber, deg}];
      slot += ca * cb;
    }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

inline LineCombination constant_line(std::size_t components, const Exponent& fiber, std::int64_t coef = 1) {
  return {{{fiber, std::vector<std::int64_t>(components, 0)}, coef}};
}

// The index class of weight lambda on the window [a, b], as
//   A_a * [t_+^-l] + B_b * [t_-^-l] + l * sum_j J_j,
// where J_j switches from t_-^-l to t_+^-l across P^1_j (degree -l there).
inline LineCombination index_lines(const ChainModel& model, std::int64_t lambda, const std::vector<int>& genera) {
  const std::size_t comps = model.points.size() - 1;
  const Exponent plus{Rational(-lambda), Rational(0)}, minus{Rational(0), Rational(-lambda)};
  const std::int64_t d = model.total_degree, a = model.n_min, b = model.n_max;
  LineCombination out;
  auto add = [&](const Exponent& fiber, std::vector<std::int64_t> deg, std::int64_t c) {
    if (c == 0) return;
    auto& slot = out[{fiber, std::move(deg)}];
    slot += c;
  };
  add(plus, std::vector<std::int64_t>(comps, 0), lambda * (d + a - 1) + 1 - genera[0]);
  add(minus, std::vector<std::int64_t>(comps, 0), 1 - lambda * b - genera[1]);
  for (std::size_t j = 0; j < comps; ++j) {
    std::vector<std::int64_t> deg(comps, 0);
    deg[j] = -lambda;
    add(minus, std::move(deg), lambda);
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

inline LineCombination admissible_lines(const ChainModel& model, const AdmissibleClassSpec& spec) {
  if (!is_integer(spec.q)) throw DomainError("the boundary chain needs an integral q: the admissible bundle has degree q on each component");
  const std::size_t comps = model.points.size() - 1;
  const auto genera = block_genera(model.base, model.partition);
  const auto blocks = marking_blocks(model.base, model.partition);
  const std::int64_t q = spec.q.numerator();
  const std::int64_t d = model.total_degree, a = model.n_min;
  // fiber at pt_a: (q(d + a - 1 + 1 - g_+), q(-a + 1 - g_-))
  Exponent fiber{Rational(q * (d + a - genera[0])), Rational(q * (1 - a - genera[1]))};
  LineCombination out{{{fiber, std::vector<std::int64_t>(comps, q)}, 1}};
  for (const auto& ev : spec.evaluations) {
    Exponent e{Rational(0), Rational(0)};
    e[blocks.at(ev.label)] = Rational(-ev.lambda);
    out = combine(out, constant_line(comps, e));
  }
  for (const auto& ix : spec.indices) {
    const auto lines = index_lines(model, ix.lambda, genera);
    for (std::int64_t p = 0; p < ix.power; ++p) out = combine(out, lines);
  }
  return out;
}

inline ChainLineData expand_line(const ChainModel& model, const Exponent& first, const std::vector<std::int64_t>& deg) {
  ChainLineData line;
  line.degrees = deg;
  line.fibers.push_back(first);
  for (std::size_t i = 0; i < deg.size(); ++i) {
    Exponent next = line.fibers.back();
    for (std::size_t j = 0; j < next.size(); ++j) next[j] += Rational(deg[i]) * model.direction[j];
    line.fibers.push_back(std::move(next));
  }
  return line;
}

}  // namespace detail

inline ChainContributions cech_contributions(const ChainModel& model, const AdmissibleClassSpec& spec) {
  auto acc = empty_contributions(model);
  for (const auto& [key, coef] : detail::admissible_lines(model, spec)) {
    const auto line = detail::expand_line(model, key.first, key.second);
    require_consistent(model, line);
    accumulate_cech(acc, model, line, coef);
  }
  return acc;
}

enum class ChainMethod { Cech, Localization };

namespace detail {

inline ChainContributions chain_contributions(const ChainModel& model, const AdmissibleClassSpec& spec,
                                              ChainMethod method) {
  if (method == ChainMethod::Cech) return cech_contributions(model, spec);
  std::vector<LaurentCharacter> alphas;
  for (const auto& p : model.points) alphas.push_back(p.character);
  return localization_contributions(model, alphas);
}

struct DegreeOutcome {
  std::int64_t value = 0;
  DegreeInterval window;
  std::int64_t predicted = 0;
  std::map<std::int64_t, std::int64_t> by_radius;  // symmetric truncation -> value
};

inline DegreeOutcome boundary_at_degree(std::int64_t d, const AdmissibleClassSpec& spec,
                                        const std::vector<std::string>& markings, const InvariantOptions& options,
                                        ChainMethod method) {
  DegreeOutcome out;
  const auto base = boundary_base(markings);
  const auto bounds = vanishing_bounds(spec, base, d).per_partition.begin()->second;
  out.predicted = std::max(std::abs(bounds.lower), std::abs(bounds.upper));
  if (options.window) {
    out.window = *options.window;
    const auto model = build_chain_model(d, spec, out.window, markings);
    out.value = weight_zero_part(chain_contributions(model, spec, method).euler_character());
    return out;
  }
  if (options.padding < 0 || options.recheck_padding < 1) throw DomainError("invalid window padding");
  out.window = {bounds.lower - options.padding, bounds.upper + options.padding};
  const auto model = build_chain_model(d, spec, out.window, markings);
  out.value = weight_zero_part(chain_contributions(model, spec, method).euler_character());

  // Re-run on a wider window that also holds every symmetric truncation up
  // to the predicted radius plus padding.
  const std::int64_t wide = options.padding + options.recheck_padding;
  const std::int64_t radius = out.predicted + options.padding;
  const DegreeInterval check{std::min(bounds.lower - wide, -radius), std::max(bounds.upper + wide, radius)};
  const auto check_model = build_chain_model(d, spec, check, markings);
  const auto contributions = chain_contributions(check_model, spec, method);
  const std::int64_t check_value = weight_zero_part(contributions.euler_character());
  if (check_value != out.value)
    throw DomainError("stabilization failure at degree " + std::to_string(d) + ": window [" +
                      std::to_string(out.window.lo) + "," + std::to_string(out.window.hi) + "] gives " +
                      std::to_string(out.value) + ", widened window gives " + std::to_string(check_value));
  for (std::int64_t t = 0; t <= radius; ++t)
    out.by_radius[t] = weight_zero_part(contributions.euler_character(-t, t));
  return out;
}

inline InvariantResult invariant_g0_n4(const AdmissibleClassSpec& spec, const InvariantOptions& options,
                                       ChainMethod method) {
  const auto markings = resolve_markings(options, 4);
  require_valid(spec, markings);
  if (!is_integer(spec.q)) throw DomainError("the boundary chain needs an integral q: the admissible bundle has degree q on each component");
  const auto degrees = degrees_to_evaluate(spec, 4, options);
  auto outcomes = parallel_map<DegreeOutcome>(degrees.size(), options.threads, [&](std::size_t i) {
    return boundary_at_degree(degrees[i], spec, markings, options, method);
  });
  InvariantResult out;
  std::map<std::int64_t, std::int64_t> by_radius;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    const auto& o = outcomes[i];
    out.windows[degrees[i]] = o.window;
    out.predicted_truncation = std::max(out.predicted_truncation, o.predicted);
    if (o.value != 0) {
      out.breakdown[degrees[i]] = o.value;
      out.contributing_degrees.insert(degrees[i]);
      out.value += o.value;
    }
  }
  if (options.window) return out;
  std::int64_t radius = 0;
  for (const auto& o : outcomes)
    if (!o.by_radius.empty()) radius = std::max(radius, o.by_radius.rbegin()->first);
  for (std::int64_t t = 0; t <= radius; ++t) {
    std::int64_t s = 0;
    for (const auto& o : outcomes) {
      auto it = o.by_radius.find(t);
      s += it != o.by_radius.end() ? it->second : o.value;
    }
    by_radius[t] = s;
  }
  out.stabilization_truncation = settled_radius(by_radius, out.value);
  return out;
}

}  // namespace detail

inline InvariantResult invariant_g0_n4_boundary(const AdmissibleClassSpec& spec, const InvariantOptions& options = {}) {
  return detail::invariant_g0_n4(spec, options, ChainMethod::Cech);
}

inline InvariantResult invariant_g0_n4_localization(const AdmissibleClassSpec& spec,
                                                    const InvariantOptions& options = {}) {
  return detail::invariant_g0_n4(spec, options, ChainMethod::Localization);
}

// ---------------------------------------------------------------------------
// Truncation tables

enum class InvariantCase { G0N3, G0N4Boundary };

struct StabilizationRow {
  std::int64_t truncation = 0;
  std::int64_t value = 0;
};

struct StabilizationReport {
  std::vector<StabilizationRow> rows;
  std::int64_t predicted_truncation = 0;
  std::int64_t observed_truncation = 0;
  std::int64_t value = 0;
};

// Rows run past the prediction by `extra`; for (0,3) the truncation bounds
// the degree scan, for the boundary chain it bounds the symmetric window.
inline StabilizationReport stabilization_report(const AdmissibleClassSpec& spec, InvariantCase which,
                                                const InvariantOptions& options = {}, std::int64_t extra = 8) {
  StabilizationReport report;
  if (which == InvariantCase::G0N3) {
    InvariantOptions o = options;
    const auto result = invariant_g0_n3(spec, o);
    report.predicted_truncation = result.predicted_truncation;
    report.value = result.value;
    const std::int64_t last = report.predicted_truncation + extra;
    o.degree_scan = DegreeInterval{-last, last};
    const auto scanned = invariant_g0_n3(spec, o);
    if (scanned.value != result.value) throw DomainError("(0,3) value changes when the degree scan widens");
    std::map<std::int64_t, std::int64_t> table;
    for (std::int64_t t = 0; t <= last; ++t) {
      std::int64_t s = 0;
      for (const auto& [d, v] : scanned.breakdown)
        if (std::abs(d) <= t) s += v;
      table[t] = s;
      report.rows.push_back({t, s});
    }
    report.observed_truncation = detail::settled_radius(table, report.value);
  } else {
    InvariantOptions o = options;
    o.window.reset();
    o.padding = std::max<std::int64_t>(o.padding, extra);
    const auto result = invariant_g0_n4_boundary(spec, o);
    report.predicted_truncation = result.predicted_truncation;
    report.value = result.value;
    report.observed_truncation = result.stabilization_truncation;
    const auto markings = detail::resolve_markings(o, 4);
    const auto degrees = detail::degrees_to_evaluate(spec, 4, o);
    const std::int64_t last = report.predicted_truncation + extra;
    std::map<std::int64_t, std::int64_t> table;
    for (std::int64_t t = 0; t <= last; ++t) table[t] = 0;
    for (std::int64_t d : degrees) {
      const DegreeInterval window{-last, last};
      const auto model = build_chain_model(d, spec, window, markings);
      const auto contributions = cech_contributions(model, spec);
      for (std::int64_t t = 0; t <= last; ++t) table[t] += weight_zero_part(contributions.euler_character(-t, t));
    }
    for (const auto& [t, v] : table) report.rows.push_back({t, v});
    if (!table.empty() && table.rbegin()->second != report.value)
      throw DomainError("boundary value differs between padded and symmetric windows");
  }
  if (report.observed_truncation > report.predicted_truncation)
    throw DomainError("observed stabilization truncation " + std::to_string(report.observed_truncation) +
                      " exceeds the predicted bound " + std::to_string(report.predicted_truncation));
  return report;
}

}  // namespace gkinv
