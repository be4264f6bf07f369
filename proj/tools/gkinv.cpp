// Command-line front end. Machine output goes to stdout, diagnostics to
// stderr. Exit codes: 0 success, 1 domain or input error, 2 usage error.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gkinv/atlas.hpp"
#include "gkinv/character.hpp"
#include "gkinv/degeneration.hpp"
#include "gkinv/invariants.hpp"
#include "gkinv/io.hpp"

namespace {

using gkinv::io::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

gkinv::DegreeInterval parse_pair(const std::string& text, const std::string& what) {
  auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError(what + " expects 'a,b', got '" + text + "'");
  try {
    std::size_t used_a = 0, used_b = 0;
    const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
    gkinv::DegreeInterval out{std::stoll(a, &used_a), std::stoll(b, &used_b)};
    if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument(text);
    return out;
  } catch (const std::logic_error&) {
    throw UsageError(what + " expects two integers 'a,b', got '" + text + "'");
  }
}

// A degeneracy type from a file; a bare graph gets degree 0 everywhere.
gkinv::DegeneracyType read_stratum(const std::string& path) {
  const json j = gkinv::io::read_json_file(path);
  if (j.is_object() && j.contains("multidegree")) return gkinv::io::degeneracy_from_json(j);
  gkinv::DegeneracyType dt;
  dt.graph = gkinv::io::graph_from_json(j);
  for (auto v : dt.graph.vertices()) dt.multidegree[v] = 0;
  return dt;
}

gkinv::ModularGraph read_base(const std::string& path) {
  const json j = gkinv::io::read_json_file(path);
  if (j.is_object() && j.contains("multidegree")) return gkinv::io::degeneracy_from_json(j).graph;
  return gkinv::io::graph_from_json(j);
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string multidegree_text(const gkinv::DegeneracyType& dt) {
  std::string s;
  for (const auto& [v, d] : dt.multidegree) s += (s.empty() ? "" : ",") + std::to_string(d);
  return "(" + s + ")";
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_validate(const std::string& path) {
  const json j = gkinv::io::read_json_file(path);
  json out;
  gkinv::ValidationReport report;
  if (j.is_object() && j.contains("multidegree")) {
    const auto dt = gkinv::io::parse_degeneracy(j);
    report = gkinv::validate(dt);
    out["valid"] = report.ok();
    if (report.ok()) {
      const auto verdict = gkinv::classify_gieseker(dt);
      out["gieseker"] = verdict.valid;
      out["bubbles"] = verdict.bubbles;
      if (!verdict.valid) out["gieseker_reasons"] = verdict.reasons;
      out["digest"] = gkinv::canonical_stratum(dt).digest;
    }
  } else {
    const auto g = gkinv::io::parse_graph(j);
    report = gkinv::validate(g);
    out["valid"] = report.ok();
    if (report.ok()) {
      out["stable"] = gkinv::is_stable(g);
      out["total_genus"] = gkinv::total_genus(g);
      out["digest"] = gkinv::canonical_form(g).digest;
    }
  }
  if (!report.ok()) out["violations"] = report.violations;
  emit(out);
  if (!report.ok()) {
    std::cerr << "invalid: " << report.violations.front() << "\n";
    return 1;
  }
  return 0;
}

int cmd_strata(const std::string& base, const std::string& band_text, bool dot) {
  const auto dt = read_stratum(base);
  const auto iv = parse_pair(band_text, "--band");
  gkinv::DegreeBand band{iv, {}};
  const auto poset = gkinv::closure_strata(dt, band);
  if (dot) {
    std::cout << "digraph strata {\n";
    for (const auto& [digest, s] : poset.strata)
      std::cout << "  \"" << dot_escape(digest) << "\" [label=\"" << s.graph.vertex_count() << "v "
                << s.graph.edge_count() << "e " << multidegree_text(s) << "\"];\n";
    for (const auto& r : poset.relations)
      std::cout << "  \"" << dot_escape(r.from) << "\" -> \"" << dot_escape(r.to) << "\" [label=\"" << r.operation
                << "\"];\n";
    std::cout << "}\n";
    return 0;
  }
  json out;
  out["root"] = poset.root;
  out["strata"] = json::array();
  for (const auto& [digest, s] : poset.strata) out["strata"].push_back({{"digest", digest}, {"stratum", gkinv::io::to_json(s)}});
  out["relations"] = json::array();
  for (const auto& r : poset.relations)
    out["relations"].push_back({{"from", r.from}, {"to", r.to}, {"operation", r.operation}});
  emit(out);
  return 0;
}

gkinv::DeformationOfBase require_deformation(const gkinv::DegeneracyType& dt, const gkinv::ModularGraph& base) {
  auto def = gkinv::deformation_of(dt, base);
  if (!def) throw gkinv::DomainError("stratum is not a Gieseker deformation of the base");
  return *def;
}

json deformation_json(const gkinv::DeformationOfBase& def) {
  return {{"kept_edges", def.kept_edges},
          {"blocks", def.blocks},
          {"block_degree", def.block_degree},
          {"bubbled_edges", def.bubbled_edges}};
}

int cmd_stabilizer(const std::string& base_path, const std::string& stratum_path) {
  const auto base = read_base(base_path);
  const auto def = require_deformation(read_stratum(stratum_path), base);
  json out;
  out["partition"] = gkinv::io::to_json(gkinv::stabilizer_partition(def));
  out["deformation"] = deformation_json(def);
  out["fixed_labels"] = json::array();
  for (const auto& r : gkinv::nt2b(base))
    if (auto label = gkinv::fixed_label(def, r)) out["fixed_labels"].push_back(gkinv::io::to_json(*label));
  emit(out);
  return 0;
}

int cmd_band(const std::string& base_path, const std::string& stratum_path, std::int64_t nu, std::int64_t nl) {
  const auto base = read_base(base_path);
  const auto def = require_deformation(read_stratum(stratum_path), base);
  const auto bounds = gkinv::MultidegreeBounds::uniform(base, nu, nl);
  json out;
  out["in_band"] = gkinv::in_band(def, bounds);
  out["tails"] = json::array();
  for (const auto& r : gkinv::nt2b(base))
    out["tails"].push_back({{"partition", gkinv::io::to_json(r)},
                            {"compatible", gkinv::compatible(def, r)},
                            {"membership", gkinv::to_string(gkinv::tail_membership(def, r, nu, nl))}});
  emit(out);
  return 0;
}

int cmd_twist(const std::string& base_path, const std::string& multidegree_path, std::optional<std::int64_t> minimal) {
  const auto base = read_base(base_path);
  json out = gkinv::io::to_json(gkinv::intersection_data(base));
  if (!multidegree_path.empty()) {
    if (!minimal) throw UsageError("--multidegree needs --minimal N");
    const json j = gkinv::io::read_json_file(multidegree_path);
    const auto degrees = j.is_object() && j.contains("multidegree")
                             ? gkinv::io::degeneracy_from_json(j).multidegree
                             : gkinv::io::multidegree_from_json(j);
    const auto reps =
        gkinv::band_representatives(degrees, base, gkinv::MultidegreeBounds::minimal(base, *minimal));
    out["representatives"] = json::array();
    for (const auto& r : reps) out["representatives"].push_back(gkinv::io::to_json(r));
  } else if (minimal) {
    throw UsageError("--minimal needs --multidegree");
  }
  emit(out);
  return 0;
}

gkinv::io::SpecFile read_spec(const std::string& path) { return gkinv::io::spec_from_json(gkinv::io::read_json_file(path)); }

int cmd_weights(const std::string& base_path, const std::string& stratum_path, const std::string& spec_path) {
  const auto base = read_base(base_path);
  const auto def = require_deformation(read_stratum(stratum_path), base);
  const auto spec = read_spec(spec_path);
  json out = json::array();
  for (const auto& r : gkinv::nt2b(base)) {
    auto label = gkinv::fixed_label(def, r);
    if (!label) continue;
    const auto genera = gkinv::block_genera(base, r);
    const auto character = gkinv::class_weight(spec.spec, *label, genera, gkinv::marking_blocks(base, r));
    out.push_back({{"label", gkinv::io::to_json(*label)},
                   {"genera", genera},
                   {"character", gkinv::io::to_json(character)},
                   {"weight_zero", gkinv::weight_zero_part(character)}});
  }
  emit(out);
  return 0;
}

gkinv::InvariantOptions options_for(const gkinv::io::SpecFile& spec) {
  gkinv::InvariantOptions o;
  o.markings = spec.markings;
  o.threads = gkinv::threads_from_environment();
  if (spec.total_degree) o.degree_scan = gkinv::DegreeInterval{*spec.total_degree, *spec.total_degree};
  return o;
}

int cmd_invariant(const std::string& which, const std::string& spec_path, const std::string& window,
                  const std::string& method) {
  const auto spec = read_spec(spec_path);
  auto o = options_for(spec);
  gkinv::InvariantResult r;
  if (which == "g0n3") {
    if (!window.empty()) throw UsageError("--window applies to g0n4-boundary only");
    r = gkinv::invariant_g0_n3(spec.spec, o);
  } else {
    if (!window.empty()) o.window = parse_pair(window, "--window");
    r = method == "localization" ? gkinv::invariant_g0_n4_localization(spec.spec, o)
                                 : gkinv::invariant_g0_n4_boundary(spec.spec, o);
  }
  emit(gkinv::io::to_json(r));
  return 0;
}

int cmd_stabilize(const std::string& which, const std::string& spec_path) {
  const auto spec = read_spec(spec_path);
  const auto report = gkinv::stabilization_report(
      spec.spec, which == "g0n3" ? gkinv::InvariantCase::G0N3 : gkinv::InvariantCase::G0N4Boundary, options_for(spec));
  std::cout << "truncation,value,predicted_truncation,observed_truncation\n";
  for (const auto& row : report.rows)
    std::cout << row.truncation << ',' << row.value << ',' << report.predicted_truncation << ','
              << report.observed_truncation << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gieseker bundle strata, fixed-point weights and twisted invariants of [pt/C*]"};
  app.require_subcommand(1);

  std::string graph_path;
  auto* validate = app.add_subcommand("validate", "Check a graph or degeneracy type");
  validate->add_option("file", graph_path, "graph or degeneracy JSON")->required();

  std::string base, band_text, stratum, spec_path, window, multidegree, which = "g0n3", method = "cech";
  bool dot = false;
  std::int64_t nu = 1, nl = 0;
  std::optional<std::int64_t> minimal;

  auto* strata = app.add_subcommand("strata", "Closure strata of a degeneracy type within a degree band");
  strata->add_option("--base", base, "degeneracy JSON (a bare graph gets degree 0)")->required();
  strata->add_option("--band", band_text, "vertex degree interval lo,hi")->required();
  strata->add_flag("--dot", dot, "emit Graphviz DOT instead of JSON");

  auto* stabilizer = app.add_subcommand("stabilizer", "Stabilizer partition of a stratum over a base");
  stabilizer->add_option("--base", base)->required();
  stabilizer->add_option("--stratum", stratum)->required();

  auto* band = app.add_subcommand("band", "Band and tail membership under uniform bounds");
  band->add_option("--base", base)->required();
  band->add_option("--stratum", stratum)->required();
  band->add_option("--nu", nu, "N_u for every partition")->required();
  band->add_option("--nl", nl, "N_l for every partition")->required();

  auto* twist = app.add_subcommand("twist-lattice", "Intersection matrix and band representatives");
  twist->add_option("--base", base)->required();
  twist->add_option("--multidegree", multidegree, "multidegree JSON {vertex: degree}");
  twist->add_option("--minimal", minimal, "minimal band index N");

  auto* weights = app.add_subcommand("weights", "Fixed-point characters of an admissible class");
  weights->add_option("--base", base)->required();
  weights->add_option("--stratum", stratum)->required();
  weights->add_option("--spec", spec_path)->required();

  auto* invariant = app.add_subcommand("invariant", "Compute an invariant");
  invariant->add_option("--case", which)->required()->check(CLI::IsMember({"g0n3", "g0n4-boundary"}));
  invariant->add_option("--spec", spec_path)->required();
  invariant->add_option("--window", window, "fixed chain window a,b (g0n4-boundary)");
  invariant->add_option("--method", method, "cech or localization (g0n4-boundary)")
      ->check(CLI::IsMember({"cech", "localization"}));

  auto* stabilize = app.add_subcommand("stabilize", "Truncation table as CSV");
  stabilize->add_option("--case", which)->required()->check(CLI::IsMember({"g0n3", "g0n4-boundary"}));
  stabilize->add_option("--spec", spec_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*validate) return cmd_validate(graph_path);
    if (*strata) return cmd_strata(base, band_text, dot);
    if (*stabilizer) return cmd_stabilizer(base, stratum);
    if (*band) return cmd_band(base, stratum, nu, nl);
    if (*twist) return cmd_twist(base, multidegree, minimal);
    if (*weights) return cmd_weights(base, stratum, spec_path);
    if (*invariant) return cmd_invariant(which, spec_path, window, method);
    if (*stabilize) return cmd_stabilize(which, spec_path);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const gkinv::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
