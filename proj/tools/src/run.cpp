#include "akit/cli/run.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <nlohmann/json.hpp>
#include <ostream>
#include <random>

namespace akit::cli {

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"validate",        "check-morphism",  "check-homotopy",
                                              "chain-homotopy",  "integrate-group", "flow",
                                              "compose",         "check-retraction", "check-transversality"};
  return names;
}

namespace {

std::string num(double v) { return fmt::format("{:.6e}", v); }

std::vector<std::string> select(const Document& doc, const std::vector<std::string>& names,
                                std::initializer_list<BlockKind> kinds, const std::string& command) {
  const auto wanted = [&](BlockKind k) { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };
  std::vector<std::string> out;
  if (names.empty()) {
    for (const auto& b : doc.blocks()) {
      if (wanted(b.kind)) out.push_back(b.name);
    }
  } else {
    for (const auto& n : names) {
      const BlockRef* b = doc.find(n);
      if (!b) throw UsageError("no block named '" + n + "'");
      if (!wanted(b->kind)) {
        throw UsageError("block '" + n + "' is a " + kind_name(b->kind) + ", which " + command + " does not take");
      }
      out.push_back(n);
    }
  }
  if (out.empty()) {
    std::string list;
    for (BlockKind k : kinds) list += std::string(list.empty() ? "" : " or ") + kind_name(k);
    throw UsageError(command + " needs a " + list + " block");
  }
  return out;
}

std::string matrix_string(const Eigen::MatrixXd& m) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i > 0) out += "; ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ' ';
      out += fmt::format("{:.12g}", m(i, j) == 0.0 ? 0.0 : m(i, j));
    }
  }
  return out + "]";
}

std::vector<AlgebroidForm> default_forms(const LieAlgebroid& N) {
  std::vector<AlgebroidForm> out;
  for (int j = 0; j < N.base_dim(); ++j) out.push_back(N.function(N.coordinate(j)));
  for (int b = 0; b < N.rank(); ++b) out.push_back(N.covector(b));
  for (int a = 0; a < N.rank(); ++a) {
    for (int b = a + 1; b < N.rank(); ++b) out.push_back(wedge(N.covector(a), N.covector(b)));
  }
  return out;
}

std::string section_string(const SupportedSection& s) {
  std::string out = "(";
  for (int b = 0; b < s.size(); ++b) out += (b ? ", " : "") + s[b].to_string();
  return out + ")";
}

std::vector<std::string> describe(const NaturalHomotopy& H) {
  std::vector<std::string> out;
  for (const auto& p : H.pieces()) {
    std::string head = "piece [" + to_string(p.start) + ", " + to_string(p.end) + "]";
    std::string base;
    for (const auto& f : p.family.base_map()) base += (base.empty() ? "" : ", ") + f.to_string();
    std::string fiber;
    for (const auto& row : p.family.fiber()) {
      std::string r;
      for (const auto& f : row) r += (r.empty() ? "" : ", ") + f.to_string();
      fiber += (fiber.empty() ? "" : "; ") + r;
    }
    out.push_back(head + " phi = (" + base + ")");
    out.push_back(head + " Phi = [" + fiber + "]");
    out.push_back(head + " theta = " + section_string(p.section));
  }
  return out;
}

CheckReport integrate_report(const Document& doc, const std::string& name, const Flags& flags) {
  const PathDefinition& path = doc.path(name);
  const MatrixLieAlgebra& g = doc.liealg(path.algebra);
  CheckReport report;
  report.name = "integrate_group(" + name + ")";
  const GroupElement h = integrate_path(g, path.theta, flags.steps);
  report.notes.push_back(fmt::format("rk4 with {} steps on [0, 1]", flags.steps));
  report.notes.push_back("h = " + matrix_string(h.matrix));
  report.metrics.push_back({"det h", h.determinant});
  report.metrics.push_back({"exp(int tr theta)", h.expected_determinant});
  ++report.identities_checked;
  if (!h.determinant_ok()) {
    report.fail_with("det h - exp(int tr theta)", num(h.determinant - h.expected_determinant));
  }
  const bool constant =
      std::none_of(path.theta.begin(), path.theta.end(), [](const Polynomial& p) { return p.depends_on(kTimeVariable); });
  if (constant) {
    std::vector<double> x;
    for (const auto& p : path.theta) x.push_back(to_double(p.constant_term()));
    const double err = (h.matrix - matrix_exponential(g.element(x))).cwiseAbs().maxCoeff();
    report.metrics.push_back({"max|h - exp(X)|", err});
    ++report.identities_checked;
    if (!(err <= flags.tol)) report.fail_with("max|h - exp(X)|", num(err));
  } else {
    report.notes.push_back("theta depends on t; no closed form to compare against");
  }
  if (path.phi1) report.absorb(verify_ad(g, path.phi0, *path.phi1, h, flags.tol), "");
  return report;
}

CheckReport flow_report(const Document& doc, const std::string& name, const Flags& flags) {
  const PathDefinition& path = doc.path(name);
  const MatrixLieAlgebra& g = doc.liealg(path.algebra);
  CheckReport report;
  report.name = "flow(" + name + ")";
  const SampledFlow flow = flow_homotopy(g, path.phi0, path.theta, flags.steps);
  const double fd = flow_fd_residual(g, flow, 1);
  report.metrics.push_back({"max|dPhi/dt - ad_theta Phi| (central differences)", fd});
  ++report.identities_checked;
  if (!(fd <= flags.tol)) report.fail_with("dPhi/dt - ad_theta Phi", num(fd));
  report.notes.push_back("Phi_1 = " + matrix_string(flow.phi.back()));
  report.absorb(verify_ad(g, path.phi0, flow.phi.back(), integrate_path(g, path.theta, flags.steps), flags.tol),
                "endpoint: ");
  return report;
}

std::vector<std::vector<Rational>> generated_samples(int dim, int count) {
  // Raw mt19937 output is fixed by the standard, so the points are portable.
  std::mt19937 gen(20240611u);
  std::vector<std::vector<Rational>> out;
  for (int s = 0; s < count; ++s) {
    std::vector<Rational> p;
    for (int i = 0; i < dim; ++i) p.emplace_back(static_cast<long>(gen() % 7) - 3, static_cast<unsigned long>(gen() % 3 + 1));
    for (auto& v : p) v.canonicalize();
    out.push_back(std::move(p));
  }
  return out;
}

CheckReport transversality_report(const Document& doc, const std::string& name, const Flags& flags) {
  const RetractionDefinition& def = doc.retraction(name);
  const NaturalHomotopy& H = doc.homotopy(def.homotopy);
  const SubalgebroidPresentation& sub = doc.subalgebroid(name);
  const std::optional<BundleMap> check = factor_through(H.end_map(), sub);
  if (!check) {
    CheckReport report;
    report.name = "check_transversality(" + name + ")";
    report.fail_with("factor Phi1 through A_R", "Phi1 does not factor through A_R");
    return report;
  }
  auto samples = def.samples;
  for (auto& p : generated_samples(H.source()->base_dim(), flags.samples)) samples.push_back(std::move(p));
  CheckReport report = check_transversality(check->base_map(), *sub.restricted(), H.source()->coordinates(), samples);
  report.name = "check_transversality(" + name + ")";
  return report;
}

}  // namespace

std::vector<CheckReport> run_command(const std::string& command, const Document& doc,
                                     const std::vector<std::string>& names, const Flags& flags) {
  if (flags.steps <= 0) throw UsageError("--steps must be positive");
  if (!(flags.tol > 0)) throw UsageError("--tol must be positive");
  if (flags.samples < 0) throw UsageError("--samples must be non-negative");
  std::vector<CheckReport> reports;
  if (command == "validate") {
    for (const auto& n : select(doc, names, {BlockKind::algebroid, BlockKind::liealg}, command)) {
      const AlgebroidPtr A = doc.algebroid(n);
      CheckReport dga = validate_dga(*A);
      dga.name = "validate_dga(" + n + ")";
      CheckReport oracle = bracket_axioms_oracle(*A);
      oracle.name = "bracket_axioms(" + n + ")";
      reports.push_back(std::move(dga));
      reports.push_back(std::move(oracle));
    }
  } else if (command == "check-morphism") {
    for (const auto& n : select(doc, names, {BlockKind::map}, command)) {
      CheckReport r = is_morphism(doc.map(n));
      r.name = "is_morphism(" + n + ")";
      reports.push_back(std::move(r));
    }
  } else if (command == "check-homotopy") {
    for (const auto& n : select(doc, names, {BlockKind::homotopy}, command)) {
      CheckReport r = check_homotopy(doc.homotopy(n));
      r.name = "check_homotopy(" + n + ")";
      reports.push_back(std::move(r));
    }
  } else if (command == "chain-homotopy") {
    for (const auto& n : select(doc, names, {BlockKind::homotopy}, command)) {
      const NaturalHomotopy& H = doc.homotopy(n);
      std::vector<AlgebroidForm> forms;
      for (const auto& text : flags.forms) forms.push_back(parse_form(text, *H.target()));
      if (flags.forms.empty()) forms = default_forms(*H.target());
      for (const auto& w : forms) {
        CheckReport r = verify_chain_homotopy(H, w);
        r.name = "chain_homotopy(" + n + ", " + w.to_string() + ")";
        if (r.passed()) r.notes.push_back("Theta(w) = " + chain_homotopy_operator(H, w).to_string());
        reports.push_back(std::move(r));
      }
    }
  } else if (command == "integrate-group") {
    for (const auto& n : select(doc, names, {BlockKind::path}, command)) reports.push_back(integrate_report(doc, n, flags));
  } else if (command == "flow") {
    for (const auto& n : select(doc, names, {BlockKind::path}, command)) reports.push_back(flow_report(doc, n, flags));
  } else if (command == "compose") {
    if (flags.horizontal == flags.vertical) throw UsageError("compose needs exactly one of --horizontal, --vertical");
    const auto chosen = select(doc, names, {BlockKind::homotopy}, command);
    if (chosen.size() != 2) throw UsageError("compose takes exactly two homotopies");
    const NaturalHomotopy& first = doc.homotopy(chosen[0]);
    const NaturalHomotopy& second = doc.homotopy(chosen[1]);
    const NaturalHomotopy composite =
        flags.horizontal ? compose_horizontal(first, second) : compose_vertical(first, second);
    CheckReport r = check_homotopy(composite);
    r.name = std::string(flags.horizontal ? "horizontal" : "vertical") + "(" + chosen[0] + ", " + chosen[1] + ")";
    for (auto& line : describe(composite)) r.notes.push_back(std::move(line));
    reports.push_back(std::move(r));
  } else if (command == "check-retraction") {
    for (const auto& n : select(doc, names, {BlockKind::retraction}, command)) {
      CheckReport r = check_retraction(doc.homotopy(doc.retraction(n).homotopy), doc.subalgebroid(n));
      r.name = "check_retraction(" + n + ")";
      reports.push_back(std::move(r));
    }
  } else if (command == "check-transversality") {
    for (const auto& n : select(doc, names, {BlockKind::retraction}, command)) {
      reports.push_back(transversality_report(doc, n, flags));
    }
  } else {
    throw UsageError("unknown command '" + command + "'");
  }
  return reports;
}

int exit_status(const std::vector<CheckReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.passed(); }) ? 0 : 1;
}

std::string render_text(const std::string& command, const std::vector<CheckReport>& reports) {
  std::string out = "algebroid-kit " + command + "\n";
  int passed = 0;
  for (const auto& r : reports) {
    passed += r.passed() ? 1 : 0;
    out += fmt::format("{} {} ({} identities)\n", status_name(r.status), r.name, r.identities_checked);
    for (const auto& res : r.residuals) out += "  residual " + res.label + " = " + res.value + "\n";
    for (const auto& m : r.metrics) out += "  metric " + m.name + " = " + num(m.value) + "\n";
    for (const auto& n : r.notes) out += "  note " + n + "\n";
  }
  out += fmt::format("{} of {} checks passed\n", passed, reports.size());
  return out;
}

std::string render_json(const std::string& command, const std::vector<CheckReport>& reports) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json c;
    c["name"] = r.name;
    c["status"] = status_name(r.status);
    c["identities_checked"] = r.identities_checked;
    c["residuals"] = nlohmann::ordered_json::array();
    for (const auto& res : r.residuals) c["residuals"].push_back({{"label", res.label}, {"value", res.value}});
    c["metrics"] = nlohmann::ordered_json::array();
    for (const auto& m : r.metrics) c["metrics"].push_back({{"name", m.name}, {"value", m.value}});
    c["notes"] = r.notes;
    j["checks"].push_back(std::move(c));
  }
  j["exit_status"] = exit_status(reports);
  return j.dump(2) + "\n";
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact checks for Lie algebroids, their morphisms and natural homotopies", "algebroid-kit"};
  std::string command;
  std::string file;
  std::vector<std::string> names;
  Flags flags;
  app.add_option("command", command, "validate | check-morphism | check-homotopy | chain-homotopy | integrate-group | "
                                     "flow | compose | check-retraction | check-transversality")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("file", file, "definition file")->required();
  app.add_option("blocks", names, "block names (default: every block the command applies to)");
  app.add_option("--steps", flags.steps, "RK4 steps for integrate-group and flow")->capture_default_str();
  app.add_option("--tol", flags.tol, "tolerance for numeric checks")->capture_default_str();
  app.add_option("--samples", flags.samples, "extra seeded sample points for check-transversality")
      ->capture_default_str();
  app.add_option("--form", flags.forms, "form for chain-homotopy, e.g. \"x1*e^1\" (repeatable)");
  app.add_flag("--json", flags.json, "machine-readable report");
  app.add_flag("--horizontal", flags.horizontal, "compose: horizontal composite");
  app.add_flag("--vertical", flags.vertical, "compose: vertical composite");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    const Document doc = parse_document(file);
    const auto reports = run_command(command, doc, names, flags);
    out << (flags.json ? render_json(command, reports) : render_text(command, reports));
    return exit_status(reports);
  } catch (const DocumentError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << command << ": " << e.what() << "\n";
  }
  return 2;
}

}  // namespace akit::cli
