#include "nekwave/cli_io.hpp"

#include "nekwave/continuation.hpp"
#include "nekwave/errors.hpp"
#include "nekwave/linear_analysis.hpp"
#include "nekwave/operators.hpp"
#include "nekwave/series.hpp"
#include "nekwave/verification.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <string>
#include <type_traits>

#ifndef NEKWAVE_VERSION
#define NEKWAVE_VERSION "0.0.0"
#endif

namespace nekwave {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    if (!v.is_number_integer() || (std::is_unsigned_v<T> && !v.is_number_unsigned()))
      throw ConfigError("invalid value for '" + key + "' in " + where);
  }
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("invalid value for '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const std::string& key, T& out, const std::string& where) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

WaveProblem make_problem(const RunConfig& c) {
  const Kernel kernel = c.finite_depth ? Kernel::finite_depth(c.depth, c.wavelength, c.modes) : Kernel::log_difference();
  WaveProblem p;
  if (c.problem == "nekrasov")
    p = WaveProblem::nekrasov(c.modes, 3.0, kernel);
  else if (c.problem == "krasovskii")
    p = WaveProblem::krasovskii(c.modes, 1.0);
  else
    p = WaveProblem::hammerstein(c.modes, c.polynomial, 1.0, kernel);
  p.denominator_guard = c.denominator_guard;
  return p;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ResultDocument new_document(const std::string& command, const RunConfig& c) {
  ResultDocument d;
  d.schema = "nekwave." + command;
  d.version = artifact_version();
  d.command = command;
  d.timestamp = utc_timestamp();
  d.config = to_json(c);
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

RunConfig parse_config(const json& j, RunConfig c) {
  reject_unknown(j,
                 {"problem", "polynomial", "depth", "modes", "mode", "order", "spectrum_count", "continuation",
                  "tolerances", "series", "branching", "output", "verify"},
                 "config");
  read(j, "problem", c.problem, "config");
  read(j, "polynomial", c.polynomial, "config");
  read(j, "modes", c.modes, "config");
  read(j, "mode", c.mode, "config");
  read(j, "order", c.order, "config");
  read(j, "spectrum_count", c.spectrum_count, "config");
  if (j.contains("depth")) {
    const json& d = j["depth"];
    reject_unknown(d, {"mode", "h", "L"}, "depth");
    std::string mode = c.finite_depth ? "finite" : "infinite";
    read(d, "mode", mode, "depth");
    if (mode != "finite" && mode != "infinite") throw ConfigError("depth mode must be 'finite' or 'infinite'");
    c.finite_depth = mode == "finite";
    read(d, "h", c.depth, "depth");
    read(d, "L", c.wavelength, "depth");
  }
  if (j.contains("continuation")) {
    const json& s = j["continuation"];
    reject_unknown(s, {"ds", "max_steps"}, "continuation");
    read(s, "ds", c.ds, "continuation");
    read(s, "max_steps", c.max_steps, "continuation");
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    reject_unknown(t, {"newton", "cluster", "singular", "orthogonal", "denominator"}, "tolerances");
    read(t, "newton", c.newton_tol, "tolerances");
    read(t, "cluster", c.cluster_tol, "tolerances");
    read(t, "singular", c.singular_tol, "tolerances");
    read(t, "orthogonal", c.orthogonal_tol, "tolerances");
    read(t, "denominator", c.denominator_guard, "tolerances");
  }
  if (j.contains("series")) {
    const json& s = j["series"];
    reject_unknown(s, {"sweep_lambdas"}, "series");
    read(s, "sweep_lambdas", c.sweep_lambdas, "series");
  }
  if (j.contains("branching")) {
    const json& b = j["branching"];
    reject_unknown(b, {"radius", "lambdas"}, "branching");
    read(b, "radius", c.branching_radius, "branching");
    read(b, "lambdas", c.branching_lambdas, "branching");
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    reject_unknown(o, {"dir", "formats"}, "output");
    read(o, "dir", c.out_dir, "output");
    if (o.contains("formats")) {
      const auto formats = get<std::vector<std::string>>(o, "formats", "output");
      c.write_csv = c.write_json = false;
      for (const auto& f : formats) {
        if (f == "csv")
          c.write_csv = true;
        else if (f == "json")
          c.write_json = true;
        else
          throw ConfigError("unknown output format '" + f + "'");
      }
    }
  }
  if (j.contains("verify")) {
    const json& v = j["verify"];
    reject_unknown(v, {"kernel_perturbation"}, "verify");
    read(v, "kernel_perturbation", c.kernel_perturbation, "verify");
  }
  return c;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
  return parse_config(j, std::move(base));
}

void validate(const RunConfig& c) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive");
  };
  if (c.problem != "nekrasov" && c.problem != "krasovskii" && c.problem != "hammerstein")
    throw ConfigError("problem must be nekrasov, krasovskii or hammerstein");
  if (c.modes < 4) throw ConfigError("modes must be at least 4");
  if (c.mode < 1 || static_cast<std::size_t>(c.mode) > c.modes) throw ConfigError("mode must lie in 1..modes");
  if (c.order < 1) throw ConfigError("order must be positive");
  if (static_cast<std::size_t>(c.order) > c.modes / 4) throw ConfigError("order must not exceed modes/4");
  if (c.spectrum_count < 1 || c.spectrum_count > c.modes) throw ConfigError("spectrum_count must lie in 1..modes");
  positive(c.depth, "depth h");
  positive(c.wavelength, "wavelength L");
  positive(c.ds, "continuation ds");
  if (c.max_steps < 1) throw ConfigError("max_steps must be positive");
  positive(c.newton_tol, "newton tolerance");
  positive(c.cluster_tol, "cluster tolerance");
  positive(c.singular_tol, "singular tolerance");
  positive(c.orthogonal_tol, "orthogonal tolerance");
  positive(c.denominator_guard, "denominator guard");
  positive(c.branching_radius, "branching radius");
  if (c.problem == "krasovskii" && c.finite_depth) throw ConfigError("finite depth does not apply to krasovskii");
  if (c.problem == "hammerstein") {
    if (c.polynomial.size() < 2) throw ConfigError("hammerstein polynomial needs a linear coefficient");
    for (double v : c.polynomial)
      if (!std::isfinite(v)) throw ConfigError("hammerstein polynomial must be finite");
  }
  if (c.sweep_lambdas.size() < 2) throw ConfigError("series sweep needs at least two lambdas");
  for (double l : c.sweep_lambdas)
    if (!(l != 0.0) || !(std::abs(l) <= 0.5)) throw ConfigError("sweep lambdas must be nonzero with |lambda| <= 0.5");
  for (double l : c.branching_lambdas)
    if (!(std::abs(l) <= c.branching_radius)) throw ConfigError("branching lambdas must lie within the radius");
  if (!c.write_csv && !c.write_json) throw ConfigError("at least one output format required");
  if (!std::isfinite(c.kernel_perturbation)) throw ConfigError("kernel perturbation must be finite");
  if (c.out_dir.empty()) throw ConfigError("output directory must be non-empty");
}

json to_json(const RunConfig& c) {
  std::vector<std::string> formats;
  if (c.write_csv) formats.push_back("csv");
  if (c.write_json) formats.push_back("json");
  return json{
      {"problem", c.problem},
      {"polynomial", c.polynomial},
      {"depth", {{"mode", c.finite_depth ? "finite" : "infinite"}, {"h", c.depth}, {"L", c.wavelength}}},
      {"modes", c.modes},
      {"mode", c.mode},
      {"order", c.order},
      {"spectrum_count", c.spectrum_count},
      {"continuation", {{"ds", c.ds}, {"max_steps", c.max_steps}}},
      {"tolerances",
       {{"newton", c.newton_tol},
        {"cluster", c.cluster_tol},
        {"singular", c.singular_tol},
        {"orthogonal", c.orthogonal_tol},
        {"denominator", c.denominator_guard}}},
      {"series", {{"sweep_lambdas", c.sweep_lambdas}}},
      {"branching", {{"radius", c.branching_radius}, {"lambdas", c.branching_lambdas}}},
      {"output", {{"dir", c.out_dir}, {"formats", formats}}},
      {"verify", {{"kernel_perturbation", c.kernel_perturbation}}},
  };
}

// ---------------------------------------------------------------------------
// CSV and documents

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_number(long long v) { return std::to_string(v); }

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) throw PreconditionViolated("CSV row width differs from header");
  rows.push_back(std::move(row));
}

std::string CsvTable::render() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::string ResultDocument::payload_digest() const {
  const std::string text = payload.dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw PreconditionViolated("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

json ResultDocument::to_json() const {
  return json{{"schema", schema},   {"schema_version", schema_version}, {"version", version},
              {"command", command}, {"timestamp", timestamp},           {"ok", ok},
              {"config", config},   {"payload", payload},               {"payload_sha256", payload_digest()}};
}

ResultDocument ResultDocument::from_json(const json& j) {
  ResultDocument d;
  try {
    d.schema = j.at("schema").get<std::string>();
    d.schema_version = j.at("schema_version").get<int>();
    d.version = j.at("version").get<std::string>();
    d.command = j.at("command").get<std::string>();
    d.timestamp = j.at("timestamp").get<std::string>();
    d.ok = j.at("ok").get<bool>();
    d.config = j.at("config");
    d.payload = j.at("payload");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed result document: ") + e.what());
  }
  if (j.contains("payload_sha256") && j["payload_sha256"] != d.payload_digest())
    throw ConfigError("result document payload digest mismatch");
  return d;
}

std::string artifact_version() { return NEKWAVE_VERSION; }

// ---------------------------------------------------------------------------
// Commands

ResultDocument cmd_spectrum(const RunConfig& c) {
  validate(c);
  ResultDocument d = new_document("spectrum", c);
  const WaveProblem p = make_problem(c);
  LinearTolerances tol;
  tol.cluster = c.cluster_tol;
  tol.singular = c.singular_tol;
  tol.orthogonal = c.orthogonal_tol;
  const auto cvs = char_values(linearize(p).B, c.spectrum_count, tol);
  CsvTable t{"spectrum", {"n", "mu", "multiplicity", "guaranteed"}, {}};
  json rows = json::array();
  for (std::size_t i = 0; i < cvs.size(); ++i) {
    const auto& cv = cvs[i];
    t.add_row({csv_number(static_cast<long long>(i + 1)), csv_number(cv.mu),
               csv_number(static_cast<long long>(cv.multiplicity)), cv.guaranteed ? "1" : "0"});
    rows.push_back({{"n", i + 1}, {"mu", cv.mu}, {"multiplicity", cv.multiplicity}, {"guaranteed", cv.guaranteed}});
  }
  d.payload = {{"kernel", p.kernel.name()}, {"nonlinearity", to_string(p.nonlinearity)}, {"characteristic_values", rows}};
  d.tables.push_back(std::move(t));
  return d;
}

ResultDocument cmd_series(const RunConfig& c) {
  validate(c);
  ResultDocument d = new_document("series", c);
  const WaveProblem p = make_problem(c);
  const SeriesBranch br = nekrasov_nazarov_series(p, c.mode, c.order);
  std::vector<double> lambdas;
  // A pitchfork has its branch on one side of μ* only.
  for (double l : c.sweep_lambdas) lambdas.push_back(br.exponent == 1 ? l : br.sigma * std::abs(l));
  const ResidualSweep sw = residual_sweep(p, br, lambdas);

  CsvTable terms{"series_terms", {"k", "n", "coefficient"}, {}};
  json term_json = json::array();
  for (std::size_t k = 0; k < br.terms.size(); ++k) {
    const Eigen::VectorXd& a = br.terms[k].coeffs();
    term_json.push_back(std::vector<double>(a.data(), a.data() + a.size()));
    for (Eigen::Index i = 0; i < a.size(); ++i)
      terms.add_row({csv_number(static_cast<long long>(k + 1)), csv_number(static_cast<long long>(i + 1)),
                     csv_number(a[i])});
  }
  CsvTable consts{"series_constants", {"k", "constant"}, {}};
  for (std::size_t k = 0; k < br.constants.size(); ++k)
    consts.add_row({csv_number(static_cast<long long>(k + 1)), csv_number(br.constants[k])});
  CsvTable sweep{"series_sweep", {"lambda", "residual"}, {}};
  for (std::size_t i = 0; i < sw.lambda.size(); ++i) sweep.add_row({csv_number(sw.lambda[i]), csv_number(sw.residual[i])});

  d.payload = {{"mu_star", br.mu_star},
               {"mode", br.mode},
               {"order", br.order},
               {"exponent", br.exponent},
               {"sigma", br.sigma},
               {"constants", br.constants},
               {"solvability", br.solvability},
               {"terms", term_json},
               {"sweep", {{"lambda", sw.lambda}, {"residual", sw.residual}, {"slope", sw.slope}, {"expected", sw.expected}}}};
  d.tables = {std::move(terms), std::move(consts), std::move(sweep)};
  return d;
}

ResultDocument cmd_branching(const RunConfig& c) {
  validate(c);
  ResultDocument d = new_document("branching", c);
  const WaveProblem p = make_problem(c);
  BranchingOptions bo;
  bo.radius = c.branching_radius;
  const BranchingFunction bf(p, c.mode, bo);
  const SeriesBranch br = nekrasov_nazarov_series(p, c.mode, std::min(c.order, 4));

  CsvTable roots{"branching_roots", {"lambda", "alpha_root", "alpha_series", "relative_difference"}, {}};
  json samples = json::array();
  for (double l : c.branching_lambdas) {
    std::optional<double> series_alpha;
    try {
      series_alpha = br.amplitude(l);
    } catch (const PreconditionViolated&) {
    }
    const auto a = bf.root(l, br.exponent > 1 ? series_alpha : std::nullopt);
    const double rel = a && series_alpha ? std::abs(*a - *series_alpha) / std::abs(*series_alpha) : NAN;
    if (!a) d.ok = false;
    roots.add_row({csv_number(l), csv_number(a ? *a : NAN), csv_number(series_alpha ? *series_alpha : NAN),
                   csv_number(rel)});
    samples.push_back({{"lambda", l},
                       {"alpha_root", a ? json(*a) : json(nullptr)},
                       {"alpha_series", series_alpha ? json(*series_alpha) : json(nullptr)},
                       {"relative_difference", finite_or_null(rel)}});
  }
  const EquivalenceReport rep = equivalence_check(p, br);
  CsvTable eq{"branching_equivalence", {"k", "series", "fitted", "discrepancy"}, {}};
  for (std::size_t k = 0; k < rep.series.size(); ++k)
    eq.add_row({csv_number(static_cast<long long>(k + 1)), csv_number(rep.series[k]), csv_number(rep.fitted[k]),
                csv_number(rep.discrepancy[k])});
  d.payload = {{"mu_star", bf.mu_star()},
               {"samples", samples},
               {"equivalence",
                {{"order", rep.order},
                 {"degree", rep.degree},
                 {"condition", rep.condition},
                 {"series", rep.series},
                 {"fitted", rep.fitted},
                 {"discrepancy", rep.discrepancy},
                 {"max_discrepancy", rep.max_discrepancy}}}};
  d.tables = {std::move(roots), std::move(eq)};
  return d;
}

ResultDocument cmd_continue(const RunConfig& c) {
  validate(c);
  ResultDocument d = new_document("continue", c);
  const WaveProblem p = make_problem(c);
  ContinuationOptions co;
  co.ds = c.ds;
  co.max_steps = c.max_steps;
  co.newton.tol = c.newton_tol;
  const Branch b = continue_branch(p, c.mode, co);

  CsvTable table{"branch",
                 {"step", "mu", "amplitude", "max_slope", "min_denominator", "positivity_defect", "residual",
                  "newton_iters", "ds"},
                 {}};
  CsvTable profiles{"profiles", {"step", "j", "theta", "phi"}, {}};
  const std::int64_t P = 32;
  json points = json::array();
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    const auto& pt = b.points[i];
    const auto step = static_cast<long long>(i);
    table.add_row({csv_number(step), csv_number(pt.mu), csv_number(pt.amplitude), csv_number(pt.diagnostics.max_slope),
                   csv_number(pt.diagnostics.min_denominator), csv_number(pt.diagnostics.positivity_defect),
                   csv_number(pt.residual), csv_number(static_cast<long long>(pt.diagnostics.newton_iters)),
                   csv_number(pt.ds)});
    for (std::int64_t j = 0; j <= 2 * P; ++j)
      profiles.add_row({csv_number(step), csv_number(static_cast<long long>(j)),
                        csv_number(std::numbers::pi * static_cast<double>(j) / static_cast<double>(P)),
                        csv_number(pt.phi.at_half_turn_fraction(j, P))});
    points.push_back({{"step", step},
                      {"mu", pt.mu},
                      {"amplitude", pt.amplitude},
                      {"max_slope", pt.diagnostics.max_slope},
                      {"min_denominator", finite_or_null(pt.diagnostics.min_denominator)},
                      {"positivity_defect", pt.diagnostics.positivity_defect},
                      {"residual", pt.residual},
                      {"newton_iters", pt.diagnostics.newton_iters},
                      {"ds", pt.ds}});
  }
  d.ok = !b.points.empty();
  d.payload = {{"origin", {{"mu", b.origin.mu}, {"multiplicity", b.origin.multiplicity}}},
               {"mode", b.mode},
               {"termination", to_string(b.termination)},
               {"halvings", b.halvings},
               {"mu_interval", {b.mu_min, b.mu_max}},
               {"points", points}};
  d.tables = {std::move(table), std::move(profiles)};
  return d;
}

ResultDocument cmd_verify(const RunConfig& c) {
  validate(c);
  ResultDocument d = new_document("verify", c);
  VerifyOptions vo;
  vo.modes = c.modes;
  vo.mode = c.mode;
  vo.series_order = c.order;
  vo.equivalence_order = std::min(c.order, 4);
  vo.kernel_perturbation = c.kernel_perturbation;
  const auto checks = run_verification(vo);
  CsvTable table{"verify", {"check", "passed", "quantity", "value"}, {}};
  json arr = json::array();
  bool all = true;
  for (const auto& ch : checks) {
    all = all && ch.passed;
    json measured = json::object();
    for (const auto& [k, v] : ch.measured) {
      measured[k] = finite_or_null(v);
      table.add_row({ch.name, ch.passed ? "1" : "0", k, csv_number(v)});
    }
    if (ch.measured.empty()) table.add_row({ch.name, ch.passed ? "1" : "0", "error", "nan"});
    arr.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}, {"measured", measured}});
  }
  d.ok = all;
  d.payload = {{"passed", all}, {"checks", arr}};
  d.tables.push_back(std::move(table));
  return d;
}

ResultDocument run_command(const std::string& command, const RunConfig& c) {
  if (command == "spectrum") return cmd_spectrum(c);
  if (command == "series") return cmd_series(c);
  if (command == "branching") return cmd_branching(c);
  if (command == "continue") return cmd_continue(c);
  if (command == "verify") return cmd_verify(c);
  throw ConfigError("unknown command '" + command + "'");
}

std::vector<std::string> write_outputs(const ResultDocument& doc, const RunConfig& c) {
  namespace fs = std::filesystem;
  fs::create_directories(c.out_dir);
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& text) {
    const fs::path path = fs::path(c.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw ConfigError("cannot write " + path.string());
    written.push_back(path.string());
  };
  if (c.write_json) put(doc.command + ".json", doc.to_json().dump(2) + "\n");
  if (c.write_csv)
    for (const auto& t : doc.tables) put(t.name + ".csv", t.render());
  return written;
}

}  // namespace nekwave
