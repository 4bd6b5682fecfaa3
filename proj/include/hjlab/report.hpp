#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hjlab/config.hpp"
#include "hjlab/errors.hpp"
#include "hjlab/rate_lab.hpp"

namespace hjlab {

inline constexpr const char* kToolName = "hjlab";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

using Json = nlohmann::json;

/// printf("%.17g"): round-trip exact for doubles.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }
inline double number_from(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline Json fit_json(const RateFit& f) {
  if (f.degenerate) return Json{{"exponent", "degenerate"}, {"constant", "degenerate"}, {"points", f.points}};
  return Json{{"exponent", f.exponent}, {"constant", f.constant}, {"points", f.points}};
}

inline RateFit fit_from(const Json& j) {
  RateFit f;
  f.points = j.at("points").get<std::size_t>();
  if (j.at("exponent").is_string()) return f;
  f.exponent = j.at("exponent").get<double>();
  f.constant = j.at("constant").get<double>();
  f.degenerate = false;
  return f;
}

}  // namespace detail

inline Json to_json(const RateReport& r) {
  Json rows = Json::array();
  for (const auto& w : r.rows)
    rows.push_back({{"epsilon", w.epsilon},
                    {"sup_error", w.sup_error},
                    {"pos_error", w.pos_error},
                    {"neg_error", w.neg_error},
                    {"sup_error_t0", w.sup_error_t0},
                    {"pos_error_t0", w.pos_error_t0},
                    {"neg_error_t0", w.neg_error_t0},
                    {"C_L", w.C_L},
                    {"second_order", w.second_order},
                    {"delta_plus", w.delta_plus},
                    {"bound_upper", w.bound_upper},
                    {"bound_lower", w.bound_lower},
                    {"pass", w.pass}});
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  Json curve = Json::array();
  for (const auto& [b, v] : r.beta_curve) curve.push_back({b, detail::number_or_null(v)});
  return Json{{"experiment", to_string(r.kind)},
              {"dim", r.dim},
              {"horizon", r.horizon},
              {"sweep_cells", r.sweep_cells},
              {"reference_cells", r.reference_cells},
              {"rows", rows},
              {"fit", detail::fit_json(r.fit)},
              {"fit_pos", detail::fit_json(r.fit_pos)},
              {"fit_neg", detail::fit_json(r.fit_neg)},
              {"constants",
               {{"C_L", r.C_L},
                {"C_L_variation", r.C_L_variation},
                {"M", r.M},
                {"K", r.K},
                {"M0", r.M0},
                {"c_f_integral", r.c_f_integral},
                {"beta", r.beta},
                {"alpha", r.alpha},
                {"heat_constant", r.heat_constant}}},
              {"scheme_error", r.scheme_error},
              {"sweep_scheme_error", r.sweep_scheme_error},
              {"boundary_influence", r.boundary_influence},
              {"doubled_exponent", detail::number_or_null(r.doubled_exponent)},
              {"beta_curve", curve},
              {"degenerate", r.degenerate},
              {"inconclusive", r.inconclusive},
              {"pass", r.pass},
              {"checks", checks}};
}

inline RateReport report_from_json(const Json& j) {
  RateReport r;
  r.kind = parse_experiment_kind(j.at("experiment").get<std::string>());
  r.dim = j.at("dim").get<int>();
  r.horizon = j.at("horizon").get<double>();
  r.sweep_cells = j.at("sweep_cells").get<int>();
  r.reference_cells = j.at("reference_cells").get<int>();
  for (const auto& w : j.at("rows")) {
    EpsilonRow row;
    row.epsilon = w.at("epsilon").get<double>();
    row.sup_error = w.at("sup_error").get<double>();
    row.pos_error = w.at("pos_error").get<double>();
    row.neg_error = w.at("neg_error").get<double>();
    row.sup_error_t0 = w.at("sup_error_t0").get<double>();
    row.pos_error_t0 = w.at("pos_error_t0").get<double>();
    row.neg_error_t0 = w.at("neg_error_t0").get<double>();
    row.C_L = w.at("C_L").get<double>();
    row.second_order = w.at("second_order").get<double>();
    row.delta_plus = w.at("delta_plus").get<double>();
    row.bound_upper = w.at("bound_upper").get<double>();
    row.bound_lower = w.at("bound_lower").get<double>();
    row.pass = w.at("pass").get<bool>();
    r.rows.push_back(row);
  }
  r.fit = detail::fit_from(j.at("fit"));
  r.fit_pos = detail::fit_from(j.at("fit_pos"));
  r.fit_neg = detail::fit_from(j.at("fit_neg"));
  const Json& c = j.at("constants");
  r.C_L = c.at("C_L").get<double>();
  r.C_L_variation = c.at("C_L_variation").get<double>();
  r.M = c.at("M").get<double>();
  r.K = c.at("K").get<double>();
  r.M0 = c.at("M0").get<double>();
  r.c_f_integral = c.at("c_f_integral").get<double>();
  r.beta = c.at("beta").get<double>();
  r.alpha = c.at("alpha").get<double>();
  r.heat_constant = c.at("heat_constant").get<double>();
  r.scheme_error = j.at("scheme_error").get<double>();
  r.sweep_scheme_error = j.at("sweep_scheme_error").get<double>();
  r.boundary_influence = j.at("boundary_influence").get<double>();
  r.doubled_exponent = detail::number_from(j.at("doubled_exponent"));
  for (const auto& p : j.at("beta_curve")) r.beta_curve.emplace_back(p.at(0).get<double>(), detail::number_from(p.at(1)));
  r.degenerate = j.at("degenerate").get<bool>();
  r.inconclusive = j.at("inconclusive").get<bool>();
  r.pass = j.at("pass").get<bool>();
  for (const auto& k : j.at("checks"))
    r.checks.push_back({k.at("name").get<std::string>(), k.at("pass").get<bool>(), k.at("detail").get<std::string>()});
  return r;
}

/// Resolved configuration, defaults included.
inline Json config_echo(const RunConfig& c) {
  Json box = Json::array();
  for (const auto& iv : c.box) box.push_back({iv.lo, iv.hi});
  Json tp = Json::object(), sp = Json::object();
  for (const auto& [k, v] : c.terminal_params) tp[k] = v;
  for (const auto& [k, v] : c.source_params) sp[k] = v;
  Json problem{{"horizon", c.horizon},
               {"hamiltonian", c.hamiltonian},
               {"terminal", c.terminal},
               {"terminal_params", tp},
               {"source", c.source},
               {"source_params", sp}};
  if (c.hamiltonian == "power") {
    problem["gamma"] = c.gamma;
    problem["delta"] = c.delta.value_or(c.gamma < 2.0 ? kDefaultPowerDelta : 0.0);
  }
  if (c.hamiltonian == "tabulated") {
    problem["nodes"] = c.nodes;
    problem["values"] = c.values;
  }
  Json sweep{{"experiment", to_string(c.experiment)},
             {"epsilons", c.epsilons},
             {"beta", c.beta},
             {"alpha", c.alpha},
             {"tau", c.tau},
             {"collar", c.collar},
             {"doubling_check", c.doubling_check},
             {"threads", c.threads}};
  sweep["x0"] = c.x0 ? Json(std::vector<double>(c.x0->begin(), c.x0->begin() + c.dim)) : Json("center");
  return Json{{"domain", {{"dim", c.dim}, {"box", box}}},
              {"grid",
               {{"cells", c.cells},
                {"dt", c.dt_policy == "auto" ? Json("auto") : Json(c.dt)},
                {"refinement", c.refinement},
                {"snapshots", c.snapshots}}},
              {"problem", problem},
              {"sweep", sweep},
              {"output", {{"formats", c.formats}, {"name", c.name}}}};
}

/// Versioned report document: schema version, tool, config echo and the report body.
inline Json report_document(const RateReport& r, const Json& config) {
  Json doc{{"schema_version", kReportSchemaVersion},
           {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
           {"config", config}};
  doc["report"] = to_json(r);
  return doc;
}

inline RateReport report_from_document(const Json& doc) {
  const int v = doc.at("schema_version").get<int>();
  if (v != kReportSchemaVersion) throw ValidationError("unsupported report schema version " + std::to_string(v));
  return report_from_json(doc.at("report"));
}

inline std::string csv_text(const RateReport& r) {
  std::ostringstream os;
  os << "epsilon,sup_error,pos_error,neg_error,bound_upper,bound_lower,pass\n";
  for (const auto& w : r.rows)
    os << format_g17(w.epsilon) << ',' << format_g17(w.sup_error) << ',' << format_g17(w.pos_error) << ','
       << format_g17(w.neg_error) << ',' << format_g17(w.bound_upper) << ',' << format_g17(w.bound_lower) << ','
       << (w.pass ? "true" : "false") << '\n';
  return os.str();
}

/// Two-column plot data: log10 ε against log10 of the chosen column; non-positive values are skipped.
inline std::string plot_text(const RateReport& r, double EpsilonRow::*column, const std::string& label) {
  std::ostringstream os;
  os << "# log10(epsilon) log10(" << label << ")\n";
  for (const auto& w : r.rows) {
    const double v = w.*column;
    if (v > 0.0) os << format_g17(std::log10(w.epsilon)) << ' ' << format_g17(std::log10(v)) << '\n';
    else os << "# skipped epsilon " << format_g17(w.epsilon) << ": " << label << " is zero\n";
  }
  return os.str();
}

struct OutputFile {
  std::string name;
  std::string content;
};

/// Writes every file under a temporary name first, then renames, so a failure leaves no partial report.
inline std::vector<std::string> write_files(const std::string& dir, const std::vector<OutputFile>& files) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("output directory '" + dir + "' does not exist");
  std::vector<fs::path> staged;
  auto cleanup = [&] {
    for (const auto& p : staged) fs::remove(p, ec);
  };
  for (const auto& f : files) {
    const fs::path tmp = fs::path(dir) / (f.name + ".tmp");
    std::ofstream out(tmp, std::ios::binary);
    if (!out) {
      cleanup();
      throw IoError("cannot write '" + tmp.string() + "'");
    }
    staged.push_back(tmp);
    out << f.content;
    out.close();
    if (!out) {
      cleanup();
      throw IoError("write failed for '" + tmp.string() + "'");
    }
  }
  std::vector<std::string> written;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const fs::path dst = fs::path(dir) / files[i].name;
    fs::rename(staged[i], dst, ec);
    if (ec) {
      cleanup();
      throw IoError("cannot move report into place: " + dst.string());
    }
    written.push_back(dst.string());
  }
  return written;
}

/// CSV, JSON and the two plot files (measured error and bound) for a sweep.
inline std::vector<std::string> emit_report(const RateReport& r, const RunConfig& c, const std::string& dir,
                                            const std::vector<std::string>& formats) {
  detail::check_formats(formats);
  std::vector<OutputFile> files;
  for (const auto& f : formats) {
    if (f == "csv") files.push_back({c.name + ".csv", csv_text(r)});
    if (f == "json") files.push_back({c.name + ".json", report_document(r, config_echo(c)).dump(2) + "\n"});
  }
  files.push_back({c.name + "_error.dat", plot_text(r, &EpsilonRow::sup_error, "sup_error")});
  files.push_back({c.name + "_bound.dat", plot_text(r, &EpsilonRow::bound_upper, "bound_upper")});
  return write_files(dir, files);
}

}  // namespace hjlab
