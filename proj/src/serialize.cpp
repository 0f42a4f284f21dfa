#include "sturmkit/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sturmkit {

namespace {

// Grid with both window edges included; the constructed functions are
// defined on the closed truncated window.
std::vector<double> uniform_grid(double lo, double hi, int n) {
  if (n < 2) n = 2;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * i / (n - 1);
  xs.front() = lo;
  xs.back() = hi;
  return xs;
}

Json grid_json(const std::vector<double>& xs, const std::function<double(double)>& f) {
  Json x = Json::array(), value = Json::array();
  for (double xi : xs) {
    x.push_back(json_real(xi));
    value.push_back(json_real(f(xi)));
  }
  Json g;
  g["x"] = std::move(x);
  g["value"] = std::move(value);
  return Json{{"grid", std::move(g)}};
}

Json tail_json(const TailCertificate& t) {
  Json j;
  j["certified"] = t.certified;
  j["borderline"] = t.borderline;
  j["boundary_ratio"] = json_real(t.boundary_ratio);
  j["boundary_flux"] = json_real(t.boundary_flux);
  j["tail_verdict"] = to_string(t.tail_verdict);
  j["tail_mass"] = json_real(t.tail_mass);
  return j;
}

// Ladder cuts re-expressed as the spec of the rung: distance from a finite
// endpoint, window size toward an infinite one.
double rung_eps(double bound, double cut) {
  return std::isfinite(bound) ? std::fabs(bound - cut) : std::fabs(cut);
}

Json endpoint_json(const EndpointReport& e, double bound) {
  Json j;
  j["classification"] = to_string(e.verdict);
  j["value"] = json_real(e.value);
  double bound_err = std::numeric_limits<double>::quiet_NaN();
  if (e.verdict == Verdict::finite && !e.mass.empty())
    bound_err = std::fabs(e.value - e.mass.back());
  j["error_bound"] = json_real(bound_err);
  j["model"] = to_string(e.model);
  j["exponent"] = json_real(e.exponent);
  j["residual"] = json_real(e.fit_residual);
  j["base_point_invariant"] = e.base_point_invariant;
  Json rungs = Json::array();
  std::size_t n = std::min(e.cuts.size(), e.mass.size());
  for (std::size_t k = 0; k < n; ++k) {
    Json r;
    r["eps"] = json_real(rung_eps(bound, e.cuts[k]));
    r["I"] = json_real(e.mass[k]);
    rungs.push_back(std::move(r));
  }
  j["rungs"] = std::move(rungs);
  return j;
}

std::string bool_cell(bool b) { return b ? "1" : "0"; }

void endpoint_rows(CsvTable& summary, CsvTable& rungs, const EndpointReport& e, double bound,
                   double x0) {
  double bound_err = std::numeric_limits<double>::quiet_NaN();
  if (e.verdict == Verdict::finite && !e.mass.empty())
    bound_err = std::fabs(e.value - e.mass.back());
  summary.row({to_string(e.end), to_string(e.verdict), format_real(e.value),
               format_real(bound_err), to_string(e.model), format_real(e.exponent),
               format_real(e.fit_residual), bool_cell(e.base_point_invariant),
               format_real(x0)});
  std::size_t n = std::min(e.cuts.size(), e.mass.size());
  for (std::size_t k = 0; k < n; ++k)
    rungs.row({to_string(e.end), format_real(rung_eps(bound, e.cuts[k])),
               format_real(e.mass[k])});
}

struct TrajectorySamples {
  std::vector<double> x, u, du;
};

TrajectorySamples trajectory_samples(const Trajectory& t) {
  TrajectorySamples s;
  if (t.steps().empty()) {
    double x = t.anchor_x();
    s.x.push_back(x);
    s.u.push_back(t.u(x));
    s.du.push_back(t.du(x));
    return s;
  }
  for (const StepRec& st : t.steps()) {
    s.x.push_back(st.x0);
    s.u.push_back(st.u0);
    s.du.push_back(st.du0);
  }
  const StepRec& last = t.steps().back();
  s.x.push_back(last.x1);
  s.u.push_back(last.u1);
  s.du.push_back(last.du1);
  return s;
}

CsvTable kv_table(std::vector<std::pair<std::string, std::string>> pairs) {
  CsvTable t;
  t.name = "result";
  t.header = {"key", "value"};
  for (auto& [k, v] : pairs) t.row({k, v});
  return t;
}

CsvTable zeros_table(const std::vector<double>& zeros) {
  CsvTable t;
  t.name = "zeros";
  t.header = {"zero"};
  for (double z : zeros) t.row({format_real(z)});
  return t;
}

}  // namespace

Json to_json(const RunConfig& c) {
  Json j;
  j["tol"] = json_real(c.tol);
  j["eps"] = json_real(c.eps);
  j["infinite_window"] = json_real(c.infinite_window);
  j["ladder_rungs"] = c.ladder_rungs;
  j["ladder_ratio"] = json_real(c.ladder_ratio);
  j["x0"] = json_real(c.x0);
  j["format"] = c.format;
  j["seed"] = c.seed;
  return j;
}

Json json_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s == "-nan") s = "nan";
  return s;
}

namespace {

// RFC 4180 quoting, applied only when a cell needs it.
std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

}  // namespace

std::string CsvTable::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i)
    os << (i ? "," : "") << csv_cell(header[i]);
  os << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_cell(r[i]);
    os << "\n";
  }
  return os.str();
}

std::string csv_blocks(const std::vector<CsvTable>& tables) {
  std::string out;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) out += "\n";
    out += tables[i].str();
  }
  return out;
}

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) throw UsageError("failed while writing " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw UsageError("cannot move " + tmp + " into place at " + path);
}

Json trajectory_json(const Trajectory& t) {
  TrajectorySamples s = trajectory_samples(t);
  Json j;
  Json anchor;
  anchor["x"] = json_real(t.anchor_x());
  anchor["u"] = json_real(t.u(t.anchor_x()));
  anchor["du"] = json_real(t.du(t.anchor_x()));
  j["anchor"] = std::move(anchor);
  Json req;
  req["lo"] = json_real(t.requested_left());
  req["hi"] = json_real(t.requested_right());
  j["requested"] = std::move(req);
  Json reach;
  reach["lo"] = json_real(t.left());
  reach["hi"] = json_real(t.right());
  reach["left_complete"] = t.left_complete();
  reach["right_complete"] = t.right_complete();
  j["reached"] = std::move(reach);
  Json samples;
  samples["x"] = Json::array();
  samples["u"] = Json::array();
  samples["du"] = Json::array();
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    samples["x"].push_back(json_real(s.x[i]));
    samples["u"].push_back(json_real(s.u[i]));
    samples["du"].push_back(json_real(s.du[i]));
  }
  j["samples"] = std::move(samples);
  return j;
}

CsvTable trajectory_table(const Trajectory& t) {
  TrajectorySamples s = trajectory_samples(t);
  CsvTable tab;
  tab.name = "trajectory";
  tab.header = {"x", "u", "du"};
  for (std::size_t i = 0; i < s.x.size(); ++i)
    tab.row({format_real(s.x[i]), format_real(s.u[i]), format_real(s.du[i])});
  return tab;
}

Json principality_json(const PrincipalityReport& rep, double a, double b, double x0) {
  Json j;
  j["x0"] = json_real(x0);
  j["principal"] = rep.principal;
  j["decided"] = rep.decided;
  j["left"] = endpoint_json(rep.left, a);
  j["right"] = endpoint_json(rep.right, b);
  return j;
}

std::vector<CsvTable> principality_tables(const PrincipalityReport& rep, double a, double b,
                                          double x0) {
  CsvTable summary;
  summary.name = "principality";
  summary.header = {"endpoint", "classification", "value",    "error_bound", "model",
                    "exponent", "residual",       "invariant", "x0"};
  CsvTable rungs;
  rungs.name = "rungs";
  rungs.header = {"endpoint", "eps", "I"};
  endpoint_rows(summary, rungs, rep.left, a, x0);
  endpoint_rows(summary, rungs, rep.right, b, x0);
  return {std::move(summary), std::move(rungs)};
}

Json comparison_json(const ComparisonReport& rep) {
  Json j;
  j["verdict"] = to_string(rep.status);
  Json trunc;
  trunc["a_cut"] = json_real(rep.window_lo);
  trunc["b_cut"] = json_real(rep.window_hi);
  trunc["truncated"] = rep.window_truncated;
  j["truncation"] = std::move(trunc);
  Json hyp;
  hyp["coefficient_ordering"] = "pass";
  hyp["base_solution_residual"] = "pass";
  j["hypothesis_checks"] = std::move(hyp);
  Json zeros = Json::array();
  for (double z : rep.matched_zeros) zeros.push_back(json_real(z));
  j["zeros"] = std::move(zeros);
  j["matched_zero_count"] = rep.matched_zero_count;
  j["established"] = rep.established;
  Json tails;
  tails["left"] = tail_json(rep.left_tail);
  tails["right"] = tail_json(rep.right_tail);
  j["tails"] = std::move(tails);
  Json witness;
  witness["found"] = rep.witness_found;
  witness["ivp"] = Json{{"ratio", json_real(rep.witness_ratio)}};
  witness["zero_count"] = rep.witness_zero_count;
  j["witness"] = std::move(witness);
  j["detail"] = rep.detail;
  return j;
}

std::vector<CsvTable> comparison_tables(const ComparisonReport& rep) {
  auto tail_pairs = [](const char* side, const TailCertificate& t,
                       std::vector<std::pair<std::string, std::string>>& out) {
    std::string p = std::string(side) + "_";
    out.emplace_back(p + "certified", bool_cell(t.certified));
    out.emplace_back(p + "borderline", bool_cell(t.borderline));
    out.emplace_back(p + "boundary_ratio", format_real(t.boundary_ratio));
    out.emplace_back(p + "boundary_flux", format_real(t.boundary_flux));
    out.emplace_back(p + "tail_verdict", to_string(t.tail_verdict));
    out.emplace_back(p + "tail_mass", format_real(t.tail_mass));
  };
  std::vector<std::pair<std::string, std::string>> kv = {
      {"verdict", to_string(rep.status)},
      {"a_cut", format_real(rep.window_lo)},
      {"b_cut", format_real(rep.window_hi)},
      {"truncated", bool_cell(rep.window_truncated)},
      {"matched_zero_count", std::to_string(rep.matched_zero_count)},
      {"established", std::to_string(rep.established)},
  };
  tail_pairs("left", rep.left_tail, kv);
  tail_pairs("right", rep.right_tail, kv);
  kv.emplace_back("witness_found", bool_cell(rep.witness_found));
  kv.emplace_back("witness_ratio", format_real(rep.witness_ratio));
  kv.emplace_back("witness_zero_count", std::to_string(rep.witness_zero_count));
  return {kv_table(std::move(kv)), zeros_table(rep.matched_zeros)};
}

Json separation_json(const SeparationReport& rep, double a, double b, double x0) {
  Json j;
  j["verdict"] = to_string(rep.status);
  Json trunc;
  trunc["a_cut"] = json_real(rep.window_lo);
  trunc["b_cut"] = json_real(rep.window_hi);
  j["truncation"] = std::move(trunc);
  j["hypothesis_checks"] = Json{{"solution_positivity", "pass"}};
  j["principality"] = principality_json(rep.principality, a, b, x0);
  Json zeros = Json::array();
  for (double z : rep.sample_zeros) zeros.push_back(json_real(z));
  j["zeros"] = std::move(zeros);
  Json witness;
  witness["found"] = rep.witness_found;
  witness["c1"] = json_real(rep.witness_c1);
  witness["c2"] = json_real(rep.witness_c2);
  witness["root"] = json_real(rep.witness_root);
  j["witness"] = std::move(witness);
  j["detail"] = rep.detail;
  return j;
}

std::vector<CsvTable> separation_tables(const SeparationReport& rep) {
  std::vector<std::pair<std::string, std::string>> kv = {
      {"verdict", to_string(rep.status)},
      {"a_cut", format_real(rep.window_lo)},
      {"b_cut", format_real(rep.window_hi)},
      {"left_classification", to_string(rep.principality.left.verdict)},
      {"right_classification", to_string(rep.principality.right.verdict)},
      {"witness_found", bool_cell(rep.witness_found)},
      {"witness_c1", format_real(rep.witness_c1)},
      {"witness_c2", format_real(rep.witness_c2)},
      {"witness_root", format_real(rep.witness_root)},
  };
  return {kv_table(std::move(kv)), zeros_table(rep.sample_zeros)};
}

Json counterexample_json(const CounterexampleResult& res, int grid_points) {
  std::vector<double> xs = uniform_grid(res.window_lo, res.window_hi, grid_points);
  Json j;
  j["case"] = res.kind;
  if (res.kind == "schwarzian") j["generator_case"] = to_string(res.generator_case);
  Json window;
  window["lo"] = json_real(res.window_lo);
  window["hi"] = json_real(res.window_hi);
  j["window"] = std::move(window);
  j["L1"] = json_real(res.L1);
  j["L2"] = json_real(res.L2);
  if (res.kind == "chuaqui") j["k"] = json_real(res.k);
  if (res.kind == "steinmetz") {
    j["c"] = json_real(res.c);
    j["alpha"] = json_real(res.alpha);
  }
  if (res.safety > 0) j["safety"] = json_real(res.safety);
  j["residual_max"] = json_real(res.residual_max);
  j["positivity_margin"] = json_real(res.positivity_margin);
  j["ordering_margin"] = json_real(res.ordering_margin);
  j["P"] = grid_json(xs, res.P);
  j["v"] = grid_json(xs, res.v);
  j["detail"] = res.detail;
  return j;
}

std::vector<CsvTable> counterexample_tables(const CounterexampleResult& res, int grid_points) {
  std::vector<std::pair<std::string, std::string>> kv = {
      {"case", res.kind},
      {"window_lo", format_real(res.window_lo)},
      {"window_hi", format_real(res.window_hi)},
      {"L1", format_real(res.L1)},
      {"L2", format_real(res.L2)},
  };
  if (res.kind == "schwarzian") kv.emplace_back("generator_case", to_string(res.generator_case));
  if (res.kind == "chuaqui") kv.emplace_back("k", format_real(res.k));
  if (res.kind == "steinmetz") {
    kv.emplace_back("c", format_real(res.c));
    kv.emplace_back("alpha", format_real(res.alpha));
  }
  if (res.safety > 0) kv.emplace_back("safety", format_real(res.safety));
  kv.emplace_back("residual_max", format_real(res.residual_max));
  kv.emplace_back("positivity_margin", format_real(res.positivity_margin));
  kv.emplace_back("ordering_margin", format_real(res.ordering_margin));

  CsvTable grid;
  grid.name = "grid";
  grid.header = {"x", "P", "v"};
  for (double x : uniform_grid(res.window_lo, res.window_hi, grid_points))
    grid.row({format_real(x), format_real(res.P(x)), format_real(res.v(x))});
  return {kv_table(std::move(kv)), std::move(grid)};
}

Json separation_counterexample_json(const SeparationCounterexample& res, int grid_points) {
  std::vector<double> xs = uniform_grid(res.window_lo, res.window_hi, grid_points);
  Json j;
  j["case"] = "separation";
  j["c1"] = json_real(res.c1);
  j["c2"] = json_real(res.c2);
  Json window;
  window["lo"] = json_real(res.window_lo);
  window["hi"] = json_real(res.window_hi);
  j["window"] = std::move(window);
  j["L1"] = json_real(res.L1);
  j["L2"] = json_real(res.L2);
  j["positivity_margin"] = json_real(res.positivity_margin);
  j["v"] = grid_json(xs, res.v);
  j["detail"] = res.detail;
  return j;
}

std::vector<CsvTable> separation_counterexample_tables(const SeparationCounterexample& res,
                                                       int grid_points) {
  std::vector<std::pair<std::string, std::string>> kv = {
      {"case", "separation"},
      {"c1", format_real(res.c1)},
      {"c2", format_real(res.c2)},
      {"window_lo", format_real(res.window_lo)},
      {"window_hi", format_real(res.window_hi)},
      {"L1", format_real(res.L1)},
      {"L2", format_real(res.L2)},
      {"positivity_margin", format_real(res.positivity_margin)},
  };
  CsvTable grid;
  grid.name = "grid";
  grid.header = {"x", "v"};
  for (double x : uniform_grid(res.window_lo, res.window_hi, grid_points))
    grid.row({format_real(x), format_real(res.v(x))});
  return {kv_table(std::move(kv)), std::move(grid)};
}

}  // namespace sturmkit
