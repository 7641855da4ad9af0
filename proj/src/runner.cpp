#include "bipdo/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "bipdo/analysis.hpp"

#ifndef BIPDO_VERSION
#define BIPDO_VERSION "unknown"
#endif
#ifndef BIPDO_COMPILER
#define BIPDO_COMPILER "unknown"
#endif

namespace bipdo {

using nlohmann::json;

namespace {

struct Outcome {
  json results = json::object();
  std::string csv;
  std::string verdict;
  bool pass = false;
  std::string summary;
};

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json exponent_json(double p) { return std::isinf(p) ? json("inf") : json(p); }

json fit_json(const LogFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"points", f.points}};
}

PowerOptions power_options(const RunConfig& c) {
  PowerOptions o;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  return o;
}

Outcome run_ortho(const RunConfig& c, const SymbolDescriptor& s) {
  auto om = ortho_experiment(s, c.j_range->first, c.j_range->second, c.grid(), power_options(c));
  Outcome o;
  json entries = json::array();
  std::ostringstream csv;
  csv << "j,k,value,value_star,iterations,converged\n";
  for (const auto& e : om.entries) {
    entries.push_back({{"j", e.j},
                       {"k", e.k},
                       {"value", e.value},
                       {"value_star", e.value_star},
                       {"iterations", e.iterations},
                       {"converged", e.converged}});
    csv << e.j << ',' << e.k << ',' << num(e.value) << ',' << num(e.value_star) << ',' << e.iterations << ','
        << (e.converged ? 1 : 0) << '\n';
  }
  o.results = {{"j_range", {om.j_lo, om.j_hi}},
               {"entries", entries},
               {"norms", om.norms},
               {"fitted_epsilon", om.fitted_epsilon},
               {"fitted_A", om.fitted_A},
               {"r2", om.r2},
               {"fit_points", om.fit_points},
               {"max_far", om.max_far},
               {"nonconverged", om.nonconverged}};
  o.csv = csv.str();
  o.verdict = om.verdict;
  o.pass = om.pass;
  o.summary = "epsilon=" + num(om.fitted_epsilon) + " r2=" + num(om.r2) + " max_far=" + num(om.max_far);
  return o;
}

Outcome run_kernel(const RunConfig& c, const SymbolDescriptor& s) {
  auto rep = kernel_decay_experiment(s, c.j.front(), c.ell_range->first, c.ell_range->second, c.x_samples,
                                     c.grid(), c.split_scale.value_or(1.0), c.ell_max.value_or(0), 0.15,
                                     c.b_list);
  Outcome o;
  std::ostringstream csv;
  csv << "ell,value,b,inner,outer\n";
  json splits = json::array();
  for (std::size_t i = 0; i < rep.ells.size(); ++i) {
    json row = json::array();
    if (rep.b_list.empty()) csv << rep.ells[i] << ',' << num(rep.values[i]) << ",,,\n";
    for (std::size_t b = 0; b < rep.b_list.size(); ++b) {
      const auto& sp = rep.splits[i][b];
      row.push_back({{"b", rep.b_list[b]}, {"inner", sp.inner}, {"outer", sp.outer}});
      csv << rep.ells[i] << ',' << num(rep.values[i]) << ',' << num(rep.b_list[b]) << ',' << num(sp.inner) << ','
          << num(sp.outer) << '\n';
    }
    splits.push_back(row);
  }
  o.results = {{"j", rep.j},       {"r", rep.r},
               {"ell_max", rep.ell_max}, {"ells", rep.ells},
               {"values", rep.values},   {"splits", splits},
               {"fit", fit_json(rep.fit)}, {"target_slope", rep.target_slope},
               {"max_slope", rep.max_slope}};
  o.csv = csv.str();
  o.verdict = rep.verdict;
  o.pass = rep.pass;
  o.summary = "slope=" + num(rep.fit.slope) + " (max " + num(rep.max_slope) + ")";
  return o;
}

Outcome sweep_outcome(const BoundednessReport& rep) {
  Outcome o;
  std::ostringstream csv;
  csv << "N,value,witness,iterations\n";
  for (std::size_t i = 0; i < rep.Ns.size(); ++i)
    csv << rep.Ns[i] << ',' << num(rep.values[i]) << ',' << rep.witnesses[i] << ',' << rep.iterations[i] << '\n';
  o.results = {{"experiment", rep.id},
               {"m", rep.m},
               {"rho", rep.rho},
               {"delta", rep.delta},
               {"p", exponent_json(rep.p)},
               {"N_list", rep.Ns},
               {"values", rep.values},
               {"witnesses", rep.witnesses},
               {"iterations", rep.iterations},
               {"growth_fit", fit_json(rep.growth_fit)},
               {"variation", rep.variation},
               {"growth", rep.growth},
               {"expected_fail", rep.expected_fail}};
  o.csv = csv.str();
  o.verdict = rep.verdict;
  o.pass = rep.pass;
  o.summary = "variation=" + num(rep.variation) + " growth=" + num(rep.growth);
  return o;
}

Outcome run_sharpness(const RunConfig& c) {
  auto tab = sharpness_scan(*c.rho, c.p_list, c.m_grid, c.N_list, *c.L, c.seed, c.split());
  Outcome o;
  std::ostringstream csv;
  csv << "p,m,N,value,witness,exponent,bounded\n";
  json cells = json::array(), flips = json::array(), monotone = json::array();
  bool all_monotone = true;
  for (std::size_t ip = 0; ip < tab.p_list.size(); ++ip) {
    double f = tab.flip(ip);
    flips.push_back(std::isnan(f) ? json(nullptr) : json(f));
    monotone.push_back(tab.monotone(ip));
    all_monotone = all_monotone && tab.monotone(ip);
    for (std::size_t im = 0; im < tab.m_grid.size(); ++im) {
      const auto& cell = tab.at(ip, im);
      cells.push_back({{"p", exponent_json(cell.p)},
                       {"m", cell.m},
                       {"values", cell.values},
                       {"witnesses", cell.witnesses},
                       {"exponent", cell.exponent},
                       {"bounded", cell.bounded}});
      for (std::size_t k = 0; k < tab.Ns.size(); ++k)
        csv << num(cell.p) << ',' << num(cell.m) << ',' << tab.Ns[k] << ',' << num(cell.values[k]) << ','
            << cell.witnesses[k] << ',' << num(cell.exponent) << ',' << (cell.bounded ? 1 : 0) << '\n';
    }
  }
  json ps = json::array();
  for (double p : tab.p_list) ps.push_back(exponent_json(p));
  o.results = {{"rho", tab.rho},
               {"p_list", ps},
               {"m_grid", tab.m_grid},
               {"N_list", tab.Ns},
               {"bounded_exponent", tab.bounded_exponent},
               {"cells", cells},
               {"flip", flips},
               {"monotone", monotone}};
  o.csv = csv.str();
  o.pass = all_monotone;
  o.verdict = all_monotone ? "PASS" : "FAIL";
  o.summary = "flips=" + flips.dump();
  return o;
}

Outcome run_commutator(const RunConfig& c, const SymbolDescriptor& s) {
  auto rep = commutator_check(s, c.grid(), *c.cube, *c.rho, c.seed);
  Outcome o;
  std::ostringstream csv;
  csv << "field,rel_error\n";
  for (std::size_t i = 0; i < rep.errors.size(); ++i) csv << i << ',' << num(rep.errors[i]) << '\n';
  o.results = {{"max_rel_error", rep.max_rel_error}, {"errors", rep.errors}, {"M", rep.M},
               {"lambda_max", rep.lambda_max},       {"r", rep.r},          {"band", rep.band}};
  o.csv = csv.str();
  o.pass = rep.max_rel_error <= 1e-8;
  o.verdict = o.pass ? "PASS" : "FAIL";
  o.summary = "max_rel_error=" + num(rep.max_rel_error);
  return o;
}

Outcome run_conjugation(const RunConfig& c, const SymbolDescriptor& s) {
  auto rep = conjugation_check(s, c.j, *c.rho, c.grid(), c.points, c.seed);
  Outcome o;
  o.results = {{"max_rel_error", rep.max_rel_error}, {"points", rep.points}, {"j", c.j}};
  o.csv = "points,max_rel_error\n" + std::to_string(rep.points) + "," + num(rep.max_rel_error) + "\n";
  o.pass = rep.max_rel_error <= 1e-8;
  o.verdict = o.pass ? "PASS" : "FAIL";
  o.summary = "max_rel_error=" + num(rep.max_rel_error);
  return o;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

json symbol_json(const RunConfig& c, const SymbolDescriptor* s) {
  json j = {{"name", c.symbol}, {"params", c.params}};
  if (s) {
    j["order"] = s->order.biparameter ? json{{"m1", s->order.m1}, {"m2", s->order.m2}} : json{{"m", s->order.m}};
    j["rho"] = s->rho;
    j["delta"] = s->delta;
  }
  return j;
}

}  // namespace

std::string build_id() { return std::string("bipdo ") + BIPDO_VERSION + " (" + BIPDO_COMPILER + ")"; }

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  std::optional<SymbolDescriptor> sym;
  try {
    c.require_for_experiment();
    if (c.experiment != "l2_uniformity" && c.experiment != "bmo" && c.experiment != "sharpness") c.grid();
    if (c.experiment == "sharpness" && !c.symbol.empty())
      throw ConfigError("sharpness always scans oscillatory_exotic; drop 'symbol'");
    if (!c.symbol.empty()) sym = builtin(c.symbol, c.params, c.split());
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  json report = {{"id", c.experiment},
                 {"name", c.report_name()},
                 {"build", build_id()},
                 {"seed", c.seed},
                 {"config", c.given},
                 {"symbol", symbol_json(c, sym ? &*sym : nullptr)}};
  Outcome o;
  int code = kExitOk;
  try {
    const std::string& e = c.experiment;
    if (e == "ortho")
      o = run_ortho(c, *sym);
    else if (e == "kernel_decay")
      o = run_kernel(c, *sym);
    else if (e == "l2_uniformity")
      o = sweep_outcome(l2_uniformity_sweep(*sym, c.N_list, *c.L, c.expected_fail, power_options(c)));
    else if (e == "bmo")
      o = sweep_outcome(bmo_experiment(*sym, c.N_list, *c.L, c.seed, c.expected_fail));
    else if (e == "sharpness")
      o = run_sharpness(c);
    else if (e == "commutator")
      o = run_commutator(c, *sym);
    else
      o = run_conjugation(c, *sym);
    code = o.pass ? kExitOk : kExitFail;
  } catch (const std::invalid_argument& ex) {
    err << "config error: " << ex.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& ex) {
    o.verdict = "ERROR";
    o.pass = false;
    o.results = {{"error", ex.what()}};
    o.summary = ex.what();
    code = kExitFail;
  }
  report["results"] = o.results;
  report["verdict"] = o.verdict;
  report["pass"] = o.pass;

  try {
    std::filesystem::path dir(c.output_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / (c.report_name() + ".json"), report.dump(2) + "\n");
    write_file(dir / (c.report_name() + ".csv"), o.csv);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitFail;
  }
  out << c.report_name() << ": " << o.verdict << " (" << o.summary << ")\n";
  return code;
}

int run_file(const std::string& path, std::ostream& out, std::ostream& err) {
  RunConfig c;
  try {
    c = load_config(path);
  } catch (const ConfigError& e) {
    err << path << ": " << e.what() << '\n';
    return kExitConfig;
  }
  return run(c, out, err);
}

}  // namespace bipdo
