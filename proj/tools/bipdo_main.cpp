#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "bipdo/decompose.hpp"
#include "bipdo/field_io.hpp"
#include "bipdo/operator.hpp"
#include "bipdo/runner.hpp"
#include "bipdo/selftest.hpp"

using namespace bipdo;

namespace {

GridSpec parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 4) throw ConfigError("--grid expects n1,n2,N,L");
  try {
    return make_grid(std::stoi(parts[0]), std::stoi(parts[1]), std::stoi(parts[2]), std::stod(parts[3]));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--grid: ") + e.what());
  }
}

Params parse_params(const std::string& text) {
  if (text.empty()) return {};
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    throw ConfigError("--params is not valid JSON");
  }
  if (!j.is_object()) throw ConfigError("--params must be a JSON object");
  Params p;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number()) throw ConfigError("--params: '" + it.key() + "' is not a number");
    p[it.key()] = it.value().get<double>();
  }
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bi-parameter pseudo-differential operators on a discretized torus"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run experiments from config files");
  std::vector<std::string> configs;
  run_cmd->add_option("config", configs, "Config file(s)")->required()->check(CLI::ExistingFile);

  auto* self_cmd = app.add_subcommand("selftest", "Identity suite at N=32 and N=4");
  bool corrupt = false;
  self_cmd->add_flag("--corrupt-profile", corrupt)->group("");

  std::string symbol, params_text, grid_text;
  auto* apply_cmd = app.add_subcommand("apply", "Apply T_sigma to a stored field");
  std::string in_path, out_path;
  apply_cmd->add_option("--symbol", symbol)->required();
  apply_cmd->add_option("--params", params_text, "JSON object");
  apply_cmd->add_option("--grid", grid_text, "n1,n2,N,L")->required();
  apply_cmd->add_option("--in", in_path)->required();
  apply_cmd->add_option("--out", out_path)->required();

  auto* kernel_cmd = app.add_subcommand("kernel", "Export a kernel slice K(x, .) as CSV (y..., re, im)");
  std::vector<double> x;
  std::vector<int> jv;
  std::optional<int> ell, ellmax;
  double split_scale = 1.0;
  std::string csv_path;
  kernel_cmd->add_option("--symbol", symbol)->required();
  kernel_cmd->add_option("--params", params_text, "JSON object");
  kernel_cmd->add_option("--grid", grid_text, "n1,n2,N,L")->required();
  kernel_cmd->add_option("--x", x, "Base point, one coordinate per axis")->delimiter(',')->required();
  kernel_cmd->add_option("--j", jv, "Annulus index (one value) or pair j1,j2")->delimiter(',');
  kernel_cmd->add_option("--ell", ell, "Cone index; needs a single --j");
  kernel_cmd->add_option("--ellmax", ellmax, "Cone tail index (default log2 N)");
  kernel_cmd->add_option("--split-scale", split_scale, "Cutoff scale r");
  kernel_cmd->add_option("--out", csv_path, "CSV path (stdout if omitted)");

  app.add_subcommand("list-symbols", "List builtin symbols and parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) {
      int worst = kExitOk;
      for (const auto& path : configs) worst = std::max(worst, run_file(path, std::cout, std::cerr));
      return worst;
    }
    if (*self_cmd) {
      set_profile_corruption(corrupt);
      return selftest(std::cout);
    }
    if (*apply_cmd) {
      GridSpec g = parse_grid(grid_text);
      SymbolDescriptor s = builtin(symbol, parse_params(params_text), Split{g.n1, g.n2});
      SampledField f = load_field(in_path);
      require_same_grid(f.grid, g);
      save_field(out_path, QuantizedOperator(s, g).apply(f));
      return kExitOk;
    }
    if (*kernel_cmd) {
      GridSpec g = parse_grid(grid_text);
      SymbolDescriptor s = builtin(symbol, parse_params(params_text), Split{g.n1, g.n2});
      if (static_cast<int>(x.size()) != g.n()) throw ConfigError("--x needs one coordinate per axis");
      if (ell && jv.size() != 1) throw ConfigError("--ell needs a single --j");
      if (!jv.empty()) {
        DecompositionIndex idx;
        idx.j = jv;
        idx.r = split_scale;
        if (ell) {
          idx.ell = *ell;
          idx.ell_max = ellmax.value_or(default_ell_max(g.N));
          s = derived_symbol(s, DerivedKind::cone_lj, idx);
        } else {
          s = derived_symbol(s, DerivedKind::annulus_j, idx);
        }
      }
      SampledField K = kernel_slice(s, g, x);
      std::ofstream file;
      if (!csv_path.empty()) {
        file.open(csv_path);
        if (!file) throw std::runtime_error("cannot write " + csv_path);
      }
      std::ostream& os = csv_path.empty() ? std::cout : file;
      os << std::setprecision(17);
      for (int a = 0; a < g.n(); ++a) os << 'y' << a + 1 << ',';
      os << "re,im\n";
      std::vector<double> y(g.n());
      for (std::size_t p = 0; p < g.size(); ++p) {
        g.point(p, y.data());
        for (double v : y) os << v << ',';
        os << K[p].real() << ',' << K[p].imag() << '\n';
      }
      return kExitOk;
    }
    for (const auto& info : builtin_catalog()) {
      std::cout << info.name << " - " << info.summary << "\n  params:";
      for (const auto& [key, def] : info.params) {
        std::cout << ' ' << key;
        if (def) std::cout << '=' << *def;
      }
      std::cout << '\n';
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}
