// Command-line driver: loads a JSON experiment config, runs the requested
// verification (gauss-bonnet, t-interpolation, poincare-hopf, morse-bott,
// or the built-in selftest), prints a table to stdout and optionally writes
// machine-readable JSON/CSV. Exit code 0 iff every requested check passed.

#include <chrono>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "eulerint/runner.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  int nodes = 0;
  std::string t_override;
  double tol = 0.0;
  std::string out_base;
  bool json_stdout = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_config) {
  auto* copt = cmd->add_option("--config", o.config_path, "experiment config (JSON)");
  if (needs_config) copt->required();
  cmd->add_option("--nodes", o.nodes, "quadrature nodes per axis (overrides config)");
  cmd->add_option("--t", o.t_override, "comma-separated t values (overrides config)");
  cmd->add_option("--tol", o.tol, "chi tolerance (overrides config)");
  cmd->add_option("--out", o.out_base, "write <out>.json and <out>.csv");
  cmd->add_flag("--json", o.json_stdout, "print the JSON report to stdout instead of a table");
}

std::vector<double> parse_t_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  double prev = 0.0;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const double t = std::stod(item);
    if (!(t > 0.0)) throw std::invalid_argument("--t values must be positive");
    if (!(t > prev)) throw std::invalid_argument("--t values must be strictly increasing");
    out.push_back(t);
    prev = t;
  }
  if (out.empty()) throw std::invalid_argument("--t needs at least one value");
  return out;
}

eulerint::ExperimentConfig load_with_overrides(const CommonOpts& o) {
  eulerint::ExperimentConfig cfg = eulerint::load_config_file(o.config_path);
  if (o.nodes > 0)
    cfg.quad.nodes.assign(cfg.manifold.patches[0].domain.axes.size(), o.nodes);
  if (!o.t_override.empty()) cfg.t_list = parse_t_list(o.t_override);
  if (o.tol > 0.0) cfg.tolerance = o.tol;
  if (!o.out_base.empty()) cfg.out_base = o.out_base;
  return cfg;
}

int emit(const eulerint::Report& rep, const CommonOpts& o, const std::string& out_base,
         double seconds) {
  if (o.json_stdout)
    std::cout << eulerint::report_to_json(rep).dump(2) << "\n";
  else
    eulerint::print_report(rep, std::cout);
  if (!out_base.empty()) eulerint::write_outputs(rep, out_base);
  std::cerr << "[" << rep.command << "] " << seconds << " s\n";
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Euler characteristic verification on chart-based Riemannian manifolds"};
  app.require_subcommand(1);

  CommonOpts gbc_o, interp_o, ph_o, mb_o, self_o;
  CLI::App* gbc = app.add_subcommand("gbc", "Gauss-Bonnet curvature integral");
  add_common(gbc, gbc_o, true);
  CLI::App* interp = app.add_subcommand("interp", "t-interpolation integral table");
  add_common(interp, interp_o, true);
  CLI::App* ph = app.add_subcommand("ph", "Poincare-Hopf index count");
  add_common(ph, ph_o, true);
  CLI::App* mb = app.add_subcommand("morse-bott", "degenerate Poincare-Hopf over strata");
  add_common(mb, mb_o, true);
  CLI::App* self = app.add_subcommand("selftest", "built-in oracle suites");
  add_common(self, self_o, false);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&start] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    if (gbc->parsed()) {
      const auto cfg = load_with_overrides(gbc_o);
      const auto rep = eulerint::cmd_gbc(cfg);
      return emit(rep, gbc_o, cfg.out_base, elapsed());
    }
    if (interp->parsed()) {
      const auto cfg = load_with_overrides(interp_o);
      const auto rep = eulerint::cmd_interp(cfg);
      return emit(rep, interp_o, cfg.out_base, elapsed());
    }
    if (ph->parsed()) {
      const auto cfg = load_with_overrides(ph_o);
      const auto rep = eulerint::cmd_ph(cfg);
      return emit(rep, ph_o, cfg.out_base, elapsed());
    }
    if (mb->parsed()) {
      const auto cfg = load_with_overrides(mb_o);
      const auto rep = eulerint::cmd_morse_bott(cfg);
      return emit(rep, mb_o, cfg.out_base, elapsed());
    }
    if (self->parsed()) {
      const auto rep = eulerint::cmd_selftest();
      return emit(rep, self_o, self_o.out_base, elapsed());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
