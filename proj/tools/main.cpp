#include <iostream>

#include "CLI11.hpp"
#include "zfwedge/cli.hpp"

using namespace zfw;

namespace {

void add_common(CLI::App* app, RunConfig& c, std::vector<std::string>& blaschke, int& N, double& B) {
  app->add_option("--model", c.family, "zn, cdd or toda")->check(CLI::IsMember({"zn", "cdd", "toda"}));
  app->add_option("--N", N, "number of species plus one");
  app->add_option("--m1", c.m1, "mass of species 1");
  app->add_option("--B", B, "Toda coupling in [0, 2]");
  app->add_option("--blaschke", blaschke, "kind:k:re:im, repeatable");
  app->add_option("--tol-alg", c.tol_alg, "algebraic identities");
  app->add_option("--tol-quad", c.tol_quad, "single-quadrature identities");
  app->add_option("--tol-residue", c.tol_residue, "residue extraction against circle quadrature");
  app->add_option("--tol-comm", c.tol_comm, "normalized weak commutator");
  app->add_option("--tol-err", c.tol_err, "normalized quadrature error estimate");
  app->add_option("--tol-counter", c.counterexample_floor, "lower bound for the counterexample run");
  app->add_option("--seed", c.seed);
  app->add_option("--quad-nodes", c.quad.nodes_per_axis, "Gauss-Legendre nodes per Gaussian axis");
  app->add_option("--quad-L", c.quad.L_widths, "truncation in Gaussian widths");
  app->add_option("--quad-fine", c.quad.fine_nodes, "nodes on test-function windows");
  app->add_option("--quad-inner", c.quad.inner_nodes, "nodes for inner integrals");
  app->add_option("--nmax", c.nmax, "largest particle number");
  app->add_flag("--no-zero-factor", "drop the coincident-point zero from the vectors");
  app->add_option("--out", c.out_dir, "report directory");
  app->add_option("--format", c.format, "json or csv sidecar tables")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zfwedge: scattering models, bound-state fields and wedge-local commutators"};
  app.require_subcommand(1);
  RunConfig config;
  std::vector<std::string> blaschke;
  int N = 0;
  double B = 0.0;
  std::vector<CLI::App*> subs;
  for (const std::string& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub, config, blaschke, N, B);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--N")) config.N = N;
  if (sub->count("--B")) config.B = B;
  config.zero_factor = sub->count("--no-zero-factor") == 0;
  try {
    for (const std::string& b : blaschke) config.blaschke.push_back(parse_blaschke(b));
    const CommandResult r = run_command(sub->get_name(), config);
    for (const std::string& line : r.summary) std::cout << line << "\n";
    for (const std::string& f : r.files) std::cout << "wrote " << f << "\n";
    std::cout << "status " << r.report["status"].get<std::string>() << "\n";
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitIndeterminate;
  }
}
