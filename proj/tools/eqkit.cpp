// eqkit command line. Each subcommand fills a RunConfig and hands it to run().

#include "eqkit/error.hpp"
#include "eqkit/run.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using eqkit::BcKind;
using eqkit::Command;
using eqkit::RunConfig;

struct Raw {
  std::string bc = "specular";
  std::string x0 = "0,0,0";
  std::string x = "0,0,0";
};

void add_common(CLI::App* sub, RunConfig& c, Raw& raw, bool with_bc) {
  if (with_bc) {
    sub->add_option("--bc", raw.bc, "bounce_back or specular")
        ->check(CLI::IsMember({"bounce_back", "specular"}))
        ->capture_default_str();
  }
  sub->add_option("--samples", c.samples, "boundary samples")->capture_default_str();
  sub->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
  sub->add_option("--tol", c.tol, "relative singular value threshold")->capture_default_str();
  sub->add_option("--out", c.out, "output path (default stdout)");
}

int emit(const RunConfig& c, const eqkit::RunResult& r) {
  const std::string json = r.report.dump(2) + "\n";
  const bool csv_mode = c.command == Command::Trace && r.exit_code == 0;
  if (r.exit_code == 1) std::cerr << "eqkit: " << r.report["error"]["message"].get<std::string>() << "\n";
  if (csv_mode) {
    if (c.out.empty()) {
      std::cout << r.csv;
      return 0;
    }
    std::ofstream(c.out, std::ios::binary) << r.csv;
    std::cout << json;
    return 0;
  }
  if (c.out.empty()) {
    std::cout << json;
  } else {
    std::ofstream out(c.out, std::ios::binary);
    if (!out) {
      std::cerr << "eqkit: cannot write " << c.out << "\n";
      std::cout << json;
      return 1;
    }
    out << json;
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eqkit: admissible Maxwellians for kinetic boundary problems"};
  app.set_version_flag("--version", eqkit::tool_version());
  app.require_subcommand(1);

  RunConfig c;
  Raw raw;

  auto* classify = app.add_subcommand("classify", "nullspace and symmetry class of a domain");
  classify->add_option("--domain", c.domain_file, "domain TOML")->required();
  classify->add_option("--dump-matrix", c.dump_matrix, "write the constraint matrix as CSV");
  add_common(classify, c, raw, true);

  auto* verify = app.add_subcommand("verify", "check a Maxwellian against a domain");
  verify->add_option("--params", c.params_file, "params TOML")->required();
  verify->add_option("--domain", c.domain_file, "domain TOML")->required();
  add_common(verify, c, raw, true);

  auto* trace = app.add_subcommand("trace", "integrate a symmetry field, CSV output");
  trace->add_option("--field", c.field_file, "field TOML")->required();
  trace->add_option("--x0", raw.x0, "start point, comma separated")->capture_default_str();
  trace->add_option("--t-end", c.t_end, "final time")->capture_default_str();
  trace->add_option("--steps", c.steps, "number of steps")->capture_default_str();
  trace->add_option("--method", c.method, "closed_form or rk4")
      ->check(CLI::IsMember({"closed_form", "rk4"}))
      ->capture_default_str();
  trace->add_option("--domain", c.domain_file, "report the on-surface defect for this domain");
  trace->add_option("--out", c.out, "CSV path (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "particle stationarity test");
  simulate->add_option("--params", c.params_file, "params TOML")->required();
  simulate->add_option("--domain", c.domain_file, "domain TOML")->required();
  simulate->add_option("-N,--particles", c.particles, "particle count")->capture_default_str();
  simulate->add_option("--t-end", c.t_end, "final time")->capture_default_str();
  simulate->add_option("--checkpoints", c.checkpoints, "intermediate times")->delimiter(',');
  simulate->add_option("--threads", c.threads, "worker threads (0: all cores)")
      ->capture_default_str();
  simulate->add_option("--dump-particles", c.dump_particles, "write final particles as CSV");
  add_common(simulate, c, raw, true);

  auto* factor = app.add_subcommand("factor", "factored form at one (t, x)");
  factor->add_option("--params", c.params_file, "params TOML")->required();
  factor->add_option("--t", c.t, "time")->capture_default_str();
  factor->add_option("--x", raw.x, "position, comma separated")->capture_default_str();
  factor->add_option("--out", c.out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand(classify)) c.command = Command::Classify;
  if (app.got_subcommand(verify)) c.command = Command::Verify;
  if (app.got_subcommand(trace)) c.command = Command::Trace;
  if (app.got_subcommand(simulate)) c.command = Command::Simulate;
  if (app.got_subcommand(factor)) c.command = Command::Factor;

  try {
    c.bc = eqkit::bc_from_string(raw.bc);
    c.x0 = eqkit::parse_vector(raw.x0);
    c.x = eqkit::parse_vector(raw.x);
  } catch (const eqkit::Error& e) {
    std::cerr << "eqkit: " << e.what() << "\n";
    return 1;
  }
  return emit(c, eqkit::run(c));
}
