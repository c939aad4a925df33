// Command-line front end for the parametric-coupling simulator.
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "paramsim/runners.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Parametrically driven qubit-coupler simulator"};
  app.require_subcommand(1);

  paramsim::CliOptions options;
  if (const char* env = std::getenv("PARAMSIM_WORKERS")) {
    try {
      options.workers = std::max(1, std::stoi(env));
    } catch (...) {
      options.workers = 1;
    }
  }

  std::string config_path;
  std::string model;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file")->required();
    cmd->add_option("--out", options.out_dir, "output directory (overrides output.dir)");
    cmd->add_option("--workers", options.workers, "parallel sweep workers");
    cmd->add_flag("--calibrate", options.calibrate,
                  "calibrate effective frequencies by contrast maximization");
    cmd->add_option("--model", model, "protocol model: full or effective")
        ->check(CLI::IsMember({"full", "effective"}));
    cmd->add_flag("--full-lindblad", options.full_lindblad,
                  "allow the expensive full-model Lindblad propagation");
  };

  const char* names[] = {"couplings", "gate",      "anneal",
                         "anneal-sweep", "topt-scan", "coherence-sweep"};
  const char* descriptions[] = {
      "effective XX/YY couplings over a modulation-amplitude grid",
      "dynamic coupling extraction and XX-gate fidelity per delta1",
      "single adiabatic ground-state run",
      "adiabatic runs over every molecule-table row",
      "optimal-runtime scan under dissipation",
      "energy error versus qubit coherence time"};
  for (int i = 0; i < 6; ++i) add_common(app.add_subcommand(names[i], descriptions[i]));

  CLI11_PARSE(app, argc, argv);

  if (model == "full") options.model_full = true;
  if (model == "effective") options.model_full = false;

  const auto* sub = app.get_subcommands().front();
  return paramsim::run_subcommand(sub->get_name(), config_path, options);
}
