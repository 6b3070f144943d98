// entlat: generate the sqrt(SWAP)^dag chain state, run the entanglement
// detection protocols, and emit figure data.

#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "entlat/cli_commands.hpp"

namespace {

void add_common_flags(CLI::App* cmd, entlat::RunConfig& config) {
  cmd->add_option("--n", config.n, "qubit count (even)");
  cmd->add_option("--p-sf", config.noise.p_sf, "correct spin-flip probability");
  cmd->add_option("--p-ms", config.noise.p_ms, "correct readout probability");
  cmd->add_option("--p-es", config.noise.p_es, "entangling-step success probability");
  cmd->add_option("--p-white", config.noise.p_white, "white-noise admixture");
  cmd->add_option("--shots", config.shots, "shots per setting (0 = exact)");
  cmd->add_option("--seed", config.seed, "RNG master seed")->each([&config](const std::string&) {
    config.seed_set = true;
  });
  cmd->add_option("--out", config.out_path, "output file (stdout if omitted)");
  cmd->add_option("--format", config.format, "csv|json");
}

void emit(const entlat::RunConfig& config, const std::string& text) {
  if (config.out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
  } else {
    entlat::write_file(config.out_path, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sqrt(SWAP)^dag chain entanglement toolkit"};
  app.require_subcommand(1);

  entlat::RunConfig config;

  auto* prepare = app.add_subcommand("prepare", "target-state summary");
  add_common_flags(prepare, config);

  auto* witness = app.add_subcommand("witness", "run a detection protocol");
  add_common_flags(witness, config);
  witness->add_option("--method", config.method, "fidelity|homogeneous|reverse")->required();

  auto* sweep = app.add_subcommand("sweep", "emit figure data");
  add_common_flags(sweep, config);
  sweep->add_option("--figure", config.figure, "fig5a|fig5b|fig5c|hubbard")->required();

  auto* hubbard = app.add_subcommand("hubbard", "gate-fidelity sweep CSV");
  add_common_flags(hubbard, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : entlat::kExitConfig;
  }

  try {
    if (prepare->parsed()) {
      config.subcommand = "prepare";
      emit(config, entlat::cmd_prepare(config).dump(2));
    } else if (witness->parsed()) {
      config.subcommand = "witness";
      emit(config, entlat::cmd_witness(config).dump(2));
    } else if (sweep->parsed() || hubbard->parsed()) {
      if (hubbard->parsed()) {
        config.subcommand = "hubbard";
        config.figure = "hubbard";
        config.format = "csv";
      } else {
        config.subcommand = "sweep";
      }
      const auto out = entlat::cmd_sweep(config);
      if (config.format == "csv") {
        emit(config, out.csv);
        if (!config.out_path.empty()) {
          entlat::write_file(config.out_path + ".json", out.sidecar.dump(2));
        }
      } else {
        nlohmann::json combined = out.sidecar;
        combined["csv"] = out.csv;
        emit(config, combined.dump(2));
      }
    }
  } catch (const entlat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return entlat::kExitConfig;
  } catch (const entlat::InvariantError& e) {
    std::cerr << "numerical invariant violated: " << e.what() << '\n';
    return entlat::kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return entlat::kExitInvariant;
  }
  return entlat::kExitOk;
}
