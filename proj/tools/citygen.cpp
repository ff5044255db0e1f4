#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "citygen/batch.hpp"
#include "citygen/errors.hpp"
#include "citygen/island.hpp"
#include "citygen/server.hpp"

using namespace citygen;

namespace {

int validate(const std::string& terrain_path) {
  try {
    const Terrain t = read_terrain_file(terrain_path);
    std::cout << terrain_path << ": ok " << t.width() << "x" << t.height() << " seed (" << t.seed().x << ", "
              << t.seed().y << ") sha256 " << terrain_sha256(t) << "\n";
    return kExitOk;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const Error& e) {
    std::cerr << "error: " << terrain_path << ": " << e.what() << "\n";
    return kExitInputError;
  }
}

int serve(const std::optional<std::string>& terrain_path, const std::optional<std::string>& params_path,
          std::uint64_t seed, ServerOptions options) {
  try {
    Terrain terrain = terrain_path ? read_terrain_file(*terrain_path) : generate_island(96, 96, seed);
    SimParams params = params_path ? read_params_file(*params_path) : SimParams{};
    Server server(std::move(terrain), std::move(params), seed, options);
    server.start();
    std::cout << "listening on http://" << options.address << ":" << server.port() << "/" << std::endl;
    server.wait();
    return kExitOk;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"citygen: agent-based procedural city simulator"};
  app.require_subcommand(1);

  RunConfig run;
  std::string terrain;
  std::optional<std::string> params;
  std::optional<std::string> script;
  std::optional<std::uint64_t> every;
  std::string out;
  auto* run_cmd = app.add_subcommand("run", "Run a headless simulation and write artifacts");
  run_cmd->add_option("--terrain", terrain, "Terrain file (canonical JSON or ASCII grid)")->required();
  run_cmd->add_option("--params", params, "SimParams JSON file");
  run_cmd->add_option("--seed", run.rng_seed, "RNG seed")->required();
  run_cmd->add_option("--ticks", run.n_ticks, "Number of ticks")->required();
  run_cmd->add_option("--every", every, "Write artifacts every N ticks")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", out, "Output directory")->required();
  run_cmd->add_option("--script", script, "Override script JSON file");

  std::string validate_terrain;
  auto* validate_cmd = app.add_subcommand("validate", "Validate a terrain file");
  validate_cmd->add_option("--terrain", validate_terrain, "Terrain file")->required();

  int gen_width = 64;
  int gen_height = 64;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic island terrain as canonical JSON");
  gen_cmd->add_option("--width", gen_width, "Grid width")->check(CLI::Range(1, 4096));
  gen_cmd->add_option("--height", gen_height, "Grid height")->check(CLI::Range(1, 4096));
  gen_cmd->add_option("--seed", gen_seed, "Noise seed");
  gen_cmd->add_option("--out", gen_out, "Output file")->required();

  ServerOptions options;
  std::optional<std::string> serve_terrain;
  std::optional<std::string> serve_params;
  std::optional<std::string> ui_dir;
  std::uint64_t serve_seed = 1;
  auto* serve_cmd = app.add_subcommand("serve", "Run a live simulation server");
  serve_cmd->add_option("--port", options.port, "TCP port (0 picks one)");
  serve_cmd->add_option("--address", options.address, "Bind address");
  serve_cmd->add_option("--terrain", serve_terrain, "Terrain file (default: generated 96x96 island)");
  serve_cmd->add_option("--params", serve_params, "SimParams JSON file");
  serve_cmd->add_option("--seed", serve_seed, "RNG seed");
  serve_cmd->add_option("--tps", options.ticks_per_second, "Ticks per second")->check(CLI::PositiveNumber);
  serve_cmd->add_option("--ui", ui_dir, "Directory with UI assets served under /");
  serve_cmd->add_flag("--paused", options.start_paused, "Start paused");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (*run_cmd) {
    run.terrain_path = terrain;
    if (params) run.params_path = *params;
    if (script) run.script_path = *script;
    run.snapshot_every = every;
    run.output_dir = out;
    return run_batch(run, std::cerr);
  }
  if (*validate_cmd) return validate(validate_terrain);
  if (*gen_cmd) {
    try {
      write_file(gen_out, to_canonical_json(generate_island(gen_width, gen_height, gen_seed)));
      return kExitOk;
    } catch (const IoError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitIoError;
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitInputError;
    }
  }
  if (ui_dir) options.ui_dir = *ui_dir;
  return serve(serve_terrain, serve_params, serve_seed, options);
}
