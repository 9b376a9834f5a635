// precourant: run verification tasks from a manifest.
// Exit status: 0 all tasks pass, 1 some task fails, 2 parse or usage error.

#include "precourant/runner.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Exact verification of pre-Courant algebroid identities"};
  std::string path;
  std::vector<std::string> tasks;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<unsigned> max_degree;
  bool json = false, quiet = false, timing = false;
  app.add_option("--manifest", path, "manifest file")->required();
  app.add_option("--task", tasks, "task to run (repeatable; default: the manifest's list)");
  app.add_option("--seed", seed, "sampling seed (default 0 or the manifest's)");
  app.add_option("--trials", trials, "seeded trials per check (default 16)");
  app.add_option("--max-degree", max_degree, "maximal degree of sampled coefficients (default 2)");
  app.add_flag("--json", json, "print the report as JSON");
  app.add_flag("--quiet", quiet, "print nothing; only the exit status");
  app.add_flag("--timing", timing, "record wall-clock seconds per task");
  app.set_version_flag("--version", precourant::kVersion);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read manifest '" << path << "'\n";
    return 2;
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    auto model = precourant::load_model(text, std::filesystem::path(path).stem().string());
    precourant::RunOptions opts{tasks, seed, trials, max_degree, timing};
    auto res = precourant::run(model, opts);
    if (!quiet) {
      if (json)
        std::cout << precourant::to_json(res).dump(2) << "\n";
      else
        std::cout << precourant::to_text(res);
    }
    return res.passed() ? 0 : 1;
  } catch (const precourant::manifest_error& e) {
    std::cerr << path << ":" << e.line() << ":" << e.column() << ": error: " << e.what() << "\n";
    return 2;
  } catch (const precourant::usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << path << ": error: " << e.what() << "\n";
    return 2;
  }
}
