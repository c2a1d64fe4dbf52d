#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <unistd.h>
#include <sstream>

#include "doctest.h"
#include "rbn/config.hpp"
#include "rbn/figures.hpp"
#include "rbn/harness.hpp"

using namespace rbn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("rbnlab-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return ExperimentConfig::from_key_values(read_key_values(in));
}

ExperimentConfig scan_config(const fs::path& out) {
  auto c = parse("kind = entropy-scan\nN = 6, 9\nI = 2\nK = 0.5:2:0.5\nsamples = 150\nseed = 11\n");
  c.output = out.string();
  return c;
}

ExperimentConfig measure_config(const fs::path& out) {
  auto c = parse(
      "kind = measure-curves\n"
      "N = 6\nK = 1, 2\nI = 2\n"
      "runs = 3\npopulation = 8\ngenerations = 6\n"
      "seed = 5\n");
  c.output = out.string();
  return c;
}

std::string error_field(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

int run_cli(const std::string& args) {
  const std::string command = std::string(RBNLAB_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("key-value files with comments") {
    std::istringstream in("# header\nN = 5, 10 # trailing\n\n  K=2\n");
    const auto kv = read_key_values(in);
    CHECK(kv.at("N") == "5, 10");
    CHECK(kv.at("K") == "2");
    std::istringstream bad("N 5\n");
    CHECK_THROWS_AS(read_key_values(bad), ParseError);
  }

  TEST_CASE("lists and ranges") {
    CHECK(parse_real_list("0.5:2:0.5") == std::vector<double>{0.5, 1.0, 1.5, 2.0});
    CHECK(parse_real_list("1, 3,0.25") == std::vector<double>{1.0, 3.0, 0.25});
    CHECK(parse_real_list("0.1:0.3:0.1") == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(parse_count_list("5,10:30:10") == std::vector<std::uint32_t>{5, 10, 20, 30});
    CHECK_THROWS_AS(parse_count_list("2.5"), ParseError);
    CHECK_THROWS_AS(parse_real_list("1:0:1"), ParseError);
    CHECK_THROWS_AS(parse_real_list("abc"), ParseError);
  }

  TEST_CASE("validation names the offending field") {
    CHECK(error_field([] { parse("N = 5\nK = 2\nI = 3\n").validate(); }) == "seed");
    CHECK(error_field([] { parse("K = 2\nI = 3\nseed = 1\n").validate(); }) == "N");
    CHECK(error_field([] { parse("N = 5\nI = 3\nseed = 1\n").validate(); }) == "K");
    CHECK(error_field([] { parse("N = 5\nK = 2\nI = 0\nseed = 1\n").validate(); }) == "I");
    CHECK(error_field([] { parse("N = 5\nK = -1\nI = 3\nseed = 1\n").validate(); }) == "K");
    CHECK(error_field([] { parse("kind = evolve-sweep\nN = 5\nK = 2\nI = 3\nseed = 1\ns = 0, 1\n").validate(); }) == "s");
    CHECK(error_field([] { parse("kind = evolve-sweep\nN = 5\nK = 2\nI = 3\nseed = 1\ntask = bitwise-and\n").validate(); }) == "I");
    CHECK(error_field([] { parse("kind = evolve-sweep\nN = 5\nK = 2\nI = 3\nseed = 1\ncrossover = 2\n").validate(); }) == "crossover");
    CHECK(error_field([] { parse("bogus = 1\n"); }) == "bogus");
    CHECK(error_field([] { parse("N = five\n"); }) == "N");
    CHECK(error_field([] { parse("kind = party\n"); }) == "kind");
    CHECK(error_field([] { parse("feedforward = maybe\n"); }) == "feedforward");
  }

  TEST_CASE("the hash ignores workers and output but not results-relevant keys") {
    auto a = parse("N = 5\nK = 2\nI = 3\nseed = 1\n");
    auto b = a;
    b.workers = 8;
    b.output = "elsewhere";
    CHECK(a.hash() == b.hash());
    b.seed = 2;
    CHECK(a.hash() != b.hash());
  }

  TEST_CASE("sample sizes from fractions") {
    auto c = parse("kind = evolve-sweep\nN = 5\nK = 2\nI = 3\nseed = 1\ns = 0.25, 0.5, 1\n");
    CHECK(sample_sizes(c, 3) == std::vector<std::uint64_t>{2, 4, 8});
    c.fractions.clear();
    CHECK(sample_sizes(c, 3).size() == 8);
  }

  TEST_CASE("mapping permutations are fixed by the master seed") {
    auto c = parse("kind = evolve-sweep\nN = 5\nK = 2\nI = 4\nseed = 1\ntask = mapping\n");
    const auto t1 = make_task(c, 4);
    const auto t2 = make_task(c, 4);
    for (std::uint64_t p = 0; p < 16; ++p) CHECK(t1.target(p) == t2.target(p));
  }
}

TEST_SUITE("runs") {
  TEST_CASE("an empty grid fails validation and writes nothing") {
    const auto dir = scratch("empty");
    auto c = scan_config(dir);
    c.connectivity.clear();
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
    CHECK_FALSE(fs::exists(dir));
  }

  TEST_CASE("entropy scan writes a landscape and a manifest") {
    const auto dir = scratch("scan");
    const auto m = run_experiment(scan_config(dir));
    CHECK(m.kind == "entropy-scan");
    CHECK(m.cells == 8);
    const auto text = slurp(dir / "landscape.csv");
    CHECK(text.rfind("N,K,I,samples,entropy_bits\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 9);
    const auto loaded = ResultManifest::load(dir);
    CHECK(loaded.config_hash == m.config_hash);
    REQUIRE(loaded.files.size() == 1);
    CHECK(loaded.files[0].checksum == file_checksum(dir / "landscape.csv"));
  }

  TEST_CASE("results do not depend on the worker count") {
    const auto one = scratch("w1");
    const auto many = scratch("w4");
    auto c = measure_config(one);
    c.workers = 1;
    run_experiment(c);
    c.output = many.string();
    c.workers = 4;
    run_experiment(c);
    for (const auto* name : {"runs.jsonl", "curves.csv", "cumulative.csv", "fitness_std.csv"}) {
      CHECK(slurp(one / name) == slurp(many / name));
    }
  }

  TEST_CASE("an interrupted run resumes to identical files") {
    const auto whole = scratch("whole");
    run_experiment(scan_config(whole));

    const auto part = scratch("part");
    run_experiment(scan_config(part));
    // Simulate a crash after three cells: drop later journal lines, leave a
    // torn row in the output and remove the manifest.
    std::istringstream journal(slurp(part / "progress.log"));
    std::string kept, line;
    for (int i = 0; i < 4 && std::getline(journal, line); ++i) kept += line + "\n";
    std::ofstream(part / "progress.log", std::ios::trunc) << kept << "cell 3 9";
    std::ofstream(part / "landscape.csv", std::ios::app) << "6,9.9,2,150,0.1";
    fs::remove(part / "manifest.json");

    const auto m = run_experiment(scan_config(part));
    CHECK(m.resumed_cells == 3);
    CHECK(slurp(part / "landscape.csv") == slurp(whole / "landscape.csv"));
    CHECK(slurp(part / "progress.log") == slurp(whole / "progress.log"));
  }

  TEST_CASE("a directory from another config is refused") {
    const auto dir = scratch("mismatch");
    run_experiment(scan_config(dir));
    auto other = scan_config(dir);
    other.samples = 151;
    CHECK_THROWS_AS(run_experiment(other), ResumeMismatchError);
  }

  TEST_CASE("evolve sweeps stream runs and generations") {
    const auto dir = scratch("sweep");
    auto c = measure_config(dir);
    c.kind = ExperimentKind::EvolveSweep;
    c.fractions = {0.5, 1.0};
    run_experiment(c);
    const auto runs = slurp(dir / "runs.jsonl");
    CHECK(std::count(runs.begin(), runs.end(), '\n') == 2 * 2 * 3);
    CHECK(runs.rfind("{\"N\":6,\"K\":1.0,\"I\":2,\"s\":0.5,\"run\":0,\"f_final\":", 0) == 0);
    CHECK(slurp(dir / "generations.csv").rfind("N,K,I,s,run,gen,best_f,mean_f,std_f\n", 0) == 0);
  }
}

TEST_SUITE("figures") {
  TEST_CASE("cumulative projections and spread tables") {
    const auto dir = scratch("figs");
    run_experiment(measure_config(dir));

    const auto fig8 = figure_data(dir, "fig8");
    CHECK(fig8.find("# columns: K cum_learning_prob cum_training_likelihood\n") != std::string::npos);
    CHECK(fig8.find("\nK,cum_learning_prob,cum_training_likelihood\n1,") != std::string::npos);

    const auto fig12 = figure_data(dir, "fig12");
    CHECK(fig12.find("\nI,K,gen,mean_std_f\n2,1,0,") != std::string::npos);

    CHECK(figure_data(dir, "fig5").find("learning_probability") != std::string::npos);
    CHECK_THROWS_AS(figure_data(dir, "fig4"), FigureCoverageError);
    CHECK_THROWS_AS(figure_data(dir, "fig2"), FigureCoverageError);
    CHECK_THROWS_AS(figure_data(dir, "fig99"), FigureCoverageError);
    CHECK(figure_catalog().size() == 11);
  }

  TEST_CASE("entropy landscape figure") {
    const auto dir = scratch("fig2");
    run_experiment(scan_config(dir));
    const auto fig2 = figure_data(dir, "fig2");
    CHECK(fig2.find("N,I,K,entropy_bits\n6,2,0.5,") != std::string::npos);
    CHECK_THROWS_AS(figure_data(dir, "fig8"), FigureCoverageError);
  }
}

TEST_SUITE("command line") {
  TEST_CASE("exit codes") {
    const auto dir = scratch("cli");
    const std::string grid = "--set N=5 --set I=2 --set K=1,2 --set samples=50 ";
    CHECK(run_cli("entropy-scan " + grid + "--seed 3 --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(run_cli("entropy-scan " + grid + "--out " + (dir / "x").string()) == 2);  // no seed
    CHECK(run_cli("entropy-scan " + grid + "--set K= --seed 3 --out " + (dir / "y").string()) == 2);
    CHECK(run_cli("entropy-scan " + grid + "--seed 4 --out " + dir.string()) == 3);
    CHECK(run_cli("figure --results " + dir.string() + " --id fig2") == 0);
    CHECK(run_cli("figure --results " + dir.string() + " --id nope") == 2);
  }

  TEST_CASE("the default output root comes from the environment") {
    const auto root = scratch("root");
    const std::string command = "RBNLAB_OUTPUT_ROOT=" + root.string() + " " + RBNLAB_BINARY +
                                " entropy-scan --set N=5 --set I=2 --set K=1 --set samples=20 --seed 1 -q >/dev/null 2>&1";
    CHECK(std::system(command.c_str()) == 0);
    bool found = false;
    for (const auto& e : fs::directory_iterator(root)) found = found || fs::exists(e.path() / "manifest.json");
    CHECK(found);
  }
}
