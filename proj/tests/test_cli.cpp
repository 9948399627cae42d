// End-to-end driver tests: every command exercised as a subprocess, exit
// codes checked against the documented contract (0 ok, 1 usage/IO, 2 coin
// validation, 3 property failure), and emitted files re-parsed and
// re-verified through the library.

#include <qws/io.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "support.hpp"

using namespace qws;
namespace fs = std::filesystem;
using qws::testing::ScratchDir;

namespace {

struct CliRun {
  int exitCode = -1;
  std::string out;
  std::string err;
};

std::string quoted(fs::path const& p) { return "\"" + p.string() + "\""; }

/// Runs the driver binary with the given arguments (optionally under an
/// environment prefix such as "QWS_THREADS=1"), capturing streams.
CliRun run_cli(ScratchDir const& dir, std::string const& args, std::string const& envPrefix = "") {
  fs::path const outFile = dir.path / "stdout.txt";
  fs::path const errFile = dir.path / "stderr.txt";
  std::string cmd = envPrefix.empty() ? std::string() : envPrefix + " ";
  cmd += quoted(QWS_CLI_PATH);
  cmd += " " + args + " > " + quoted(outFile) + " 2> " + quoted(errFile);
  int const status = std::system(cmd.c_str());
  CliRun r;
  r.exitCode = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(outFile);
  r.err = read_file(errFile);
  return r;
}

fs::path write_config(ScratchDir const& dir, std::string const& name, std::string const& coinName,
                      int n0, fs::path const& outDir, int windowL = 10) {
  ExperimentConfig cfg;
  cfg.coinName = coinName;
  cfg.n0 = n0;
  cfg.windowL = windowL;
  cfg.thetaGridPoints = 8;
  cfg.outDir = outDir.string();
  fs::path const path = dir.path / name;
  save_config(path, cfg);
  return path;
}

std::vector<double> csv_column(std::string const& csv, std::size_t column) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    for (std::size_t k = 0; k <= column; ++k) std::getline(ls, cell, ',');
    values.push_back(std::stod(cell));
  }
  return values;
}

}  // namespace

TEST_CASE("validate command reports the coin assumptions") {
  ScratchDir dir("cli_validate");
  fs::path const out = dir.path / "out";

  SECTION("builtin example coin passes") {
    fs::path const cfg = write_config(dir, "ok.json", "example1", 1, out);
    CliRun const r = run_cli(dir, "validate " + quoted(cfg));
    REQUIRE(r.exitCode == 0);
    nlohmann::json const rep = nlohmann::json::parse(r.out);
    REQUIRE(rep.at("ok").get<bool>());
    REQUIRE(rep.at("maxUnitaryDefect").get<double>() == 0.0);
  }

  SECTION("vanishing chirality minors are rejected with exit 2") {
    fs::path const cfg = write_config(dir, "grover.json", "grover", 1, out);
    CliRun const r = run_cli(dir, "validate " + quoted(cfg));
    REQUIRE(r.exitCode == 2);
    nlohmann::json const rep = nlohmann::json::parse(r.out);
    REQUIRE_FALSE(rep.at("ok").get<bool>());
    REQUIRE_FALSE(rep.at("offenders").empty());
    // Unitary but degenerate: the failure is the sub-determinant condition.
    REQUIRE(rep.at("offenders").at(0).at("unitaryOk").get<bool>());
    REQUIRE_FALSE(rep.at("offenders").at(0).at("minorsOk").get<bool>());
  }

  SECTION("missing or malformed configs exit 1") {
    CliRun const missing = run_cli(dir, "validate " + quoted(dir.path / "nope.json"));
    REQUIRE(missing.exitCode == 1);

    write_file_atomic(dir.path / "broken.json", "{not json");
    CliRun const broken = run_cli(dir, "validate " + quoted(dir.path / "broken.json"));
    REQUIRE(broken.exitCode == 1);

    CliRun const usage = run_cli(dir, "validate");
    REQUIRE(usage.exitCode == 1);
  }
}

TEST_CASE("smatrix command sweeps, re-verifies, and stays deterministic") {
  ScratchDir dir("cli_smatrix");

  SECTION("identity coin: sigma is exactly the identity at every grid point") {
    fs::path const out = dir.path / "out_id";
    fs::path const cfg = write_config(dir, "id.json", "identity", 1, out);
    CliRun const r = run_cli(dir, "smatrix " + quoted(cfg) + " --theta-grid 8 --svg");
    REQUIRE(r.exitCode == 0);

    for (int k = 0; k < 8; ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "smatrix_%03d.json", k);
      nlohmann::json const rec = nlohmann::json::parse(read_file(out / name));
      REQUIRE(rec.at("unitarityDefect").get<double>() == 0.0);
      REQUIRE(rec.at("corridorMax").get<double>() == 0.0);
      SMatrixBlock const block = smatrix_from_json(rec);
      Eigen::MatrixXcd const eye =
          Eigen::MatrixXcd::Identity(block.dimension(), block.dimension());
      REQUIRE((block.sigma - eye).cwiseAbs().maxCoeff() == 0.0);
      REQUIRE(block.A.cwiseAbs().maxCoeff() == 0.0);
    }
    REQUIRE(fs::exists(out / "smatrix_amplitudes.svg"));
    REQUIRE(csv_column(read_file(out / "smatrix_summary.csv"), 2) ==
            std::vector<double>(8, 0.0));
  }

  SECTION("example coin: emitted records re-verify through the library") {
    fs::path const out = dir.path / "out_ex";
    fs::path const cfg = write_config(dir, "ex.json", "example1", 1, out);
    CliRun const r = run_cli(dir, "smatrix " + quoted(cfg) + " --theta-grid 8");
    REQUIRE(r.exitCode == 0);

    for (int k = 0; k < 8; ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "smatrix_%03d.json", k);
      SMatrixBlock const block = smatrix_from_json(nlohmann::json::parse(read_file(out / name)));
      UnitarityReport const uni = check_unitarity(block);
      CorridorReport const cor = check_corridor(block);
      REQUIRE(uni.pass);
      REQUIRE(cor.pass);
      REQUIRE(block.theta == 2.0 * pi * k / 8);
    }
  }

  SECTION("outputs are byte-identical across reruns and thread counts") {
    fs::path const outA = dir.path / "a";
    fs::path const outB = dir.path / "b";
    fs::path const cfgA = write_config(dir, "a.json", "example1", 1, outA);
    fs::path const cfgB = write_config(dir, "b.json", "example1", 1, outB);
    REQUIRE(run_cli(dir, "smatrix " + quoted(cfgA) + " --theta-grid 6 --svg", "QWS_THREADS=1")
                .exitCode == 0);
    REQUIRE(run_cli(dir, "smatrix " + quoted(cfgB) + " --theta-grid 6 --svg", "QWS_THREADS=5")
                .exitCode == 0);
    for (auto const& entry : fs::directory_iterator(outA)) {
      fs::path const twin = outB / entry.path().filename();
      REQUIRE(fs::exists(twin));
      REQUIRE(read_file(entry.path()) == read_file(twin));
    }
  }

  SECTION("an unattainable tolerance turns the sweep into a property failure") {
    fs::path const cfg = write_config(dir, "tight.json", "example1", 1, dir.path / "out_tight");
    CliRun const r = run_cli(dir, "smatrix " + quoted(cfg) + " --theta-grid 4 --tol 1e-20");
    REQUIRE(r.exitCode == 3);
  }
}

TEST_CASE("eigenfunction command exports matching constructions") {
  ScratchDir dir("cli_eigen");
  fs::path const out = dir.path / "out";
  fs::path const cfg = write_config(dir, "ex.json", "example1", 1, out);

  SECTION("both methods agree after amplitude matching") {
    CliRun const r = run_cli(dir, "eigenfunction " + quoted(cfg) +
                                      " --theta 1.3 --row 0 --chirality L --method both --heatmap");
    REQUIRE(r.exitCode == 0);

    nlohmann::json const summary =
        nlohmann::json::parse(read_file(out / "eigenfunction_summary.json"));
    REQUIRE(summary.at("matchedDifferenceSup").get<double>() <= 1e-8);
    REQUIRE(summary.at("combinatorialResidual").get<double>() <= 1e-10);
    REQUIRE(summary.at("resolventResidual").get<double>() <= 1e-10);

    GridField const comb = read_field_csv(out / "eigenfunction_combinatorial.csv");
    GridField const res = read_field_csv(out / "eigenfunction_resolvent.csv");
    REQUIRE(comb.window().L == 10);
    REQUIRE(res.window().L == 10);

    // The exported difference is the matched residual field itself.
    GridField const diff = read_field_csv(out / "eigenfunction_difference.csv");
    double const match = std::sqrt(2.0 * pi);
    double worst = 0.0;
    diff.for_each_site([&](Site x) {
      for (Chirality p : all_chiralities)
        worst = std::max(worst, std::abs(diff.at(x, p) -
                                         (comb.at(x, p) - match * res.at(x, p))));
    });
    REQUIRE(worst == 0.0);

    for (char const* suffix : {"_L.pgm", "_R.pgm", "_D.pgm", "_U.pgm"}) {
      REQUIRE(fs::exists(out / (std::string("eigenfunction_combinatorial") + suffix)));
      REQUIRE(fs::exists(out / (std::string("eigenfunction_resolvent") + suffix)));
    }
  }

  SECTION("incidence offsets outside the box are usage errors") {
    CliRun const r =
        run_cli(dir, "eigenfunction " + quoted(cfg) + " --theta 1.3 --row 5 --chirality L");
    REQUIRE(r.exitCode == 1);
  }
}

TEST_CASE("evolve command echoes, conserves, and warns honestly") {
  ScratchDir dir("cli_evolve");
  fs::path const out = dir.path / "out";
  fs::path const cfg = write_config(dir, "ex.json", "example1", 1, out);

  std::mt19937_64 rng(4242);
  GridField const initial = qws::testing::random_field(Window(8), rng, 2);
  fs::path const initialPath = dir.path / "initial.csv";
  write_field_csv(initialPath, initial);

  SECTION("zero steps echo the initial field byte for byte") {
    CliRun const r =
        run_cli(dir, "evolve " + quoted(cfg) + " --steps 0 --initial " + quoted(initialPath));
    REQUIRE(r.exitCode == 0);
    REQUIRE(read_file(out / "evolution_final.csv") == field_to_csv(initial));
    REQUIRE(csv_column(read_file(out / "evolution_norms.csv"), 1).size() == 1);
  }

  SECTION("the l2 norm is conserved within the validity horizon") {
    CliRun const r =
        run_cli(dir, "evolve " + quoted(cfg) + " --steps 6 --initial " + quoted(initialPath));
    REQUIRE(r.exitCode == 0);
    REQUIRE(r.err.find("warning") == std::string::npos);  // 6 <= 8 - 2
    std::vector<double> const norms = csv_column(read_file(out / "evolution_norms.csv"), 1);
    REQUIRE(norms.size() == 7);
    for (double n : norms) REQUIRE(std::abs(n - norms.front()) <= 1e-12);
  }

  SECTION("steps beyond the validity horizon warn but still succeed") {
    CliRun const r =
        run_cli(dir, "evolve " + quoted(cfg) + " --steps 9 --initial " + quoted(initialPath));
    REQUIRE(r.exitCode == 0);
    REQUIRE(r.err.find("warning") != std::string::npos);
  }

  SECTION("malformed initial fields exit 1") {
    write_file_atomic(dir.path / "bad.csv", "wrong,header\n");
    CliRun const r = run_cli(dir, "evolve " + quoted(cfg) + " --steps 1 --initial " +
                                      quoted(dir.path / "bad.csv"));
    REQUIRE(r.exitCode == 1);
  }
}

TEST_CASE("verify command runs the property suites end to end") {
  ScratchDir dir("cli_verify");
  fs::path const out = dir.path / "out";
  fs::path const cfg = write_config(dir, "ex.json", "example1", 1, out);

  SECTION("every suite passes for the example coin") {
    for (std::string suite : {"kernels", "resolvents", "eigen", "smatrix", "all"}) {
      CliRun const r = run_cli(dir, "verify " + quoted(cfg) + " --suite " + suite);
      INFO("suite " << suite << "\n" << r.out << r.err);
      REQUIRE(r.exitCode == 0);
      nlohmann::json const report =
          nlohmann::json::parse(read_file(out / ("verify_" + suite + ".json")));
      REQUIRE(report.at("pass").get<bool>());
      for (auto const& c : report.at("criteria")) REQUIRE(c.at("pass").get<bool>());
    }
    nlohmann::json const all = nlohmann::json::parse(read_file(out / "verify_all.json"));
    REQUIRE(all.at("criteria").size() == 13);
  }

  SECTION("verdict files are byte-identical across reruns") {
    REQUIRE(run_cli(dir, "verify " + quoted(cfg) + " --suite smatrix").exitCode == 0);
    std::string const first = read_file(out / "verify_smatrix.json");
    REQUIRE(run_cli(dir, "verify " + quoted(cfg) + " --suite smatrix").exitCode == 0);
    REQUIRE(read_file(out / "verify_smatrix.json") == first);
  }

  SECTION("an unattainable tolerance is a property failure with a counterexample") {
    CliRun const r = run_cli(dir, "verify " + quoted(cfg) + " --suite kernels --tol 1e-20");
    REQUIRE(r.exitCode == 3);
    REQUIRE(r.err.find("property failure") != std::string::npos);
    nlohmann::json const report =
        nlohmann::json::parse(read_file(out / "verify_kernels.json"));
    REQUIRE_FALSE(report.at("pass").get<bool>());
    REQUIRE_FALSE(report.at("criteria").at(0).at("counterexample").get<std::string>().empty());
  }

  SECTION("coins that fail validation cannot be verified") {
    fs::path const groverCfg = write_config(dir, "grover.json", "grover", 1, out);
    CliRun const r = run_cli(dir, "verify " + quoted(groverCfg) + " --suite all");
    REQUIRE(r.exitCode == 2);
  }
}
