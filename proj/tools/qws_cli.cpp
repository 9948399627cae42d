// Command-line driver: config ingestion, theta sweeps, eigenfunction export,
// time evolution, and the verification suites.
//
// Exit codes: 0 ok, 1 usage/IO error, 2 coin validation failure, 3 property
// failure. QWS_THREADS caps the number of worker threads for theta sweeps;
// each theta's pipeline runs sequentially and files are written in
// deterministic order after all workers finish.

#include <CLI11.hpp>

#include <qws/io.hpp>
#include <qws/verify.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace qws;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

struct CommonOptions {
  std::string configPath;
  std::string outDir;  // empty: keep the config's choice
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  CLI::Option* tolOpt = nullptr;
  CLI::Option* seedOpt = nullptr;
};

void attach_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("config", opts.configPath, "experiment config (JSON)")
      ->required();
  cmd->add_option("--out", opts.outDir, "output directory (overrides config)");
  opts.tolOpt = cmd->add_option("--tol", opts.tolerance,
                                "tolerance override (overrides config)");
  opts.seedOpt = cmd->add_option("--seed", opts.seed,
                                 "seed for randomized checks (overrides config)");
}

ExperimentConfig load_effective_config(CommonOptions const& opts) {
  ExperimentConfig cfg = load_config(opts.configPath);
  if (!opts.outDir.empty()) cfg.outDir = opts.outDir;
  if (opts.tolOpt != nullptr && opts.tolOpt->count() > 0) cfg.tolerance = opts.tolerance;
  if (opts.seedOpt != nullptr && opts.seedOpt->count() > 0) cfg.seed = opts.seed;
  return cfg;
}

std::string coin_label(ExperimentConfig const& cfg) {
  return cfg.cells.empty() ? cfg.coinName : std::string("custom");
}

int thread_cap(std::size_t jobs) {
  long requested = 0;
  if (char const* env = std::getenv("QWS_THREADS")) {
    char* end = nullptr;
    long const v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) requested = v;
  }
  if (requested == 0) {
    unsigned const hc = std::thread::hardware_concurrency();
    requested = hc != 0 ? static_cast<long>(hc) : 1;
  }
  if (jobs == 0) jobs = 1;
  return static_cast<int>(std::min<long>(requested, static_cast<long>(jobs)));
}

// Runs fn(0..n-1) on up to QWS_THREADS workers; rethrows the first failure.
template <class F>
void parallel_for(std::size_t n, F&& fn) {
  int const workers = thread_cap(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex errorMutex;
  std::exception_ptr error;
  auto const worker = [&] {
    for (;;) {
      std::size_t const i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(errorMutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int k = 0; k < workers; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

nlohmann::json validation_to_json(ValidationReport const& rep) {
  nlohmann::json offenders = nlohmann::json::array();
  for (auto const& cell : rep.offenders) {
    offenders.push_back({{"x1", cell.x.x1},
                         {"x2", cell.x.x2},
                         {"unitaryDefect", cell.unitaryDefect},
                         {"oddMinorAbs", cell.oddMinorAbs},
                         {"evenMinorAbs", cell.evenMinorAbs},
                         {"unitaryOk", cell.unitaryOk},
                         {"minorsOk", cell.minorsOk}});
  }
  return {{"unitaryTol", rep.unitaryTol},
          {"minorFloor", rep.minorFloor},
          {"maxUnitaryDefect", rep.maxUnitaryDefect},
          {"minOddMinorAbs", rep.minOddMinorAbs},
          {"minEvenMinorAbs", rep.minEvenMinorAbs},
          {"offenders", offenders},
          {"ok", rep.ok()}};
}

// Gate shared by the scattering commands: the spectral constructions are only
// defined for unitary coins whose chirality minors stay away from zero.
bool require_valid_coin(CoinField const& coin) {
  ValidationReport const rep = validate_coin(coin);
  if (rep.ok()) return true;
  std::cerr << "coin validation failed (" << rep.offenders.size()
            << " offending cell(s)); run the validate command for details\n";
  return false;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int cmd_validate(CommonOptions const& opts) {
  ExperimentConfig const cfg = load_effective_config(opts);
  CoinField const coin = make_coin(cfg);
  ValidationReport const rep = validate_coin(coin);
  std::cout << validation_to_json(rep).dump(2) << "\n";
  return rep.ok() ? 0 : 2;
}

// ---------------------------------------------------------------------------
// smatrix
// ---------------------------------------------------------------------------

struct SmatrixOptions {
  CommonOptions common;
  int thetaGrid = 0;  // 0: use the config's theta spec
  bool svg = false;
};

std::string smatrix_summary_csv(std::vector<double> const& thetas,
                                std::vector<SMatrixBlock> const& blocks,
                                std::vector<UnitarityReport> const& unis,
                                std::vector<CorridorReport> const& cors) {
  std::string csv = "theta,m,unitarityDefect,corridorMax\n";
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    double const defect = std::max(unis[k].defectRight, unis[k].defectLeft);
    csv += format_double(thetas[k]) + "," + std::to_string(blocks[k].transverseRange) + "," +
           format_double(defect) + "," + format_double(cors[k].bandMax) + "\n";
  }
  return csv;
}

int cmd_smatrix(SmatrixOptions const& opts) {
  ExperimentConfig cfg = load_effective_config(opts.common);
  if (opts.thetaGrid > 0) {
    cfg.thetaGridPoints = opts.thetaGrid;
    cfg.thetaList.clear();
  }
  CoinField const coin = make_coin(cfg);
  if (!require_valid_coin(coin)) return 2;

  std::vector<double> const thetas = theta_values(cfg);
  double const unitarityTol = cfg.tolerance > 0 ? cfg.tolerance : kUnitarityTolerance;
  double const corridorTol = cfg.tolerance > 0 ? cfg.tolerance : kCorridorTolerance;
  int const m = coin.n0() + 2;

  std::vector<SMatrixBlock> blocks(thetas.size());
  std::vector<UnitarityReport> unis(thetas.size());
  std::vector<CorridorReport> cors(thetas.size());
  parallel_for(thetas.size(), [&](std::size_t k) {
    blocks[k] = compute_A(coin, thetas[k], m);
    unis[k] = check_unitarity(blocks[k]);
    cors[k] = check_corridor(blocks[k]);
  });

  fs::path const out{cfg.outDir};
  bool anyFailure = false;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "smatrix_%03zu.json", k);
    write_file_atomic(out / name, smatrix_record(blocks[k], unis[k], cors[k]).dump(2) + "\n");
    double const defect = std::max(unis[k].defectRight, unis[k].defectLeft);
    bool const ok = defect <= unitarityTol && cors[k].bandMax <= corridorTol;
    anyFailure = anyFailure || !ok;
    std::cout << (ok ? "OK  " : "FAIL") << " theta=" << format_double(thetas[k])
              << " unitarityDefect=" << format_double(defect)
              << " corridorMax=" << format_double(cors[k].bandMax) << "\n";
  }
  write_file_atomic(out / "smatrix_summary.csv",
                    smatrix_summary_csv(thetas, blocks, unis, cors));

  if (opts.svg) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> series;
    for (Chirality p : {Chirality::Left, Chirality::Right, Chirality::Down, Chirality::Up}) {
      names.push_back(std::string("|S_") + chirality_label(p) + "L|");
      std::vector<double> values;
      values.reserve(thetas.size());
      for (auto const& block : blocks)
        values.push_back(
            std::abs(block.sigma(block.index(p, 0), block.index(Chirality::Left, 0))));
      series.push_back(std::move(values));
    }
    write_file_atomic(out / "smatrix_amplitudes.svg",
                      svg_line_plot("central scattering amplitudes", thetas, names, series));
  }

  std::cout << (anyFailure ? "FAIL" : "OK") << ": " << thetas.size()
            << " theta point(s), unitarity tolerance " << format_double(unitarityTol)
            << ", corridor tolerance " << format_double(corridorTol) << "\n";
  return anyFailure ? 3 : 0;
}

// ---------------------------------------------------------------------------
// eigenfunction
// ---------------------------------------------------------------------------

struct EigenfunctionOptions {
  CommonOptions common;
  double theta = 0.0;
  int b = 0;
  std::string chirality = "L";
  std::string method = "both";
  bool heatmap = false;
};

void write_heatmaps(fs::path const& out, std::string const& stem, GridField const& f) {
  for (Chirality p : {Chirality::Left, Chirality::Right, Chirality::Down, Chirality::Up}) {
    std::string const name = stem + "_" + chirality_label(p) + ".pgm";
    write_file_atomic(out / name, field_heatmap_pgm(f, p));
  }
}

int cmd_eigenfunction(EigenfunctionOptions const& opts) {
  ExperimentConfig const cfg = load_effective_config(opts.common);
  CoinField const coin = make_coin(cfg);
  if (!require_valid_coin(coin)) return 2;

  Chirality const p = chirality_from_label(opts.chirality.at(0));
  int const n0 = coin.n0();
  if (opts.b < -n0 || opts.b > n0) {
    std::cerr << "row offset " << opts.b << " outside the incidence range [" << -n0 << ", "
              << n0 << "]\n";
    return 1;
  }

  Window const w{cfg.windowL};
  double const residualTol = cfg.tolerance > 0 ? cfg.tolerance : 1e-10;
  double const differenceTol = cfg.tolerance > 0 ? cfg.tolerance : 1e-8;
  bool const wantCombinatorial = opts.method != "resolvent";
  bool const wantResolvent = opts.method != "combinatorial";
  fs::path const out{cfg.outDir};

  nlohmann::json summary{{"theta", opts.theta},
                         {"b", opts.b},
                         {"chirality", std::string(1, chirality_label(p))},
                         {"method", opts.method},
                         {"window", w.L}};
  bool anyFailure = false;
  GridField combinatorial{Window(1)}, resolvent{Window(1)};

  if (wantCombinatorial) {
    CombinatorialEigenfunction const eig = combinatorial_eigenfunction(coin, opts.theta, opts.b, p);
    combinatorial = eig.psi.materialize(w);
    double const residual = eigen_residual(coin, eig.psi, opts.theta, w);
    write_field_csv(out / "eigenfunction_combinatorial.csv", combinatorial);
    if (opts.heatmap) write_heatmaps(out, "eigenfunction_combinatorial", combinatorial);
    summary["combinatorialResidual"] = residual;
    anyFailure = anyFailure || residual > residualTol;
    std::cout << "combinatorial residual " << format_double(residual) << "\n";
  }
  if (wantResolvent) {
    BoundarySystem const minusSystem(coin, opts.theta, Side::MinusI0);
    FieldEvaluator const u =
        fpm_star(minusSystem, delta_channel(opts.theta, n0, p, opts.b), Side::PlusI0);
    resolvent = u.materialize(w);
    double const residual = eigen_residual(coin, u, opts.theta, w);
    write_field_csv(out / "eigenfunction_resolvent.csv", resolvent);
    if (opts.heatmap) write_heatmaps(out, "eigenfunction_resolvent", resolvent);
    summary["resolventResidual"] = residual;
    anyFailure = anyFailure || residual > residualTol;
    std::cout << "resolvent residual " << format_double(residual) << "\n";
  }
  if (wantCombinatorial && wantResolvent) {
    // The combinatorial eigenfunction normalizes the incident plane wave to
    // amplitude one; the distorted synthesis of a delta channel carries a
    // 1/sqrt(2 pi) from the transform convention. Match before differencing.
    double const match = std::sqrt(2.0 * pi);
    GridField difference{w};
    double sup = 0.0;
    difference.for_each_site([&](Site x) {
      Vec4 const d = combinatorial.value(x) - match * resolvent.value(x);
      difference.set(x, d);
      sup = std::max(sup, d.cwiseAbs().maxCoeff());
    });
    write_field_csv(out / "eigenfunction_difference.csv", difference);
    summary["amplitudeMatchFactor"] = match;
    summary["matchedDifferenceSup"] = sup;
    anyFailure = anyFailure || sup > differenceTol;
    std::cout << "matched difference sup " << format_double(sup) << "\n";
  }

  write_file_atomic(out / "eigenfunction_summary.json", summary.dump(2) + "\n");
  return anyFailure ? 3 : 0;
}

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------

struct EvolveOptions {
  CommonOptions common;
  int steps = 0;
  std::string initialPath;
};

int cmd_evolve(EvolveOptions const& opts) {
  ExperimentConfig const cfg = load_effective_config(opts.common);
  CoinField const coin = make_coin(cfg);
  // Time evolution only needs unitarity; the minor conditions gate the
  // scattering constructions, not the walk itself.
  ValidationReport const rep = validate_coin(coin);
  if (rep.maxUnitaryDefect > rep.unitaryTol) {
    std::cerr << "coin is not unitary (defect " << format_double(rep.maxUnitaryDefect) << ")\n";
    return 2;
  }

  GridField field = read_field_csv(opts.initialPath);
  int const L = field.window().L;
  int supportRadius = 0;
  field.for_each_site([&](Site x) {
    if (field.value(x).cwiseAbs().maxCoeff() != 0.0)
      supportRadius = std::max(supportRadius, std::max(std::abs(x.x1), std::abs(x.x2)));
  });
  int const validity = L - supportRadius;
  if (opts.steps > validity)
    std::cerr << "warning: " << opts.steps << " step(s) exceed the window validity horizon "
              << validity << "; values within " << (opts.steps - validity)
              << " site(s) of the boundary are truncated\n";

  std::string norms = "t,l2_norm\n";
  norms += "0," + format_double(l2_norm(field)) + "\n";
  for (int t = 1; t <= opts.steps; ++t) {
    field = evolve(coin, std::move(field), 1).field;
    norms += std::to_string(t) + "," + format_double(l2_norm(field)) + "\n";
  }

  fs::path const out{cfg.outDir};
  write_file_atomic(out / "evolution_norms.csv", norms);
  write_field_csv(out / "evolution_final.csv", field);
  std::cout << "evolved " << opts.steps << " step(s); final l2 norm "
            << format_double(l2_norm(field)) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyOptions {
  CommonOptions common;
  std::string suite = "all";
};

verify::Suite suite_from_name(std::string const& name) {
  if (name == "kernels") return verify::Suite::Kernels;
  if (name == "resolvents") return verify::Suite::Resolvents;
  if (name == "eigen") return verify::Suite::Eigen;
  if (name == "smatrix") return verify::Suite::Smatrix;
  return verify::Suite::All;
}

int cmd_verify(VerifyOptions const& opts) {
  ExperimentConfig const cfg = load_effective_config(opts.common);
  CoinField const coin = make_coin(cfg);
  if (!require_valid_coin(coin)) return 2;

  std::vector<verify::NamedCoin> const coins{{coin_label(cfg), coin}};
  nlohmann::json verdicts = nlohmann::json::array();
  bool allPass = true;
  verify::CriterionResult firstFailure{};
  for (int id : verify::suite_criteria(suite_from_name(opts.suite))) {
    verify::CriterionResult const r = verify::run_criterion(id, coins, cfg.seed, cfg.tolerance);
    char line[256];
    std::snprintf(line, sizeof line, "%s [%2d] %-28s observed %.6e bound %.6e (%.2fs)",
                  r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.observed, r.bound,
                  r.seconds);
    std::cout << line << "\n";
    if (!r.pass && !r.counterexample.empty()) std::cout << "     " << r.counterexample << "\n";
    verdicts.push_back({{"id", r.id},
                        {"name", r.name},
                        {"observed", r.observed},
                        {"bound", r.bound},
                        {"pass", r.pass},
                        {"counterexample", r.counterexample}});
    if (!r.pass && allPass) firstFailure = r;
    allPass = allPass && r.pass;
  }

  nlohmann::json const report{{"suite", opts.suite},
                              {"coin", coin_label(cfg)},
                              {"seed", cfg.seed},
                              {"tolerance", cfg.tolerance},
                              {"criteria", verdicts},
                              {"pass", allPass}};
  write_file_atomic(fs::path{cfg.outDir} / ("verify_" + opts.suite + ".json"),
                    report.dump(2) + "\n");

  if (!allPass) {
    std::cerr << "property failure: [" << firstFailure.id << "] " << firstFailure.name << ": "
              << (firstFailure.counterexample.empty() ? "bound exceeded"
                                                      : firstFailure.counterexample)
              << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CLI::App app{"position-dependent quantum walk scattering toolkit"};
  app.require_subcommand(1);

  CommonOptions validateOpts;
  CLI::App* validateCmd = app.add_subcommand("validate", "check the coin field assumptions");
  attach_common(validateCmd, validateOpts);

  SmatrixOptions smatrixOpts;
  CLI::App* smatrixCmd =
      app.add_subcommand("smatrix", "scattering matrix sweep with unitarity diagnostics");
  attach_common(smatrixCmd, smatrixOpts.common);
  smatrixCmd->add_option("--theta-grid", smatrixOpts.thetaGrid,
                         "evaluate on the uniform grid 2*pi*k/N (overrides config)")
      ->check(CLI::PositiveNumber);
  smatrixCmd->add_flag("--svg", smatrixOpts.svg, "emit an amplitude-vs-theta SVG plot");

  EigenfunctionOptions eigenOpts;
  CLI::App* eigenCmd =
      app.add_subcommand("eigenfunction", "materialize generalized eigenfunctions");
  attach_common(eigenCmd, eigenOpts.common);
  eigenCmd->add_option("--theta", eigenOpts.theta, "quasi-energy")->required();
  eigenCmd->add_option("--row", eigenOpts.b, "incidence channel offset");
  eigenCmd->add_option("--chirality", eigenOpts.chirality, "incidence chirality (L|R|D|U)")
      ->check(CLI::IsMember({"L", "R", "D", "U"}));
  eigenCmd->add_option("--method", eigenOpts.method, "construction to run")
      ->check(CLI::IsMember({"combinatorial", "resolvent", "both"}));
  eigenCmd->add_flag("--heatmap", eigenOpts.heatmap, "emit per-chirality PGM heatmaps");

  EvolveOptions evolveOpts;
  CLI::App* evolveCmd = app.add_subcommand("evolve", "run the walk on an initial field");
  attach_common(evolveCmd, evolveOpts.common);
  evolveCmd->add_option("--steps", evolveOpts.steps, "number of steps")
      ->required()
      ->check(CLI::NonNegativeNumber);
  evolveCmd->add_option("--initial", evolveOpts.initialPath, "initial field CSV")->required();

  VerifyOptions verifyOpts;
  CLI::App* verifyCmd = app.add_subcommand("verify", "run the property suites");
  attach_common(verifyCmd, verifyOpts.common);
  verifyCmd->add_option("--suite", verifyOpts.suite, "suite to run")
      ->check(CLI::IsMember({"kernels", "resolvents", "eigen", "smatrix", "all"}));

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const& e) {
    return app.exit(e);
  } catch (CLI::CallForAllHelp const& e) {
    return app.exit(e);
  } catch (CLI::ParseError const& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (validateCmd->parsed()) return cmd_validate(validateOpts);
    if (smatrixCmd->parsed()) return cmd_smatrix(smatrixOpts);
    if (eigenCmd->parsed()) return cmd_eigenfunction(eigenOpts);
    if (evolveCmd->parsed()) return cmd_evolve(evolveOpts);
    if (verifyCmd->parsed()) return cmd_verify(verifyOpts);
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
