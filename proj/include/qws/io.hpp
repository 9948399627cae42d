#pragma once

// Configuration and file I/O for the command-line driver: experiment
// configs with lossless JSON round-trips, CSV field dumps in the fixed
// (x1, x2, chirality, re, im) schema, scattering-block JSON records, and
// deterministic figure emission (SVG line plots, PGM heatmaps).  All
// numbers are printed in shortest round-trip form, so identical inputs
// yield byte-identical files; writes go through a temp-file rename.

#include <qws/coin.hpp>
#include <qws/lattice.hpp>
#include <qws/smatrix.hpp>

#include <json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace qws {

// ---------------------------------------------------------------------------
// Deterministic number formatting

/// Shortest representation that parses back to exactly the same double.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto const res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

/// Fixed-precision form for figure coordinates (never re-parsed).
inline std::string format_fixed(double v, int precision) {
  std::array<char, 64> buf{};
  auto const res =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, precision);
  return std::string(buf.data(), res.ptr);
}

// ---------------------------------------------------------------------------
// Atomic file emission

/// Write content to path via a sibling temp file and rename, so readers
/// never observe a half-written file and reruns replace outputs atomically.
inline void write_file_atomic(std::filesystem::path const& path, std::string const& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path const tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(std::filesystem::path const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Experiment configuration

/// A run description: which coin, on what window, at which spectral
/// parameters, where to write, and optional tolerance/seed overrides.
/// Either a builtin coin name or an explicit per-site cell list (lexicographic
/// over the box, 4x4 matrices as re/im pairs) specifies the coin.
struct ExperimentConfig {
  std::string coinName = "example1";  ///< builtin name; empty when cells are given
  int n0 = 1;
  std::vector<Mat4> cells;  ///< per-site coins, lexicographic; used iff coinName empty

  int windowL = 20;
  std::vector<double> thetaList;  ///< explicit spectral parameters, takes precedence
  int thetaGridPoints = 0;        ///< else: this many evenly spaced points in [0, 2 pi)

  std::string outDir = "out";
  double tolerance = 0.0;  ///< 0 keeps every check's pinned default
  std::uint64_t seed = 1;  ///< randomized-suite seed

  friend bool operator==(ExperimentConfig const& a, ExperimentConfig const& b) {
    if (a.coinName != b.coinName || a.n0 != b.n0 || a.cells.size() != b.cells.size() ||
        a.windowL != b.windowL || a.thetaList != b.thetaList ||
        a.thetaGridPoints != b.thetaGridPoints || a.outDir != b.outDir ||
        a.tolerance != b.tolerance || a.seed != b.seed)
      return false;
    for (std::size_t i = 0; i < a.cells.size(); ++i)
      if ((a.cells[i].array() != b.cells[i].array()).any()) return false;
    return true;
  }
};

inline CoinField make_coin(ExperimentConfig const& cfg) {
  if (!cfg.coinName.empty()) return CoinField::constant(cfg.n0, builtin_coin_matrix(cfg.coinName));
  return CoinField(cfg.n0, cfg.cells);
}

inline std::vector<double> theta_values(ExperimentConfig const& cfg) {
  if (!cfg.thetaList.empty()) return cfg.thetaList;
  int const n = cfg.thetaGridPoints;
  if (n <= 0) throw std::invalid_argument("config specifies neither theta list nor grid");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out.push_back(2.0 * std::numbers::pi * k / n);
  return out;
}

inline nlohmann::json matrix_to_json(Mat4 const& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < 4; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < 4; ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

inline Mat4 matrix_from_json(nlohmann::json const& rows) {
  if (!rows.is_array() || rows.size() != 4) throw std::invalid_argument("coin cell must have 4 rows");
  Mat4 m;
  for (int i = 0; i < 4; ++i) {
    auto const& row = rows.at(static_cast<std::size_t>(i));
    if (!row.is_array() || row.size() != 4)
      throw std::invalid_argument("coin cell row must have 4 entries");
    for (int j = 0; j < 4; ++j) {
      auto const& e = row.at(static_cast<std::size_t>(j));
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("coin cell entry must be an [re, im] pair");
      m(i, j) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

inline nlohmann::json config_to_json(ExperimentConfig const& cfg) {
  nlohmann::json coin;
  coin["n0"] = cfg.n0;
  if (!cfg.coinName.empty()) {
    coin["name"] = cfg.coinName;
  } else {
    nlohmann::json cells = nlohmann::json::array();
    for (auto const& m : cfg.cells) cells.push_back(matrix_to_json(m));
    coin["cells"] = cells;
  }

  nlohmann::json theta;
  if (!cfg.thetaList.empty())
    theta["list"] = cfg.thetaList;
  else
    theta["grid"] = cfg.thetaGridPoints;

  nlohmann::json j;
  j["coin"] = coin;
  j["window"] = cfg.windowL;
  j["theta"] = theta;
  j["out"] = cfg.outDir;
  j["tolerance"] = cfg.tolerance;
  j["seed"] = cfg.seed;
  return j;
}

inline ExperimentConfig config_from_json(nlohmann::json const& j) {
  ExperimentConfig cfg;
  auto const& coin = j.at("coin");
  cfg.n0 = coin.at("n0").get<int>();
  if (coin.contains("name")) {
    cfg.coinName = coin.at("name").get<std::string>();
    builtin_coin_matrix(cfg.coinName);  // reject unknown names at parse time
  } else {
    cfg.coinName.clear();
    for (auto const& cell : coin.at("cells")) cfg.cells.push_back(matrix_from_json(cell));
  }
  cfg.windowL = j.at("window").get<int>();
  auto const& theta = j.at("theta");
  if (theta.contains("list"))
    cfg.thetaList = theta.at("list").get<std::vector<double>>();
  else
    cfg.thetaGridPoints = theta.at("grid").get<int>();
  cfg.outDir = j.at("out").get<std::string>();
  cfg.tolerance = j.value("tolerance", 0.0);
  cfg.seed = j.value("seed", std::uint64_t{1});
  return cfg;
}

inline ExperimentConfig load_config(std::filesystem::path const& path) {
  return config_from_json(nlohmann::json::parse(read_file(path)));
}

inline void save_config(std::filesystem::path const& path, ExperimentConfig const& cfg) {
  write_file_atomic(path, config_to_json(cfg).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Field CSV (x1, x2, chirality, re, im)

inline std::string field_to_csv(GridField const& f) {
  std::string out = "x1,x2,chirality,re,im\n";
  int const L = f.window().L;
  for (int x1 = -L; x1 <= L; ++x1)
    for (int x2 = -L; x2 <= L; ++x2)
      for (Chirality p : all_chiralities) {
        cplx const v = f.at(Site{x1, x2}, p);
        out += std::to_string(x1);
        out += ',';
        out += std::to_string(x2);
        out += ',';
        out += chirality_label(p);
        out += ',';
        out += format_double(v.real());
        out += ',';
        out += format_double(v.imag());
        out += '\n';
      }
  return out;
}

inline GridField field_from_csv(std::string const& text) {
  struct Row {
    Site x;
    Chirality p;
    cplx v;
  };
  std::vector<Row> rows;
  int maxCoord = 0;

  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "x1,x2,chirality,re,im")
    throw std::invalid_argument("field CSV must start with header x1,x2,chirality,re,im");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string c1, c2, cp, cre, cim;
    if (!std::getline(ls, c1, ',') || !std::getline(ls, c2, ',') || !std::getline(ls, cp, ',') ||
        !std::getline(ls, cre, ',') || !std::getline(ls, cim))
      throw std::invalid_argument("malformed field CSV row: " + line);
    if (cp.size() != 1) throw std::invalid_argument("malformed chirality column: " + cp);
    Row r;
    r.x = Site{std::stoi(c1), std::stoi(c2)};
    r.p = chirality_from_label(cp[0]);
    r.v = cplx(std::stod(cre), std::stod(cim));
    maxCoord = std::max({maxCoord, std::abs(r.x.x1), std::abs(r.x.x2)});
    rows.push_back(r);
  }

  GridField f{Window(maxCoord)};
  for (Row const& r : rows) f.at(r.x, r.p) = r.v;
  return f;
}

inline void write_field_csv(std::filesystem::path const& path, GridField const& f) {
  write_file_atomic(path, field_to_csv(f));
}

inline GridField read_field_csv(std::filesystem::path const& path) {
  return field_from_csv(read_file(path));
}

// ---------------------------------------------------------------------------
// Scattering-block records

inline nlohmann::json complex_matrix_to_json(Eigen::MatrixXcd const& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

inline Eigen::MatrixXcd complex_matrix_from_json(nlohmann::json const& j) {
  auto const rows = j.at("rows").get<Eigen::Index>();
  auto const cols = j.at("cols").get<Eigen::Index>();
  auto const& re = j.at("re");
  auto const& im = j.at("im");
  if (static_cast<Eigen::Index>(re.size()) != rows * cols || re.size() != im.size())
    throw std::invalid_argument("complex matrix JSON has inconsistent sizes");
  Eigen::MatrixXcd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j2 = 0; j2 < cols; ++j2, ++k)
      m(i, j2) = cplx(re.at(k).get<double>(), im.at(k).get<double>());
  return m;
}

/// One theta record of a scattering sweep, with its diagnostics inline.
inline nlohmann::json smatrix_record(SMatrixBlock const& block, UnitarityReport const& uni,
                                     CorridorReport const& cor) {
  nlohmann::json j;
  j["theta"] = block.theta;
  j["n0"] = block.n0;
  j["m"] = block.transverseRange;
  j["A"] = complex_matrix_to_json(block.A);
  j["sigma"] = complex_matrix_to_json(block.sigma);
  j["unitarityDefect"] = std::max(uni.defectRight, uni.defectLeft);
  j["corridorMax"] = cor.bandMax;
  return j;
}

inline SMatrixBlock smatrix_from_json(nlohmann::json const& j) {
  SMatrixBlock block;
  block.theta = j.at("theta").get<double>();
  block.n0 = j.at("n0").get<int>();
  block.transverseRange = j.at("m").get<int>();
  block.A = complex_matrix_from_json(j.at("A"));
  block.sigma = complex_matrix_from_json(j.at("sigma"));
  if (block.A.rows() != block.dimension() || block.A.cols() != block.dimension() ||
      block.sigma.rows() != block.dimension() || block.sigma.cols() != block.dimension())
    throw std::invalid_argument("scattering record dimensions disagree with transverse range");
  return block;
}

// ---------------------------------------------------------------------------
// Figures

/// Line plot of several named series over a shared abscissa, as a
/// self-contained SVG.  Used for |Sigma entries| against theta.
inline std::string svg_line_plot(std::string const& title, std::vector<double> const& xs,
                                 std::vector<std::string> const& names,
                                 std::vector<std::vector<double>> const& series) {
  if (names.size() != series.size()) throw std::invalid_argument("one name per series required");
  for (auto const& s : series)
    if (s.size() != xs.size()) throw std::invalid_argument("series length must match abscissa");

  double constexpr W = 760.0, H = 420.0, ml = 56.0, mr = 180.0, mt = 40.0, mb = 44.0;
  double xmin = xs.empty() ? 0.0 : xs.front(), xmax = xs.empty() ? 1.0 : xs.front();
  for (double x : xs) xmin = std::min(xmin, x), xmax = std::max(xmax, x);
  if (xmax == xmin) xmax = xmin + 1.0;
  double ymin = 0.0, ymax = 0.0;
  for (auto const& s : series)
    for (double y : s) ymax = std::max(ymax, y);
  if (ymax == ymin) ymax = 1.0;

  auto const px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto const py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

  static constexpr std::array<const char*, 8> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                      "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " +
                    format_fixed(W, 0) + " " + format_fixed(H, 0) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + format_fixed(ml, 1) + "\" y=\"24\" font-family=\"monospace\" font-size=\"15\">" +
         title + "</text>\n";
  // axes
  svg += "<line x1=\"" + format_fixed(ml, 1) + "\" y1=\"" + format_fixed(H - mb, 1) + "\" x2=\"" +
         format_fixed(W - mr, 1) + "\" y2=\"" + format_fixed(H - mb, 1) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + format_fixed(ml, 1) + "\" y1=\"" + format_fixed(mt, 1) + "\" x2=\"" +
         format_fixed(ml, 1) + "\" y2=\"" + format_fixed(H - mb, 1) + "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double const y = ymin + (ymax - ymin) * k / 4.0;
    svg += "<text x=\"4\" y=\"" + format_fixed(py(y) + 4, 1) +
           "\" font-family=\"monospace\" font-size=\"11\">" + format_fixed(y, 3) + "</text>\n";
    double const x = xmin + (xmax - xmin) * k / 4.0;
    svg += "<text x=\"" + format_fixed(px(x) - 12, 1) + "\" y=\"" + format_fixed(H - mb + 16, 1) +
           "\" font-family=\"monospace\" font-size=\"11\">" + format_fixed(x, 2) + "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % palette.size()];
    std::string pts;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      pts += format_fixed(px(xs[i]), 2);
      pts += ',';
      pts += format_fixed(py(series[s][i]), 2);
      pts += ' ';
    }
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    double const ly = mt + 16.0 * static_cast<double>(s);
    svg += "<line x1=\"" + format_fixed(W - mr + 8, 1) + "\" y1=\"" + format_fixed(ly, 1) +
           "\" x2=\"" + format_fixed(W - mr + 28, 1) + "\" y2=\"" + format_fixed(ly, 1) +
           "\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + format_fixed(W - mr + 34, 1) + "\" y=\"" + format_fixed(ly + 4, 1) +
           "\" font-family=\"monospace\" font-size=\"11\">" + names[s] + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

/// Grayscale heatmap of |f(x)(p)| over the window as ASCII PGM (P2), rows
/// running from x2 = +L at the top to -L at the bottom.
inline std::string field_heatmap_pgm(GridField const& f, Chirality p) {
  int const L = f.window().L;
  int const side = 2 * L + 1;
  double peak = 0.0;
  for (int x1 = -L; x1 <= L; ++x1)
    for (int x2 = -L; x2 <= L; ++x2)
      peak = std::max(peak, std::abs(f.at(Site{x1, x2}, p)));

  std::string out = "P2\n" + std::to_string(side) + " " + std::to_string(side) + "\n255\n";
  for (int x2 = L; x2 >= -L; --x2) {
    for (int x1 = -L; x1 <= L; ++x1) {
      double const v = peak == 0.0 ? 0.0 : std::abs(f.at(Site{x1, x2}, p)) / peak;
      out += std::to_string(static_cast<int>(std::lround(255.0 * v)));
      out += x1 == L ? '\n' : ' ';
    }
  }
  return out;
}

}  // namespace qws
