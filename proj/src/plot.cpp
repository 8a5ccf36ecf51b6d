#include "plot.hpp"

#include "io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pilot::plot {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kW = 800, kH = 500;
constexpr int kLeft = 70, kRight = 160, kTop = 40, kBottom = 50;

std::string num(double v, const char* fmt = "%.2f") {
  char buf[40];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void grow(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (lo > hi) { lo = 0; hi = 1; }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      const double c = 0.5 * (lo + hi);
      lo = c - 1.0;
      hi = c + 1.0;
    }
  }
};

} // namespace

std::string line_chart(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel,
                       const std::vector<Series>& series) {
  Range rx, ry;
  for (const auto& s : series) {
    for (double v : s.x) rx.grow(v);
    for (double v : s.y) ry.grow(v);
  }
  rx.pad();
  ry.pad();
  const double px0 = kLeft, px1 = kW - kRight;
  const double py0 = kH - kBottom, py1 = kTop;
  auto X = [&](double v) { return px0 + (v - rx.lo) / (rx.hi - rx.lo) * (px1 - px0); };
  auto Y = [&](double v) { return py0 + (v - ry.lo) / (ry.hi - ry.lo) * (py1 - py0); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(kW) + "\" height=\"" + std::to_string(kH) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + std::to_string(kW / 2) +
         "\" y=\"24\" font-family=\"monospace\" font-size=\"16\" "
         "text-anchor=\"middle\">" + title + "</text>\n";

  // axes box and ticks
  svg += "<rect x=\"" + num(px0) + "\" y=\"" + num(py1) + "\" width=\"" +
         num(px1 - px0) + "\" height=\"" + num(py0 - py1) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = rx.lo + (rx.hi - rx.lo) * i / 5.0;
    const double fy = ry.lo + (ry.hi - ry.lo) * i / 5.0;
    svg += "<line x1=\"" + num(X(fx)) + "\" y1=\"" + num(py0) + "\" x2=\"" +
           num(X(fx)) + "\" y2=\"" + num(py0 + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(X(fx)) + "\" y=\"" + num(py0 + 20) +
           "\" font-family=\"monospace\" font-size=\"11\" "
           "text-anchor=\"middle\">" + num(fx, "%.4g") + "</text>\n";
    svg += "<line x1=\"" + num(px0 - 5) + "\" y1=\"" + num(Y(fy)) + "\" x2=\"" +
           num(px0) + "\" y2=\"" + num(Y(fy)) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(px0 - 8) + "\" y=\"" + num(Y(fy) + 4) +
           "\" font-family=\"monospace\" font-size=\"11\" "
           "text-anchor=\"end\">" + num(fy, "%.4g") + "</text>\n";
  }
  svg += "<text x=\"" + num(0.5 * (px0 + px1)) + "\" y=\"" +
         std::to_string(kH - 10) +
         "\" font-family=\"monospace\" font-size=\"13\" "
         "text-anchor=\"middle\">" + xlabel + "</text>\n";
  svg += "<text x=\"18\" y=\"" + num(0.5 * (py0 + py1)) +
         "\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 18 " + num(0.5 * (py0 + py1)) + ")\">" +
         ylabel + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string pts;
    for (std::size_t i = 0; i < series[s].x.size(); ++i)
      pts += num(X(series[s].x[i])) + "," + num(Y(series[s].y[i])) + " ";
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    // legend only for the first few named series (fans stay readable)
    if (!series[s].label.empty() && s < 10) {
      const double ly = kTop + 18.0 * (s + 1);
      svg += "<line x1=\"" + num(px1 + 12) + "\" y1=\"" + num(ly) + "\" x2=\"" +
             num(px1 + 36) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
             "\" stroke-width=\"2\"/>\n";
      svg += "<text x=\"" + num(px1 + 42) + "\" y=\"" + num(ly + 4) +
             "\" font-family=\"monospace\" font-size=\"12\">" +
             series[s].label + "</text>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) return t;
  std::istringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  t.columns.resize(t.header.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream rs(line);
    std::size_t c = 0;
    while (std::getline(rs, cell, ',')) {
      if (c >= t.columns.size())
        throw std::runtime_error("parse_csv: row wider than header");
      t.columns[c++].push_back(std::stod(cell));
    }
    if (c != t.columns.size())
      throw std::runtime_error("parse_csv: short row");
  }
  return t;
}

namespace {
int column_of(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return static_cast<int>(i);
  throw std::runtime_error("plot: missing CSV column `" + name + "`");
}
} // namespace

std::string energy_svg(const CsvTable& energy) {
  const auto& t = energy.columns[column_of(energy, "t")];
  std::vector<Series> series;
  for (const char* name : {"E_field", "E_particle", "E_total"})
    series.push_back({name, t, energy.columns[column_of(energy, name)]});
  return line_chart("energy exchange", "t", "E", series);
}

std::string trajectory_svg(const std::vector<CsvTable>& trajectories) {
  std::vector<Series> series;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const CsvTable& tr = trajectories[i];
    Series s;
    if (trajectories.size() == 1) s.label = "x(t)";
    s.x = tr.columns[column_of(tr, "t")];
    s.y = tr.columns[column_of(tr, "x")];
    series.push_back(std::move(s));
  }
  return line_chart("trajectories", "t", "x", series);
}

std::string density_svg(
    const std::vector<std::pair<std::string, CsvTable>>& fields) {
  std::vector<Series> series;
  for (const auto& [label, f] : fields) {
    Series s;
    s.label = label;
    s.x = f.columns[column_of(f, "x")];
    const auto& re0 = f.columns[column_of(f, "re0")];
    const auto& im0 = f.columns[column_of(f, "im0")];
    const auto& re1 = f.columns[column_of(f, "re1")];
    const auto& im1 = f.columns[column_of(f, "im1")];
    s.y.resize(s.x.size());
    for (std::size_t i = 0; i < s.x.size(); ++i)
      s.y[i] = re0[i] * re0[i] + im0[i] * im0[i] + re1[i] * re1[i] +
               im1[i] * im1[i];
    series.push_back(std::move(s));
  }
  return line_chart("position density", "x", "P", series);
}

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  f << content;
}

} // namespace

int plot_directory(const std::filesystem::path& dir, std::ostream& log) {
  if (!std::filesystem::is_directory(dir))
    throw std::runtime_error("plot: `" + dir.string() + "` is not a directory");
  std::vector<std::pair<std::string, std::string>> svgs; // rel path, content

  const auto energy_path = dir / "energy.csv";
  if (std::filesystem::exists(energy_path)) {
    const CsvTable t = parse_csv(slurp(energy_path));
    if (t.empty())
      log << "warning: energy.csv is empty, skipped\n";
    else
      svgs.emplace_back("plots/energy.svg", energy_svg(t));
  }

  std::vector<std::filesystem::path> traj_files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() &&
        e.path().filename().string().rfind("trajectory", 0) == 0 &&
        e.path().extension() == ".csv")
      traj_files.push_back(e.path());
  std::sort(traj_files.begin(), traj_files.end());
  std::vector<CsvTable> trajs;
  for (const auto& p : traj_files) {
    const CsvTable t = parse_csv(slurp(p));
    if (t.empty())
      log << "warning: " << p.filename().string() << " is empty, skipped\n";
    else
      trajs.push_back(t);
  }
  if (!trajs.empty())
    svgs.emplace_back("plots/trajectory.svg", trajectory_svg(trajs));

  const auto fields_dir = dir / "fields";
  if (std::filesystem::is_directory(fields_dir)) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(fields_dir))
      if (e.is_regular_file() && e.path().extension() == ".csv")
        files.push_back(e.path());
    std::sort(files.begin(), files.end());
    // at most 8 curves: always first and last, evenly spaced between
    std::vector<std::pair<std::string, CsvTable>> picked;
    const std::size_t want = std::min<std::size_t>(files.size(), 8);
    for (std::size_t i = 0; i < want; ++i) {
      const std::size_t idx =
          want == 1 ? 0 : i * (files.size() - 1) / (want - 1);
      const CsvTable t = parse_csv(slurp(files[idx]));
      if (t.empty()) {
        log << "warning: " << files[idx].filename().string()
            << " is empty, skipped\n";
        continue;
      }
      picked.emplace_back(files[idx].stem().string(), t);
    }
    if (!picked.empty())
      svgs.emplace_back("plots/density.svg", density_svg(picked));
  }

  for (const auto& [rel, content] : svgs) write_file(dir / rel, content);

  // keep the manifest complete: replace any previous plots/ entries
  const auto manifest_path = dir / "manifest.json";
  if (std::filesystem::exists(manifest_path) && !svgs.empty()) {
    nlohmann::json m = nlohmann::json::parse(slurp(manifest_path));
    nlohmann::json files = nlohmann::json::array();
    for (const auto& e : m["files"])
      if (e["path"].get<std::string>().rfind("plots/", 0) != 0)
        files.push_back(e);
    for (const auto& [rel, content] : svgs)
      files.push_back({{"path", rel},
                       {"bytes", content.size()},
                       {"fnv1a64", io::fnv1a64_hex(content)}});
    m["files"] = files;
    write_file(manifest_path, io::dump_json(m));
  }
  return static_cast<int>(svgs.size());
}

} // namespace pilot::plot
