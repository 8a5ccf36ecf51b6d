#pragma once

// Self-contained deterministic SVG line plots rendered straight from the
// run's CSV outputs: P(x) snapshots, trajectory fans, energy-exchange
// curves. No external renderer; identical inputs give byte-identical SVGs.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace pilot::plot {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

std::string line_chart(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel,
                       const std::vector<Series>& series);

// column-major CSV with a header row; throws std::runtime_error on a
// malformed body
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
  bool empty() const { return columns.empty() || columns[0].empty(); }
};
CsvTable parse_csv(const std::string& text);

std::string energy_svg(const CsvTable& energy);
std::string trajectory_svg(const std::vector<CsvTable>& trajectories);
// field snapshot tables paired with a label (e.g. the file stem)
std::string density_svg(const std::vector<std::pair<std::string, CsvTable>>& fields);

// `plot <dir>`: renders whatever outputs are present into dir/plots/ and
// folds the SVGs into dir/manifest.json if one exists. Missing inputs are
// skipped; empty inputs are skipped with a warning on `log`. Returns the
// number of SVGs written.
int plot_directory(const std::filesystem::path& dir, std::ostream& log);

} // namespace pilot::plot
