#include "kcm/csv.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "kcm/error.hpp"

namespace kcm::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    cells.emplace_back();
  }
  return cells;
}

double parse_cell(const std::string& raw, const std::string& name, int line,
                  std::size_t column) {
  const auto begin = raw.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    throw_data(name + ": missing value at row " + std::to_string(line) +
               ", column " + std::to_string(column + 1));
  }
  const auto end = raw.find_last_not_of(" \t\r");
  const std::string text = raw.substr(begin, end - begin + 1);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) {
    throw_data(name + ": non-numeric cell '" + text + "' at row " +
               std::to_string(line) + ", column " + std::to_string(column + 1));
  }
  return value;
}

}  // namespace

dgp::Dataset read_dataset(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) {
    throw_data(name + ": empty input (header row required)");
  }
  const std::size_t columns = split_line(line).size();
  if (columns < 2) {
    throw_data(name + ": need at least two columns (y plus covariates)");
  }
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_line(line);
    if (cells.size() != columns) {
      throw_data(name + ": row " + std::to_string(line_no) + " has " +
                 std::to_string(cells.size()) + " cells, expected " +
                 std::to_string(columns));
    }
    std::vector<double> parsed(columns);
    for (std::size_t c = 0; c < columns; ++c) {
      parsed[c] = parse_cell(cells[c], name, line_no, c);
    }
    rows.push_back(std::move(parsed));
  }
  if (rows.size() < 2) {
    throw_data(name + ": need at least 2 data rows");
  }
  dgp::Dataset data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto q = static_cast<Eigen::Index>(columns - 1);
  data.X.resize(n, q);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.y[i] = rows[static_cast<std::size_t>(i)][0];
    for (Eigen::Index j = 0; j < q; ++j) {
      data.X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j) + 1];
    }
  }
  return data;
}

dgp::Dataset read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw_data("cannot open CSV file '" + path + "'");
  }
  return read_dataset(in, path);
}

}  // namespace kcm::csv
