#include "idpdb/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "idpdb/errors.hpp"
#include "idpdb/rng.hpp"

namespace idpdb {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t row) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw IoError(path.string() + ": row " + std::to_string(row) + ": cannot parse '" + s + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

Dataset::Dataset(std::size_t dim, std::size_t num_classes, std::vector<DataPoint> points)
    : dim_(dim), num_classes_(num_classes), points_(std::move(points)) {
  if (dim_ == 0) throw InvalidArgument("dataset dimension must be positive");
  if (num_classes_ < 2) throw InvalidArgument("dataset needs at least two classes");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (p.features.size() != dim_) {
      throw DimensionMismatch("point " + std::to_string(i) + " has " +
                              std::to_string(p.features.size()) + " features, expected " +
                              std::to_string(dim_));
    }
    for (double f : p.features) {
      if (!(f >= 0.0 && f <= 1.0)) {
        throw InvalidArgument("point " + std::to_string(i) + " has a feature outside [0,1]");
      }
    }
    if (p.label >= num_classes_) {
      throw InvalidArgument("point " + std::to_string(i) + " has label " +
                            std::to_string(p.label) + " >= " + std::to_string(num_classes_));
    }
  }
}

std::uint64_t Dataset::content_hash() const {
  std::uint64_t h = fnv1a64(std::to_string(dim_) + ":" + std::to_string(num_classes_));
  for (const auto& p : points_) {
    for (double f : p.features) {
      const auto bits = std::bit_cast<std::uint64_t>(f);
      h = fnv1a64(std::string_view(reinterpret_cast<const char*>(&bits), sizeof bits), h);
    }
    h = fnv1a64(std::to_string(p.label) + ";", h);
  }
  return h;
}

Dataset load_dataset_csv(const std::filesystem::path& path, std::size_t num_classes) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read dataset " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "label") {
    throw IoError(path.string() + ": header must end with a 'label' column");
  }
  const std::size_t dim = header.size() - 1;
  std::vector<DataPoint> points;
  std::size_t max_label = 0;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw IoError(path.string() + ": row " + std::to_string(row) + " has " +
                    std::to_string(cells.size()) + " columns, expected " +
                    std::to_string(header.size()));
    }
    DataPoint p;
    p.features.reserve(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const double v = parse_double(cells[k], path, row);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw IoError(path.string() + ": row " + std::to_string(row) + " feature " +
                      header[k] + " outside [0,1]");
      }
      p.features.push_back(v);
    }
    const double lab = parse_double(cells.back(), path, row);
    if (lab < 0 || lab != std::floor(lab)) {
      throw IoError(path.string() + ": row " + std::to_string(row) + " label is not a class index");
    }
    p.label = static_cast<std::size_t>(lab);
    max_label = std::max(max_label, p.label);
    points.push_back(std::move(p));
  }
  if (num_classes == 0) num_classes = std::max<std::size_t>(2, max_label + 1);
  return Dataset(dim, num_classes, std::move(points));
}

void save_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t k = 0; k < data.dim(); ++k) out << "x" << (k + 1) << ",";
  out << "label\n";
  for (const auto& p : data.points()) {
    for (double f : p.features) out << format_double(f) << ",";
    out << p.label << "\n";
  }
}

std::vector<Vector> load_inputs_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read inputs " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  auto header = split_csv_line(line);
  // A trailing label column is tolerated and ignored.
  const bool has_label = !header.empty() && header.back() == "label";
  const std::size_t dim = header.size() - (has_label ? 1 : 0);
  std::vector<Vector> rows;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw IoError(path.string() + ": row " + std::to_string(row) + " has wrong column count");
    }
    Vector x(dim);
    for (std::size_t k = 0; k < dim; ++k) x[k] = parse_double(cells[k], path, row);
    rows.push_back(std::move(x));
  }
  return rows;
}

}  // namespace idpdb
