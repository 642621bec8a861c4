#include "invlift/matrix_io.hpp"

#include <charconv>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "invlift/errors.hpp"

namespace invlift {

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << m(i, j);
    }
    os << '\n';
  }
}

Eigen::MatrixXd read_matrix(std::istream& is) {
  Eigen::Index rows = -1, cols = -1;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0)
    throw ValidationError("matrix text: missing or invalid header line");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!(is >> m(i, j)))
        throw ValidationError("matrix text: truncated entry list");
  return m;
}

std::string matrix_to_string(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  write_matrix(os, m);
  return os.str();
}

Eigen::MatrixXd matrix_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_matrix(is);
}

void write_points_csv(std::ostream& os, const Eigen::MatrixXd& pts) {
  for (Eigen::Index j = 0; j < pts.cols(); ++j) {
    if (j) os << ',';
    os << 'x' << (j + 1);
  }
  os << '\n';
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    for (Eigen::Index j = 0; j < pts.cols(); ++j) {
      if (j) os << ',';
      os << pts(i, j);
    }
    os << '\n';
  }
}

Eigen::MatrixXd read_points_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw ValidationError("points csv: empty input");
  // Count columns from the header.
  Eigen::Index cols = 1;
  for (char ch : line)
    if (ch == ',') ++cols;

  std::vector<double> data;
  Eigen::Index rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    Eigen::Index got = 0;
    while (std::getline(ls, cell, ',')) {
      double v = 0;
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc()) throw ValidationError("points csv: bad number '" + cell + "'");
      data.push_back(v);
      ++got;
    }
    if (got != cols) throw ValidationError("points csv: ragged row");
    ++rows;
  }
  Eigen::MatrixXd pts(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) pts(i, j) = data[i * cols + j];
  return pts;
}

}  // namespace invlift
