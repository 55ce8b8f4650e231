#include "notears/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <vector>

#include "notears/errors.hpp"

namespace notears {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Mat read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      ++row;
      continue;
    }
    std::vector<double> vals;
    size_t pos = 0;
    int col = 0;
    while (true) {
      const size_t comma = line.find(',', pos);
      const std::string cell = line.substr(pos, comma == std::string::npos ? comma : comma - pos);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw parse_error("non-numeric cell '" + cell + "' in " + path, row, col);
      vals.push_back(v);
      ++col;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && vals.size() != rows.front().size())
      throw parse_error("ragged row in " + path, row, static_cast<int>(vals.size()));
    rows.push_back(std::move(vals));
    ++row;
  }
  if (rows.empty()) throw parse_error("empty csv: " + path, 0, 0);

  Mat M(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) M(i, j) = rows[i][j];
  return M;
}

void write_csv_matrix(const Mat& M, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw error("cannot open for writing: " + path);
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) {
      if (j) out << ',';
      out << fmt_g17(M(i, j));
    }
    out << '\n';
  }
}

Dataset ingest_csv(const std::string& path) {
  Dataset data;
  data.X = read_csv_matrix(path);
  if (!data.X.allFinite()) {
    for (int i = 0; i < data.X.rows(); ++i)
      for (int j = 0; j < data.X.cols(); ++j)
        if (!std::isfinite(data.X(i, j)))
          throw parse_error("non-finite value in " + path, i, j);
  }
  bool binary = true;
  for (int i = 0; i < data.X.rows() && binary; ++i)
    for (int j = 0; j < data.X.cols(); ++j)
      if (data.X(i, j) != 0.0 && data.X(i, j) != 1.0) {
        binary = false;
        break;
      }
  data.kind = binary ? DataKind::binary : DataKind::continuous;
  return data;
}

}  // namespace notears
