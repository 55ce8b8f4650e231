#pragma once

#include <string>

#include "notears/types.hpp"

namespace notears {

// Rectangular numeric CSV (no header) -> Dataset. Ragged rows and non-numeric
// cells raise parse_error with the offending zero-based row/column; empty files
// raise parse_error. Columns containing only {0,1} across the whole file flip
// the dataset kind to binary.
Dataset ingest_csv(const std::string& path);

// Plain rectangular matrix readers/writers used by tests and the CLI.
Mat read_csv_matrix(const std::string& path);
void write_csv_matrix(const Mat& M, const std::string& path);

std::string fmt_g17(double v);

}  // namespace notears
