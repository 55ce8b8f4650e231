#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace notears {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct invalid_argument_error : error {
  using error::error;
};

// Raised when an operation requiring a DAG meets a cycle; carries one offending cycle.
struct cyclic_graph_error : error {
  std::vector<int> cycle;
  cyclic_graph_error(const std::string& msg, std::vector<int> cyc)
      : error(msg), cycle(std::move(cyc)) {}
};

struct numerical_error : error {
  using error::error;
};

struct parse_error : error {
  int row = -1;  // zero-based location when known, -1 otherwise
  int col = -1;
  parse_error(const std::string& msg, int r = -1, int c = -1) : error(msg), row(r), col(c) {}
};

}  // namespace notears
