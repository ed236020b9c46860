#pragma once

#include <optional>
#include <vector>

#include "gsv/rational.hpp"

namespace gsv::linalg {

// Row-major dense rational matrix.
using Matrix = std::vector<RationalVector>;

// Row echelon form produced by fraction-free (Bareiss) elimination. Rows are
// integer multiples of rational combinations of the input rows, so the row
// space is unchanged.
struct EchelonForm {
  std::vector<std::vector<mpz_class>> rows;
  std::vector<std::size_t> pivot_cols;  // one per nonzero row, increasing
  std::size_t cols = 0;

  std::size_t rank() const { return pivot_cols.size(); }
};

EchelonForm bareiss_echelon(const Matrix& a, std::size_t cols);

std::size_t rank(const Matrix& a, std::size_t cols);

// Basis of {x : a x = 0}, one vector per free column (that coordinate set to 1).
std::vector<RationalVector> nullspace(const Matrix& a, std::size_t cols);

// A particular solution of a x = b with all free variables zero, or nullopt
// when the system is inconsistent.
std::optional<RationalVector> solve(const Matrix& a, std::size_t cols, const RationalVector& b);

Matrix transpose(const Matrix& a, std::size_t cols);

}  // namespace gsv::linalg
