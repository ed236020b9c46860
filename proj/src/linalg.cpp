#include "gsv/linalg.hpp"

#include <utility>

#include "gsv/error.hpp"

namespace gsv::linalg {

namespace {

std::vector<mpz_class> integer_row(const RationalVector& row, std::size_t cols) {
  if (row.size() != cols) throw GsvError(ErrorCode::kDimension, "ragged matrix row");
  mpz_class scale = 1;
  for (const auto& v : row) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), v.get_den_mpz_t());
  std::vector<mpz_class> out(cols);
  for (std::size_t j = 0; j < cols; ++j) out[j] = row[j].get_num() * (scale / row[j].get_den());
  return out;
}

// Back substitution on an echelon form whose last column may be a right-hand
// side. `fixed` presets the free variables; pivot variables are solved for.
RationalVector back_substitute(const EchelonForm& e, std::size_t unknowns, RationalVector x,
                               bool augmented) {
  for (std::size_t i = e.rank(); i-- > 0;) {
    const std::size_t p = e.pivot_cols[i];
    Rational acc = augmented ? Rational(e.rows[i][unknowns]) : Rational(0);
    for (std::size_t j = p + 1; j < unknowns; ++j) {
      if (e.rows[i][j] != 0 && x[j] != 0) acc -= Rational(e.rows[i][j]) * x[j];
    }
    x[p] = acc / Rational(e.rows[i][p]);
  }
  return x;
}

}  // namespace

EchelonForm bareiss_echelon(const Matrix& a, std::size_t cols) {
  EchelonForm e;
  e.cols = cols;
  e.rows.reserve(a.size());
  for (const auto& row : a) e.rows.push_back(integer_row(row, cols));

  auto& m = e.rows;
  const std::size_t n_rows = m.size();
  mpz_class prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < n_rows; ++c) {
    std::size_t p = r;
    while (p < n_rows && m[p][c] == 0) ++p;
    if (p == n_rows) continue;
    std::swap(m[p], m[r]);
    for (std::size_t i = r + 1; i < n_rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        mpz_class t = m[r][c] * m[i][j] - m[i][c] * m[r][j];
        mpz_divexact(m[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      m[i][c] = 0;
    }
    prev = m[r][c];
    e.pivot_cols.push_back(c);
    ++r;
  }
  m.resize(r);
  return e;
}

std::size_t rank(const Matrix& a, std::size_t cols) { return bareiss_echelon(a, cols).rank(); }

std::vector<RationalVector> nullspace(const Matrix& a, std::size_t cols) {
  EchelonForm e = bareiss_echelon(a, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : e.pivot_cols) is_pivot[p] = true;

  std::vector<RationalVector> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    RationalVector x(cols, Rational(0));
    x[free] = 1;
    basis.push_back(back_substitute(e, cols, std::move(x), false));
  }
  return basis;
}

std::optional<RationalVector> solve(const Matrix& a, std::size_t cols, const RationalVector& b) {
  if (b.size() != a.size()) throw GsvError(ErrorCode::kDimension, "rhs length mismatch");
  Matrix augmented = a;
  for (std::size_t i = 0; i < a.size(); ++i) augmented[i].push_back(b[i]);
  EchelonForm e = bareiss_echelon(augmented, cols + 1);
  if (!e.pivot_cols.empty() && e.pivot_cols.back() == cols) return std::nullopt;
  return back_substitute(e, cols, RationalVector(cols, Rational(0)), true);
}

Matrix transpose(const Matrix& a, std::size_t cols) {
  Matrix t(cols, RationalVector(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) t[j][i] = a[i][j];
  }
  return t;
}

}  // namespace gsv::linalg
