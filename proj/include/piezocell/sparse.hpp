#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "piezocell/errors.hpp"

namespace piezocell {

// Compressed-sparse-row matrix with a fixed pattern. Assembly declares the
// pattern first (sorted column lists per row), then accumulates values via
// binary search. 32-bit indices throughout: the largest supported system
// (~10^6 rows, ~10^8 nonzeros) stays well under the 2^31 limit.
class CsrMatrix {
  public:
    CsrMatrix() = default;

    int rows() const { return nrows_; }
    int cols() const { return ncols_; }
    std::int64_t nonzeros() const { return static_cast<std::int64_t>(col_.size()); }

    // Pattern construction: begin_pattern, then push each row's sorted
    // unique column list in row order, then finalize.
    void begin_pattern(int nrows, int ncols, std::int64_t nnz_hint = 0);
    void push_row(const int* cols, int count);
    void finalize_pattern();

    // Value accumulation. add() requires the slot to exist.
    void add(int row, int col, double value);
    double get(int row, int col) const; // 0 if absent
    std::int64_t find(int row, int col) const; // value index or -1

    void multiply(const double* x, double* y) const; // y = K x
    Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;

    // Maximum |diagonal| entry (scale for semidefiniteness probes).
    double max_abs_diagonal() const;

    // Exact symmetry test on pattern and values (returns max |K - K^T|).
    double symmetry_gap() const;

    const std::vector<int>& row_ptr() const { return rowptr_; }
    const std::vector<int>& col_idx() const { return col_; }
    const std::vector<double>& values() const { return val_; }
    std::vector<double>& values() { return val_; }

  private:
    int nrows_ = 0, ncols_ = 0;
    int fill_row_ = 0;
    std::vector<int> rowptr_;
    std::vector<int> col_;
    std::vector<double> val_;
};

// Classification of each unknown for preconditioning: displacement (0),
// potential (1), Lagrange multiplier (2).
enum class DofKind : std::uint8_t { Displacement = 0, Potential = 1, Multiplier = 2 };

// Extracts the square sub-matrix of K over the dofs of one kind, scaled by
// `sign` (the potential-potential block of the symmetrized system is -D, so
// sign=-1 recovers the positive form). Returns the sub-matrix together with
// the dof list it covers.
struct BlockExtraction {
    CsrMatrix matrix;
    std::vector<int> dofs; // global dof per local row
};
BlockExtraction extract_kind_block(const CsrMatrix& K,
                                   const std::vector<DofKind>& kinds,
                                   DofKind kind, double sign);

} // namespace piezocell
