#include "piezocell/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace piezocell {

void CsrMatrix::begin_pattern(int nrows, int ncols, std::int64_t nnz_hint) {
    nrows_ = nrows;
    ncols_ = ncols;
    fill_row_ = 0;
    rowptr_.assign(1, 0);
    rowptr_.reserve(static_cast<std::size_t>(nrows) + 1);
    col_.clear();
    if (nnz_hint > 0) col_.reserve(static_cast<std::size_t>(nnz_hint));
    val_.clear();
}

void CsrMatrix::push_row(const int* cols, int count) {
    col_.insert(col_.end(), cols, cols + count);
    rowptr_.push_back(static_cast<int>(col_.size()));
    ++fill_row_;
}

void CsrMatrix::finalize_pattern() {
    if (fill_row_ != nrows_)
        throw Error("CsrMatrix: pattern rows pushed do not match row count");
    if (col_.size() > static_cast<std::size_t>(INT32_MAX))
        throw Error("CsrMatrix: nonzero count exceeds 32-bit index range");
    val_.assign(col_.size(), 0.0);
}

std::int64_t CsrMatrix::find(int row, int col) const {
    const int* b = col_.data() + rowptr_[row];
    const int* e = col_.data() + rowptr_[row + 1];
    const int* it = std::lower_bound(b, e, col);
    if (it == e || *it != col) return -1;
    return it - col_.data();
}

void CsrMatrix::add(int row, int col, double value) {
    std::int64_t k = find(row, col);
    if (k < 0) throw Error("CsrMatrix: add outside declared pattern");
    val_[static_cast<std::size_t>(k)] += value;
}

double CsrMatrix::get(int row, int col) const {
    std::int64_t k = find(row, col);
    return k < 0 ? 0.0 : val_[static_cast<std::size_t>(k)];
}

void CsrMatrix::multiply(const double* x, double* y) const {
    for (int r = 0; r < nrows_; ++r) {
        double s = 0.0;
        for (int k = rowptr_[r]; k < rowptr_[r + 1]; ++k)
            s += val_[k] * x[col_[k]];
        y[r] = s;
    }
}

Eigen::VectorXd CsrMatrix::multiply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(nrows_);
    multiply(x.data(), y.data());
    return y;
}

double CsrMatrix::max_abs_diagonal() const {
    double m = 0.0;
    for (int r = 0; r < nrows_ && r < ncols_; ++r) {
        std::int64_t k = find(r, r);
        if (k >= 0) m = std::max(m, std::abs(val_[static_cast<std::size_t>(k)]));
    }
    return m;
}

double CsrMatrix::symmetry_gap() const {
    double gap = 0.0;
    for (int r = 0; r < nrows_; ++r)
        for (int k = rowptr_[r]; k < rowptr_[r + 1]; ++k) {
            int c = col_[k];
            std::int64_t t = find(c, r);
            double other = t < 0 ? 0.0 : val_[static_cast<std::size_t>(t)];
            gap = std::max(gap, std::abs(val_[k] - other));
        }
    return gap;
}

BlockExtraction extract_kind_block(const CsrMatrix& K,
                                   const std::vector<DofKind>& kinds,
                                   DofKind kind, double sign) {
    BlockExtraction out;
    const int n = K.rows();
    std::vector<int> local(n, -1);
    for (int r = 0; r < n; ++r)
        if (kinds[r] == kind) {
            local[r] = static_cast<int>(out.dofs.size());
            out.dofs.push_back(r);
        }
    const auto& rp = K.row_ptr();
    const auto& ci = K.col_idx();
    const auto& va = K.values();

    std::int64_t nnz = 0;
    for (int r : out.dofs)
        for (int k = rp[r]; k < rp[r + 1]; ++k)
            if (local[ci[k]] >= 0) ++nnz;

    out.matrix.begin_pattern(static_cast<int>(out.dofs.size()),
                             static_cast<int>(out.dofs.size()), nnz);
    std::vector<int> cols;
    for (int r : out.dofs) {
        cols.clear();
        for (int k = rp[r]; k < rp[r + 1]; ++k)
            if (local[ci[k]] >= 0) cols.push_back(local[ci[k]]);
        // Source columns are sorted; the kind-filtered sublist stays sorted
        // because local ranks are assigned in increasing dof order.
        out.matrix.push_row(cols.data(), static_cast<int>(cols.size()));
    }
    out.matrix.finalize_pattern();

    auto& vals = out.matrix.values();
    std::size_t t = 0;
    for (int r : out.dofs)
        for (int k = rp[r]; k < rp[r + 1]; ++k)
            if (local[ci[k]] >= 0) vals[t++] = sign * va[k];
    return out;
}

} // namespace piezocell
