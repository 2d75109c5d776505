#pragma once

// Square grids of equally sized square blocks, used for the finite block
// operators whose powers and exponentials reproduce series solutions of the
// exponential-coefficient ODEs.  Block indices in code are 0-based; the
// corner-extraction helpers that mirror the usual "(1, k+1) entry" phrasing
// take 1-based block positions.

#include <stdexcept>
#include <vector>

#include "complex_matrix.hpp"
#include "matrix_exp.hpp"

namespace dubrovin {

struct BlockMatrix {
    int block_rows = 0;
    int block_cols = 0;
    int block_dim = 0;
    std::vector<CMatrix> blocks;  // row-major grid

    BlockMatrix() = default;

    BlockMatrix(int brows, int bcols, int bdim)
        : block_rows(brows), block_cols(bcols), block_dim(bdim) {
        if (brows <= 0 || bcols <= 0 || bdim <= 0)
            throw std::invalid_argument("BlockMatrix: dimensions must be positive");
        blocks.assign(static_cast<std::size_t>(brows) * bcols, CMatrix(bdim, bdim));
    }

    CMatrix& block(int i, int j) { return blocks[index(i, j)]; }
    const CMatrix& block(int i, int j) const { return blocks[index(i, j)]; }

    // add s*Id to every diagonal entry of the flattened matrix
    void shift_diagonal(Complex s) {
        const int n = std::min(block_rows, block_cols);
        for (int p = 0; p < n; ++p)
            for (int d = 0; d < block_dim; ++d) block(p, p)(d, d) += s;
    }

    CMatrix flatten() const {
        CMatrix full(block_rows * block_dim, block_cols * block_dim);
        for (int bi = 0; bi < block_rows; ++bi)
            for (int bj = 0; bj < block_cols; ++bj) {
                const CMatrix& b = block(bi, bj);
                for (int i = 0; i < block_dim; ++i)
                    for (int j = 0; j < block_dim; ++j)
                        full(bi * block_dim + i, bj * block_dim + j) = b(i, j);
            }
        return full;
    }

    friend BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b) {
        if (a.block_cols != b.block_rows || a.block_dim != b.block_dim)
            throw std::invalid_argument("BlockMatrix: shape mismatch in product");
        BlockMatrix r(a.block_rows, b.block_cols, a.block_dim);
        for (int i = 0; i < a.block_rows; ++i)
            for (int k = 0; k < a.block_cols; ++k) {
                if (a.block(i, k).max_norm() == 0.0) continue;
                for (int j = 0; j < b.block_cols; ++j) {
                    if (b.block(k, j).max_norm() == 0.0) continue;
                    r.block(i, j) += a.block(i, k) * b.block(k, j);
                }
            }
        return r;
    }

    friend BlockMatrix operator+(BlockMatrix a, const BlockMatrix& b) {
        if (a.block_rows != b.block_rows || a.block_cols != b.block_cols ||
            a.block_dim != b.block_dim)
            throw std::invalid_argument("BlockMatrix: shape mismatch in sum");
        for (std::size_t k = 0; k < a.blocks.size(); ++k) a.blocks[k] += b.blocks[k];
        return a;
    }

private:
    std::size_t index(int i, int j) const {
        if (i < 0 || i >= block_rows || j < 0 || j >= block_cols)
            throw std::out_of_range("BlockMatrix: block index out of range");
        return static_cast<std::size_t>(i) * block_cols + j;
    }
};

// Block (row, col) — 1-based — of the full matrix, unflattened.
inline CMatrix extract_block(const CMatrix& full, int block_dim, int row, int col) {
    if (block_dim <= 0 || full.rows() < row * block_dim || full.cols() < col * block_dim ||
        row < 1 || col < 1)
        throw std::invalid_argument("extract_block: block position out of range");
    CMatrix b(block_dim, block_dim);
    for (int i = 0; i < block_dim; ++i)
        for (int j = 0; j < block_dim; ++j)
            b(i, j) = full((row - 1) * block_dim + i, (col - 1) * block_dim + j);
    return b;
}

// Block (row, col) — 1-based — of exp(t * D).
inline CMatrix block_entry_exp(const BlockMatrix& d, Complex t, int row, int col,
                               double tol = 1e-13) {
    const CMatrix full = mat_exp(d.flatten() * t, tol);
    return extract_block(full, d.block_dim, row, col);
}

// Block (row, col) — 1-based — of D^power / (power!).
inline CMatrix block_entry_power(const BlockMatrix& d, int power, int row, int col) {
    if (power < 0) throw std::invalid_argument("block_entry_power: negative power");
    CMatrix full = CMatrix::identity(d.block_rows * d.block_dim);
    const CMatrix flat = d.flatten();
    double fact = 1.0;
    for (int j = 1; j <= power; ++j) {
        full = full * flat;
        fact *= j;
    }
    return extract_block(full, d.block_dim, row, col) * Complex(1.0 / fact, 0.0);
}

}  // namespace dubrovin
