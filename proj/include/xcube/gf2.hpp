#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "xcube/bits.hpp"

namespace xcube {

/// Dense GF(2) matrix with bit-packed rows. Deterministic elimination
/// (first-hit pivoting, columns left to right), so rank, solve and the
/// derived quantities are reproducible.
class Gf2Matrix {
  public:
    Gf2Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows, BitRow(cols)) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const { return data_[r].get(c); }
    void set(std::size_t r, std::size_t c, bool v) { data_[r].set(c, v); }

    BitRow &row(std::size_t r) { return data_[r]; }
    const BitRow &row(std::size_t r) const { return data_[r]; }

    std::size_t rank() const {
        Gf2Matrix tmp(*this);
        return tmp.eliminate_in_place(nullptr);
    }

    /// Solves M x = b. Returns the first solution under deterministic
    /// pivoting (free variables zero), or nullopt when inconsistent.
    std::optional<BitRow> solve(const BitRow &b) const {
        if (b.size() != rows_) {
            throw std::invalid_argument("gf2 solve: rhs length mismatch");
        }
        Gf2Matrix tmp(*this);
        BitRow rhs = b;
        std::vector<std::size_t> pivot_col;
        std::size_t r = 0;
        for (std::size_t c = 0; c < cols_ && r < rows_; c++) {
            std::size_t p = r;
            while (p < rows_ && !tmp.data_[p].get(c)) {
                p++;
            }
            if (p == rows_) {
                continue;
            }
            std::swap(tmp.data_[r], tmp.data_[p]);
            bool br = rhs.get(r), bp = rhs.get(p);
            rhs.set(r, bp);
            rhs.set(p, br);
            for (std::size_t j = 0; j < rows_; j++) {
                if (j != r && tmp.data_[j].get(c)) {
                    tmp.data_[j] ^= tmp.data_[r];
                    rhs.set(j, rhs.get(j) ^ rhs.get(r));
                }
            }
            pivot_col.push_back(c);
            r++;
        }
        for (std::size_t j = r; j < rows_; j++) {
            if (rhs.get(j)) {
                return std::nullopt;
            }
        }
        BitRow x(cols_);
        for (std::size_t i = 0; i < pivot_col.size(); i++) {
            if (rhs.get(i)) {
                x.set(pivot_col[i], true);
            }
        }
        return x;
    }

  private:
    // Row-reduces in place; returns rank. `rhs`, when given, is carried
    // through the same row operations.
    std::size_t eliminate_in_place(BitRow *rhs) {
        std::size_t r = 0;
        for (std::size_t c = 0; c < cols_ && r < rows_; c++) {
            std::size_t p = r;
            while (p < rows_ && !data_[p].get(c)) {
                p++;
            }
            if (p == rows_) {
                continue;
            }
            std::swap(data_[r], data_[p]);
            if (rhs) {
                bool br = rhs->get(r), bp = rhs->get(p);
                rhs->set(r, bp);
                rhs->set(p, br);
            }
            for (std::size_t j = 0; j < rows_; j++) {
                if (j != r && data_[j].get(c)) {
                    data_[j] ^= data_[r];
                    if (rhs) {
                        rhs->set(j, rhs->get(j) ^ rhs->get(r));
                    }
                }
            }
            r++;
        }
        return r;
    }

    std::size_t rows_, cols_;
    std::vector<BitRow> data_;
};

} // namespace xcube
