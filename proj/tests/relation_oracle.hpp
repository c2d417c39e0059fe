#pragma once

// Test-side oracle for the multivalued part, exact backend only. Kept
// independent of the library's kernel-then-push computation.
//
// Each generator becomes one row (h-coordinates | k-coordinates); the stack
// is brought to reduced row echelon form with the h-block leading. A row
// whose leading entry falls in the k-block has an identically zero h-part,
// and exactly those k-parts span { k : (0, k) in span }.

#include "lebdec/relation.hpp"

#include <utility>
#include <vector>

namespace lebdec::testutil {

inline std::vector<SimpleFunction<Rational>> mval_oracle(const LinearRelation<Rational>& rel) {
    const std::size_t dh = rel.domain().space()->size();
    const std::size_t dk = rel.codomain().space()->size();
    std::vector<std::vector<Rational>> rows;
    for (const auto& g : rel.generators()) {
        std::vector<Rational> row(g.h.values());
        row.insert(row.end(), g.k.values().begin(), g.k.values().end());
        rows.push_back(std::move(row));
    }

    std::size_t rank = 0;
    for (std::size_t col = 0; col < dh + dk && rank < rows.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && rows[pivot][col] == 0) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        const Rational p = rows[rank][col];
        for (auto& x : rows[rank]) x /= p;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == rank || rows[r][col] == 0) continue;
            const Rational f = rows[r][col];
            for (std::size_t j = 0; j < dh + dk; ++j) rows[r][j] -= f * rows[rank][j];
        }
        ++rank;
    }

    std::vector<SimpleFunction<Rational>> out;
    for (std::size_t r = 0; r < rank; ++r) {
        bool h_zero = true;
        for (std::size_t j = 0; j < dh; ++j)
            if (!(rows[r][j] == 0)) h_zero = false;
        if (!h_zero) continue;
        std::vector<Rational> k(rows[r].begin() + dh, rows[r].end());
        out.emplace_back(rel.codomain().space(), std::move(k));
    }
    return out;
}

inline bool spanned_by(const std::vector<SimpleFunction<Rational>>& vecs,
                       const Subspace<Rational>& sub) {
    for (const auto& v : vecs)
        if (!(projection_residual_norm_sq(sub, v) == 0)) return false;
    return true;
}

}  // namespace lebdec::testutil
