#pragma once

// Linear relations between two weighted spaces and their multivalued part.
//
// A relation is a subspace of H x K given by a finite generating set of
// pairs. Its multivalued part M(L) is the set of second components reachable
// while the first component goes to zero; in finite dimension every subspace
// is closed, so the sequential definition collapses to exact membership:
// M(L) = { k : (0, k) in span(generators) }. The computation finds the
// kernel of the coefficient-to-first-component map and pushes it through the
// second components.

#include "lebdec/hilbert.hpp"

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lebdec {

template <class S>
struct GeneratorPair {
    SimpleFunction<S> h;
    SimpleFunction<S> k;
};

/// A finitely generated linear relation L between weighted spaces H and K.
/// Generator components are stored as canonical a.e.-representatives, so
/// "first component is zero in H" is a plain zero-vector test.
template <class S>
class LinearRelation {
public:
    LinearRelation(WeightedSpace<S> domain, WeightedSpace<S> codomain,
                   std::vector<GeneratorPair<S>> generators)
        : domain_(std::move(domain)), codomain_(std::move(codomain)) {
        generators_.reserve(generators.size());
        for (auto& g : generators)
            generators_.push_back({domain_.canonical(g.h), codomain_.canonical(g.k)});
    }

    const WeightedSpace<S>& domain() const { return domain_; }
    const WeightedSpace<S>& codomain() const { return codomain_; }
    const std::vector<GeneratorPair<S>>& generators() const { return generators_; }

private:
    WeightedSpace<S> domain_;
    WeightedSpace<S> codomain_;
    std::vector<GeneratorPair<S>> generators_;
};

namespace detail {

// Basis of { c : A c = 0 } by Gauss-Jordan elimination with partial pivoting.
// A is row-major, rows x cols. Rank decisions in the float backend treat a
// pivot candidate as zero when its magnitude is <= tol * (largest absolute
// entry of the input matrix); the exact backend tests literal zero.
template <class S>
std::vector<std::vector<S>> kernel_basis(std::vector<std::vector<S>> a, std::size_t cols,
                                         const S& tol) {
    const std::size_t rows = a.size();
    S scale = scalar_traits<S>::zero();
    for (const auto& row : a)
        for (const auto& x : row) scale = std::max(scale, scalar_traits<S>::abs(x));
    const S threshold = tol * scale;

    std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (row, col)
    std::vector<bool> col_is_pivot(cols, false);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t best = rank;
        S best_abs = scalar_traits<S>::abs(a[rank][col]);
        for (std::size_t r = rank + 1; r < rows; ++r) {
            const S cand = scalar_traits<S>::abs(a[r][col]);
            if (cand > best_abs) {
                best_abs = cand;
                best = r;
            }
        }
        const bool negligible = scalar_traits<S>::is_exact
                                    ? (best_abs == scalar_traits<S>::zero())
                                    : !(best_abs > threshold);
        if (negligible) continue;

        std::swap(a[rank], a[best]);
        const S pivot = a[rank][col];
        for (std::size_t j = col; j < cols; ++j) a[rank][j] /= pivot;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == rank) continue;
            const S f = a[r][col];
            if (f == scalar_traits<S>::zero()) continue;
            for (std::size_t j = col; j < cols; ++j) a[r][j] -= f * a[rank][j];
        }
        pivots.emplace_back(rank, col);
        col_is_pivot[col] = true;
        ++rank;
    }

    std::vector<std::vector<S>> kernel;
    for (std::size_t fc = 0; fc < cols; ++fc) {
        if (col_is_pivot[fc]) continue;
        std::vector<S> v(cols, scalar_traits<S>::zero());
        v[fc] = scalar_traits<S>::one();
        for (const auto& [pr, pc] : pivots) v[pc] = -a[pr][fc];
        kernel.push_back(std::move(v));
    }
    return kernel;
}

// Concatenated (h, k) coordinates with concatenated weights realize the
// product inner product <(h,k),(h',k')> = <h,h'>_H + <k,k'>_K.
template <class S>
std::vector<S> product_weights(const LinearRelation<S>& L) {
    std::vector<S> w(L.domain().weights());
    w.insert(w.end(), L.codomain().weights().begin(), L.codomain().weights().end());
    return w;
}

template <class S>
std::vector<S> product_coords(const SimpleFunction<S>& h, const SimpleFunction<S>& k) {
    std::vector<S> v(h.values());
    v.insert(v.end(), k.values().begin(), k.values().end());
    return v;
}

}  // namespace detail

/// Multivalued part M(L) as an orthogonal-basis subspace of the codomain.
/// Rank decisions (kernel extraction and the final orthogonalization) use
/// `tol` as a relative pivot / residual threshold in the float backend.
template <class S>
Subspace<S> mval_part(const LinearRelation<S>& L, const S& tol) {
    const auto& gens = L.generators();
    const std::size_t m = gens.size();
    const auto& supp = L.domain().support();

    // Rows are domain support coordinates, columns are generators.
    std::vector<std::vector<S>> a(supp.size(), std::vector<S>(m, scalar_traits<S>::zero()));
    for (std::size_t r = 0; r < supp.size(); ++r)
        for (std::size_t i = 0; i < m; ++i) a[r][i] = gens[i].h[supp[r]];

    const auto kernel = detail::kernel_basis(std::move(a), m, tol);

    std::vector<SimpleFunction<S>> candidates;
    candidates.reserve(kernel.size());
    for (const auto& c : kernel) {
        auto k = SimpleFunction<S>::zero(L.codomain().space());
        for (std::size_t i = 0; i < m; ++i)
            if (!(c[i] == scalar_traits<S>::zero())) k = k + c[i] * gens[i].k;
        candidates.push_back(std::move(k));
    }
    return gram_schmidt(candidates, L.codomain(), tol);
}

/// Span-identity companion of the closure operation: finite-dimensional
/// subspaces are already closed, so this returns a relation spanning exactly
/// the same set, dropping generators dependent on earlier ones.
template <class S>
LinearRelation<S> closure_note(const LinearRelation<S>& L) {
    detail::WeightedGs<S> gs(detail::product_weights(L), scalar_traits<S>::default_tol());
    std::vector<GeneratorPair<S>> kept;
    for (const auto& g : L.generators())
        if (gs.insert(detail::product_coords(g.h, g.k))) kept.push_back(g);
    return LinearRelation<S>(L.domain(), L.codomain(), std::move(kept));
}

/// Membership of the pair (h, k) in span(generators), decided by projecting
/// onto the orthogonalized generator span in the product inner product and
/// testing the residual: exactly zero in the exact backend, norm <= tol
/// (absolute) in the float backend.
template <class S>
bool contains_pair(const LinearRelation<S>& L, const SimpleFunction<S>& h,
                   const SimpleFunction<S>& k, const S& tol) {
    const auto hc = L.domain().canonical(h);
    const auto kc = L.codomain().canonical(k);

    detail::WeightedGs<S> gs(detail::product_weights(L), tol);
    for (const auto& g : L.generators()) gs.insert(detail::product_coords(g.h, g.k));

    const S rnsq = gs.residual_norm_sq(detail::product_coords(hc, kc));
    if constexpr (scalar_traits<S>::is_exact) {
        return rnsq == scalar_traits<S>::zero();
    } else {
        return !(rnsq > tol * tol);
    }
}

}  // namespace lebdec
