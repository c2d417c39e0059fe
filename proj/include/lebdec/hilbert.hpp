#pragma once

// Weighted inner-product spaces over finite atom sets.
//
// A WeightedSpace is a finite set of atoms together with a nonnegative weight
// per atom; it models the L² space of a measure at desk scale. Functions are
// one scalar per atom (SimpleFunction), considered equal when they agree on
// the support atoms (almost-everywhere equivalence). The canonical
// representative of an equivalence class zeroes every atom off the support,
// which turns class equality into plain vector comparison.
//
// Subspaces carry a pairwise-orthogonal basis together with the exact squared
// norm of each basis vector. In the rational backend a unit-norm basis would
// need square roots, which leave the field; dividing by the stored squared
// norm gives the same projector without ever normalizing. The float backend
// normalizes, so its stored squared norms are all within rounding of one.

#include "lebdec/scalar.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lebdec {

class AtomSpace;
using AtomSpacePtr = std::shared_ptr<const AtomSpace>;

/// Finite measurable space: an ordered list of distinct atom labels.
/// The order is fixed at construction and defines coordinate order everywhere.
class AtomSpace {
public:
    explicit AtomSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
        if (labels_.empty()) throw std::invalid_argument("atom space needs at least one atom");
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (!index_.emplace(labels_[i], i).second)
                throw std::invalid_argument("duplicate atom label '" + labels_[i] + "'");
        }
    }

    static AtomSpacePtr make(std::vector<std::string> labels) {
        return std::make_shared<const AtomSpace>(std::move(labels));
    }

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }

    std::optional<std::size_t> index_of(const std::string& label) const {
        const auto it = index_.find(label);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    bool operator==(const AtomSpace& other) const { return labels_ == other.labels_; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> index_;
};

inline bool same_space(const AtomSpacePtr& a, const AtomSpacePtr& b) {
    return a == b || (a && b && *a == *b);
}

/// One scalar value per atom; the computational stand-in for a simple function
/// (finite linear combination of characteristic functions).
template <class S>
class SimpleFunction {
public:
    SimpleFunction(AtomSpacePtr space, std::vector<S> values)
        : space_(std::move(space)), values_(std::move(values)) {
        if (!space_) throw std::invalid_argument("simple function needs an atom space");
        if (values_.size() != space_->size())
            throw std::invalid_argument("value count does not match atom count");
    }

    static SimpleFunction zero(const AtomSpacePtr& space) {
        return SimpleFunction(space, std::vector<S>(space->size(), scalar_traits<S>::zero()));
    }

    static SimpleFunction constant(const AtomSpacePtr& space, const S& c) {
        return SimpleFunction(space, std::vector<S>(space->size(), c));
    }

    static SimpleFunction ones(const AtomSpacePtr& space) {
        return constant(space, scalar_traits<S>::one());
    }

    /// Characteristic function of a set of atom indices.
    static SimpleFunction indicator(const AtomSpacePtr& space, const std::vector<std::size_t>& atoms) {
        auto f = zero(space);
        for (std::size_t i : atoms) {
            if (i >= space->size()) throw std::invalid_argument("atom index out of range");
            f.values_[i] = scalar_traits<S>::one();
        }
        return f;
    }

    const AtomSpacePtr& space() const { return space_; }
    const std::vector<S>& values() const { return values_; }
    const S& operator[](std::size_t i) const { return values_.at(i); }
    std::size_t size() const { return values_.size(); }

    bool operator==(const SimpleFunction& other) const {
        return same_space(space_, other.space_) && values_ == other.values_;
    }

    friend SimpleFunction operator+(const SimpleFunction& a, const SimpleFunction& b) {
        a.require_same_space(b);
        std::vector<S> v(a.values_);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.values_[i];
        return SimpleFunction(a.space_, std::move(v));
    }

    friend SimpleFunction operator-(const SimpleFunction& a, const SimpleFunction& b) {
        a.require_same_space(b);
        std::vector<S> v(a.values_);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b.values_[i];
        return SimpleFunction(a.space_, std::move(v));
    }

    friend SimpleFunction operator*(const S& c, const SimpleFunction& f) {
        std::vector<S> v(f.values_);
        for (auto& x : v) x *= c;
        return SimpleFunction(f.space_, std::move(v));
    }

    void require_same_space(const SimpleFunction& other) const {
        if (!same_space(space_, other.space_))
            throw std::invalid_argument("simple functions live on different atom spaces");
    }

private:
    AtomSpacePtr space_;
    std::vector<S> values_;
};

/// A finite atom set with one nonnegative weight per atom, viewed as an
/// inner-product space on its support (atoms of strictly positive weight).
template <class S>
class WeightedSpace {
public:
    WeightedSpace(AtomSpacePtr space, std::vector<S> weights)
        : space_(std::move(space)), weights_(std::move(weights)) {
        if (!space_) throw std::invalid_argument("weighted space needs an atom space");
        if (weights_.size() != space_->size())
            throw std::invalid_argument("weight count does not match atom count");
        in_support_.assign(weights_.size(), false);
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            if (weights_[i] < scalar_traits<S>::zero())
                throw std::invalid_argument("negative weight at atom '" + space_->label(i) + "'");
            if (weights_[i] > scalar_traits<S>::zero()) {
                in_support_[i] = true;
                support_.push_back(i);
            }
        }
    }

    const AtomSpacePtr& space() const { return space_; }
    const std::vector<S>& weights() const { return weights_; }
    const S& weight(std::size_t i) const { return weights_.at(i); }
    const std::vector<std::size_t>& support() const { return support_; }
    bool in_support(std::size_t i) const { return in_support_.at(i); }

    /// Canonical representative of f's a.e.-class: zero off the support.
    SimpleFunction<S> canonical(const SimpleFunction<S>& f) const {
        require_member(f);
        std::vector<S> v(f.values());
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!in_support_[i]) v[i] = scalar_traits<S>::zero();
        return SimpleFunction<S>(space_, std::move(v));
    }

    /// Equality as space elements: agreement on every support atom.
    bool ae_equal(const SimpleFunction<S>& f, const SimpleFunction<S>& g) const {
        require_member(f);
        require_member(g);
        for (std::size_t i : support_)
            if (!(f[i] == g[i])) return false;
        return true;
    }

    void require_member(const SimpleFunction<S>& f) const {
        if (!same_space(space_, f.space()))
            throw std::invalid_argument("function does not live on this space's atoms");
    }

private:
    AtomSpacePtr space_;
    std::vector<S> weights_;
    std::vector<std::size_t> support_;
    std::vector<bool> in_support_;
};

template <class S>
S inner_product(const SimpleFunction<S>& f, const SimpleFunction<S>& g, const WeightedSpace<S>& w) {
    w.require_member(f);
    w.require_member(g);
    S acc = scalar_traits<S>::zero();
    for (std::size_t i : w.support()) acc += f[i] * g[i] * w.weight(i);
    return acc;
}

template <class S>
S norm_sq(const SimpleFunction<S>& f, const WeightedSpace<S>& w) {
    return inner_product(f, f, w);
}

namespace detail {

// Gram-Schmidt at the raw coordinate level, shared by the public wrapper and
// the relation module (which glues two spaces into one coordinate block).
// The basis is kept pairwise orthogonal; norms_sq stores each vector's exact
// squared norm. Float insertions use modified Gram-Schmidt with one
// re-orthogonalization pass and then normalize.
template <class S>
class WeightedGs {
public:
    WeightedGs(std::vector<S> weights, S tol) : weights_(std::move(weights)), tol_(std::move(tol)) {}

    S dot(const std::vector<S>& a, const std::vector<S>& b) const {
        S acc = scalar_traits<S>::zero();
        for (std::size_t i = 0; i < weights_.size(); ++i) acc += a[i] * b[i] * weights_[i];
        return acc;
    }

    // Subtracts the projection onto the current basis, in place.
    void orthogonalize(std::vector<S>& v) const {
        for (std::size_t j = 0; j < basis_.size(); ++j) {
            const S c = dot(v, basis_[j]) / norms_sq_[j];
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * basis_[j][i];
        }
    }

    /// Inserts v into the basis unless it is (numerically) dependent.
    /// Discard rule: exact backend drops residuals that are exactly zero;
    /// float backend drops residuals with norm <= tol * (input norm).
    bool insert(std::vector<S> v) {
        const S input_nsq = dot(v, v);
        orthogonalize(v);
        if constexpr (scalar_traits<S>::is_exact) {
            const S rnsq = dot(v, v);
            if (rnsq == scalar_traits<S>::zero()) return false;
            basis_.push_back(std::move(v));
            norms_sq_.push_back(rnsq);
        } else {
            orthogonalize(v);  // second pass keeps near-dependent inputs honest
            const S rnsq = dot(v, v);
            if (!(rnsq > tol_ * tol_ * input_nsq)) return false;
            const S inv = 1.0 / std::sqrt(rnsq);
            for (auto& x : v) x *= inv;
            const S unit_nsq = dot(v, v);
            basis_.push_back(std::move(v));
            norms_sq_.push_back(unit_nsq);
        }
        return true;
    }

    std::vector<S> project(const std::vector<S>& v) const {
        std::vector<S> out(v.size(), scalar_traits<S>::zero());
        for (std::size_t j = 0; j < basis_.size(); ++j) {
            const S c = dot(v, basis_[j]) / norms_sq_[j];
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * basis_[j][i];
        }
        return out;
    }

    S residual_norm_sq(const std::vector<S>& v) const {
        std::vector<S> r(v);
        orthogonalize(r);
        if constexpr (!scalar_traits<S>::is_exact) orthogonalize(r);
        return dot(r, r);
    }

    const std::vector<std::vector<S>>& basis() const { return basis_; }
    const std::vector<S>& norms_sq() const { return norms_sq_; }

private:
    std::vector<S> weights_;
    S tol_;
    std::vector<std::vector<S>> basis_;
    std::vector<S> norms_sq_;
};

}  // namespace detail

/// A subspace of a weighted space, held as a pairwise-orthogonal canonical
/// basis plus each vector's squared norm. The implied orthonormal basis is
/// b_i / sqrt(norms_sq[i]); orthonormality is checked as <b_i,b_j> = 0 for
/// i != j and <b_i,b_i> = norms_sq[i] (exact in the rational backend).
template <class S>
struct Subspace {
    WeightedSpace<S> ambient;
    std::vector<SimpleFunction<S>> basis;
    std::vector<S> norms_sq;

    std::size_t dimension() const { return basis.size(); }
};

/// Orthogonalizes `vectors` in the order given; dependent inputs are dropped.
/// The result spans the same set modulo a.e.-equivalence.
template <class S>
Subspace<S> gram_schmidt(const std::vector<SimpleFunction<S>>& vectors, const WeightedSpace<S>& w,
                         const S& tol) {
    detail::WeightedGs<S> gs(w.weights(), tol);
    for (const auto& v : vectors) gs.insert(w.canonical(v).values());
    Subspace<S> sub{w, {}, gs.norms_sq()};
    sub.basis.reserve(gs.basis().size());
    for (const auto& coords : gs.basis()) sub.basis.emplace_back(w.space(), coords);
    return sub;
}

/// Orthogonal projection of f onto the subspace. The result is the canonical
/// representative (zero off the ambient support); f - project(sub, f) is
/// orthogonal to every basis vector.
template <class S>
SimpleFunction<S> project(const Subspace<S>& sub, const SimpleFunction<S>& f) {
    sub.ambient.require_member(f);
    std::vector<S> out(f.size(), scalar_traits<S>::zero());
    for (std::size_t j = 0; j < sub.basis.size(); ++j) {
        const S c = inner_product(f, sub.basis[j], sub.ambient) / sub.norms_sq[j];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * sub.basis[j][i];
    }
    return SimpleFunction<S>(f.space(), std::move(out));
}

template <class S>
S projection_residual_norm_sq(const Subspace<S>& sub, const SimpleFunction<S>& f) {
    const auto r = sub.ambient.canonical(f) - project(sub, f);
    return norm_sq(r, sub.ambient);
}

/// Comparison kinds for level sets; [f <= c] etc. on the stored values.
enum class Cmp { LessEq, GreaterEq, Equal, NotEqual };

/// Exact set of atom indices satisfying the predicate. No tolerance is
/// applied here; thresholding decisions belong to callers.
template <class S>
std::vector<std::size_t> level_set(const SimpleFunction<S>& f, Cmp cmp, const S& c) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const S& v = f[i];
        const bool in = (cmp == Cmp::LessEq)      ? (v <= c)
                        : (cmp == Cmp::GreaterEq) ? (v >= c)
                        : (cmp == Cmp::Equal)     ? (v == c)
                                                  : !(v == c);
        if (in) out.push_back(i);
    }
    return out;
}

}  // namespace lebdec
