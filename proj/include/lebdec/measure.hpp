#pragma once

// Lebesgue decomposition of a finite measure nu with respect to a finite
// measure mu on a shared finite atom space.
//
// The construction is geometric: take the relation L = {(phi, phi)} between
// L2(mu) and L2(nu) generated by the atom indicators, compute its multivalued
// part M inside L2(nu), and orthogonally project the constant-one function
// onto M. With P1 that projection,
//
//     nu_s(E) = integral over E of P1 d(nu),
//     nu_a(E) = integral over E of (1 - P1) d(nu),
//
// and P1 turns out to be the indicator of the singular carrier S = [P1 != 0],
// so nu_a(E) = nu(E \ S) and nu_s(E) = nu(E cap S) in standard form.
//
// oracle_decompose computes the same decomposition by direct atom
// classification with no Hilbert-space machinery; the two routes are kept
// independent so each can check the other.

#include "lebdec/hilbert.hpp"
#include "lebdec/relation.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lebdec {

/// A finite measure: one nonnegative mass per atom.
template <class S>
class Measure {
public:
    Measure(AtomSpacePtr space, std::vector<S> weights)
        : space_(std::move(space)), weights_(std::move(weights)) {
        if (!space_) throw std::invalid_argument("measure needs an atom space");
        if (weights_.size() != space_->size())
            throw std::invalid_argument("weight count does not match atom count");
        for (std::size_t i = 0; i < weights_.size(); ++i)
            if (weights_[i] < scalar_traits<S>::zero())
                throw std::invalid_argument("negative mass at atom '" + space_->label(i) + "'");
    }

    static Measure zero(const AtomSpacePtr& space) {
        return Measure(space, std::vector<S>(space->size(), scalar_traits<S>::zero()));
    }

    const AtomSpacePtr& space() const { return space_; }
    const std::vector<S>& weights() const { return weights_; }
    const S& weight(std::size_t i) const { return weights_.at(i); }
    std::size_t size() const { return weights_.size(); }

    S measure_of(const std::vector<std::size_t>& atoms) const {
        S acc = scalar_traits<S>::zero();
        for (std::size_t i : atoms) acc += weights_.at(i);
        return acc;
    }

    S total() const {
        S acc = scalar_traits<S>::zero();
        for (const auto& w : weights_) acc += w;
        return acc;
    }

    std::vector<std::size_t> support() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < weights_.size(); ++i)
            if (weights_[i] > scalar_traits<S>::zero()) out.push_back(i);
        return out;
    }

    std::vector<std::size_t> null_atoms() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < weights_.size(); ++i)
            if (weights_[i] == scalar_traits<S>::zero()) out.push_back(i);
        return out;
    }

    WeightedSpace<S> as_space() const { return WeightedSpace<S>(space_, weights_); }

    Measure scaled(const S& c) const {
        std::vector<S> w(weights_);
        for (auto& x : w) x *= c;
        return Measure(space_, std::move(w));
    }

    bool operator==(const Measure& other) const {
        return same_space(space_, other.space_) && weights_ == other.weights_;
    }

private:
    AtomSpacePtr space_;
    std::vector<S> weights_;
};

template <class S>
struct DecompositionDiagnostics {
    bool additivity_ok = true;
    bool absolutely_continuous_ok = true;
    bool singular_ok = true;
    bool indicator_ok = true;
    bool standard_form_ok = true;
    bool positivity_ok = true;
    S additivity_residual = scalar_traits<S>::zero();  // max atomwise |nu - nu_a - nu_s|
    S ac_residual = scalar_traits<S>::zero();          // max nu_a mass on a mu-null atom
    S singular_residual = scalar_traits<S>::zero();    // total nu_s mass off the mu-null set
    S indicator_residual = scalar_traits<S>::zero();   // |integral of P1 - P1^2 dnu|
    S positivity_residual = scalar_traits<S>::zero();  // worst violation of 0 <= P1 <= 1
    std::vector<std::size_t> clamped_atoms;            // float backend: masses clamped up to 0

    bool all_ok() const {
        return additivity_ok && absolutely_continuous_ok && singular_ok && indicator_ok &&
               standard_form_ok && positivity_ok;
    }
};

/// Result of a Lebesgue decomposition nu = nu_a + nu_s.
template <class S>
struct Decomposition {
    Measure<S> nu_a;
    Measure<S> nu_s;
    SimpleFunction<S> p1;                  // projection of 1 onto the multivalued part
    std::vector<std::size_t> singular_set; // S, the carrier of nu_s
    std::vector<std::size_t> mu_support;   // atoms where the density is defined
    std::vector<S> density;                // d(nu_a)/d(mu), aligned with mu_support
    S tol;
    DecompositionDiagnostics<S> diagnostics;
};

/// The relation L = {(phi, phi)} generated by atom indicators, each component
/// reduced to its space's canonical a.e.-representative.
template <class S>
LinearRelation<S> build_relation(const Measure<S>& mu, const Measure<S>& nu) {
    if (!same_space(mu.space(), nu.space()))
        throw std::invalid_argument("measures live on different atom spaces");
    WeightedSpace<S> h = mu.as_space();
    WeightedSpace<S> k = nu.as_space();
    std::vector<GeneratorPair<S>> gens;
    gens.reserve(mu.size());
    for (std::size_t t = 0; t < mu.size(); ++t) {
        auto chi = SimpleFunction<S>::indicator(mu.space(), {t});
        gens.push_back({chi, chi});
    }
    return LinearRelation<S>(std::move(h), std::move(k), std::move(gens));
}

/// The subspace M of L2(nu): limits of simple functions that vanish in L2(mu).
template <class S>
Subspace<S> compute_M(const Measure<S>& mu, const Measure<S>& nu, const S& tol) {
    return mval_part(build_relation(mu, nu), tol);
}

/// Definition check: every mu-null atom carries zero candidate mass.
template <class S>
bool check_absolutely_continuous(const Measure<S>& candidate, const Measure<S>& mu) {
    if (!same_space(candidate.space(), mu.space()))
        throw std::invalid_argument("measures live on different atom spaces");
    for (std::size_t t = 0; t < mu.size(); ++t)
        if (mu.weight(t) == scalar_traits<S>::zero() &&
            !(candidate.weight(t) == scalar_traits<S>::zero()))
            return false;
    return true;
}

/// Definition check with the optimal witness on a finite space: the candidate
/// vanishes off the mu-null atom set.
template <class S>
bool check_singular(const Measure<S>& candidate, const Measure<S>& mu) {
    if (!same_space(candidate.space(), mu.space()))
        throw std::invalid_argument("measures live on different atom spaces");
    for (std::size_t t = 0; t < mu.size(); ++t)
        if (mu.weight(t) > scalar_traits<S>::zero() &&
            !(candidate.weight(t) == scalar_traits<S>::zero()))
            return false;
    return true;
}

namespace detail {

// Float-backend agreement margin between P1 and the 0/1 indicator it provably
// is; well above roundoff, far below the 1/2 classification threshold.
inline constexpr double kIndicatorAgreeTol = 1e-6;

// Subset-sum table over all 2^n subsets, built incrementally: the sum over a
// mask extends the sum over the mask without its lowest set bit.
template <class S>
std::vector<S> subset_sums(const std::vector<S>& w) {
    const std::size_t n = w.size();
    std::vector<S> sums(std::size_t{1} << n, scalar_traits<S>::zero());
    for (std::size_t mask = 1; mask < sums.size(); ++mask) {
        const std::size_t low = mask & (~mask + 1);
        std::size_t bit = 0;
        while ((std::size_t{1} << bit) != low) ++bit;
        sums[mask] = sums[mask ^ low] + w[bit];
    }
    return sums;
}

}  // namespace detail

/// Checks that the integral of P1 - P1^2 against nu vanishes and that P1
/// agrees a.e. with the indicator of the singular set.
template <class S>
bool verify_indicator(const Decomposition<S>& d, const Measure<S>& nu) {
    S integral = scalar_traits<S>::zero();
    for (std::size_t t = 0; t < nu.size(); ++t)
        integral += (d.p1[t] - d.p1[t] * d.p1[t]) * nu.weight(t);
    const S residual = scalar_traits<S>::abs(integral);

    const auto chi = SimpleFunction<S>::indicator(nu.space(), d.singular_set);
    if constexpr (scalar_traits<S>::is_exact) {
        if (!(residual == scalar_traits<S>::zero())) return false;
        for (std::size_t t = 0; t < nu.size(); ++t)
            if (nu.weight(t) > scalar_traits<S>::zero() && !(d.p1[t] == chi[t])) return false;
    } else {
        if (residual > d.tol * nu.total()) return false;
        for (std::size_t t = 0; t < nu.size(); ++t)
            if (nu.weight(t) > 0.0 &&
                scalar_traits<S>::abs(d.p1[t] - chi[t]) > detail::kIndicatorAgreeTol)
                return false;
    }
    return true;
}

/// Checks the standard form nu_a(E) = nu(E \ S), nu_s(E) = nu(E cap S) over a
/// family of atom sets: every subset when n <= 12, otherwise 256 seeded random
/// subsets. Equality is exact in the exact backend and within tol * nu(T) in
/// the float backend.
template <class S>
bool standard_form_check(const Decomposition<S>& d, const Measure<S>& nu,
                         std::uint64_t seed = 0) {
    const std::size_t n = nu.size();
    std::vector<bool> in_s(n, false);
    for (std::size_t t : d.singular_set) in_s[t] = true;

    const S zero = scalar_traits<S>::zero();
    std::vector<S> nu_off_s(n, zero), nu_on_s(n, zero);
    for (std::size_t t = 0; t < n; ++t)
        (in_s[t] ? nu_on_s[t] : nu_off_s[t]) = nu.weight(t);

    const S tol_mass = scalar_traits<S>::is_exact ? zero : d.tol * nu.total();
    const auto matches = [&](const S& x, const S& y) {
        return !(scalar_traits<S>::abs(x - y) > tol_mass);
    };

    if (n <= 12) {
        const auto a_sums = detail::subset_sums(d.nu_a.weights());
        const auto s_sums = detail::subset_sums(d.nu_s.weights());
        const auto off_sums = detail::subset_sums(nu_off_s);
        const auto on_sums = detail::subset_sums(nu_on_s);
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask)
            if (!matches(a_sums[mask], off_sums[mask]) || !matches(s_sums[mask], on_sums[mask]))
                return false;
        return true;
    }

    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < 256; ++trial) {
        S a_sum = zero, s_sum = zero, off_sum = zero, on_sum = zero;
        for (std::size_t t = 0; t < n; ++t) {
            if ((rng() & 1) == 0) continue;
            a_sum += d.nu_a.weight(t);
            s_sum += d.nu_s.weight(t);
            off_sum += nu_off_s[t];
            on_sum += nu_on_s[t];
        }
        if (!matches(a_sum, off_sum) || !matches(s_sum, on_sum)) return false;
    }
    return true;
}

namespace detail {

template <class S>
void populate_diagnostics(Decomposition<S>& d, const Measure<S>& mu, const Measure<S>& nu,
                          std::uint64_t seed) {
    auto& diag = d.diagnostics;
    const S zero = scalar_traits<S>::zero();
    const S total = nu.total();
    const S tol_mass = scalar_traits<S>::is_exact ? zero : d.tol * total;

    diag.additivity_residual = zero;
    for (std::size_t t = 0; t < nu.size(); ++t) {
        const S r = scalar_traits<S>::abs(nu.weight(t) - d.nu_a.weight(t) - d.nu_s.weight(t));
        diag.additivity_residual = std::max(diag.additivity_residual, r);
    }
    diag.additivity_ok = !(diag.additivity_residual > tol_mass);

    diag.ac_residual = zero;
    diag.singular_residual = zero;
    for (std::size_t t = 0; t < mu.size(); ++t) {
        if (mu.weight(t) == zero)
            diag.ac_residual = std::max(diag.ac_residual, d.nu_a.weight(t));
        else
            diag.singular_residual += d.nu_s.weight(t);
    }
    diag.absolutely_continuous_ok = !(diag.ac_residual > tol_mass);
    diag.singular_ok = !(diag.singular_residual > tol_mass);

    diag.positivity_residual = zero;
    for (std::size_t t = 0; t < nu.size(); ++t) {
        if (!(nu.weight(t) > zero)) continue;
        diag.positivity_residual = std::max(diag.positivity_residual, S(-d.p1[t]));
        diag.positivity_residual =
            std::max(diag.positivity_residual, S(d.p1[t] - scalar_traits<S>::one()));
    }
    diag.positivity_residual = std::max(diag.positivity_residual, zero);
    diag.positivity_ok = scalar_traits<S>::is_exact ? diag.positivity_residual == zero
                                                    : !(diag.positivity_residual > d.tol);

    S integral = zero;
    for (std::size_t t = 0; t < nu.size(); ++t)
        integral += (d.p1[t] - d.p1[t] * d.p1[t]) * nu.weight(t);
    diag.indicator_residual = scalar_traits<S>::abs(integral);
    diag.indicator_ok = verify_indicator(d, nu);
    diag.standard_form_ok = standard_form_check(d, nu, seed);
}

}  // namespace detail

/// The full construction: project 1 onto M, integrate, classify the singular
/// carrier, and verify. Degenerate inputs (mu = 0, nu = 0, disjoint supports)
/// run through the same path. Float-backend verification failures are
/// recorded in the diagnostics, never raised.
template <class S>
Decomposition<S> decompose(const Measure<S>& mu, const Measure<S>& nu, const S& tol,
                           std::uint64_t seed = 0) {
    const auto m_sub = compute_M(mu, nu, tol);
    const auto p1 = project(m_sub, SimpleFunction<S>::ones(nu.space()));

    const S zero = scalar_traits<S>::zero();
    const S one = scalar_traits<S>::one();

    std::vector<std::size_t> singular_set;
    if constexpr (scalar_traits<S>::is_exact)
        singular_set = level_set(p1, Cmp::NotEqual, zero);
    else
        singular_set = level_set(p1, Cmp::GreaterEq, 0.5);

    std::vector<S> ws(nu.size(), zero), wa(nu.size(), zero);
    std::vector<std::size_t> clamped;
    for (std::size_t t = 0; t < nu.size(); ++t) {
        ws[t] = p1[t] * nu.weight(t);
        wa[t] = (one - p1[t]) * nu.weight(t);
        if constexpr (!scalar_traits<S>::is_exact) {
            if (ws[t] < 0.0) { ws[t] = 0.0; clamped.push_back(t); }
            if (wa[t] < 0.0) { wa[t] = 0.0; clamped.push_back(t); }
        }
    }

    Measure<S> nu_s(nu.space(), std::move(ws));
    Measure<S> nu_a(nu.space(), std::move(wa));

    const auto mu_support = mu.support();
    std::vector<S> density;
    density.reserve(mu_support.size());
    for (std::size_t t : mu_support) density.push_back(nu_a.weight(t) / mu.weight(t));

    Decomposition<S> d{std::move(nu_a), std::move(nu_s),      p1, std::move(singular_set),
                       mu_support,      std::move(density),   tol, {}};
    d.diagnostics.clamped_atoms = std::move(clamped);
    detail::populate_diagnostics(d, mu, nu, seed);
    return d;
}

/// Density of the absolutely continuous part with respect to mu, one value
/// per mu-support atom (undefined elsewhere and therefore not reported).
template <class S>
std::vector<S> radon_nikodym(const Decomposition<S>& d, const Measure<S>& mu) {
    std::vector<S> out;
    for (std::size_t t : mu.support()) out.push_back(d.nu_a.weight(t) / mu.weight(t));
    return out;
}

/// Constructive witness that f lies in M: the one-term sequence (phi_1) with
/// phi_1 = f on the nu-support and 0 elsewhere, which vanishes in L2(mu) and
/// equals f in L2(nu). Throws if f is not in M.
template <class S>
std::vector<SimpleFunction<S>> witness_sequence(const SimpleFunction<S>& f, const Measure<S>& mu,
                                                const Measure<S>& nu, const S& tol) {
    const auto m_sub = compute_M(mu, nu, tol);
    const S resid = projection_residual_norm_sq(m_sub, f);
    const bool member = scalar_traits<S>::is_exact ? resid == scalar_traits<S>::zero()
                                                   : !(resid > tol * tol);
    if (!member)
        throw std::invalid_argument("function is not in the multivalued subspace");

    const auto phi = nu.as_space().canonical(f);
    const S mu_norm = norm_sq(phi, mu.as_space());
    const S nu_gap = norm_sq(phi - f, nu.as_space());
    const bool verified = scalar_traits<S>::is_exact
                              ? (mu_norm == scalar_traits<S>::zero() &&
                                 nu_gap == scalar_traits<S>::zero())
                              : (!(mu_norm > tol * tol) && !(nu_gap > tol * tol));
    if (!verified)
        throw std::invalid_argument("witness verification failed: function is not in the subspace");
    return {phi};
}

/// Ground-truth decomposition by direct atom classification: the singular
/// part is nu restricted to the mu-null atoms. No projections involved.
template <class S>
Decomposition<S> oracle_decompose(const Measure<S>& mu, const Measure<S>& nu,
                                  std::uint64_t seed = 0) {
    if (!same_space(mu.space(), nu.space()))
        throw std::invalid_argument("measures live on different atom spaces");
    const S zero = scalar_traits<S>::zero();

    std::vector<S> ws(nu.size(), zero), wa(nu.size(), zero);
    std::vector<std::size_t> p1_atoms;
    for (std::size_t t = 0; t < nu.size(); ++t) {
        if (mu.weight(t) == zero) {
            ws[t] = nu.weight(t);
            if (nu.weight(t) > zero) p1_atoms.push_back(t);
        } else {
            wa[t] = nu.weight(t);
        }
    }
    Measure<S> nu_s(nu.space(), std::move(ws));
    Measure<S> nu_a(nu.space(), std::move(wa));
    const auto p1 = SimpleFunction<S>::indicator(nu.space(), p1_atoms);

    const auto mu_support = mu.support();
    std::vector<S> density;
    for (std::size_t t : mu_support) density.push_back(nu_a.weight(t) / mu.weight(t));

    Decomposition<S> d{std::move(nu_a), std::move(nu_s), p1,
                       p1_atoms,        mu_support,      std::move(density),
                       scalar_traits<S>::default_tol(),  {}};
    detail::populate_diagnostics(d, mu, nu, seed);
    return d;
}

/// Backend bridge used when comparing exact and float runs of the same data.
inline Measure<double> to_float(const Measure<Rational>& m) {
    std::vector<double> w;
    w.reserve(m.size());
    for (const auto& x : m.weights()) w.push_back(x.get_d());
    return Measure<double>(m.space(), std::move(w));
}

}  // namespace lebdec
