#pragma once

// Seeded random generators shared by the unit and acceptance suites.

#include "lebdec/measure.hpp"

#include <random>
#include <string>
#include <utility>
#include <vector>

namespace lebdec::testutil {

inline AtomSpacePtr make_atoms(std::size_t n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back("t" + std::to_string(i));
    return AtomSpace::make(std::move(labels));
}

// Small nonnegative rational, zero with probability zero_pct/100.
inline Rational random_weight(std::mt19937_64& rng, int zero_pct = 30) {
    std::uniform_int_distribution<int> pct(0, 99);
    if (pct(rng) < zero_pct) return Rational(0);
    std::uniform_int_distribution<int> num(1, 12), den(1, 12);
    Rational r(num(rng), den(rng));
    r.canonicalize();
    return r;
}

// Signed rational for arbitrary simple-function values.
inline Rational random_value(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
    Rational r(num(rng), den(rng));
    r.canonicalize();
    return r;
}

inline Measure<Rational> random_measure(std::mt19937_64& rng, const AtomSpacePtr& space,
                                        int zero_pct = 30) {
    std::vector<Rational> w;
    w.reserve(space->size());
    for (std::size_t i = 0; i < space->size(); ++i) w.push_back(random_weight(rng, zero_pct));
    return Measure<Rational>(space, std::move(w));
}

inline std::pair<Measure<Rational>, Measure<Rational>> random_measure_pair(std::mt19937_64& rng,
                                                                           std::size_t n) {
    const auto space = make_atoms(n);
    return {random_measure(rng, space), random_measure(rng, space)};
}

template <class S>
SimpleFunction<S> random_function(std::mt19937_64& rng, const AtomSpacePtr& space) {
    std::vector<S> v;
    v.reserve(space->size());
    for (std::size_t i = 0; i < space->size(); ++i) {
        if constexpr (scalar_traits<S>::is_exact)
            v.push_back(random_value(rng));
        else
            v.push_back(std::uniform_real_distribution<double>(-3.0, 3.0)(rng));
    }
    return SimpleFunction<S>(space, std::move(v));
}

template <class S>
WeightedSpace<S> random_weighted_space(std::mt19937_64& rng, const AtomSpacePtr& space,
                                       int zero_pct = 25) {
    std::vector<S> w;
    w.reserve(space->size());
    for (std::size_t i = 0; i < space->size(); ++i) {
        const Rational r = random_weight(rng, zero_pct);
        if constexpr (scalar_traits<S>::is_exact)
            w.push_back(r);
        else
            w.push_back(r.get_d());
    }
    return WeightedSpace<S>(space, std::move(w));
}

}  // namespace lebdec::testutil
