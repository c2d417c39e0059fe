#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "corpus.hpp"
#include "lebdec/measure.hpp"

#include <random>

using namespace lebdec;
using lebdec::testutil::make_atoms;
using lebdec::testutil::random_measure;
using lebdec::testutil::random_measure_pair;

namespace {

// mu = (1,1,0), nu = (2,0,3): atom t2 carries the singular mass.
struct WorkedExample {
    AtomSpacePtr atoms = make_atoms(3);
    Measure<Rational> mu{atoms, {1, 1, 0}};
    Measure<Rational> nu{atoms, {2, 0, 3}};
};

bool equal_weights(const Measure<Rational>& m, std::vector<Rational> expected) {
    return m.weights() == expected;
}

}  // namespace

TEST_CASE("build_relation emits one canonical indicator pair per atom") {
    WorkedExample ex;
    const auto rel = build_relation(ex.mu, ex.nu);
    CHECK(rel.generators().size() == 3);

    const auto atoms2 = make_atoms(2);
    const Measure<Rational> m1(atoms2, {1, 1});
    const auto rel2 = build_relation(m1, m1);
    CHECK(rel2.generators()[0].h == SimpleFunction<Rational>(atoms2, {1, 0}));
    CHECK(rel2.generators()[1].k == SimpleFunction<Rational>(atoms2, {0, 1}));

    // canonical representative zeroes the mu-null atom in the first slot
    const Measure<Rational> mu3(atoms2, {1, 0});
    const Measure<Rational> nu3(atoms2, {1, 1});
    const auto rel3 = build_relation(mu3, nu3);
    CHECK(rel3.generators()[1].h == SimpleFunction<Rational>::zero(atoms2));
    CHECK(rel3.generators()[1].k == SimpleFunction<Rational>(atoms2, {0, 1}));

    const Measure<Rational> other(make_atoms(4), {1, 1, 1, 1});
    CHECK_THROWS_AS(build_relation(ex.mu, other), std::invalid_argument);
}

TEST_CASE("compute_M is spanned by indicators of mu-null nu-positive atoms") {
    WorkedExample ex;

    // nu-support inside mu-support: M = {0}
    const Measure<Rational> nu_inside(ex.atoms, {1, 1, 0});
    CHECK(compute_M(ex.mu, nu_inside, Rational(0)).dimension() == 0);

    // mu = 0: M is all of L2(nu)
    const auto mu_zero = Measure<Rational>::zero(ex.atoms);
    const auto all = compute_M(mu_zero, ex.nu, Rational(0));
    CHECK(all.dimension() == 2);  // nu has two support atoms

    const auto m = compute_M(ex.mu, ex.nu, Rational(0));
    REQUIRE(m.dimension() == 1);
    const auto chi_c = SimpleFunction<Rational>::indicator(ex.atoms, {2});
    CHECK(projection_residual_norm_sq(m, chi_c) == 0);
}

TEST_CASE("decompose reproduces the worked three-atom example") {
    WorkedExample ex;
    const auto d = decompose(ex.mu, ex.nu, Rational(0));

    CHECK(d.p1 == SimpleFunction<Rational>(ex.atoms, {0, 0, 1}));
    CHECK(equal_weights(d.nu_a, {2, 0, 0}));
    CHECK(equal_weights(d.nu_s, {0, 0, 3}));
    CHECK(d.singular_set == std::vector<std::size_t>{2});
    CHECK(d.mu_support == std::vector<std::size_t>{0, 1});
    CHECK(d.density == std::vector<Rational>{2, 0});
    CHECK(d.diagnostics.all_ok());
}

TEST_CASE("decompose handles degenerate inputs through the same path") {
    WorkedExample ex;

    // nu absolutely continuous already
    const Measure<Rational> nu_ac(ex.atoms, {5, Rational(1, 3), 0});
    const auto d1 = decompose(ex.mu, nu_ac, Rational(0));
    CHECK(d1.p1 == SimpleFunction<Rational>::zero(ex.atoms));
    CHECK(equal_weights(d1.nu_s, {0, 0, 0}));
    CHECK(d1.nu_a == nu_ac);
    CHECK(d1.singular_set.empty());

    // mu = 0: everything is singular
    const auto d2 = decompose(Measure<Rational>::zero(ex.atoms), ex.nu, Rational(0));
    CHECK(d2.p1 == SimpleFunction<Rational>(ex.atoms, {1, 0, 1}));  // 1 on the nu-support
    CHECK(equal_weights(d2.nu_a, {0, 0, 0}));
    CHECK(d2.nu_s == ex.nu);
    CHECK(d2.diagnostics.all_ok());

    // nu = 0: both parts vanish
    const auto d3 = decompose(ex.mu, Measure<Rational>::zero(ex.atoms), Rational(0));
    CHECK(equal_weights(d3.nu_a, {0, 0, 0}));
    CHECK(equal_weights(d3.nu_s, {0, 0, 0}));
    CHECK(d3.singular_set.empty());
    CHECK(d3.diagnostics.all_ok());

    // disjoint supports
    const Measure<Rational> mu_d(ex.atoms, {1, 0, 0});
    const Measure<Rational> nu_d(ex.atoms, {0, 2, 3});
    const auto d4 = decompose(mu_d, nu_d, Rational(0));
    CHECK(d4.nu_s == nu_d);
    CHECK(equal_weights(d4.nu_a, {0, 0, 0}));
    CHECK(d4.diagnostics.all_ok());

    CHECK_THROWS_AS((Measure<Rational>(ex.atoms, {1, -1, 0})), std::invalid_argument);
}

TEST_CASE("absolute continuity and singularity predicates") {
    WorkedExample ex;
    CHECK(check_absolutely_continuous(ex.mu, ex.mu));

    const Measure<Rational> on_null(ex.atoms, {0, 0, 1});
    CHECK(!check_absolutely_continuous(on_null, ex.mu));
    CHECK(check_singular(on_null, ex.mu));
    CHECK(!check_singular(ex.mu, ex.mu));  // mu is nonzero

    CHECK(check_singular(Measure<Rational>::zero(ex.atoms), ex.mu));
    CHECK(check_absolutely_continuous(Measure<Rational>::zero(ex.atoms), ex.mu));

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const auto [mu, nu] = random_measure_pair(rng, 2 + rng() % 6);
        const auto d = decompose(mu, nu, Rational(0));
        CHECK(check_absolutely_continuous(d.nu_a, mu));
        CHECK(check_singular(d.nu_s, mu));
    }
}

TEST_CASE("P1 is an indicator and the standard form holds") {
    WorkedExample ex;
    const auto d = decompose(ex.mu, ex.nu, Rational(0));
    CHECK(verify_indicator(d, ex.nu));
    CHECK(d.diagnostics.indicator_residual == 0);
    CHECK(standard_form_check(d, ex.nu));

    // exhaustive cross-check of the standard form on all 8 subsets
    for (unsigned mask = 0; mask < 8; ++mask) {
        std::vector<std::size_t> e, e_minus_s, e_cap_s;
        for (std::size_t t = 0; t < 3; ++t) {
            if (!(mask & (1u << t))) continue;
            e.push_back(t);
            const bool in_s = t == 2;
            (in_s ? e_cap_s : e_minus_s).push_back(t);
        }
        CHECK(d.nu_a.measure_of(e) == ex.nu.measure_of(e_minus_s));
        CHECK(d.nu_s.measure_of(e) == ex.nu.measure_of(e_cap_s));
    }

    // p1 = 0 decomposition is trivially an indicator
    const auto d0 = decompose(ex.mu, Measure<Rational>(ex.atoms, {1, 1, 0}), Rational(0));
    CHECK(verify_indicator(d0, Measure<Rational>(ex.atoms, {1, 1, 0})));

    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const auto [mu, nu] = random_measure_pair(rng, 2 + rng() % 6);
        const auto d2 = decompose(mu, nu, Rational(0));
        CHECK(verify_indicator(d2, nu));
        CHECK(standard_form_check(d2, nu));
    }
}

TEST_CASE("radon_nikodym density re-integrates the absolutely continuous part") {
    WorkedExample ex;
    const auto d = decompose(ex.mu, ex.nu, Rational(0));
    CHECK(radon_nikodym(d, ex.mu) == std::vector<Rational>{2, 0});

    // nu_a = mu gives density one
    const auto atoms = make_atoms(2);
    const Measure<Rational> mu2(atoms, {1, Rational(3, 2)});
    const auto d2 = decompose(mu2, mu2, Rational(0));
    CHECK(radon_nikodym(d2, mu2) == std::vector<Rational>{1, 1});

    // nu_a = 0 gives density zero
    const Measure<Rational> nu3(atoms, {0, 0});
    const auto d3 = decompose(mu2, nu3, Rational(0));
    CHECK(radon_nikodym(d3, mu2) == std::vector<Rational>{0, 0});

    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const auto [mu, nu] = random_measure_pair(rng, 2 + rng() % 5);
        const auto d4 = decompose(mu, nu, Rational(0));
        const auto density = radon_nikodym(d4, mu);
        const auto supp = mu.support();
        for (std::size_t i = 0; i < supp.size(); ++i) {
            CHECK(density[i] >= 0);
            CHECK(density[i] * mu.weight(supp[i]) == d4.nu_a.weight(supp[i]));
        }
    }
}

TEST_CASE("witness_sequence produces a constructive membership witness") {
    WorkedExample ex;
    const auto chi_c = SimpleFunction<Rational>::indicator(ex.atoms, {2});
    const auto seq = witness_sequence(chi_c, ex.mu, ex.nu, Rational(0));
    REQUIRE(seq.size() == 1);
    // both norms recomputed independently
    CHECK(norm_sq(seq[0], ex.mu.as_space()) == 0);
    CHECK(norm_sq<Rational>(seq[0] - chi_c, ex.nu.as_space()) == 0);

    const auto zero = SimpleFunction<Rational>::zero(ex.atoms);
    const auto seq0 = witness_sequence(zero, ex.mu, ex.nu, Rational(0));
    CHECK(norm_sq(seq0[0], ex.nu.as_space()) == 0);

    const auto chi_a = SimpleFunction<Rational>::indicator(ex.atoms, {0});
    CHECK_THROWS_AS(witness_sequence(chi_a, ex.mu, ex.nu, Rational(0)), std::invalid_argument);
}

TEST_CASE("oracle_decompose matches the projection route") {
    WorkedExample ex;
    const auto d = decompose(ex.mu, ex.nu, Rational(0));
    const auto o = oracle_decompose(ex.mu, ex.nu);
    CHECK(d.nu_a == o.nu_a);
    CHECK(d.nu_s == o.nu_s);
    CHECK(d.p1 == o.p1);
    CHECK(d.singular_set == o.singular_set);

    // strictly positive mu: no singular part
    const Measure<Rational> mu_pos(ex.atoms, {1, 1, 1});
    CHECK(equal_weights(oracle_decompose(mu_pos, ex.nu).nu_s, {0, 0, 0}));

    // nu = 0: both parts vanish
    const auto o0 = oracle_decompose(ex.mu, Measure<Rational>::zero(ex.atoms));
    CHECK(equal_weights(o0.nu_a, {0, 0, 0}));
    CHECK(equal_weights(o0.nu_s, {0, 0, 0}));
}

TEST_CASE("exact invariants hold on random rational pairs") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 150; ++trial) {
        const auto [mu, nu] = random_measure_pair(rng, 2 + rng() % 7);
        const auto d = decompose(mu, nu, Rational(0));

        // additivity, positivity of parts
        for (std::size_t t = 0; t < nu.size(); ++t) {
            CHECK(d.nu_a.weight(t) + d.nu_s.weight(t) == nu.weight(t));
            CHECK(d.nu_a.weight(t) >= 0);
            CHECK(d.nu_s.weight(t) >= 0);
        }
        // 0 <= P1 <= 1 on the nu-support
        for (std::size_t t : nu.support()) {
            CHECK(d.p1[t] >= 0);
            CHECK(d.p1[t] <= 1);
        }
        // singularity witness: mu(S) = 0 and nu_s(T \ S) = 0
        CHECK(mu.measure_of(d.singular_set) == 0);
        Rational off_s = d.nu_s.total() - d.nu_s.measure_of(d.singular_set);
        CHECK(off_s == 0);
        // indicator identity
        Rational integral = 0;
        for (std::size_t t = 0; t < nu.size(); ++t)
            integral += (d.p1[t] - d.p1[t] * d.p1[t]) * nu.weight(t);
        CHECK(integral == 0);
        // oracle equivalence
        const auto o = oracle_decompose(mu, nu);
        CHECK(d.nu_a == o.nu_a);
        CHECK(d.nu_s == o.nu_s);
        CHECK(d.diagnostics.all_ok());
    }
}

TEST_CASE("null indicators are absorbed by M") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 30; ++trial) {
        const auto [mu, nu] = random_measure_pair(rng, 2 + rng() % 4);
        const auto m = compute_M(mu, nu, Rational(0));
        const auto d = decompose(mu, nu, Rational(0));
        const auto null_atoms = mu.null_atoms();
        // every E with mu(E) = 0 is a subset of the null atoms
        for (unsigned mask = 0; mask < (1u << null_atoms.size()); ++mask) {
            std::vector<std::size_t> e;
            for (std::size_t i = 0; i < null_atoms.size(); ++i)
                if (mask & (1u << i)) e.push_back(null_atoms[i]);
            const auto chi = SimpleFunction<Rational>::indicator(mu.space(), e);
            const auto canon = nu.as_space().canonical(chi);
            CHECK(projection_residual_norm_sq(m, canon) == 0);
            CHECK(d.nu_a.measure_of(e) == 0);
        }
    }
}

TEST_CASE("the decomposition is the unique one with its defining properties") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 60; ++trial) {
        const auto [mu, nu] = random_measure_pair(rng, 2 + rng() % 5);
        const auto d = decompose(mu, nu, Rational(0));

        // candidate pair built independently; properties hold iff untouched
        const auto o = oracle_decompose(mu, nu);
        CHECK(check_absolutely_continuous(o.nu_a, mu));
        CHECK(check_singular(o.nu_s, mu));
        CHECK(o.nu_a == d.nu_a);
        CHECK(o.nu_s == d.nu_s);

        // moving any positive mass between the parts breaks a property
        std::uniform_int_distribution<std::size_t> pick(0, nu.size() - 1);
        const std::size_t t = pick(rng);
        const Rational delta(1, 7);
        std::vector<Rational> alpha(d.nu_a.weights()), beta(d.nu_s.weights());
        alpha[t] += delta;
        beta[t] = beta[t] >= delta ? Rational(beta[t] - delta) : Rational(beta[t] + delta);
        if (beta[t] != d.nu_s.weight(t)) {  // kept additivity only if we subtracted
            const Measure<Rational> am(nu.space(), alpha), bm(nu.space(), beta);
            const bool additive = [&] {
                for (std::size_t i = 0; i < nu.size(); ++i)
                    if (am.weight(i) + bm.weight(i) != nu.weight(i)) return false;
                return true;
            }();
            if (additive) {
                const bool both_hold =
                    check_absolutely_continuous(am, mu) && check_singular(bm, mu);
                CHECK(!both_hold);
            }
        }
    }
}

TEST_CASE("decomposition is covariant under rescaling") {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 50; ++trial) {
        const auto [mu, nu] = random_measure_pair(rng, 2 + rng() % 5);
        const Rational c(3, 4);
        const auto d = decompose(mu, nu, Rational(0));

        // scaling mu leaves everything unchanged
        const auto d_mu = decompose(mu.scaled(c), nu, Rational(0));
        CHECK(d_mu.nu_a == d.nu_a);
        CHECK(d_mu.nu_s == d.nu_s);
        CHECK(d_mu.p1 == d.p1);

        // scaling nu scales both parts
        const auto d_nu = decompose(mu, nu.scaled(c), Rational(0));
        CHECK(d_nu.nu_a == d.nu_a.scaled(c));
        CHECK(d_nu.nu_s == d.nu_s.scaled(c));
        CHECK(d_nu.p1 == d.p1);
    }
}

TEST_CASE("float backend agrees with the exact backend") {
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 60; ++trial) {
        const auto [mu, nu] = random_measure_pair(rng, 2 + rng() % 7);
        const auto exact = decompose(mu, nu, Rational(0));
        const auto approx = decompose(to_float(mu), to_float(nu), 1e-12);

        const double total = nu.total().get_d();
        for (std::size_t t = 0; t < nu.size(); ++t) {
            CHECK(std::fabs(approx.nu_a.weight(t) - exact.nu_a.weight(t).get_d()) <=
                  1e-10 * total);
            CHECK(std::fabs(approx.nu_s.weight(t) - exact.nu_s.weight(t).get_d()) <=
                  1e-10 * total);
            CHECK(std::fabs(approx.p1[t] - exact.p1[t].get_d()) <= 1e-10);
        }
        CHECK(approx.singular_set == exact.singular_set);
        CHECK(approx.diagnostics.all_ok());
    }
}

TEST_CASE("float backend handles degenerate inputs") {
    const auto atoms = make_atoms(3);
    const Measure<double> mu(atoms, {1.0, 1.0, 0.0});
    const Measure<double> nu(atoms, {2.0, 0.0, 3.0});
    const auto d = decompose(mu, nu, 1e-12);
    CHECK(d.singular_set == std::vector<std::size_t>{2});
    CHECK(d.nu_s.weight(2) == doctest::Approx(3.0));
    CHECK(d.diagnostics.all_ok());

    const auto d0 = decompose(Measure<double>::zero(atoms), nu, 1e-12);
    CHECK(d0.nu_s.weight(0) == doctest::Approx(2.0));
    CHECK(d0.diagnostics.all_ok());
}

TEST_CASE("retained dead atoms stay out of every output") {
    const auto atoms = make_atoms(4);
    const Measure<Rational> mu(atoms, {1, 0, 0, 2});
    const Measure<Rational> nu(atoms, {1, 0, 3, 1});  // t1 is dead in both
    const auto d = decompose(mu, nu, Rational(0));
    CHECK(d.p1[1] == 0);
    CHECK(d.nu_a.weight(1) == 0);
    CHECK(d.nu_s.weight(1) == 0);
    // t1 not in the singular set even though mu-null, because nu-null too
    for (std::size_t t : d.singular_set) CHECK(t != 1);
    CHECK(d.singular_set == std::vector<std::size_t>{2});
}
