#include <doctest.h>

#include "radpair/errors.hpp"
#include "radpair/evolve.hpp"
#include "radpair/superop.hpp"
#include "test_util.hpp"

using namespace radpair;
namespace tu = radpair::testutil;

namespace {
SpinSystem h0_system() { return SpinSystem::minimal_two_level(0.0); }
} // namespace

TEST_CASE("commutator/anticommutator superoperators: closed forms") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
    expect(0, 0) = 2.0;
    expect(1, 1) = 1.0;
    expect(2, 2) = 1.0;
    CHECK(max_abs(anticommutator_superop(a) - expect) == 0.0);
    CHECK(max_abs(commutator_superop(ComplexMatrix::Identity(3, 3))) == 0.0);
}

TEST_CASE("superoperators act as matrix (anti)commutators") {
    auto rng = tu::make_rng(301);
    for (int rep = 0; rep < 25; ++rep) {
        const Eigen::Index n = 2 + (rep % 3);
        const ComplexMatrix a = tu::random_matrix(rng, n);
        const ComplexMatrix rho = tu::random_matrix(rng, n);
        const ComplexMatrix comm = unvec(commutator_superop(a) * vec(rho), n);
        const ComplexMatrix anti = unvec(anticommutator_superop(a) * vec(rho), n);
        CHECK(max_abs(comm - (a * rho - rho * a)) < 1e-13);
        CHECK(max_abs(anti - (a * rho + rho * a)) < 1e-13);
    }
}

TEST_CASE("kinetic superoperators at H = 0 are diagonal with the stated rates") {
    const RateConstants rates{1.0, 2.0};
    const ComplexMatrix v = haberkorn_superop(h0_system(), rates).matrix;
    const ComplexMatrix w = measurement_superop(h0_system(), rates).matrix;
    ComplexMatrix vd = ComplexMatrix::Zero(4, 4), wd = ComplexMatrix::Zero(4, 4);
    vd.diagonal() << 1.0, 1.5, 1.5, 2.0;
    wd.diagonal() << 1.0, 3.0, 3.0, 2.0;
    CHECK(max_abs(v - vd) < 1e-15);
    CHECK(max_abs(w - wd) < 1e-15);
}

TEST_CASE("zero rates reduce both kinds to the coherent superoperator") {
    const SpinSystem sys = SpinSystem::minimal_two_level(0.8);
    const RateConstants none{0.0, 0.0};
    const ComplexMatrix coh = coherent_superop(sys).matrix;
    CHECK(max_abs(haberkorn_superop(sys, none).matrix - coh) == 0.0);
    CHECK(max_abs(measurement_superop(sys, none).matrix - coh) == 0.0);

    // i[H,.] has purely imaginary spectrum
    Eigen::ComplexEigenSolver<ComplexMatrix> es(coh);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        CHECK(std::abs(es.eigenvalues()(i).real()) < 1e-12);
}

TEST_CASE("negative rates are rejected") {
    CHECK_THROWS_AS(haberkorn_superop(h0_system(), {-1.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(measurement_superop(h0_system(), {0.0, -2.0}), ValidationError);
}

TEST_CASE("analytic propagator closed forms") {
    const RateConstants rates{1.0, 2.0};
    const ComplexMatrix ph = analytic_propagator(SuperopKind::haberkorn, rates, 1.0);
    CHECK(std::abs(ph(0, 0).real() - std::exp(-1.0)) < 1e-16);
    CHECK(std::abs(ph(1, 1).real() - std::exp(-1.5)) < 1e-16);
    CHECK(std::abs(ph(2, 2).real() - std::exp(-1.5)) < 1e-16);
    CHECK(std::abs(ph(3, 3).real() - std::exp(-2.0)) < 1e-16);

    const ComplexMatrix pm = analytic_propagator(SuperopKind::measurement, rates, 1.0);
    CHECK(std::abs(pm(1, 1).real() - std::exp(-3.0)) < 1e-16);
    CHECK(std::abs(pm(3, 3).real() - std::exp(-2.0)) < 1e-16);

    for (auto kind : {SuperopKind::haberkorn, SuperopKind::measurement})
        CHECK(max_abs(analytic_propagator(kind, rates, 0.0) - ComplexMatrix::Identity(4, 4)) ==
              0.0);

    CHECK_THROWS_AS(analytic_propagator(SuperopKind::haberkorn, rates, -0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(analytic_propagator(SuperopKind::coherent_only, rates, 1.0),
                    std::invalid_argument);
}

TEST_CASE("expm of the kinetic superoperators matches the analytic propagator") {
    auto rng = tu::make_rng(302);
    std::uniform_real_distribution<double> rate(0.0, 3.0);
    for (int rep = 0; rep < 20; ++rep) {
        const RateConstants rates{rate(rng), rate(rng)};
        const ComplexMatrix v = haberkorn_superop(h0_system(), rates).matrix;
        const ComplexMatrix w = measurement_superop(h0_system(), rates).matrix;
        for (double t : {0.1, 1.0, 10.0}) {
            CHECK(max_abs(expm((-t * v).eval()) -
                          analytic_propagator(SuperopKind::haberkorn, rates, t)) <= 1e-12);
            CHECK(max_abs(expm((-t * w).eval()) -
                          analytic_propagator(SuperopKind::measurement, rates, t)) <= 1e-12);
        }
    }
}

TEST_CASE("population blocks agree at H = 0; only coherence decay differs") {
    const RateConstants rates{0.7, 1.9};
    for (double t : {0.3, 2.0}) {
        const ComplexMatrix eh = expm((-t * haberkorn_superop(h0_system(), rates).matrix).eval());
        const ComplexMatrix em =
            expm((-t * measurement_superop(h0_system(), rates).matrix).eval());
        CHECK(std::abs(eh(0, 0) - em(0, 0)) < 1e-14);
        CHECK(std::abs(eh(3, 3) - em(3, 3)) < 1e-14);
        const double avg = std::exp(-0.5 * (rates.k_s + rates.k_t) * t);
        const double sum = std::exp(-(rates.k_s + rates.k_t) * t);
        CHECK(std::abs(eh(1, 1).real() - avg) < 1e-14);
        CHECK(std::abs(em(1, 1).real() - sum) < 1e-14);
    }
}

TEST_CASE("decoherence gap identity holds at dims 2 and 4") {
    auto rng = tu::make_rng(303);
    std::uniform_real_distribution<double> rate(0.0, 4.0);
    for (int rep = 0; rep < 20; ++rep) {
        const RateConstants rates{rate(rng), rate(rng)};
        const SpinSystem two = SpinSystem::minimal_two_level(rate(rng));
        CHECK(decoherence_gap_residual(two, rates) <= 1e-12);

        const ComplexMatrix qs = tu::random_projector(rng, 4, 1 + (rep % 3));
        const SpinSystem four = SpinSystem::from_matrices(tu::random_hermitian(rng, 4), qs);
        CHECK(decoherence_gap_residual(four, rates) <= 1e-12);
    }
}

TEST_CASE("equal rates factorize the haberkorn propagator but not the measurement one") {
    const SpinSystem sys = SpinSystem::minimal_two_level(1.0);
    const double k = 1.0;
    const RateConstants rates{k, k};
    const ComplexMatrix v = haberkorn_superop(sys, rates).matrix;
    const ComplexMatrix w = measurement_superop(sys, rates).matrix;
    const ComplexMatrix coh = coherent_superop(sys).matrix;
    double worst_violation = 0.0;
    for (double t : {0.25, 0.5, 1.0, 2.0, 5.0}) {
        const ComplexMatrix factored = std::exp(-k * t) * expm((-t * coh).eval());
        CHECK(max_abs(expm((-t * v).eval()) - factored) < 1e-12);
        worst_violation = std::max(worst_violation, max_abs(expm((-t * w).eval()) - factored));
    }
    CHECK(worst_violation >= 1e-3);
}
