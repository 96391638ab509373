#include <doctest.h>

#include "radpair/linalg.hpp"
#include "test_util.hpp"

using namespace radpair;
namespace tu = radpair::testutil;

TEST_CASE("kron identity and diagonal cases") {
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    CHECK(max_abs(kron(i2, i2) - ComplexMatrix::Identity(4, 4)) == 0.0);

    ComplexMatrix a = ComplexMatrix::Zero(2, 2), b = ComplexMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    b(1, 1) = 1.0;
    ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
    expect(1, 1) = 1.0;
    CHECK(max_abs(kron(a, b) - expect) == 0.0);
}

TEST_CASE("kron matches the index formula on random matrices") {
    auto rng = tu::make_rng(101);
    for (int rep = 0; rep < 20; ++rep) {
        const ComplexMatrix a = tu::random_matrix(rng, 2);
        const ComplexMatrix b = tu::random_matrix(rng, 2);
        const ComplexMatrix k = kron(a, b);
        for (Eigen::Index i = 0; i < 2; ++i)
            for (Eigen::Index j = 0; j < 2; ++j)
                for (Eigen::Index l = 0; l < 2; ++l)
                    for (Eigen::Index m = 0; m < 2; ++m)
                        CHECK(std::abs(k(i * 2 + l, j * 2 + m) - a(i, j) * b(l, m)) == 0.0);
    }
}

TEST_CASE("kron associativity and mixed product") {
    auto rng = tu::make_rng(102);
    for (int rep = 0; rep < 20; ++rep) {
        const ComplexMatrix a = tu::random_matrix(rng, 2), b = tu::random_matrix(rng, 2);
        const ComplexMatrix c = tu::random_matrix(rng, 2), d = tu::random_matrix(rng, 2);
        CHECK(max_abs(kron(kron(a, b), c) - kron(a, kron(b, c))) < 1e-13);
        CHECK(max_abs(kron(a, b) * kron(c, d) - kron((a * c).eval(), (b * d).eval())) < 1e-13);
    }
}

TEST_CASE("expm trivial cases") {
    CHECK(max_abs(expm(ComplexMatrix::Zero(3, 3)) - ComplexMatrix::Identity(3, 3)) == 0.0);

    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = -1.0;
    d(1, 1) = -2.0;
    const ComplexMatrix e = expm(d);
    CHECK(std::abs(e(0, 0) - std::exp(-1.0)) < 1e-15);
    CHECK(std::abs(e(1, 1) - std::exp(-2.0)) < 1e-15);
    CHECK(std::abs(e(0, 1)) == 0.0);

    CHECK_THROWS_AS(expm(ComplexMatrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("expm of the two-level mixing generator is a rotation") {
    const double omega = 0.7, t = 1.3;
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(0, 1) = omega;
    h(1, 0) = omega;
    const ComplexMatrix u = expm((Complex(0, -1) * t * h).eval());
    ComplexMatrix expect(2, 2);
    expect(0, 0) = std::cos(omega * t);
    expect(1, 1) = std::cos(omega * t);
    expect(0, 1) = Complex(0, -std::sin(omega * t));
    expect(1, 0) = Complex(0, -std::sin(omega * t));
    CHECK(max_abs(u - expect) < 1e-14);
}

TEST_CASE("expm agrees with the power-series oracle") {
    auto rng = tu::make_rng(103);
    for (int rep = 0; rep < 20; ++rep) {
        const ComplexMatrix a = tu::random_matrix(rng, 4);
        CHECK(max_abs(expm(a) - tu::expm_series_oracle(a)) < 1e-12 * std::exp(max_abs(a)));
    }
}

TEST_CASE("expm inverse and unitarity properties") {
    auto rng = tu::make_rng(104);
    for (int rep = 0; rep < 20; ++rep) {
        ComplexMatrix a = tu::random_matrix(rng, 3);
        a *= 5.0 / std::max(1.0, max_abs(a) * 3); // norm <= 5
        CHECK(max_abs(expm(a) * expm((-a).eval()) - ComplexMatrix::Identity(3, 3)) < 1e-10);

        const ComplexMatrix h = tu::random_hermitian(rng, 3);
        const double t = 0.1 + rep * 0.1;
        const ComplexMatrix u = expm((Complex(0, -1) * t * h).eval());
        CHECK(max_abs(u * u.adjoint() - ComplexMatrix::Identity(3, 3)) < 1e-10);
    }
}

TEST_CASE("vec is row-stacking and unvec inverts it") {
    ComplexMatrix rho(2, 2);
    rho << Complex(1, 0), Complex(2, 0.5), Complex(3, -1), Complex(4, 0);
    const ComplexVector v = vec(rho);
    CHECK(v(0) == rho(0, 0));
    CHECK(v(1) == rho(0, 1));
    CHECK(v(2) == rho(1, 0));
    CHECK(v(3) == rho(1, 1));
    CHECK(max_abs(unvec(v) - rho) == 0.0);
    CHECK(max_abs(unvec(v, 2) - rho) == 0.0);

    CHECK_THROWS_AS(unvec(ComplexVector::Zero(5)), std::invalid_argument);
    CHECK_THROWS_AS(unvec(ComplexVector::Zero(4), 3), std::invalid_argument);

    auto rng = tu::make_rng(105);
    for (int rep = 0; rep < 10; ++rep) {
        const ComplexMatrix r = tu::random_matrix(rng, 3);
        CHECK(max_abs(unvec(vec(r)) - r) == 0.0);
    }
}

TEST_CASE("vec(A rho B) = (A kron B^T) vec(rho)") {
    auto rng = tu::make_rng(106);
    for (int rep = 0; rep < 100; ++rep) {
        const Eigen::Index n = 2 + (rep % 3);
        const ComplexMatrix a = tu::random_matrix(rng, n);
        const ComplexMatrix rho = tu::random_matrix(rng, n);
        const ComplexMatrix b = tu::random_matrix(rng, n);
        const ComplexVector lhs = vec((a * rho * b).eval());
        const ComplexVector rhs = kron(a, b.transpose()) * vec(rho);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("hermiticity and positivity queries") {
    auto rng = tu::make_rng(107);
    const ComplexMatrix h = tu::random_hermitian(rng, 3);
    CHECK(is_hermitian(h, 1e-14));
    CHECK(hermiticity_defect(h) < 1e-15);
    const ComplexMatrix rho = tu::random_density(rng, 3);
    CHECK(is_positive_semidefinite(rho, 1e-12));
    CHECK(min_eigenvalue(rho) >= -1e-14);

    ComplexMatrix notpsd = -ComplexMatrix::Identity(2, 2);
    CHECK(!is_positive_semidefinite(notpsd, 1e-12));
    ComplexMatrix nonherm = ComplexMatrix::Zero(2, 2);
    nonherm(0, 1) = 1.0;
    CHECK(!is_hermitian(nonherm, 1e-12));
}
