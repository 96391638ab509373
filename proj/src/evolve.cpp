#include "radpair/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "radpair/errors.hpp"

namespace radpair {

namespace {

constexpr double kRhoTol = 1e-10;
constexpr double kImagTol = 1e-10;
constexpr double kCondLimit = 1e12;      // resolvent vs quadrature switch
constexpr double kYieldRelTol = 1e-8;    // quadrature refinement target

double real_checked(Complex z, const char* what) {
    if (std::abs(z.imag()) > kImagTol)
        throw ValidationError(std::string(what) + ": imaginary residue above tolerance");
    return z.real();
}

} // namespace

Propagator::Propagator(ComplexMatrix generator) : gen_(std::move(generator)) {
    if (gen_.rows() != gen_.cols())
        throw std::invalid_argument("Propagator: generator must be square");
    Eigen::ComplexEigenSolver<ComplexMatrix> es(gen_);
    if (es.info() != Eigen::Success)
        return;
    basis_ = es.eigenvectors();
    lambda_ = es.eigenvalues();
    Eigen::FullPivLU<ComplexMatrix> lu(basis_);
    if (!lu.isInvertible())
        return;
    basis_inv_ = lu.inverse();
    // Accept the eigenbasis only if it actually reproduces the generator.
    const double scale = std::max(1.0, max_abs(gen_));
    const double resid = max_abs(basis_ * lambda_.asDiagonal() * basis_inv_ - gen_);
    eig_ok_ = resid <= 1e-12 * scale;
    if (!eig_ok_)
        lambda_.resize(0);
}

ComplexVector Propagator::apply(double t, const ComplexVector& v0) const {
    if (eig_ok_) {
        ComplexVector w = basis_inv_ * v0;
        for (Eigen::Index i = 0; i < w.size(); ++i)
            w(i) *= std::exp(-lambda_(i) * t);
        return basis_ * w;
    }
    return expm((-t * gen_).eval()) * v0;
}

ComplexMatrix Propagator::matrix_at(double t) const {
    if (eig_ok_) {
        ComplexVector d(lambda_.size());
        for (Eigen::Index i = 0; i < d.size(); ++i)
            d(i) = std::exp(-lambda_(i) * t);
        return basis_ * d.asDiagonal() * basis_inv_;
    }
    return expm((-t * gen_).eval());
}

void validate_density_matrix(const ComplexMatrix& rho0) {
    if (rho0.rows() != rho0.cols())
        throw ValidationError("rho0 must be square");
    if (hermiticity_defect(rho0) > kRhoTol)
        throw ValidationError("rho0 is not Hermitian");
    if (std::abs(rho0.trace() - Complex(1.0)) > kRhoTol)
        throw ValidationError("rho0 must have unit trace");
    if (min_eigenvalue(rho0) < -kRhoTol)
        throw ValidationError("rho0 has a negative eigenvalue");
}

std::pair<double, double> populations(const SpinSystem& sys, const ComplexMatrix& rho) {
    if (rho.rows() != sys.dim || rho.cols() != sys.dim)
        throw ValidationError("populations: dimension mismatch");
    return {real_checked((sys.q_singlet * rho).trace(), "pop_s"),
            real_checked((sys.q_triplet * rho).trace(), "pop_t")};
}

namespace {

double coherence_magnitude(const SpinSystem& sys, const ComplexMatrix& rho) {
    if (sys.dim == 2)
        return std::abs(rho(0, 1));
    return max_abs(sys.q_singlet * rho * sys.q_triplet);
}

// k * integral of pop(t') dt' over [0, t] for every grid point, by composite
// Simpson per grid segment, doubling panels until the increment stabilizes.
std::vector<double> yields_by_quadrature(const SpinSystem& sys, const ComplexMatrix& q,
                                         double k, const Propagator& prop,
                                         const ComplexVector& v0,
                                         const std::vector<double>& times) {
    auto pop_at = [&](double t) {
        const ComplexMatrix rho = unvec(prop.apply(t, v0), sys.dim);
        return real_checked((q * rho).trace(), "yield quadrature");
    };
    std::vector<double> out(times.size(), 0.0);
    if (k == 0.0)
        return out;
    double accum = 0.0;
    double prev_t = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double a = prev_t, b = times[i];
        if (b > a) {
            double segment = 0.0;
            double last = 0.0;
            for (int panels = 4; panels <= (1 << 14); panels *= 2) {
                const double h = (b - a) / panels;
                double sum = pop_at(a) + pop_at(b);
                for (int j = 1; j < panels; ++j)
                    sum += (j % 2 ? 4.0 : 2.0) * pop_at(a + j * h);
                segment = sum * h / 3.0;
                if (panels > 4 &&
                    std::abs(segment - last) <= kYieldRelTol * std::max(std::abs(accum + segment), 1e-6))
                    break;
                last = segment;
            }
            accum += segment;
        }
        out[i] = k * accum;
        prev_t = b;
    }
    return out;
}

} // namespace

void compute_yields(const SpinSystem& sys, const RateConstants& rates, const Superoperator& op,
                    const ComplexMatrix& rho0, EvolutionResult& result) {
    if (!std::is_sorted(result.times.begin(), result.times.end()))
        throw ValidationError("yields: time grid must be sorted");
    const ComplexVector v0 = vec(rho0);
    const Propagator prop(op.matrix);

    Eigen::BDCSVD<ComplexMatrix> svd(op.matrix);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1), smax = sv(0);
    const bool invertible = smin > 0.0 && smax / smin <= kCondLimit;

    const std::size_t np = result.times.size();
    result.yield_s.assign(np, 0.0);
    result.yield_t.assign(np, 0.0);
    if (invertible) {
        // integral of exp(-G t') dt' = G^-1 (1 - exp(-G t)) applied to vec(rho0)
        Eigen::PartialPivLU<ComplexMatrix> lu(op.matrix);
        for (std::size_t i = 0; i < np; ++i) {
            const ComplexVector tail = prop.apply(result.times[i], v0);
            const ComplexMatrix integ = unvec(lu.solve((v0 - tail).eval()), sys.dim);
            result.yield_s[i] = rates.k_s * real_checked((sys.q_singlet * integ).trace(), "yield_s");
            result.yield_t[i] = rates.k_t * real_checked((sys.q_triplet * integ).trace(), "yield_t");
        }
    } else {
        result.yield_s = yields_by_quadrature(sys, sys.q_singlet, rates.k_s, prop, v0, result.times);
        result.yield_t = yields_by_quadrature(sys, sys.q_triplet, rates.k_t, prop, v0, result.times);
    }
}

EvolutionResult propagate(const SpinSystem& sys, const RateConstants& rates,
                          const Superoperator& op, const ComplexMatrix& rho0,
                          const std::vector<double>& times) {
    sys.validate();
    validate_rates(rates);
    validate_density_matrix(rho0);
    if (rho0.rows() != sys.dim)
        throw ValidationError("propagate: rho0 dimension mismatch");
    if (op.matrix.rows() != sys.dim * sys.dim)
        throw ValidationError("propagate: superoperator dimension mismatch");
    if (!std::is_sorted(times.begin(), times.end()))
        throw ValidationError("propagate: time grid must be sorted");
    if (!times.empty() && times.front() < 0.0)
        throw ValidationError("propagate: times must be nonnegative");

    EvolutionResult result;
    result.times = times;
    result.rho_t.reserve(times.size());
    const ComplexVector v0 = vec(rho0);
    const Propagator prop(op.matrix);
    for (double t : times) {
        ComplexMatrix rho = unvec(prop.apply(t, v0), sys.dim);
        auto [ps, pt] = populations(sys, rho);
        result.pop_s.push_back(ps);
        result.pop_t.push_back(pt);
        result.trace.push_back(real_checked(rho.trace(), "trace"));
        result.coherence_st.push_back(coherence_magnitude(sys, rho));
        result.rho_t.push_back(std::move(rho));
    }
    compute_yields(sys, rates, op, rho0, result);
    return result;
}

ComplexMatrix rhs_haberkorn(const SpinSystem& sys, const RateConstants& rates,
                            const ComplexMatrix& rho) {
    const Complex i(0, 1);
    return -i * (sys.hamiltonian * rho - rho * sys.hamiltonian) -
           0.5 * rates.k_s * (sys.q_singlet * rho + rho * sys.q_singlet) -
           0.5 * rates.k_t * (sys.q_triplet * rho + rho * sys.q_triplet);
}

ComplexMatrix rhs_measurement(const SpinSystem& sys, const RateConstants& rates,
                              const ComplexMatrix& rho) {
    const Complex i(0, 1);
    return -i * (sys.hamiltonian * rho - rho * sys.hamiltonian) - (rates.k_s + rates.k_t) * rho +
           rates.k_s * sys.q_triplet * rho * sys.q_triplet +
           rates.k_t * sys.q_singlet * rho * sys.q_singlet;
}

ComplexMatrix rhs_measurement_projection(const SpinSystem& sys, const RateConstants& rates,
                                         const ComplexMatrix& rho) {
    const Complex i(0, 1);
    const ComplexMatrix& qs = sys.q_singlet;
    const ComplexMatrix& qt = sys.q_triplet;
    const ComplexMatrix cross = qs * rho * qt + qt * rho * qs;
    return -i * (sys.hamiltonian * rho - rho * sys.hamiltonian) -
           rates.k_s * (qs * rho * qs + cross) - rates.k_t * (qt * rho * qt + cross);
}

} // namespace radpair
