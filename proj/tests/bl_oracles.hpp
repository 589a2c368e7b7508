#pragma once

// Independent checks for the BL toolkit: direct quadrature of the BL
// inequality on Gaussian inputs, and combinatorial evaluation of the
// dimension condition for coordinate projections.

#include <equilab/bl/datum.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

namespace bloracle {

struct GaussianInput {
    Eigen::VectorXd center;
    Eigen::MatrixXd precision;  // f(y) = exp(-(y-c)^T P (y-c) / 2)
};

inline double gaussian_integral(const GaussianInput& g) {
    const double k = static_cast<double>(g.center.size());
    return std::pow(2 * M_PI, k / 2) / std::sqrt(g.precision.determinant());
}

/// Random input on R^k: precision eigenvalues in [0.5, 2], center in [-1, 1]^k.
inline GaussianInput random_input(Eigen::Index k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ev(0.5, 2.0), c(-1.0, 1.0);
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) a(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd lam(k), center(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        lam(i) = ev(rng);
        center(i) = c(rng);
    }
    return {center, q * lam.asDiagonal() * q.transpose()};
}

/// LHS / RHS of the BL inequality for the given inputs, the LHS integral over
/// R^3 evaluated by the trapezoid rule on [-half, half]^3 with spacing h.
inline double quadrature_ratio_3d(const equilab::BLDatum& d, const std::vector<GaussianInput>& f, double half = 14.0,
                                  double h = 0.25) {
    const int pts = static_cast<int>(std::lround(2 * half / h)) + 1;
    std::vector<double> p;
    for (const auto& e : d.exponents) p.push_back(equilab::to_double(e));
    double sum = 0;
    Eigen::Vector3d x;
    for (int a = 0; a < pts; ++a) {
        x(0) = -half + a * h;
        for (int b = 0; b < pts; ++b) {
            x(1) = -half + b * h;
            for (int c = 0; c < pts; ++c) {
                x(2) = -half + c * h;
                double expo = 0;
                for (std::size_t j = 0; j < d.maps.size(); ++j) {
                    Eigen::VectorXd y = d.maps[j].numeric * x - f[j].center;
                    expo += -0.5 * p[j] * y.dot(f[j].precision * y);
                }
                sum += std::exp(expo);
            }
        }
    }
    const double lhs = sum * h * h * h;
    double rhs = 1;
    for (std::size_t j = 0; j < d.maps.size(); ++j) rhs *= std::pow(gaussian_integral(f[j]), p[j]);
    return lhs / rhs;
}

/// For data whose maps are coordinate projections (rows are distinct unit
/// vectors), dim pi_j(U) for the coordinate subspace U on `mask` is the number
/// of kept coordinates in the mask. Returns the first violating mask, or 0.
inline unsigned coordinate_violation(const equilab::BLDatum& d) {
    std::vector<unsigned> kept;
    for (const auto& m : d.maps) {
        unsigned bits = 0;
        for (std::size_t r = 0; r < m.n_j; ++r)
            for (std::size_t c = 0; c < d.n; ++c)
                if ((*m.exact)(r, c) == 1) bits |= 1u << c;
        kept.push_back(bits);
    }
    for (unsigned mask = 1; mask < (1u << d.n); ++mask) {
        equilab::Rat rhs = 0;
        for (std::size_t j = 0; j < kept.size(); ++j) rhs += d.exponents[j] * __builtin_popcount(mask & kept[j]);
        if (equilab::Rat(__builtin_popcount(mask)) > rhs) return mask;
    }
    return 0;
}

}  // namespace bloracle
