#pragma once

#include <equilab/rep/config.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace equilab {

class InvalidLevel : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct WeightDecomposition {
    std::size_t n = 0;
    std::vector<Rat> eigenvalues;     // ascending
    std::vector<std::size_t> multiplicities;
    std::vector<Subspace> eigenbases;
    bool coordinate_adapted = false;  // a_action diagonal: eigenbases are coordinate subspaces

    [[nodiscard]] const Rat& mu_max() const { return eigenvalues.back(); }
    [[nodiscard]] const Rat& mu_min() const { return eigenvalues.front(); }
    [[nodiscard]] std::size_t index_of(const Rat& mu) const {
        for (std::size_t i = 0; i < eigenvalues.size(); ++i)
            if (eigenvalues[i] == mu) return i;
        throw InvalidLevel("weight " + to_string(mu) + " is not an eigenvalue of a");
    }
};

struct FlagProjector {
    Rat mu;
    Subspace flag;
    Mat projector;
};

namespace detail {

/// Best rational approximation with bounded denominator (continued fractions).
inline Rat nearest_rational(double x, long max_den = 1000000) {
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(r);
        long ai = static_cast<long>(a);
        long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double frac = r - a;
        if (std::fabs(frac) < 1e-12) break;
        r = 1.0 / frac;
    }
    Rat out(p1, q1);
    out.canonicalize();
    return out;
}

}  // namespace detail

inline WeightDecomposition weight_decompose(const Mat& a_action) {
    if (!a_action.square()) throw DimensionMismatch("a_action must be square");
    const std::size_t n = a_action.rows();
    WeightDecomposition dec;
    dec.n = n;
    if (a_action.is_diagonal()) {
        dec.coordinate_adapted = true;
        std::map<Rat, std::vector<std::size_t>> idx;
        for (std::size_t i = 0; i < n; ++i) idx[a_action(i, i)].push_back(i);
        for (auto& [mu, coords] : idx) {
            dec.eigenvalues.push_back(mu);
            dec.multiplicities.push_back(coords.size());
            dec.eigenbases.push_back(Subspace::coordinate(n, coords));
        }
        return dec;
    }
    // General path: candidate eigenvalues from a floating eigensolve, then exact confirmation.
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = to_double(a_action(i, j));
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    std::map<Rat, bool> candidates;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        auto ev = es.eigenvalues()[i];
        if (std::fabs(ev.imag()) > 1e-6 * (1 + std::abs(ev)))
            throw RationalityError("a has non-real eigenvalues");
        candidates[detail::nearest_rational(ev.real())] = true;
    }
    std::size_t total = 0;
    for (auto& [mu, unused] : candidates) {
        auto eig = kernel_basis(a_action - Mat::identity(n) * mu);
        if (eig.is_zero()) continue;
        dec.eigenvalues.push_back(mu);
        dec.multiplicities.push_back(eig.dim());
        dec.eigenbases.push_back(std::move(eig));
        total += dec.multiplicities.back();
    }
    if (total != n) throw RationalityError("a is not diagonalizable over Q");
    return dec;
}

inline WeightDecomposition weight_decompose(const RepConfig& cfg) { return weight_decompose(cfg.a_action); }

/// V^(mu) = sum of eigenspaces with eigenvalue >= mu.
inline Subspace flag_subspace(const WeightDecomposition& dec, const Rat& mu) {
    std::size_t i0 = dec.index_of(mu);
    std::vector<Subspace> parts(dec.eigenbases.begin() + static_cast<std::ptrdiff_t>(i0), dec.eigenbases.end());
    return subspace_sum(std::span<const Subspace>(parts));
}

inline FlagProjector flag_projector(const WeightDecomposition& dec, const Rat& mu) {
    std::size_t i0 = dec.index_of(mu);
    FlagProjector fp{mu, flag_subspace(dec, mu), Mat(dec.n, dec.n)};
    if (dec.coordinate_adapted) {
        for (std::size_t i = i0; i < dec.eigenbases.size(); ++i)
            for (auto p : dec.eigenbases[i].pivots()) fp.projector(p, p) = 1;
        return fp;
    }
    // P D P^{-1} with P the eigenbasis matrix and D selecting eigenvalues >= mu.
    Mat p(dec.n, 0);
    std::vector<Rat> sel;
    for (std::size_t i = 0; i < dec.eigenbases.size(); ++i) {
        p = hstack(p, dec.eigenbases[i].basis());
        for (std::size_t k = 0; k < dec.multiplicities[i]; ++k) sel.push_back(i >= i0 ? 1 : 0);
    }
    fp.projector = p * Mat::diagonal(sel) * inverse(p);
    return fp;
}

/// Single weight space V_mu.
inline Subspace weight_space(const WeightDecomposition& dec, const Rat& mu) {
    return dec.eigenbases[dec.index_of(mu)];
}

inline bool check_proximal(const WeightDecomposition& dec) {
    return !dec.multiplicities.empty() && dec.multiplicities.back() == 1;
}

struct HorosphericalBasis {
    std::vector<Mat> u_plus;
    std::vector<Mat> u_minus;
};

inline HorosphericalBasis horospherical_basis(const RepConfig& cfg) {
    if (!cfg.h_internal) throw IncompleteConfig(cfg.name + ": h_internal is missing");
    HorosphericalBasis hb;
    auto collect = [&](const std::vector<std::size_t>& idx, int sign, std::vector<Mat>& out) {
        for (auto i : idx) {
            const Mat& x = cfg.h_basis.at(i);
            Mat br = commutator(cfg.a_action, x);
            // find lambda with [a, x] = lambda x
            Rat lambda = 0;
            for (std::size_t k = 0; k < x.entries().size(); ++k)
                if (sgn(x.entries()[k]) != 0) {
                    lambda = br.entries()[k] / x.entries()[k];
                    break;
                }
            if (!(br == x * lambda) || sgn(lambda) != sign)
                throw std::logic_error(cfg.name + ": horospherical generator has wrong ad(a)-weight");
            if (!power(x, static_cast<unsigned>(cfg.n)).is_zero())
                throw std::logic_error(cfg.name + ": horospherical generator is not nilpotent");
            out.push_back(x);
        }
    };
    collect(cfg.u_plus_indices, 1, hb.u_plus);
    collect(cfg.u_minus_indices, -1, hb.u_minus);
    return hb;
}

inline Json weights_to_json(const WeightDecomposition& dec) {
    Json ev = Json::array();
    for (const auto& e : dec.eigenvalues) ev.push_back(to_string(e));
    return Json{{"eigenvalues", std::move(ev)}, {"multiplicities", dec.multiplicities}};
}

}  // namespace equilab
