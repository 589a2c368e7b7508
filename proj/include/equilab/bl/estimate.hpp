#pragma once

#include <equilab/bl/feasibility.hpp>
#include <equilab/parallel.hpp>
#include <equilab/seed.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <utility>
#include <stdexcept>
#include <vector>

namespace equilab {

class SingularForm : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kDetGuard = 1e-9;

namespace detail {

inline std::vector<double> exponents_d(const BLDatum& d) {
    std::vector<double> p;
    for (const auto& e : d.exponents) p.push_back(to_double(e));
    return p;
}

/// Symmetric S; returns log det S, or nullopt when S is not safely positive
/// definite (smallest eigenvalue below kDetGuard times the largest).
inline std::optional<double> guarded_logdet(const Eigen::MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    if (!(ev(0) > kDetGuard * std::max(1.0, ev(ev.size() - 1)))) return std::nullopt;
    return ev.array().log().sum();
}

inline Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() * es.eigenvectors().transpose();
}

inline Eigen::MatrixXd traceless(Eigen::MatrixXd m) {
    const double t = m.trace() / static_cast<double>(m.rows());
    m.diagonal().array() -= t;
    return m;
}

inline Eigen::MatrixXd random_traceless_symmetric(Eigen::Index n, double scale, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, scale);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = g(rng);
    return traceless(m);
}

}  // namespace detail

/// det(sum_j p_j pi_j^T M_j pi_j)^{-1/2} prod_j det(M_j)^{p_j/2}, in log form.
inline double log_gaussian_ratio(const BLDatum& d, const std::vector<Eigen::MatrixXd>& m_list) {
    if (m_list.size() != d.maps.size()) throw DimensionMismatch("gaussian_ratio: one matrix per map");
    const auto p = detail::exponents_d(d);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d.n, d.n);
    double acc = 0;
    for (std::size_t j = 0; j < d.maps.size(); ++j) {
        const auto& pi = d.maps[j].numeric;
        const auto& m = m_list[j];
        if (m.rows() != pi.rows() || m.cols() != pi.rows()) throw DimensionMismatch("gaussian_ratio: M_j has the wrong size");
        Eigen::LLT<Eigen::MatrixXd> llt(m);
        if (llt.info() != Eigen::Success || !m.isApprox(m.transpose()))
            throw NotPositiveDefinite("gaussian_ratio: M_" + std::to_string(j) + " is not positive definite");
        acc += p[j] * llt.matrixLLT().diagonal().array().log().sum();
        s += p[j] * pi.transpose() * m * pi;
    }
    auto ld = detail::guarded_logdet(0.5 * (s + s.transpose()));
    if (!ld) throw SingularForm("gaussian_ratio: aggregate form is singular");
    return acc - 0.5 * *ld;
}

inline double gaussian_ratio(const BLDatum& d, const std::vector<Eigen::MatrixXd>& m_list) {
    return std::exp(log_gaussian_ratio(d, m_list));
}

/// log F(R, B_j) = sum_j p_j n_j (log ||B_j pi_j R||_HS - (1/2) log n_j), where
/// R plays the role of A^T. Lieb: BL^{-1} is the infimum over det-1 R, B_j.
inline double log_lieb_objective(const BLDatum& d, const Eigen::MatrixXd& r, const std::vector<Eigen::MatrixXd>& b) {
    const auto p = detail::exponents_d(d);
    double acc = 0;
    for (std::size_t j = 0; j < d.maps.size(); ++j) {
        const double nj = static_cast<double>(d.maps[j].n_j);
        const double norm2 = (b[j] * d.maps[j].numeric * r).squaredNorm();
        acc += p[j] * nj * 0.5 * (std::log(norm2) - std::log(nj));
    }
    return acc;
}

struct BLEstimateOptions {
    std::size_t restarts = 8;
    unsigned jobs = 1;
    double infinite_threshold = 1e-6;  // F below this signals an infinite constant
};

struct BLEstimate {
    double lower_bound_variational = 0;  // 1 / F at the best point found
    double lower_bound_gaussian = 0;     // best Gaussian ratio
    std::size_t iterations = 0;          // optimizer steps over all restarts
    bool converged = false;
    bool bl_infinite = false;
    double min_log_f = std::numeric_limits<double>::infinity();
    std::size_t best_restart_variational = 0;
    std::size_t best_restart_gaussian = 0;
    // Best-so-far bounds after each iteration, maximized over restarts.
    std::vector<double> trace_variational;
    std::vector<double> trace_gaussian;
};

namespace detail {

struct LiebGradient {
    Eigen::MatrixXd g;                // derivative along R <- R exp(Y)
    std::vector<Eigen::MatrixXd> gj;  // derivative along B_j <- exp(Y_j) B_j
};

/// Gradient of log F in local coordinates at (R, B_j), projected to traceless
/// symmetric matrices: G = sum_j c_j M_j^T M_j, G_j = c_j M_j M_j^T with
/// M_j = B_j pi_j R and c_j = p_j n_j / ||M_j||^2.
inline LiebGradient lieb_local_gradient(const BLDatum& d, const Eigen::MatrixXd& r, const std::vector<Eigen::MatrixXd>& b) {
    const auto p = exponents_d(d);
    LiebGradient out{Eigen::MatrixXd::Zero(d.n, d.n), {}};
    for (std::size_t j = 0; j < d.maps.size(); ++j) {
        Eigen::MatrixXd mj = b[j] * d.maps[j].numeric * r;
        const double c = p[j] * static_cast<double>(d.maps[j].n_j) / mj.squaredNorm();
        out.g += c * mj.transpose() * mj;
        out.gj.push_back(traceless(c * mj * mj.transpose()));
    }
    out.g = traceless(out.g);
    return out;
}

/// Gradient of the log Gaussian ratio along M_j <- L_j exp(H) L_j^T:
/// H_j = L_j^T grad_j L_j = (p_j/2)(I - L_j^T pi_j S^-1 pi_j^T L_j).
inline std::vector<Eigen::MatrixXd> gaussian_local_gradient(const BLDatum& d, const std::vector<Eigen::MatrixXd>& l) {
    const auto p = exponents_d(d);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d.n, d.n);
    for (std::size_t j = 0; j < d.maps.size(); ++j)
        s += p[j] * d.maps[j].numeric.transpose() * l[j] * l[j].transpose() * d.maps[j].numeric;
    Eigen::MatrixXd sinv = s.ldlt().solve(Eigen::MatrixXd::Identity(d.n, d.n));
    std::vector<Eigen::MatrixXd> h;
    for (std::size_t j = 0; j < d.maps.size(); ++j) {
        Eigen::MatrixXd lp = l[j].transpose() * d.maps[j].numeric;
        Eigen::MatrixXd hj = 0.5 * p[j] * (Eigen::MatrixXd::Identity(l[j].rows(), l[j].rows()) - lp * sinv * lp.transpose());
        h.push_back(0.5 * (hj + hj.transpose()));
    }
    return h;
}

struct RunResult {
    double best_log = 0;         // best log value reached (log(1/F) or log ratio)
    std::vector<double> trace;   // best-so-far log value per iteration, length budget
    std::size_t steps = 0;
    Eigen::MatrixXd r_best;      // variational runs: factors at the best point
    std::vector<Eigen::MatrixXd> b_best;
};

/// Gradient descent on log F in local coordinates: R <- R exp(-eta G),
/// B_j <- exp(-eta G_j) B_j with G, G_j traceless symmetric.
inline RunResult run_variational(const BLDatum& d, std::size_t budget, std::uint64_t seed, bool identity_start,
                                 double stop_log) {
    const std::size_t m = d.maps.size();
    const auto p = exponents_d(d);
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(d.n, d.n);
    std::vector<Eigen::MatrixXd> b;
    for (const auto& mp : d.maps) b.push_back(Eigen::MatrixXd::Identity(mp.n_j, mp.n_j));
    if (!identity_start) {
        r = sym_exp(random_traceless_symmetric(d.n, 0.5, rng));
        for (auto& bj : b) bj = sym_exp(random_traceless_symmetric(bj.rows(), 0.5, rng));
    }
    RunResult out;
    double f = log_lieb_objective(d, r, b);
    double best = f, eta = 0.1;
    out.r_best = r;
    out.b_best = b;
    out.trace.reserve(budget);
    for (std::size_t it = 0; it < budget; ++it) {
        bool moved = false;
        if (f > stop_log) {
            auto [g, gj] = lieb_local_gradient(d, r, b);
            double gnorm2 = g.squaredNorm();
            for (const auto& x : gj) gnorm2 += x.squaredNorm();
            if (gnorm2 > 1e-24) {
                eta *= 2;
                for (int tries = 0; tries < 60; ++tries, eta *= 0.5) {
                    Eigen::MatrixXd r2 = r * sym_exp(-eta * g);
                    std::vector<Eigen::MatrixXd> b2(m);
                    for (std::size_t j = 0; j < m; ++j) b2[j] = sym_exp(-eta * gj[j]) * b[j];
                    const double f2 = log_lieb_objective(d, r2, b2);
                    if (std::isfinite(f2) && f2 <= f - 1e-4 * eta * gnorm2) {
                        r = std::move(r2);
                        b = std::move(b2);
                        f = f2;
                        moved = true;
                        break;
                    }
                }
            }
        }
        if (moved) ++out.steps;
        if (f < best) {
            best = f;
            out.r_best = r;
            out.b_best = b;
        }
        out.trace.push_back(-best);
        if (!moved) {
            out.trace.resize(budget, -best);
            break;
        }
    }
    out.best_log = -best;
    return out;
}

/// Ascent on the log Gaussian ratio over M_j = L_j L_j^T. Steps use the
/// affine-invariant direction M_j <- L_j exp(eta H_j) L_j^T with H_j = L_j^T grad_j L_j,
/// and the stored factor is the Cholesky factor of the result.
inline RunResult run_gaussian(const BLDatum& d, std::size_t budget, std::uint64_t seed, bool identity_start,
                              double stop_log) {
    const std::size_t m = d.maps.size();
    const auto p = exponents_d(d);
    std::mt19937_64 rng(seed);
    std::vector<Eigen::MatrixXd> l;
    for (const auto& mp : d.maps) {
        Eigen::MatrixXd lj = Eigen::MatrixXd::Identity(mp.n_j, mp.n_j);
        if (!identity_start) lj = sym_exp(random_traceless_symmetric(mp.n_j, 0.5, rng)).llt().matrixL();
        l.push_back(lj);
    }
    auto value = [&](const std::vector<Eigen::MatrixXd>& ls) -> std::optional<double> {
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d.n, d.n);
        double acc = 0;
        for (std::size_t j = 0; j < m; ++j) {
            acc += p[j] * ls[j].diagonal().array().abs().log().sum();
            s += p[j] * d.maps[j].numeric.transpose() * ls[j] * ls[j].transpose() * d.maps[j].numeric;
        }
        auto ld = guarded_logdet(0.5 * (s + s.transpose()));
        if (!ld) return std::nullopt;
        return acc - 0.5 * *ld;
    };
    RunResult out;
    auto v0 = value(l);
    if (!v0) throw SingularForm("Gaussian optimizer: aggregate form is singular at the start point");
    double v = *v0, best = v, eta = 0.1;
    out.trace.reserve(budget);
    for (std::size_t it = 0; it < budget; ++it) {
        bool moved = false;
        if (v < stop_log) {
            auto h = gaussian_local_gradient(d, l);
            double gnorm2 = 0;
            for (const auto& x : h) gnorm2 += x.squaredNorm();
            if (gnorm2 > 1e-24) {
                eta *= 2;
                for (int tries = 0; tries < 60; ++tries, eta *= 0.5) {
                    std::vector<Eigen::MatrixXd> l2(m);
                    bool ok = true;
                    for (std::size_t j = 0; j < m && ok; ++j) {
                        Eigen::MatrixXd mj = l[j] * sym_exp(eta * h[j]) * l[j].transpose();
                        Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (mj + mj.transpose()));
                        ok = llt.info() == Eigen::Success;
                        if (ok) l2[j] = llt.matrixL();
                    }
                    if (!ok) continue;
                    auto v2 = value(l2);
                    if (v2 && std::isfinite(*v2) && *v2 >= v + 1e-4 * eta * gnorm2) {
                        l = std::move(l2);
                        v = *v2;
                        moved = true;
                        break;
                    }
                }
            }
        }
        if (moved) ++out.steps;
        best = std::max(best, v);
        out.trace.push_back(best);
        if (!moved) {
            out.trace.resize(budget, best);
            break;
        }
    }
    out.best_log = best;
    return out;
}

inline std::size_t best_index(const std::vector<RunResult>& runs) {
    std::size_t bi = 0;
    for (std::size_t i = 1; i < runs.size(); ++i)
        if (runs[i].best_log > runs[bi].best_log) bi = i;
    return bi;
}

/// log |r| for a nonzero rational, without overflow for large numerators.
inline double log_abs(const Rat& r) {
    long en = 0, ed = 0;
    const double mn = mpz_get_d_2exp(&en, r.get_num_mpz_t());
    const double md = mpz_get_d_2exp(&ed, r.get_den_mpz_t());
    return std::log(std::abs(mn)) - std::log(md) + static_cast<double>(en - ed) * std::log(2.0);
}

/// Rewrites each exact map as pi_j = T_j E_j with E_j its reduced row echelon
/// form, so the numeric work sees moderate entries. Since
/// BL({T_j E_j, p_j}) = BL({E_j, p_j}) prod_j |det T_j|^{-p_j}, the returned
/// offset is the log of that product.
inline std::pair<BLDatum, double> precondition(const BLDatum& d) {
    BLDatum work = d;
    double offset = 0;
    for (std::size_t j = 0; j < d.maps.size(); ++j) {
        if (!d.maps[j].exact) continue;
        auto e = rref(*d.maps[j].exact);
        std::vector<std::size_t> top(e.pivots.size());
        for (std::size_t i = 0; i < top.size(); ++i) top[i] = i;
        Mat rows = e.reduced.select_rows(top);
        const Rat det_t = determinant(d.maps[j].exact->select_cols(e.pivots));
        offset -= to_double(d.exponents[j]) * log_abs(det_t);
        work.maps[j] = exact_map(rows);
    }
    return {std::move(work), offset};
}

}  // namespace detail

/// Two lower bounds on BL: 1/F from Lieb's variational formula and the best
/// Gaussian ratio. Restart 0 starts at the identity, the rest at seeded random
/// points. budget is the iteration count per restart and per optimizer.
inline BLEstimate estimate_bl_constant(const BLDatum& d, std::size_t budget, std::uint64_t seed,
                                       const BLEstimateOptions& opt = {}) {
    validate_datum(d);
    if (budget == 0) throw std::invalid_argument("estimate_bl_constant: budget must be positive");
    if (opt.restarts == 0) throw std::invalid_argument("estimate_bl_constant: need at least one restart");
    if (!scaling_condition(d))
        throw std::invalid_argument("estimate_bl_constant: scaling condition fails, BL is not finite");
    auto [work, offset] = detail::precondition(d);
    const double inf_log = std::log(opt.infinite_threshold);
    // Runs see the preconditioned datum, whose bounds differ by exp(offset).
    // Stop a run once it is clearly past the threshold, well before overflow.
    const double var_stop = inf_log - 2.0 + offset;
    const double gauss_stop = -inf_log + 2.0 - offset;

    // The Gaussian run of restart r works in the coordinates B_j pi_j R of the
    // best variational point of that restart; BL changes by the exact factor
    // |det R|^{-1} prod_j |det B_j|^{-p_j}, folded into shift below.
    struct Pair {
        detail::RunResult var, gauss;
        double shift = 0;
    };
    const auto p = detail::exponents_d(work);
    auto runs = parallel_map(opt.restarts, opt.jobs, [&](std::size_t r) {
        const bool id = r == 0;
        Pair pr;
        pr.var = detail::run_variational(work, budget, derive_seed(seed, 0x7A, r), id, var_stop);
        BLDatum moved = work;
        pr.shift = -std::log(std::abs(pr.var.r_best.determinant()));
        for (std::size_t j = 0; j < work.maps.size(); ++j) {
            auto& mp = moved.maps[j];
            mp.exact.reset();
            mp.numeric = pr.var.b_best[j] * work.maps[j].numeric * pr.var.r_best;
            pr.shift -= p[j] * std::log(std::abs(pr.var.b_best[j].determinant()));
        }
        try {
            pr.gauss = detail::run_gaussian(moved, budget, derive_seed(seed, 0x6A, r), id, gauss_stop - pr.shift);
            pr.gauss.best_log += pr.shift;
            for (auto& t : pr.gauss.trace) t += pr.shift;
        } catch (const SingularForm&) {
            pr.gauss.best_log = -std::numeric_limits<double>::infinity();
            pr.gauss.trace.assign(budget, pr.gauss.best_log);
        }
        return pr;
    });
    std::vector<detail::RunResult> var, gauss;
    for (auto& pr : runs) {
        var.push_back(std::move(pr.var));
        gauss.push_back(std::move(pr.gauss));
    }

    BLEstimate est;
    est.best_restart_variational = detail::best_index(var);
    est.best_restart_gaussian = detail::best_index(gauss);
    est.min_log_f = -var[est.best_restart_variational].best_log - offset;
    est.lower_bound_variational = std::exp(var[est.best_restart_variational].best_log + offset);
    est.lower_bound_gaussian = std::exp(gauss[est.best_restart_gaussian].best_log + offset);
    // Either bound above 1/threshold certifies BL beyond the threshold scale.
    est.bl_infinite = est.min_log_f < inf_log || !(est.lower_bound_gaussian < 1.0 / opt.infinite_threshold);
    est.trace_variational.assign(budget, 0.0);
    est.trace_gaussian.assign(budget, 0.0);
    for (std::size_t r = 0; r < opt.restarts; ++r) {
        est.iterations += var[r].steps + gauss[r].steps;
        for (std::size_t t = 0; t < budget; ++t) {
            est.trace_variational[t] = std::max(est.trace_variational[t], std::exp(var[r].trace[t] + offset));
            est.trace_gaussian[t] = std::max(est.trace_gaussian[t], std::exp(gauss[r].trace[t] + offset));
        }
    }
    const std::size_t tail = budget - std::max<std::size_t>(1, budget / 10);
    est.converged = !est.bl_infinite;
    for (std::size_t t = tail; t < budget && est.converged; ++t) {
        const double a = est.trace_variational[t], g = est.trace_gaussian[t];
        if (!std::isfinite(a) || !std::isfinite(g) || !(std::abs(a - g) <= 1e-3 * std::max(a, g))) est.converged = false;
    }
    return est;
}

inline Json estimate_to_json(const BLEstimate& e) {
    return Json{{"lower_bound_variational", e.lower_bound_variational},
                {"lower_bound_gaussian", e.lower_bound_gaussian},
                {"iterations", e.iterations},
                {"converged", e.converged},
                {"bl_infinite", e.bl_infinite},
                {"min_log_F", e.min_log_f},
                {"best_restart_variational", e.best_restart_variational},
                {"best_restart_gaussian", e.best_restart_gaussian}};
}

}  // namespace equilab
