#pragma once

#include <equilab/exact/json.hpp>
#include <equilab/generic/sampling.hpp>
#include <equilab/rep/weights.hpp>

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace equilab {

class InvalidExponent : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline Eigen::MatrixXd to_eigen(const Mat& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
    return out;
}

struct BLMap {
    std::size_t n_j = 0;
    std::optional<Mat> exact;  // n_j x n, when available
    Eigen::MatrixXd numeric;   // n_j x n, always present
};

/// Linear maps pi_j : R^n -> R^{n_j} with exponents p_j.
struct BLDatum {
    std::size_t n = 0;
    std::vector<BLMap> maps;
    std::vector<Rat> exponents;

    [[nodiscard]] bool all_exact() const {
        for (const auto& m : maps)
            if (!m.exact) return false;
        return true;
    }
};

/// Validates shapes, surjectivity and exponent signs. Exponents above 1 are
/// allowed (the scaling/dimension tests decide finiteness).
inline void validate_datum(const BLDatum& d) {
    if (d.maps.size() != d.exponents.size()) throw DimensionMismatch("BL datum: maps and exponents differ in length");
    if (d.maps.empty()) throw std::invalid_argument("BL datum: no maps");
    for (std::size_t j = 0; j < d.maps.size(); ++j) {
        const auto& m = d.maps[j];
        if (m.numeric.rows() != static_cast<Eigen::Index>(m.n_j) || m.numeric.cols() != static_cast<Eigen::Index>(d.n))
            throw DimensionMismatch("BL datum: map " + std::to_string(j) + " has the wrong shape");
        if (sgn(d.exponents[j]) < 0) throw InvalidExponent("BL datum: negative exponent");
        if (m.exact) {
            if (m.exact->rows() != m.n_j || m.exact->cols() != d.n)
                throw DimensionMismatch("BL datum: exact map " + std::to_string(j) + " has the wrong shape");
            if (rank(*m.exact) != m.n_j) throw std::invalid_argument("BL datum: map " + std::to_string(j) + " is not surjective");
        } else {
            Eigen::FullPivLU<Eigen::MatrixXd> lu(m.numeric);
            if (static_cast<std::size_t>(lu.rank()) != m.n_j)
                throw std::invalid_argument("BL datum: map " + std::to_string(j) + " is not surjective");
        }
    }
}

inline BLMap exact_map(const Mat& m) { return BLMap{m.rows(), m, to_eigen(m)}; }

inline BLDatum make_datum(std::size_t n, const std::vector<Mat>& maps, const std::vector<Rat>& exponents) {
    BLDatum d;
    d.n = n;
    for (const auto& m : maps) d.maps.push_back(exact_map(m));
    d.exponents = exponents;
    validate_datum(d);
    return d;
}

/// Hölder: every map is the identity on R^n.
inline BLDatum holder_datum(std::size_t n, const std::vector<Rat>& exponents) {
    return make_datum(n, std::vector<Mat>(exponents.size(), Mat::identity(n)), exponents);
}

/// Loomis–Whitney in R^n: the n coordinate projections forgetting one coordinate, p_j = 1/(n-1).
inline BLDatum loomis_whitney_datum(std::size_t n) {
    std::vector<Mat> maps;
    for (std::size_t skip = 0; skip < n; ++skip) {
        Mat m(n - 1, n);
        std::size_t r = 0;
        for (std::size_t c = 0; c < n; ++c)
            if (c != skip) m(r++, c) = 1;
        maps.push_back(m);
    }
    return make_datum(n, maps, std::vector<Rat>(n, Rat(1, static_cast<unsigned long>(n - 1))));
}

struct SubspaceMode {
    Subspace w;
    std::vector<SampledElement> elements;
};

struct FlagMode {
    Rat mu;
    std::vector<SampledElement> elements;
};

namespace detail {

/// Orthonormal basis (columns) of the column span of b.
inline Eigen::MatrixXd orthonormal_columns(const Mat& b) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(to_eigen(b));
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(b.rows(), b.cols());
    return q;
}

}  // namespace detail

/// Subspace mode: maps pi_W ∘ h_j. The exact map is B_W^T h_j (same kernel as
/// the orthogonal projection); the numeric map uses an orthonormal basis of W.
/// Flag mode: maps pi^(mu) ∘ u_j, the coordinate projection onto V^(mu) after u_j.
/// Exponents are n / (k m) with k = dim of the target.
inline BLDatum build_datum_from_rep(const RepConfig& cfg, const std::variant<SubspaceMode, FlagMode>& mode) {
    BLDatum d;
    d.n = cfg.n;
    std::size_t k = 0, m = 0;
    if (const auto* sm = std::get_if<SubspaceMode>(&mode)) {
        if (sm->w.ambient_dim() != cfg.n) throw DimensionMismatch("build_datum_from_rep: W not in V");
        k = sm->w.dim();
        m = sm->elements.size();
        if (k == 0) throw std::invalid_argument("build_datum_from_rep: W is zero");
        Eigen::MatrixXd q = detail::orthonormal_columns(sm->w.basis());
        for (const auto& e : sm->elements)
            d.maps.push_back(BLMap{k, sm->w.basis().transpose() * e.matrix, q.transpose() * to_eigen(e.matrix)});
    } else {
        const auto& fm = std::get<FlagMode>(mode);
        auto dec = weight_decompose(cfg);
        auto fp = flag_projector(dec, fm.mu);
        if (!dec.coordinate_adapted) throw UnsupportedConfig("flag mode needs weight-adapted coordinates");
        k = fp.flag.dim();
        m = fm.elements.size();
        auto piv = fp.flag.pivots();
        Mat select(k, cfg.n);
        for (std::size_t i = 0; i < k; ++i) select(i, piv[i]) = 1;
        for (const auto& e : fm.elements) d.maps.push_back(exact_map(select * e.matrix));
    }
    if (m == 0) throw std::invalid_argument("build_datum_from_rep: need at least one element");
    Rat p(static_cast<long>(cfg.n), static_cast<long>(k * m));
    p.canonicalize();
    if (p > 1)
        throw InvalidExponent("exponent n/(k m) = " + to_string(p) + " exceeds 1; need m >= " +
                              std::to_string((cfg.n + k - 1) / k));
    d.exponents.assign(m, p);
    validate_datum(d);
    return d;
}

inline Json datum_to_json(const BLDatum& d) {
    Json maps = Json::array();
    for (const auto& m : d.maps) {
        Json jm{{"nj", m.n_j}};
        if (m.exact) {
            jm["matrix"] = mat_to_json(*m.exact)["entries"];
        } else {
            Json rows = Json::array();
            for (Eigen::Index i = 0; i < m.numeric.rows(); ++i) {
                Json r = Json::array();
                for (Eigen::Index j = 0; j < m.numeric.cols(); ++j) r.push_back(m.numeric(i, j));
                rows.push_back(std::move(r));
            }
            jm["matrix"] = std::move(rows);
        }
        maps.push_back(std::move(jm));
    }
    Json ex = Json::array();
    for (const auto& p : d.exponents) ex.push_back(to_string(p));
    return Json{{"n", d.n}, {"maps", std::move(maps)}, {"exponents", std::move(ex)}};
}

/// Datum JSON: {n, maps: [{nj, matrix}], exponents}. Matrix entries given as
/// strings or integers are exact; any floating entry makes that map numeric-only.
inline BLDatum datum_from_json(const Json& j) {
    BLDatum d;
    d.n = j.at("n").get<std::size_t>();
    for (const auto& jm : j.at("maps")) {
        const auto& rows = jm.at("matrix");
        std::size_t nj = jm.contains("nj") ? jm.at("nj").get<std::size_t>() : rows.size();
        if (rows.size() != nj) throw ParseError("datum JSON: matrix row count != nj");
        bool exact = true;
        for (const auto& r : rows)
            for (const auto& x : r)
                if (x.is_number_float()) exact = false;
        if (exact) {
            d.maps.push_back(exact_map(mat_from_json(rows)));
        } else {
            BLMap m;
            m.n_j = nj;
            m.numeric = Eigen::MatrixXd(nj, d.n);
            for (std::size_t a = 0; a < nj; ++a) {
                if (rows[a].size() != d.n) throw ParseError("datum JSON: row length != n");
                for (std::size_t b = 0; b < d.n; ++b)
                    m.numeric(a, b) = rows[a][b].is_string() ? to_double(parse_rat(rows[a][b].get<std::string>()))
                                                             : rows[a][b].get<double>();
            }
            d.maps.push_back(std::move(m));
        }
    }
    for (const auto& p : j.at("exponents")) {
        if (p.is_number_float()) {
            d.exponents.push_back(rat_from_double(p.get<double>()));
        } else {
            d.exponents.push_back(rat_from_json(p));
        }
    }
    validate_datum(d);
    return d;
}

}  // namespace equilab
