#pragma once

#include <equilab/exact/json.hpp>
#include <equilab/exact/subspace.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace equilab {

class UnsupportedConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class RationalityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class IncompleteConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A Lie algebra h acting on V, with a diagonalizable element a in h.
/// Coordinates on V are weight-adapted: a_action is diagonal and basis
/// vectors are listed by decreasing weight, so u+ acts strictly upper
/// triangularly.
struct RepConfig {
    std::string name;
    std::size_t n = 0;
    std::vector<Mat> h_basis;                   // rho(X_i), n x n
    Mat a_action;                               // rho(a), n x n
    std::optional<std::vector<Mat>> h_internal; // ad(X_i) on h, in the h_basis coordinates
    std::vector<std::size_t> u_plus_indices;
    std::vector<std::size_t> u_minus_indices;
    std::vector<Rat> h_weights;                 // ad(a)-eigenvalue of each h basis element
    Rat a_norm_squared = 0;                     // |a|^2 in the defining representation (a is not normalized)

    [[nodiscard]] std::size_t h_dim() const { return h_basis.size(); }
};

namespace detail {

inline Mat unvec_col(const Mat& b, std::size_t j, std::size_t d) {
    Mat m(d, d);
    for (std::size_t i = 0; i < d * d; ++i) m(i / d, i % d) = b(i, j);
    return m;
}

/// Coordinates of the columns of y in a basis whose columns each own a
/// pivot row (1 there, 0 in every other column). Throws if some column of
/// y is outside the span.
inline Mat coords_in(const Mat& basis, const std::vector<std::size_t>& pivot_rows, const Mat& y,
                     const char* what) {
    Mat c(basis.cols(), y.cols());
    for (std::size_t j = 0; j < y.cols(); ++j)
        for (std::size_t k = 0; k < basis.cols(); ++k) c(k, j) = y(pivot_rows[k], j);
    if (!(basis * c == y)) throw std::logic_error(std::string("subspace is not invariant: ") + what);
    return c;
}

struct WeightBasis {
    Mat basis;                        // d^2 x k, columns are vec'd matrices
    std::vector<Rat> weights;         // per column, nonincreasing
    std::vector<std::size_t> pivots;  // owning row of each column
};

/// Splits an ad(a)-invariant subspace of gl_d into ad(a)-eigenvectors, by decreasing weight.
inline WeightBasis weight_split(const Subspace& s, const std::vector<Rat>& a_diag) {
    const std::size_t d = a_diag.size();
    std::map<Rat, std::vector<std::size_t>> by_weight;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) by_weight[a_diag[i] - a_diag[j]].push_back(i * d + j);

    WeightBasis out;
    out.basis = Mat(d * d, 0);
    for (auto it = by_weight.rbegin(); it != by_weight.rend(); ++it) {
        auto piece = subspace_intersect(s, Subspace::coordinate(d * d, it->second));
        if (piece.is_zero()) continue;
        auto piv = piece.pivots();
        out.basis = hstack(out.basis, piece.basis());
        for (std::size_t k = 0; k < piece.dim(); ++k) {
            out.weights.push_back(it->first);
            out.pivots.push_back(piv[k]);
        }
    }
    if (out.basis.cols() != s.dim())
        throw RationalityError("element a does not act diagonalizably with rational weights");
    return out;
}

inline Mat ad_on(const Mat& x, const WeightBasis& wb, std::size_t d, const char* what) {
    Mat images(d * d, wb.basis.cols());
    for (std::size_t j = 0; j < wb.basis.cols(); ++j) {
        Mat br = commutator(x, unvec_col(wb.basis, j, d));
        for (std::size_t i = 0; i < d * d; ++i) images(i, j) = br.entries()[i];
    }
    return coords_in(wb.basis, wb.pivots, images, what);
}

}  // namespace detail

/// Builds (h, a, V) where h is a subalgebra of gl_d spanned by h_span, a is a
/// diagonal element of h and V is an ad(h)-invariant subspace of gl_d (given
/// in vectorized, row-major coordinates). rho is the restricted adjoint action.
inline RepConfig build_adjoint_type(std::string name, const std::vector<Mat>& h_span, const Mat& a,
                                    const Subspace& v_in_gl) {
    const std::size_t d = a.rows();
    if (!a.is_diagonal()) throw UnsupportedConfig("element a must be diagonal in the defining representation");
    std::vector<Rat> a_diag(d);
    for (std::size_t i = 0; i < d; ++i) a_diag[i] = a(i, i);

    Mat hs(d * d, h_span.size());
    for (std::size_t k = 0; k < h_span.size(); ++k)
        for (std::size_t i = 0; i < d * d; ++i) hs(i, k) = h_span[k].entries()[i];
    auto h_sub = canonicalize(hs);
    if (!h_sub.contains(vectorize(a).col(0))) throw UnsupportedConfig("element a does not lie in h");

    auto hb = detail::weight_split(h_sub, a_diag);
    auto vb = detail::weight_split(v_in_gl, a_diag);

    RepConfig cfg;
    cfg.name = std::move(name);
    cfg.n = vb.basis.cols();
    cfg.h_weights = hb.weights;
    std::vector<Mat> internal;
    for (std::size_t k = 0; k < hb.basis.cols(); ++k) {
        Mat x = detail::unvec_col(hb.basis, k, d);
        cfg.h_basis.push_back(detail::ad_on(x, vb, d, "V under h"));
        internal.push_back(detail::ad_on(x, hb, d, "h under h"));
        if (sgn(hb.weights[k]) > 0) cfg.u_plus_indices.push_back(k);
        if (sgn(hb.weights[k]) < 0) cfg.u_minus_indices.push_back(k);
    }
    cfg.h_internal = std::move(internal);
    cfg.a_action = detail::ad_on(a, vb, d, "V under a");
    for (const auto& x : a_diag) cfg.a_norm_squared += x * x;
    return cfg;
}

namespace detail {

inline std::vector<Mat> kernel_as_matrices(const Mat& linear_map, std::size_t d) {
    auto k = kernel_basis(linear_map);
    std::vector<Mat> out;
    for (std::size_t j = 0; j < k.dim(); ++j) out.push_back(unvec_col(k.basis(), j, d));
    return out;
}

/// Lie algebra {X : X^T J + J X = 0}.
inline std::vector<Mat> form_algebra(const Mat& j) {
    const std::size_t d = j.rows();
    Mat lin(d * d, d * d);
    for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = 0; q < d; ++q) {
            Mat img = Mat::unit(d, d, p, q).transpose() * j + j * Mat::unit(d, d, p, q);
            for (std::size_t i = 0; i < d * d; ++i) lin(i, p * d + q) = img.entries()[i];
        }
    return kernel_as_matrices(lin, d);
}

inline std::vector<Mat> sl_basis(std::size_t d) {
    std::vector<Mat> out;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (i != j) out.push_back(Mat::unit(d, d, i, j));
    for (std::size_t i = 0; i + 1 < d; ++i) out.push_back(Mat::unit(d, d, i, i) - Mat::unit(d, d, i + 1, i + 1));
    return out;
}

inline Subspace span_of_matrices(const std::vector<Mat>& ms, std::size_t d) {
    Mat b(d * d, ms.size());
    for (std::size_t k = 0; k < ms.size(); ++k)
        for (std::size_t i = 0; i < d * d; ++i) b(i, k) = ms[k].entries()[i];
    return canonicalize(b);
}

/// {Y in sl_d : tr(X Y) = 0 for all X in h}.
inline Subspace trace_form_complement(const std::vector<Mat>& h, std::size_t d) {
    Mat rows(h.size() + 1, d * d);
    for (std::size_t k = 0; k < h.size(); ++k)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) rows(k, i * d + j) = h[k](j, i);
    for (std::size_t i = 0; i < d; ++i) rows(h.size(), i * d + i) = 1;
    auto v = kernel_basis(rows);
    auto hs = span_of_matrices(h, d);
    if (subspace_intersect(v, hs).dim() != 0 || v.dim() + hs.dim() != d * d - 1)
        throw UnsupportedConfig("trace form is degenerate on h; no invariant complement");
    return v;
}

/// Principal diagonal element diag(d-1, d-3, ..., 1-d).
inline Mat principal_diag(std::size_t d) {
    Mat a(d, d);
    for (std::size_t i = 0; i < d; ++i) a(i, i) = static_cast<long>(d) - 1 - 2 * static_cast<long>(i);
    return a;
}

inline Mat sp_form(std::size_t n) {
    Mat j(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        j(i, 2 * n - 1 - i) = 1;
        j(n + i, n - 1 - i) = -1;
    }
    return j;
}

/// diag(n, ..., 1, -1, ..., -n), a regular element of sp_2n for the form above.
inline Mat sp_regular(std::size_t n) {
    Mat a(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = static_cast<long>(n - i);
        a(2 * n - 1 - i, 2 * n - 1 - i) = -static_cast<long>(n - i);
    }
    return a;
}

}  // namespace detail

/// so(Q) inside sl_{p+q} for Q = 2 x_1 x_d + x_2^2 + ... + x_p^2 - x_{p+1}^2 - ... - x_{d-1}^2,
/// acting on its trace-form complement; a = diag(1, 0, ..., 0, -1).
inline RepConfig build_so_pq(std::size_t p, std::size_t q) {
    const std::size_t d = p + q;
    if (p < 1 || q < 1 || d < 3) throw UnsupportedConfig("so_pq needs p, q >= 1 and p + q >= 3");
    Mat j(d, d);
    j(0, d - 1) = j(d - 1, 0) = 1;
    for (std::size_t i = 1; i < p; ++i) j(i, i) = 1;
    for (std::size_t i = p; i + 1 < d; ++i) j(i, i) = -1;
    auto h = detail::form_algebra(j);
    Mat a(d, d);
    a(0, 0) = 1;
    a(d - 1, d - 1) = -1;
    return build_adjoint_type("so_pq:" + std::to_string(p) + "," + std::to_string(q), h, a,
                              detail::trace_form_complement(h, d));
}

/// sp_2n inside sl_2n acting on its trace-form complement (Lambda^2_0 of the standard rep).
inline RepConfig build_sp2n(std::size_t n) {
    if (n < 2) throw UnsupportedConfig("sp2n needs n >= 2 (the complement is zero for n = 1)");
    auto h = detail::form_algebra(detail::sp_form(n));
    return build_adjoint_type("sp2n:" + std::to_string(n), h, detail::sp_regular(n),
                              detail::trace_form_complement(h, 2 * n));
}

/// sl_n (+) sl_m inside sl_nm acting on sl_n (x) sl_m.
inline RepConfig build_tensor(std::size_t n, std::size_t m) {
    if (n < 2 || m < 2) throw UnsupportedConfig("tensor needs n, m >= 2");
    std::vector<Mat> h;
    for (const auto& x : detail::sl_basis(n)) h.push_back(kron(x, Mat::identity(m)));
    for (const auto& y : detail::sl_basis(m)) h.push_back(kron(Mat::identity(n), y));
    Mat a = kron(detail::principal_diag(n), Mat::identity(m)) + kron(Mat::identity(n), detail::principal_diag(m));
    return build_adjoint_type("tensor:" + std::to_string(n) + "," + std::to_string(m), h, a,
                              detail::trace_form_complement(h, n * m));
}

/// Adjoint representation of g0 (the complement of the diagonal copy of g0 in g0 x g0).
inline RepConfig build_diagonal(const std::string& g0) {
    std::vector<Mat> h;
    Mat a;
    std::size_t d = 0;
    if (g0.rfind("sl", 0) == 0) {
        d = std::stoul(g0.substr(2));
        if (d < 2) throw UnsupportedConfig("diagonal:sl_d needs d >= 2");
        h = detail::sl_basis(d);
        a = detail::principal_diag(d);
    } else if (g0.rfind("sp", 0) == 0) {
        std::size_t two_m = std::stoul(g0.substr(2));
        if (two_m < 2 || two_m % 2) throw UnsupportedConfig("diagonal:sp_2m needs an even size >= 2");
        d = two_m;
        h = detail::form_algebra(detail::sp_form(two_m / 2));
        a = detail::sp_regular(two_m / 2);
    } else {
        throw UnsupportedConfig("diagonal: unknown g0 kind '" + g0 + "' (use slD or spD)");
    }
    return build_adjoint_type("diagonal:" + g0, h, a, detail::span_of_matrices(h, d));
}

/// Standard tensor model R^n (x) R^m of sl_n (+) sl_m, basis e_i (x) f_j at index i*m + j.
inline RepConfig build_tensor_std(std::size_t n, std::size_t m) {
    if (n < 2 || m < 2) throw UnsupportedConfig("tensor_std needs n, m >= 2");
    RepConfig cfg;
    cfg.name = "tensor_std:" + std::to_string(n) + "," + std::to_string(m);
    cfg.n = n * m;
    // h basis ordered by decreasing ad(a)-weight.
    struct Gen {
        Mat rho;
        Rat w;
    };
    std::vector<Gen> gens;
    auto pn = detail::principal_diag(n), pm = detail::principal_diag(m);
    for (const auto& x : detail::sl_basis(n))
        gens.push_back({kron(x, Mat::identity(m)), 0});
    for (const auto& y : detail::sl_basis(m))
        gens.push_back({kron(Mat::identity(n), y), 0});
    Mat a = kron(pn, Mat::identity(m)) + kron(Mat::identity(n), pm);
    for (auto& g : gens) {
        Mat br = commutator(a, g.rho);
        // each generator is an ad(a)-eigenvector: find the scalar
        for (std::size_t i = 0; i < br.rows() * br.cols(); ++i)
            if (sgn(g.rho.entries()[i]) != 0) {
                g.w = br.entries()[i] / g.rho.entries()[i];
                break;
            }
        if (!(br == g.rho * g.w)) throw std::logic_error("tensor_std: generator is not a weight vector");
    }
    std::stable_sort(gens.begin(), gens.end(), [](const Gen& x, const Gen& y) { return x.w > y.w; });
    for (std::size_t k = 0; k < gens.size(); ++k) {
        cfg.h_basis.push_back(gens[k].rho);
        cfg.h_weights.push_back(gens[k].w);
        if (sgn(gens[k].w) > 0) cfg.u_plus_indices.push_back(k);
        if (sgn(gens[k].w) < 0) cfg.u_minus_indices.push_back(k);
    }
    // ad(X_k) on h in the ordered basis, via an exact left inverse.
    const std::size_t hd = gens.size();
    Mat hb(cfg.n * cfg.n, hd);
    for (std::size_t k = 0; k < hd; ++k)
        for (std::size_t i = 0; i < cfg.n * cfg.n; ++i) hb(i, k) = gens[k].rho.entries()[i];
    Mat left = inverse(hb.transpose() * hb) * hb.transpose();
    std::vector<Mat> internal;
    for (std::size_t k = 0; k < hd; ++k) {
        Mat images(cfg.n * cfg.n, hd);
        for (std::size_t l = 0; l < hd; ++l) {
            Mat br = commutator(gens[k].rho, gens[l].rho);
            for (std::size_t i = 0; i < cfg.n * cfg.n; ++i) images(i, l) = br.entries()[i];
        }
        Mat c = left * images;
        if (!(hb * c == images)) throw std::logic_error("tensor_std: h not closed under bracket");
        internal.push_back(c);
    }
    cfg.h_internal = std::move(internal);
    cfg.a_action = a;
    for (std::size_t i = 0; i < n; ++i) cfg.a_norm_squared += pn(i, i) * pn(i, i);
    for (std::size_t i = 0; i < m; ++i) cfg.a_norm_squared += pm(i, i) * pm(i, i);
    return cfg;
}

/// Sym^k(R^2) of sl_2 with basis x^{k-i} y^i; h basis (E, H, F), a = H.
inline RepConfig build_sl2_sym(std::size_t k) {
    if (k < 1) throw UnsupportedConfig("sl2_sym needs k >= 1");
    const std::size_t n = k + 1;
    Mat e(n, n), f(n, n), h(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        h(i, i) = static_cast<long>(k) - 2 * static_cast<long>(i);
        if (i >= 1) e(i - 1, i) = static_cast<long>(i);
        if (i + 1 < n) f(i + 1, i) = static_cast<long>(k - i);
    }
    RepConfig cfg;
    cfg.name = "sl2_sym:" + std::to_string(k);
    cfg.n = n;
    cfg.h_basis = {e, h, f};
    cfg.h_weights = {2, 0, -2};
    cfg.u_plus_indices = {0};
    cfg.u_minus_indices = {2};
    // [H,E] = 2E, [H,F] = -2F, [E,F] = H; columns are coordinates of [X_k, X_l].
    Mat ad_e{{0, -2, 0}, {0, 0, 1}, {0, 0, 0}};
    Mat ad_h{{2, 0, 0}, {0, 0, 0}, {0, 0, -2}};
    Mat ad_f{{0, 0, 0}, {-1, 0, 0}, {0, 2, 0}};
    cfg.h_internal = std::vector<Mat>{ad_e, ad_h, ad_f};
    cfg.a_action = h;
    cfg.a_norm_squared = 2;
    return cfg;
}

inline constexpr std::size_t kDefaultMaxDim = 64;

namespace detail {

inline std::vector<std::size_t> parse_params(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
            throw UnsupportedConfig("bad config parameter '" + tok + "'");
        out.push_back(std::stoul(tok));
    }
    return out;
}

}  // namespace detail

/// Parses descriptors such as "so_pq:2,1", "sp2n:2", "tensor:2,2",
/// "tensor_std:2,2", "sl2_sym:4", "diagonal:sl3".
inline RepConfig build_config(const std::string& descriptor, std::size_t max_dim = kDefaultMaxDim) {
    auto colon = descriptor.find(':');
    if (colon == std::string::npos) throw UnsupportedConfig("config descriptor needs 'kind:params': " + descriptor);
    std::string kind = descriptor.substr(0, colon);
    std::string params = descriptor.substr(colon + 1);
    auto expect = [&](std::size_t count) {
        auto v = detail::parse_params(params);
        if (v.size() != count) throw UnsupportedConfig("wrong parameter count for " + kind);
        return v;
    };
    // Cheap dimension precheck so oversized requests fail before any algebra.
    auto too_big = [&](std::size_t dim) {
        if (dim > max_dim)
            throw UnsupportedConfig(descriptor + ": dim V = " + std::to_string(dim) + " exceeds cap " +
                                    std::to_string(max_dim));
    };
    RepConfig cfg;
    if (kind == "so_pq" || kind == "so_pq_complement") {
        auto v = expect(2);
        std::size_t d = v[0] + v[1];
        too_big(d * (d + 1) / 2 - 1);
        cfg = build_so_pq(v[0], v[1]);
    } else if (kind == "sp2n" || kind == "sp2n_complement") {
        auto v = expect(1);
        too_big(2 * v[0] * v[0] - v[0] - 1);
        cfg = build_sp2n(v[0]);
    } else if (kind == "tensor") {
        auto v = expect(2);
        too_big((v[0] * v[0] - 1) * (v[1] * v[1] - 1));
        cfg = build_tensor(v[0], v[1]);
    } else if (kind == "tensor_std") {
        auto v = expect(2);
        too_big(v[0] * v[1]);
        cfg = build_tensor_std(v[0], v[1]);
    } else if (kind == "sl2_sym") {
        auto v = expect(1);
        too_big(v[0] + 1);
        cfg = build_sl2_sym(v[0]);
    } else if (kind == "diagonal" || kind == "diagonal_adjoint") {
        if (params.size() > 2) {
            std::size_t d = std::stoul(params.substr(2));
            too_big(params.rfind("sl", 0) == 0 ? d * d - 1 : d * (d + 1) / 2);
        }
        cfg = build_diagonal(params);
    } else {
        throw UnsupportedConfig("unknown config kind '" + kind + "'");
    }
    too_big(cfg.n);
    return cfg;
}

inline Json config_to_json(const RepConfig& cfg) {
    Json hb = Json::array();
    for (const auto& m : cfg.h_basis) hb.push_back(mat_to_json(m));
    Json weights = Json::array();
    for (const auto& w : cfg.h_weights) weights.push_back(to_string(w));
    Json j{{"name", cfg.name},
           {"n", cfg.n},
           {"h_dim", cfg.h_dim()},
           {"h_basis", std::move(hb)},
           {"a_action", mat_to_json(cfg.a_action)},
           {"h_weights", std::move(weights)},
           {"u_plus_indices", cfg.u_plus_indices},
           {"u_minus_indices", cfg.u_minus_indices},
           {"a_norm_squared", to_string(cfg.a_norm_squared)}};
    if (cfg.h_internal) {
        Json hi = Json::array();
        for (const auto& m : *cfg.h_internal) hi.push_back(mat_to_json(m));
        j["h_internal"] = std::move(hi);
    }
    return j;
}

inline RepConfig config_from_json(const Json& j) {
    RepConfig cfg;
    cfg.name = j.at("name").get<std::string>();
    cfg.n = j.at("n").get<std::size_t>();
    for (const auto& m : j.at("h_basis")) cfg.h_basis.push_back(mat_from_json(m));
    cfg.a_action = mat_from_json(j.at("a_action"));
    if (j.contains("h_weights"))
        for (const auto& w : j.at("h_weights")) cfg.h_weights.push_back(rat_from_json(w));
    if (j.contains("u_plus_indices")) cfg.u_plus_indices = j.at("u_plus_indices").get<std::vector<std::size_t>>();
    if (j.contains("u_minus_indices")) cfg.u_minus_indices = j.at("u_minus_indices").get<std::vector<std::size_t>>();
    if (j.contains("a_norm_squared")) cfg.a_norm_squared = rat_from_json(j.at("a_norm_squared"));
    if (j.contains("h_internal")) {
        std::vector<Mat> hi;
        for (const auto& m : j.at("h_internal")) hi.push_back(mat_from_json(m));
        cfg.h_internal = std::move(hi);
    }
    for (const auto& m : cfg.h_basis)
        if (m.rows() != cfg.n || m.cols() != cfg.n) throw DimensionMismatch("config JSON: h_basis shape != n");
    if (cfg.a_action.rows() != cfg.n || cfg.a_action.cols() != cfg.n)
        throw DimensionMismatch("config JSON: a_action shape != n");
    return cfg;
}

/// Exact check that [rho(X_i), rho(X_j)] lies in span(rho(h_basis)) for all i, j.
inline bool bracket_closed(const RepConfig& cfg) {
    const std::size_t n = cfg.n;
    Mat span(n * n, cfg.h_dim());
    for (std::size_t k = 0; k < cfg.h_dim(); ++k)
        for (std::size_t i = 0; i < n * n; ++i) span(i, k) = cfg.h_basis[k].entries()[i];
    auto s = canonicalize(span);
    for (std::size_t i = 0; i < cfg.h_dim(); ++i)
        for (std::size_t j = i + 1; j < cfg.h_dim(); ++j)
            if (!s.contains(vectorize(commutator(cfg.h_basis[i], cfg.h_basis[j])).col(0))) return false;
    return true;
}

}  // namespace equilab
