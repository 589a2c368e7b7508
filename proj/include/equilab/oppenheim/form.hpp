#pragma once

#include <equilab/exact/json.hpp>
#include <equilab/exact/rational.hpp>

#include <Eigen/Dense>

#include <cctype>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace equilab {

class SignatureError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class FormParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// a + b sqrt(D) with D squarefree (D = 0 when no irrational part is present).
struct QuadNumber {
    Rat a = 0;
    Rat b = 0;
};

inline bool is_squarefree(long d) {
    if (d < 2) return false;
    for (long p = 2; p * p <= d; ++p)
        if (d % (p * p) == 0) return false;
    return true;
}

/// Exact sign of a + b sqrt(D).
inline int sign(const QuadNumber& x, long d) {
    const int sa = sgn(x.a), sb = d == 0 ? 0 : sgn(x.b);
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    // opposite signs: compare a^2 with b^2 D
    const Rat lhs = x.a * x.a, rhs = x.b * x.b * d;
    if (lhs == rhs) return 0;
    return lhs > rhs ? sa : sb;
}

inline std::string to_string(const QuadNumber& x, long d) {
    if (d == 0 || sgn(x.b) == 0) return to_string(x.a);
    return to_string(x.a) + (sgn(x.b) < 0 ? " - " : " + ") + to_string(abs(x.b)) + "*sqrt" + std::to_string(d);
}

inline double to_double(const QuadNumber& x, long d) {
    return to_double(x.a) + (d == 0 ? 0.0 : to_double(x.b) * std::sqrt(static_cast<double>(d)));
}

/// Q(v) = v^T G v with G = A + sqrt(D) B, A and B symmetric rational.
struct QuadraticForm {
    std::size_t d = 0;
    long sqrt_d = 0;
    std::vector<std::vector<Rat>> a;
    std::vector<std::vector<Rat>> b;

    [[nodiscard]] bool rational() const {
        for (const auto& row : b)
            for (const auto& x : row)
                if (sgn(x) != 0) return false;
        return true;
    }

    [[nodiscard]] Eigen::MatrixXd gram() const {
        Eigen::MatrixXd g(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        const double r = std::sqrt(static_cast<double>(sqrt_d));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_double(a[i][j]) + r * to_double(b[i][j]);
        return g;
    }

    template <class V>
    [[nodiscard]] QuadNumber evaluate(const V& v) const {
        QuadNumber q;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                const Rat vv = Rat(static_cast<long>(v[i])) * static_cast<long>(v[j]);
                q.a += a[i][j] * vv;
                q.b += b[i][j] * vv;
            }
        return q;
    }
};

namespace detail {

inline Rat parse_coefficient(const std::string& s, const std::string& form) {
    try {
        return parse_rat(s);
    } catch (const std::exception&) {
        throw FormParseError("bad coefficient '" + s + "' in '" + form + "'");
    }
}

}  // namespace detail

/// Grammar: sum of terms [coef*][sqrtD*]xi^2 or [coef*][sqrtD*]xi*xj, with
/// coef = p or p/q. Whitespace is ignored. All sqrt terms must share one D.
inline QuadraticForm parse_form(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw FormParseError("empty form");
    struct Term {
        Rat coef;
        bool irrational;
        std::size_t i, j;
    };
    std::vector<Term> terms;
    long root = 0;
    std::size_t dim = 0;
    std::size_t pos = 0;
    while (pos < s.size()) {
        int sign_v = 1;
        if (s[pos] == '+' || s[pos] == '-') {
            sign_v = s[pos] == '-' ? -1 : 1;
            ++pos;
        } else if (pos != 0) {
            throw FormParseError("expected + or - at position " + std::to_string(pos) + " in '" + text + "'");
        }
        std::size_t end = pos;
        while (end < s.size() && s[end] != '+' && s[end] != '-') ++end;
        const std::string body = s.substr(pos, end - pos);
        pos = end;
        if (body.empty()) throw FormParseError("empty term in '" + text + "'");
        std::vector<std::string> factors;
        std::size_t start = 0;
        for (std::size_t k = 0; k <= body.size(); ++k)
            if (k == body.size() || body[k] == '*') {
                factors.push_back(body.substr(start, k - start));
                start = k + 1;
            }
        Rat coef = sign_v;
        bool irrational = false;
        std::vector<std::size_t> vars;
        for (const auto& f : factors) {
            if (f.empty()) throw FormParseError("empty factor in '" + text + "'");
            if (f[0] == 'x') {
                std::size_t caret = f.find('^');
                const std::string idx = f.substr(1, caret == std::string::npos ? std::string::npos : caret - 1);
                if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos)
                    throw FormParseError("bad variable '" + f + "'");
                const std::size_t v = std::stoul(idx);
                if (v == 0) throw FormParseError("variables are numbered from x1");
                int power = 1;
                if (caret != std::string::npos) {
                    if (f.substr(caret + 1) != "2") throw FormParseError("only squares are allowed: '" + f + "'");
                    power = 2;
                }
                for (int p = 0; p < power; ++p) vars.push_back(v - 1);
            } else if (f.rfind("sqrt", 0) == 0) {
                if (irrational) throw FormParseError("repeated sqrt factor in '" + text + "'");
                const std::string rd = f.substr(4);
                if (rd.empty() || rd.find_first_not_of("0123456789") != std::string::npos)
                    throw FormParseError("bad radicand '" + f + "'");
                const long d = std::stol(rd);
                if (!is_squarefree(d)) throw FormParseError("radicand must be a squarefree integer >= 2");
                if (root != 0 && root != d) throw FormParseError("all sqrt terms must share one radicand");
                root = d;
                irrational = true;
            } else {
                if (!vars.empty() || irrational) throw FormParseError("coefficient must come first in '" + body + "'");
                coef *= detail::parse_coefficient(f, text);
            }
        }
        if (vars.size() != 2) throw FormParseError("term '" + body + "' is not quadratic");
        dim = std::max({dim, vars[0] + 1, vars[1] + 1});
        terms.push_back({coef, irrational, vars[0], vars[1]});
    }
    QuadraticForm q;
    q.d = dim;
    q.sqrt_d = root;
    q.a.assign(dim, std::vector<Rat>(dim, Rat(0)));
    q.b = q.a;
    for (const auto& t : terms) {
        auto& m = t.irrational ? q.b : q.a;
        if (t.i == t.j) {
            m[t.i][t.i] += t.coef;
        } else {
            m[t.i][t.j] += t.coef / 2;
            m[t.j][t.i] += t.coef / 2;
        }
    }
    return q;
}

struct IndefinitenessWitness {
    std::vector<long> positive;
    std::vector<long> negative;
};

/// Integer vectors with Q(v+) > 0 and Q(v-) < 0, certified exactly. Candidates
/// are rounded eigenvectors, coordinate vectors, and their pairwise sums.
inline IndefinitenessWitness certify_indefinite(const QuadraticForm& q) {
    const auto n = static_cast<Eigen::Index>(q.d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.gram());
    std::vector<std::vector<long>> cands;
    for (Eigen::Index k = 0; k < n; ++k)
        for (double scale : {1e3, 1e6}) {
            std::vector<long> v(q.d);
            for (Eigen::Index i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = std::lround(es.eigenvectors()(i, k) * scale);
            cands.push_back(v);
        }
    for (std::size_t i = 0; i < q.d; ++i)
        for (std::size_t j = i; j < q.d; ++j)
            for (long sj : {1L, -1L}) {
                std::vector<long> v(q.d, 0);
                v[i] += 1;
                if (j != i) v[j] += sj;
                cands.push_back(v);
            }
    IndefinitenessWitness w;
    for (const auto& v : cands) {
        const int sg = sign(q.evaluate(v), q.sqrt_d);
        if (sg > 0 && w.positive.empty()) w.positive = v;
        if (sg < 0 && w.negative.empty()) w.negative = v;
    }
    if (w.positive.empty() || w.negative.empty()) throw SignatureError("quadratic form is not indefinite");
    return w;
}

inline Json form_to_json(const QuadraticForm& q) {
    Json a = Json::array(), b = Json::array();
    for (std::size_t i = 0; i < q.d; ++i) {
        Json ra = Json::array(), rb = Json::array();
        for (std::size_t j = 0; j < q.d; ++j) {
            ra.push_back(to_string(q.a[i][j]));
            rb.push_back(to_string(q.b[i][j]));
        }
        a.push_back(std::move(ra));
        b.push_back(std::move(rb));
    }
    return Json{{"d", q.d}, {"sqrt", q.sqrt_d}, {"rational_part", std::move(a)}, {"sqrt_part", std::move(b)}};
}

}  // namespace equilab
