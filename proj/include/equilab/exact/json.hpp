#pragma once

#include <equilab/exact/subspace.hpp>

#include <json.hpp>

namespace equilab {

using Json = nlohmann::ordered_json;

inline Json mat_to_json(const Mat& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json r = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(to_string(m(i, j)));
        rows.push_back(std::move(r));
    }
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(rows)}};
}

inline Rat rat_from_json(const Json& v) {
    if (v.is_string()) return parse_rat(v.get<std::string>());
    if (v.is_number_integer()) return Rat(v.get<long>());
    throw ParseError("rational must be a string \"p/q\" or an integer");
}

/// Accepts {rows, cols, entries} or a bare array of rows.
inline Mat mat_from_json(const Json& j) {
    const Json& rows = j.is_array() ? j : j.at("entries");
    std::size_t r = rows.size();
    std::size_t c = r == 0 ? (j.is_object() ? j.value("cols", std::size_t{0}) : 0) : rows[0].size();
    if (j.is_object()) {
        if (j.contains("rows") && j.at("rows").get<std::size_t>() != r)
            throw ParseError("matrix JSON: row count does not match entries");
        if (j.contains("cols") && r > 0 && j.at("cols").get<std::size_t>() != c)
            throw ParseError("matrix JSON: column count does not match entries");
    }
    Mat m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw ParseError("matrix JSON: ragged rows");
        for (std::size_t k = 0; k < c; ++k) m(i, k) = rat_from_json(rows[i][k]);
    }
    return m;
}

/// Subspace as {ambient_dim, dim, basis}; basis is listed as one row per basis vector.
inline Json subspace_to_json(const Subspace& s) {
    Json vecs = Json::array();
    for (std::size_t j = 0; j < s.dim(); ++j) {
        Json v = Json::array();
        for (const auto& x : s.basis().col(j)) v.push_back(to_string(x));
        vecs.push_back(std::move(v));
    }
    return Json{{"ambient_dim", s.ambient_dim()}, {"dim", s.dim()}, {"basis", std::move(vecs)}};
}

inline Subspace subspace_from_json(const Json& j) {
    const std::size_t n = j.at("ambient_dim").get<std::size_t>();
    const Json& vecs = j.at("basis");
    Mat b(n, vecs.size());
    for (std::size_t k = 0; k < vecs.size(); ++k) {
        if (vecs[k].size() != n) throw ParseError("subspace JSON: vector length != ambient_dim");
        for (std::size_t i = 0; i < n; ++i) b(i, k) = rat_from_json(vecs[k][i]);
    }
    return canonicalize(b);
}

}  // namespace equilab
