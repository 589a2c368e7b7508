#pragma once

#include <equilab/rep/weights.hpp>

#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace equilab {

/// Subspace descriptors relative to a weight decomposition:
///   flag:MU      V^(MU), sum of weight spaces with weight >= MU
///   weight:MU    the single weight space V_MU
///   coords:i,j   span of the given coordinate vectors (weight-adapted coordinates)
///   full         V itself
inline Subspace parse_subspace_spec(const std::string& spec, const WeightDecomposition& dec) {
    if (spec == "full") return Subspace::full(dec.n);
    auto colon = spec.find(':');
    if (colon == std::string::npos) throw ParseError("subspace spec needs 'kind:arg': " + spec);
    std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
    if (kind == "flag") return flag_subspace(dec, parse_rat(arg));
    if (kind == "weight") return weight_space(dec, parse_rat(arg));
    if (kind == "coords") {
        std::vector<std::size_t> idx;
        std::stringstream ss(arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            std::size_t i = std::stoul(tok);
            if (i >= dec.n) throw ParseError("coordinate index out of range: " + tok);
            idx.push_back(i);
        }
        return Subspace::coordinate(dec.n, idx);
    }
    throw ParseError("unknown subspace kind '" + kind + "'");
}

struct LabelledSubspace {
    std::string label;
    Subspace space;
};

/// Proper nonzero flags V^(mu), mu > mu_min.
inline std::vector<LabelledSubspace> weight_flag_family(const WeightDecomposition& dec) {
    std::vector<LabelledSubspace> out;
    for (std::size_t i = 1; i < dec.eigenvalues.size(); ++i)
        out.push_back({"flag:" + to_string(dec.eigenvalues[i]), flag_subspace(dec, dec.eigenvalues[i])});
    return out;
}

/// Flags, single weight spaces, and a random rational perturbation of each flag
/// (W + small rational shear that keeps the dimension).
inline std::vector<LabelledSubspace> default_subspace_family(const WeightDecomposition& dec, std::uint64_t seed) {
    auto out = weight_flag_family(dec);
    for (const auto& mu : dec.eigenvalues)
        if (dec.multiplicities[dec.index_of(mu)] < dec.n)
            out.push_back({"weight:" + to_string(mu), weight_space(dec, mu)});
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-3, 3), den(1, 5);
    const std::size_t flags = dec.eigenvalues.size() - 1;
    for (std::size_t f = 0; f < flags; ++f) {
        Mat b = out[f].space.basis();
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) {
                Rat r(num(rng), den(rng));
                r.canonicalize();
                b(i, j) += r;
            }
        auto s = canonicalize(b);
        if (s.dim() == out[f].space.dim()) out.push_back({out[f].label + "+perturbed", s});
    }
    return out;
}

}  // namespace equilab
