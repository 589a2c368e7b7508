#pragma once

#include <equilab/bl/datum.hpp>
#include <equilab/generic/subspace_spec.hpp>
#include <equilab/seed.hpp>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace equilab {

/// Element of U+ as a product of exp(t N) over the u+ generators, two passes,
/// t = p/q with p in [-5, 5] \ {0}, q in [1, 5].
inline SampledElement sample_u_plus(const RepConfig& cfg, std::uint64_t seed) {
    if (cfg.u_plus_indices.empty()) throw IncompleteConfig(cfg.name + ": no u+ generators");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(1, 10), den(1, 5);
    SampledElement out;
    out.seed = seed;
    for (int pass = 0; pass < 2; ++pass)
        for (auto g : cfg.u_plus_indices) {
            int p = num(rng) - 6;
            if (p >= 0) ++p;
            Rat t(p, den(rng));
            t.canonicalize();
            out.recipe.push_back({g, t});
        }
    out.matrix = replay_recipe(cfg, out.recipe);
    return out;
}

/// Composes every map with the orthogonal projection killing a random integer
/// vector v, so span{v} lies in every kernel. Redraws v until all maps stay
/// surjective.
inline BLDatum kernel_stuff(const BLDatum& d, std::uint64_t seed) {
    if (!d.all_exact()) throw std::invalid_argument("kernel_stuff needs exact maps");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> entry(-3, 3);
    for (int attempt = 0; attempt < 100; ++attempt) {
        Mat v(d.n, 1);
        for (std::size_t i = 0; i < d.n; ++i) v(i, 0) = entry(rng);
        const Rat vv = (v.transpose() * v)(0, 0);
        if (is_zero(vv)) continue;
        Mat proj = Mat::identity(d.n) - (v * v.transpose()) * (Rat(1) / vv);
        std::vector<Mat> maps;
        bool ok = true;
        for (const auto& m : d.maps) {
            maps.push_back(*m.exact * proj);
            if (rank(maps.back()) != m.n_j) ok = false;
        }
        if (ok) return make_datum(d.n, maps, d.exponents);
    }
    throw std::runtime_error("kernel_stuff: no admissible kernel vector found");
}

struct LabelledDatum {
    std::string label;
    BLDatum datum;
    bool feasible_by_construction = true;
};

/// Ten data built from representation configurations (flag and subspace modes),
/// feasible for generic elements. Elements are short products (one pass over the
/// generators in subspace mode) so the constants stay at moderate scale.
inline std::vector<LabelledDatum> feasible_corpus(std::uint64_t seed) {
    struct Item {
        const char* config;
        const char* mode;  // "flag" or "subspace"
        const char* subspace;
        std::size_t m;
    };
    // At most three maps each: the kernel lattice of three subspaces is finite,
    // so the lattice check terminates below the cap.
    const Item items[] = {
        {"sl2_sym:1", "flag", "flag:1", 2},         {"sl2_sym:1", "subspace", "flag:1", 3},
        {"sl2_sym:3", "flag", "flag:1", 2},         {"sl2_sym:3", "flag", "flag:1", 3},
        {"sl2_sym:3", "subspace", "flag:1", 3},     {"sl2_sym:5", "flag", "flag:1", 3},
        {"sl2_sym:5", "subspace", "flag:-1", 3},    {"sl2_sym:5", "subspace", "flag:1", 3},
        {"sl2_sym:5", "flag", "flag:-1", 3},        {"tensor_std:2,2", "subspace", "weight:0", 2},
    };
    std::vector<LabelledDatum> out;
    std::size_t idx = 0;
    for (const auto& it : items) {
        auto cfg = build_config(it.config);
        auto dec = weight_decompose(cfg);
        auto w = parse_subspace_spec(it.subspace, dec);
        const std::size_t one_pass = 2 * std::max(cfg.u_plus_indices.size(), cfg.u_minus_indices.size());
        std::vector<SampledElement> els;
        for (std::size_t j = 0; j < it.m; ++j) {
            const auto s = derive_seed(seed, idx, j);
            els.push_back(std::string(it.mode) == "flag" ? sample_u_plus(cfg, s) : sample_element(cfg, s, one_pass));
        }
        BLDatum d = std::string(it.mode) == "flag" ? build_datum_from_rep(cfg, FlagMode{parse_rat(std::string(it.subspace).substr(5)), els})
                                                   : build_datum_from_rep(cfg, SubspaceMode{w, els});
        out.push_back({std::string(it.config) + " " + it.mode + " " + it.subspace + " m=" + std::to_string(it.m), d, true});
        ++idx;
    }
    return out;
}

/// The feasible corpus followed by a kernel-stuffed copy of each datum.
inline std::vector<LabelledDatum> agreement_corpus(std::uint64_t seed) {
    auto out = feasible_corpus(seed);
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i)
        out.push_back({out[i].label + " stuffed", kernel_stuff(out[i].datum, derive_seed(seed, 0x5F, i)), false});
    return out;
}

}  // namespace equilab
