#pragma once

#include <equilab/bl/datum.hpp>
#include <equilab/seed.hpp>

#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace equilab {

enum class FeasibilityMode { lattice, lattice_plus_random, coordinate_exhaustive };
enum class FeasibilityStatus { violated, passed_lattice, passed_heuristic };

inline std::string to_string(FeasibilityStatus s) {
    switch (s) {
        case FeasibilityStatus::violated: return "violated";
        case FeasibilityStatus::passed_lattice: return "passed_lattice";
        case FeasibilityStatus::passed_heuristic: return "passed_heuristic";
    }
    return "?";
}

struct FeasibilityCertificate {
    bool scaling_ok = false;
    FeasibilityStatus status = FeasibilityStatus::passed_lattice;
    std::optional<Subspace> witness;  // set iff status == violated
    std::size_t lattice_size = 0;
    std::size_t random_checks = 0;
    std::size_t coordinate_checks = 0;

    /// Scaling holds and no subspace violated the dimension condition. For
    /// passed_* statuses this is evidence, not proof, of a finite constant.
    [[nodiscard]] bool feasible() const { return scaling_ok && status != FeasibilityStatus::violated; }
};

class LatticeCapExceeded : public std::runtime_error {
public:
    LatticeCapExceeded(std::size_t cap, std::vector<Subspace> partial)
        : std::runtime_error("kernel lattice exceeded " + std::to_string(cap) + " elements"),
          partial_(std::move(partial)) {}
    [[nodiscard]] const std::vector<Subspace>& partial() const { return partial_; }

private:
    std::vector<Subspace> partial_;
};

inline constexpr std::size_t kLatticeCap = 4096;

/// Sum_j p_j n_j compared exactly with n.
inline bool scaling_condition(const BLDatum& d) {
    Rat s = 0;
    for (std::size_t j = 0; j < d.maps.size(); ++j) s += d.exponents[j] * static_cast<long>(d.maps[j].n_j);
    return s == Rat(static_cast<long>(d.n));
}

/// Sum_j p_j dim pi_j(U).
inline Rat weighted_image_dim(const BLDatum& d, const Subspace& u) {
    Rat s = 0;
    if (u.is_zero()) return s;
    for (std::size_t j = 0; j < d.maps.size(); ++j)
        s += d.exponents[j] * static_cast<long>(rank(*d.maps[j].exact * u.basis()));
    return s;
}

inline bool violates(const BLDatum& d, const Subspace& u) {
    return Rat(static_cast<long>(u.dim())) > weighted_image_dim(d, u);
}

namespace detail {

inline std::string subspace_key(const Subspace& s) {
    std::string k = std::to_string(s.dim()) + "|";
    const Mat& b = s.basis();
    for (const auto& e : b.entries()) k += e.get_str() + ",";
    return k;
}

inline void require_exact(const BLDatum& d) {
    if (!d.all_exact()) throw std::invalid_argument("check_feasibility needs exact rational maps");
}

}  // namespace detail

/// Lattice generated by the kernels (plus 0 and V) under pairwise sum and
/// intersection, closed to a fixpoint. Each new element is handed to visit;
/// when visit returns true the closure stops early.
template <class Visit>
std::vector<Subspace> kernel_lattice(const BLDatum& d, std::size_t cap, Visit&& visit) {
    detail::require_exact(d);
    std::vector<Subspace> elems;
    std::set<std::string> seen;
    bool stop = false;
    auto add = [&](Subspace s) {
        if (stop) return;
        if (!seen.insert(detail::subspace_key(s)).second) return;
        if (elems.size() >= cap) throw LatticeCapExceeded(cap, elems);
        elems.push_back(std::move(s));
        if (visit(elems.back())) stop = true;
    };
    add(Subspace::full(d.n));
    add(Subspace(d.n));
    for (const auto& m : d.maps) add(kernel_basis(*m.exact));
    for (std::size_t i = 0; i < elems.size() && !stop; ++i)
        for (std::size_t j = 0; j < i && !stop; ++j) {
            Subspace a = elems[i], b = elems[j];
            add(subspace_sum(a, b));
            add(subspace_intersect(a, b));
        }
    return elems;
}

/// Checks the scaling condition and the subspace dimension condition over the
/// kernel lattice, optionally random subspaces of every dimension, or all
/// coordinate subspaces (n <= 16). The first violating subspace is returned.
inline FeasibilityCertificate check_feasibility(const BLDatum& d, FeasibilityMode mode, std::size_t random_count = 0,
                                                std::uint64_t seed = 1, std::size_t cap = kLatticeCap) {
    detail::require_exact(d);
    validate_datum(d);
    FeasibilityCertificate cert;
    cert.scaling_ok = scaling_condition(d);
    auto found = [&](const Subspace& u) {
        if (!violates(d, u)) return false;
        cert.status = FeasibilityStatus::violated;
        cert.witness = u;
        return true;
    };
    cert.lattice_size = kernel_lattice(d, cap, found).size();
    if (cert.witness) return cert;
    cert.status = FeasibilityStatus::passed_lattice;

    if (mode == FeasibilityMode::lattice_plus_random && d.n > 1) {
        std::mt19937_64 rng(derive_seed(seed, 0xB1));
        std::uniform_int_distribution<int> entry(-4, 4);
        for (std::size_t t = 0; t < random_count; ++t) {
            std::size_t k = 1 + t % (d.n - 1);
            Mat b(d.n, k);
            for (std::size_t r = 0; r < d.n; ++r)
                for (std::size_t c = 0; c < k; ++c) b(r, c) = entry(rng);
            ++cert.random_checks;
            if (found(canonicalize(b))) return cert;
        }
        cert.status = FeasibilityStatus::passed_heuristic;
    } else if (mode == FeasibilityMode::coordinate_exhaustive) {
        if (d.n > 16) throw std::invalid_argument("coordinate_exhaustive needs n <= 16");
        for (std::uint32_t mask = 1; mask + 1 < (1u << d.n); ++mask) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < d.n; ++i)
                if (mask >> i & 1u) idx.push_back(i);
            ++cert.coordinate_checks;
            if (found(Subspace::coordinate(d.n, idx))) return cert;
        }
        cert.status = FeasibilityStatus::passed_heuristic;
    }
    return cert;
}

inline Json certificate_to_json(const FeasibilityCertificate& c) {
    Json j{{"scaling_ok", c.scaling_ok},
           {"status", to_string(c.status)},
           {"feasible", c.feasible()},
           {"lattice_size", c.lattice_size},
           {"random_checks", c.random_checks},
           {"coordinate_checks", c.coordinate_checks}};
    if (c.witness) j["witness"] = subspace_to_json(*c.witness);
    return j;
}

}  // namespace equilab
