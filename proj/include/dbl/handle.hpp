#pragma once

// Space-agnostic engine: open-set handles over the three backends, the
// predecessor-iteration fixpoint, and directed/symmetric distances with a
// certified termination cutoff. All iteration is exact; Infinite is only
// reported past the certified bound, never because of a loop guard guess.

#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "dbl/cylinder_set.hpp"
#include "dbl/finite_space.hpp"
#include "dbl/interval_set.hpp"

namespace dbl {

enum class SpaceTag { realline, symbolic, finite };

class OpenSetHandle {
public:
    using Payload = std::variant<IntervalSet, CylinderSet, FinitePointSet>;

    explicit OpenSetHandle(IntervalSet s) : payload_(std::move(s)) {}
    explicit OpenSetHandle(CylinderSet s) : payload_(std::move(s)) {}
    explicit OpenSetHandle(FinitePointSet s) : payload_(std::move(s)) {}

    SpaceTag tag() const {
        if (std::holds_alternative<IntervalSet>(payload_)) return SpaceTag::realline;
        if (std::holds_alternative<CylinderSet>(payload_)) return SpaceTag::symbolic;
        return SpaceTag::finite;
    }

    const IntervalSet& intervals() const { return std::get<IntervalSet>(payload_); }
    const CylinderSet& cylinders() const { return std::get<CylinderSet>(payload_); }
    const FinitePointSet& points() const { return std::get<FinitePointSet>(payload_); }

    bool empty() const {
        return std::visit(
            [](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, FinitePointSet>)
                    return s.mask == 0;
                else
                    return s.empty();
            },
            payload_);
    }

    bool operator==(const OpenSetHandle& other) const = default;

    bool contains(const OpenSetHandle& v) const {
        require_same_backend(v);
        if (auto* iv = std::get_if<IntervalSet>(&payload_)) return iv->contains(v.intervals());
        if (auto* cy = std::get_if<CylinderSet>(&payload_)) return cy->contains(v.cylinders());
        const auto& fp = points();
        return (v.points().mask & ~fp.mask) == 0;
    }

    OpenSetHandle predecessor() const {
        if (auto* iv = std::get_if<IntervalSet>(&payload_))
            return OpenSetHandle(dbl::predecessor(*iv));
        if (auto* cy = std::get_if<CylinderSet>(&payload_))
            return OpenSetHandle(dbl::predecessor(*cy));
        const auto& fp = points();
        return OpenSetHandle(FinitePointSet{fp.space, fp.space->predecessor(fp.mask)});
    }

    void require_same_backend(const OpenSetHandle& other) const {
        if (tag() != other.tag()) throw std::invalid_argument("backend mismatch between handles");
        if (tag() == SpaceTag::finite && points().space != other.points().space)
            throw std::invalid_argument("finite handles live in different spaces");
        if (tag() == SpaceTag::symbolic &&
            cylinders().alphabet_size() != other.cylinders().alphabet_size())
            throw std::invalid_argument("cylinder handles use different alphabets");
    }

private:
    Payload payload_;
};

struct DistanceResult {
    std::optional<unsigned> value;  // nullopt means Infinite
    unsigned cutoff_used = 0;
    std::vector<OpenSetHandle> witness_chain;  // U, U_*, ..., up to the stopping set

    bool infinite() const { return !value.has_value(); }
};

// Similarity data for Lemma-style invariance checks: a bijection with
// distortion in [K1, K2] rescales directed distances by at most the smallest
// natural K >= 1 + log2(K2/K1).
struct SimilarityMap {
    Rat scale;
    Rat offset;
    Rat lower_distortion;  // K1
    Rat upper_distortion;  // K2

    static SimilarityMap pure(const Rat& s, const Rat& t) { return {s, t, s, s}; }

    unsigned distortion_constant() const {
        if (lower_distortion > upper_distortion || lower_distortion <= 0)
            throw std::domain_error("need 0 < K1 <= K2");
        // smallest natural K with K >= 1 + log2(K2/K1)
        Rat ratio = upper_distortion / lower_distortion;
        unsigned k = 1;
        Rat p = 1;  // 2^{k-1}
        while (p < ratio) {
            p *= 2;
            ++k;
        }
        return k;
    }
};

// Certified termination bound: U contains the ball O(x,r) given by its
// largest piece, V sits within distance D of x, and O(x, 2^n r) lies inside
// the n-th predecessor by induction, so n = ceil(log2(max(D/r,1))) + 1
// always suffices.
inline unsigned cutoff_bound(const OpenSetHandle& u, const OpenSetHandle& v) {
    if (u.empty()) throw std::domain_error("cutoff bound needs a non-empty source");
    switch (u.tag()) {
        case SpaceTag::realline: {
            const auto& uc = u.intervals().components();
            auto widest = uc.front();
            for (const auto& c : uc)
                if (c.length() > widest.length()) widest = c;
            Rat x = (widest.lo + widest.hi) / 2;
            Rat r = widest.length() / 2;
            if (v.intervals().empty()) return 1;
            Rat d = std::max(rat_abs(v.intervals().min() - x), rat_abs(v.intervals().max() - x));
            Rat q = d / r;
            if (q < 1) q = 1;
            return ceil_log2(q) + 1;
        }
        case SpaceTag::symbolic:
            return static_cast<unsigned>(u.cylinders().max_depth()) + 1;
        case SpaceTag::finite:
            return static_cast<unsigned>(u.points().space->size());
    }
    throw std::logic_error("unreachable");
}

inline OpenSetHandle iterate_predecessor(OpenSetHandle u, unsigned n) {
    if (u.empty()) throw std::domain_error("iterate_predecessor needs a non-empty set");
    for (unsigned i = 0; i < n; ++i) u = u.predecessor();
    return u;
}

inline DistanceResult directed_distance(const OpenSetHandle& u, const OpenSetHandle& v,
                                        bool keep_witness = false) {
    if (u.empty()) throw std::domain_error("directed distance needs a non-empty source");
    u.require_same_backend(v);
    DistanceResult res;
    res.cutoff_used = cutoff_bound(u, v);
    OpenSetHandle w = u;
    for (unsigned n = 0; n <= res.cutoff_used; ++n) {
        if (keep_witness) res.witness_chain.push_back(w);
        if (w.contains(v)) {
            res.value = n;
            return res;
        }
        w = w.predecessor();
    }
    return res;  // Infinite, certified by the cutoff
}

inline DistanceResult doubling_distance(const OpenSetHandle& u, const OpenSetHandle& v,
                                        bool keep_witness = false) {
    if (u.empty() || v.empty())
        throw std::domain_error("doubling distance needs non-empty sets");
    DistanceResult uv = directed_distance(u, v, keep_witness);
    DistanceResult vu = directed_distance(v, u, false);
    DistanceResult res;
    res.cutoff_used = std::max(uv.cutoff_used, vu.cutoff_used);
    res.witness_chain = std::move(uv.witness_chain);
    if (uv.value && vu.value) res.value = std::max(*uv.value, *vu.value);
    return res;
}

// Directed distance from an interval set to a finite list of target points;
// used by the porosity machinery where targets are singletons.
inline std::optional<unsigned> directed_distance_to_points(const IntervalSet& u,
                                                           const std::vector<Rat>& targets,
                                                           unsigned extra_cutoff = 0) {
    if (u.empty()) return std::nullopt;
    const auto& uc = u.components();
    auto widest = uc.front();
    for (const auto& c : uc)
        if (c.length() > widest.length()) widest = c;
    Rat x = (widest.lo + widest.hi) / 2;
    Rat r = widest.length() / 2;
    Rat d = r;
    for (const auto& t : targets) d = std::max(d, rat_abs(t - x));
    Rat q = d / r;
    if (q < 1) q = 1;
    unsigned cutoff = ceil_log2(q) + 1 + extra_cutoff;
    IntervalSet w = u;
    for (unsigned n = 0; n <= cutoff; ++n) {
        bool all = true;
        for (const auto& t : targets)
            if (!w.contains_point(t)) {
                all = false;
                break;
            }
        if (all) return n;
        w = predecessor(w);
    }
    return std::nullopt;
}

}  // namespace dbl
