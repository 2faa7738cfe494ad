#pragma once

// Finite metric spaces as the universal brute-force oracle. Every subset is
// open, and the continuum of radii collapses to finitely many effective
// breakpoints: between consecutive distances from a point, open balls are
// constant. Point sets are bitmasks over at most 64 points.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "dbl/rational.hpp"

namespace dbl {

using Mask = std::uint64_t;

inline int popcount(Mask m) { return __builtin_popcountll(m); }

class FiniteSpace {
public:
    explicit FiniteSpace(std::vector<std::vector<Rat>> dist) : dist_(std::move(dist)) {
        n_ = dist_.size();
        if (n_ == 0 || n_ > 64) throw std::invalid_argument("space size must be in [1,64]");
        for (std::size_t i = 0; i < n_; ++i) {
            if (dist_[i].size() != n_) throw std::invalid_argument("distance matrix not square");
            if (dist_[i][i] != 0) throw std::invalid_argument("nonzero diagonal");
            for (std::size_t j = 0; j < n_; ++j) {
                if (dist_[i][j] != dist_[j][i]) throw std::invalid_argument("asymmetric matrix");
                if (i != j && dist_[i][j] <= 0) throw std::invalid_argument("nonpositive distance");
            }
        }
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                for (std::size_t k = 0; k < n_; ++k)
                    if (dist_[i][j] > dist_[i][k] + dist_[k][j])
                        throw std::invalid_argument("triangle inequality violated");
        ultrametric_ = true;
        for (std::size_t i = 0; i < n_ && ultrametric_; ++i)
            for (std::size_t j = 0; j < n_ && ultrametric_; ++j)
                for (std::size_t k = 0; k < n_; ++k)
                    if (dist_[i][j] > std::max(dist_[i][k], dist_[k][j])) {
                        ultrametric_ = false;
                        break;
                    }
        // per-point sorted distinct distances (the effective radii breakpoints)
        levels_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            std::vector<Rat> ds(dist_[i]);
            std::sort(ds.begin(), ds.end());
            ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
            levels_[i] = std::move(ds);
        }
    }

    std::size_t size() const { return n_; }
    bool is_ultrametric() const { return ultrametric_; }
    const Rat& distance(std::size_t i, std::size_t j) const { return dist_[i][j]; }
    const std::vector<Rat>& levels(std::size_t i) const { return levels_[i]; }

    Rat diameter() const {
        Rat d = 0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) d = std::max(d, dist_[i][j]);
        return d;
    }

    Mask whole() const { return n_ == 64 ? ~Mask(0) : (Mask(1) << n_) - 1; }

    Mask open_ball(std::size_t center, const Rat& radius) const {
        if (radius <= 0) throw std::domain_error("ball radius must be positive");
        Mask m = 0;
        for (std::size_t j = 0; j < n_; ++j)
            if (dist_[center][j] < radius) m |= Mask(1) << j;
        return m;
    }

    Mask closed_ball(std::size_t center, const Rat& radius) const {
        Mask m = 0;
        for (std::size_t j = 0; j < n_; ++j)
            if (dist_[center][j] <= radius) m |= Mask(1) << j;
        return m;
    }

    // Predecessor of U: for every center x and every breakpoint interval
    // (b_i, b_{i+1}] the ball O(x,r) is constant {delta <= b_i} and the
    // doubled balls sweep out the open ball {delta < 2 b_{i+1}}. The tail
    // interval past the largest distance contributes when U is the whole
    // space, which is already a fixed point.
    Mask predecessor(Mask u) const {
        Mask out = u;
        for (std::size_t x = 0; x < n_; ++x) {
            const auto& lv = levels_[x];
            for (std::size_t i = 0; i + 1 < lv.size(); ++i) {
                Mask ball = closed_ball(x, lv[i]);
                if ((ball & ~u) == 0) out |= open_ball(x, 2 * lv[i + 1]);
            }
        }
        return out;
    }

    Mask iterate_predecessor(Mask u, unsigned n) const {
        for (unsigned i = 0; i < n; ++i) u = predecessor(u);
        return u;
    }

    // Directed distance; finite for any non-empty source since each
    // predecessor step strictly grows a proper subset.
    unsigned directed_distance(Mask u, Mask v) const {
        if (u == 0) throw std::domain_error("directed distance needs a non-empty source");
        Mask w = u;
        for (unsigned n = 0; n <= n_; ++n) {
            if ((v & ~w) == 0) return n;
            w = predecessor(w);
        }
        throw std::logic_error("finite predecessor chain failed to stabilize");
    }

    unsigned doubling_distance(Mask u, Mask v) const {
        return std::max(directed_distance(u, v), directed_distance(v, u));
    }

    // Exact minimal doubling constant of the weight measure: the worst ratio
    // mu({delta < 2 b_{i+1}}) / mu({delta <= b_i}) over effective intervals.
    Rat doubling_constant(const std::vector<Rat>& weights) const {
        if (weights.size() != n_) throw std::invalid_argument("weight count mismatch");
        for (const auto& w : weights)
            if (w <= 0) throw std::domain_error("doubling measures need positive weights");
        Rat best = 1;
        for (std::size_t x = 0; x < n_; ++x) {
            const auto& lv = levels_[x];
            for (std::size_t i = 0; i + 1 < lv.size(); ++i) {
                Rat denom = mass(weights, closed_ball(x, lv[i]));
                Rat numer = mass(weights, open_ball(x, 2 * lv[i + 1]));
                best = std::max(best, Rat(numer / denom));
            }
        }
        return best;
    }

    Rat mass(const std::vector<Rat>& weights, Mask s) const {
        Rat total = 0;
        for (std::size_t j = 0; j < n_; ++j)
            if (s & (Mask(1) << j)) total += weights[j];
        return total;
    }

private:
    std::size_t n_ = 0;
    bool ultrametric_ = false;
    std::vector<std::vector<Rat>> dist_;
    std::vector<std::vector<Rat>> levels_;
};

using FiniteSpacePtr = std::shared_ptr<const FiniteSpace>;

// A subset of a finite space, carrying its space so handles stay
// self-contained.
struct FinitePointSet {
    FiniteSpacePtr space;
    Mask mask = 0;

    bool operator==(const FinitePointSet& other) const {
        return space == other.space && mask == other.mask;
    }
};

// --- F3 concentric-ball check ----------------------------------------------

struct ConcentricFailure {
    std::size_t center = 0;
    Rat radius;
    unsigned distance = 0;
};

struct ConcentricReport {
    bool pass = false;
    unsigned observed_max = 0;
    std::vector<ConcentricFailure> failures;
};

// Checks d->(f^{-1} O(y,r), f^{-1} O(y,2r)) <= K for every center y of the
// codomain and every effective radius breakpoint {d, d/2}. Within each
// breakpoint interval the source ball is constant and the target is largest
// at the right endpoint, so scanning the breakpoints covers all real radii.
inline ConcentricReport f3_concentric_check(const FiniteSpace& domain, const FiniteSpace& codomain,
                                            const std::vector<std::size_t>& point_map,
                                            unsigned bound) {
    if (point_map.size() != domain.size())
        throw std::invalid_argument("point map size must match the domain");
    std::vector<bool> hit(codomain.size(), false);
    for (std::size_t x = 0; x < domain.size(); ++x) {
        if (point_map[x] >= codomain.size()) throw std::invalid_argument("map target out of range");
        hit[point_map[x]] = true;
    }
    for (bool h : hit)
        if (!h) throw std::domain_error("f3 check requires a surjective map");

    auto preimage = [&](Mask s) {
        Mask m = 0;
        for (std::size_t x = 0; x < domain.size(); ++x)
            if (s & (Mask(1) << point_map[x])) m |= Mask(1) << x;
        return m;
    };

    ConcentricReport rep;
    for (std::size_t y = 0; y < codomain.size(); ++y) {
        std::vector<Rat> radii;
        for (const Rat& d : codomain.levels(y))
            if (d > 0) {
                radii.push_back(d);
                radii.push_back(d / 2);
            }
        std::sort(radii.begin(), radii.end());
        radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
        for (const Rat& r : radii) {
            Mask small = preimage(codomain.open_ball(y, r));
            Mask big = preimage(codomain.open_ball(y, 2 * r));
            if (small == 0) continue;  // preimage of an empty ball cannot occur (surjective)
            unsigned d = domain.directed_distance(small, big);
            rep.observed_max = std::max(rep.observed_max, d);
            if (d > bound) rep.failures.push_back({y, r, d});
        }
    }
    rep.pass = rep.failures.empty();
    return rep;
}

// --- fixture spaces ---------------------------------------------------------

// {0,1} x {0..n_levels} with all distances 1: any two non-empty subsets are
// within doubling distance 1.
inline FiniteSpace make_uniform_pair_space(unsigned n_levels) {
    std::size_t n = 2 * (n_levels + 1);
    std::vector<std::vector<Rat>> d(n, std::vector<Rat>(n, Rat(1)));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
    return FiniteSpace(std::move(d));
}

// {0,1} x {0..n_levels} where the pair at level n sits at distance 2^{-n-1}
// and everything else at distance 1: the doubling distance between any two
// non-empty subsets is at most 2.
inline FiniteSpace make_shrinking_pair_space(unsigned n_levels) {
    std::size_t n = 2 * (n_levels + 1);
    std::vector<std::vector<Rat>> d(n, std::vector<Rat>(n, Rat(1)));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
    for (unsigned level = 0; level <= n_levels; ++level) {
        std::size_t a = 2 * level, b = 2 * level + 1;
        Rat sep = Rat(1) / rat_pow(Rat(2), level + 1);
        d[a][b] = d[b][a] = sep;
    }
    return FiniteSpace(std::move(d));
}

// Sup-metric product of two finite spaces; points are (i,j) flattened
// row-major with j fastest.
inline FiniteSpace make_sup_product(const FiniteSpace& a, const FiniteSpace& b) {
    std::size_t n = a.size() * b.size();
    std::vector<std::vector<Rat>> d(n, std::vector<Rat>(n));
    for (std::size_t i1 = 0; i1 < a.size(); ++i1)
        for (std::size_t j1 = 0; j1 < b.size(); ++j1)
            for (std::size_t i2 = 0; i2 < a.size(); ++i2)
                for (std::size_t j2 = 0; j2 < b.size(); ++j2)
                    d[i1 * b.size() + j1][i2 * b.size() + j2] =
                        std::max(a.distance(i1, i2), b.distance(j1, j2));
    return FiniteSpace(std::move(d));
}

}  // namespace dbl
