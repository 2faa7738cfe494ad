#pragma once

// Exact open-set algebra on the real line. An IntervalSet is a finite union
// of disjoint open intervals with rational endpoints; it is the canonical
// representation of a bounded open subset of R.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dbl/rational.hpp"

namespace dbl {

struct Interval {
    Rat lo;
    Rat hi;  // open on both sides, lo < hi

    Rat length() const { return hi - lo; }
    bool operator==(const Interval& other) const = default;
};

class IntervalSet {
public:
    IntervalSet() = default;

    explicit IntervalSet(std::vector<Interval> parts) : components_(std::move(parts)) {
        normalize();
    }

    static IntervalSet single(const Rat& lo, const Rat& hi) {
        return IntervalSet({Interval{lo, hi}});
    }

    const std::vector<Interval>& components() const { return components_; }
    bool empty() const { return components_.empty(); }
    std::size_t component_count() const { return components_.size(); }

    bool operator==(const IntervalSet& other) const = default;

    Rat total_length() const {
        Rat sum = 0;
        for (const auto& c : components_) sum += c.length();
        return sum;
    }

    // Hull endpoints; only valid on non-empty sets.
    Rat min() const { return components_.front().lo; }
    Rat max() const { return components_.back().hi; }

    bool contains_point(const Rat& x) const {
        for (const auto& c : components_)
            if (c.lo < x && x < c.hi) return true;
        return false;
    }

    // V subseteq this. An open interval fits inside a disjoint union of open
    // intervals only if it fits inside a single component.
    bool contains(const IntervalSet& v) const {
        std::size_t i = 0;
        for (const auto& part : v.components_) {
            while (i < components_.size() && components_[i].hi < part.hi) ++i;
            if (i == components_.size()) return false;
            if (!(components_[i].lo <= part.lo && part.hi <= components_[i].hi)) return false;
        }
        return true;
    }

    IntervalSet unite(const IntervalSet& other) const {
        std::vector<Interval> parts = components_;
        parts.insert(parts.end(), other.components_.begin(), other.components_.end());
        return IntervalSet(std::move(parts));
    }

    IntervalSet intersect(const IntervalSet& other) const {
        std::vector<Interval> parts;
        for (const auto& a : components_)
            for (const auto& b : other.components_) {
                Rat lo = std::max(a.lo, b.lo);
                Rat hi = std::min(a.hi, b.hi);
                if (lo < hi) parts.push_back({lo, hi});
            }
        return IntervalSet(std::move(parts));
    }

    // Set difference with the closure of `closed`: (a,b) \ [c,d] stays open.
    IntervalSet subtract_closure(const IntervalSet& closed) const {
        std::vector<Interval> result;
        for (const auto& part : components_) {
            std::vector<Interval> pieces{part};
            for (const auto& cut : closed.components_) {
                std::vector<Interval> next;
                for (const auto& p : pieces) {
                    if (cut.hi <= p.lo || p.hi <= cut.lo) {
                        next.push_back(p);
                        continue;
                    }
                    if (p.lo < cut.lo) next.push_back({p.lo, cut.lo});
                    if (cut.hi < p.hi) next.push_back({cut.hi, p.hi});
                }
                pieces = std::move(next);
            }
            result.insert(result.end(), pieces.begin(), pieces.end());
        }
        return IntervalSet(std::move(result));
    }

    // Removes a finite point set, splitting components at interior punctures.
    IntervalSet remove_points(const std::vector<Rat>& points) const {
        std::vector<Interval> result;
        for (const auto& part : components_) {
            std::vector<Rat> cuts;
            for (const auto& p : points)
                if (part.lo < p && p < part.hi) cuts.push_back(p);
            std::sort(cuts.begin(), cuts.end());
            Rat left = part.lo;
            for (const auto& c : cuts) {
                if (left < c) result.push_back({left, c});
                left = c;
            }
            if (left < part.hi) result.push_back({left, part.hi});
        }
        return IntervalSet(std::move(result));
    }

private:
    // Sort by left endpoint and merge strict overlaps. Touching components
    // (b1 == a2) stay separate: the shared endpoint is excluded from both, so
    // they are genuinely distinct components of the open set.
    void normalize() {
        for (const auto& c : components_)
            if (!(c.lo < c.hi)) throw std::invalid_argument("interval needs lo < hi");
        std::sort(components_.begin(), components_.end(),
                  [](const Interval& a, const Interval& b) {
                      return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
                  });
        std::vector<Interval> merged;
        for (const auto& c : components_) {
            if (!merged.empty() && c.lo < merged.back().hi) {
                if (c.hi > merged.back().hi) merged.back().hi = c.hi;
            } else {
                merged.push_back(c);
            }
        }
        components_ = std::move(merged);
    }

    std::vector<Interval> components_;
};

// --- predecessor ---------------------------------------------------------
//
// On R every open ball is an interval and every ball contained in U lies in
// a single component (a,b). The union of doubled balls inside (a,b) is
// exactly (a - L/2, b + L/2) with L = b - a: the extremal central ball
// attains it. Components are doubled independently and overlaps merged.

inline IntervalSet predecessor(const IntervalSet& u) {
    std::vector<Interval> parts;
    parts.reserve(u.component_count());
    for (const auto& c : u.components()) {
        Rat half = c.length() / 2;
        parts.push_back({c.lo - half, c.hi + half});
    }
    return IntervalSet(std::move(parts));
}

inline IntervalSet iterate_predecessor(IntervalSet u, unsigned n) {
    for (unsigned i = 0; i < n; ++i) u = predecessor(u);
    return u;
}

// --- the minus operation --------------------------------------------------
//
// Puncture sequences for a component (a,b):
//   y0 = (3a+b)/4, y_{n+1} = (2a+y_n)/3   (decreasing to a)
//   x0 = (3b+a)/4, x_{n+1} = (2b+x_n)/3   (increasing to b)
// chosen so that (y0,x0) doubles back to (a,b) and each side interval's
// doubled copy pins the matching endpoint of (a,b).

inline std::vector<Rat> left_punctures(const Rat& a, const Rat& b, unsigned n_keep) {
    std::vector<Rat> ys;
    Rat y = (3 * a + b) / 4;
    for (unsigned n = 0; n <= n_keep; ++n) {
        ys.push_back(y);
        y = (2 * a + y) / 3;
    }
    return ys;
}

inline std::vector<Rat> right_punctures(const Rat& a, const Rat& b, unsigned n_keep) {
    std::vector<Rat> xs;
    Rat x = (3 * b + a) / 4;
    for (unsigned n = 0; n <= n_keep; ++n) {
        xs.push_back(x);
        x = (2 * b + x) / 3;
    }
    return xs;
}

// Truncated minus: keeps punctures y_0..y_N and x_0..x_N per component. The
// full operation removes infinitely many points; see MinusTower for the
// symbolic form that distance claims require.
inline IntervalSet minus_truncated(const IntervalSet& u, unsigned n_keep) {
    std::vector<Interval> result;
    for (const auto& part : u.components()) {
        std::vector<Rat> cuts = left_punctures(part.lo, part.hi, n_keep);
        auto xs = right_punctures(part.lo, part.hi, n_keep);
        cuts.insert(cuts.end(), xs.begin(), xs.end());
        std::sort(cuts.begin(), cuts.end());
        Rat left = part.lo;
        for (const auto& c : cuts) {
            result.push_back({left, c});
            left = c;
        }
        result.push_back({left, part.hi});
    }
    return IntervalSet(std::move(result));
}

// --- component cover (maximal balls) ---------------------------------------

struct Ball1D {
    Rat center;
    Rat radius;
};

// The components are exactly the inclusion-maximal open balls in U; their
// doubled copies reproduce the predecessor set-exactly on R.
inline std::vector<Ball1D> components_cover(const IntervalSet& u) {
    if (u.empty()) throw std::domain_error("components_cover needs a non-empty set");
    std::vector<Ball1D> cover;
    cover.reserve(u.component_count());
    for (const auto& c : u.components())
        cover.push_back({(c.lo + c.hi) / 2, c.length() / 2});
    return cover;
}

// --- similarity x -> s*x + t ------------------------------------------------

inline IntervalSet similarity_apply(const IntervalSet& u, const Rat& scale, const Rat& offset) {
    if (scale <= 0) throw std::domain_error("similarity scale must be positive");
    std::vector<Interval> parts;
    parts.reserve(u.component_count());
    for (const auto& c : u.components())
        parts.push_back({scale * c.lo + offset, scale * c.hi + offset});
    return IntervalSet(std::move(parts));
}

}  // namespace dbl
