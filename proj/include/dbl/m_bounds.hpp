#pragma once

// Two-sided bounds on the measure pseudometric m. The upper bound is the
// theorem 3 d(U,V), sharpened to d(U,V) on the real line and on ultrametric
// backends. Lower bounds are certificates: an explicit C and a C-doubling
// measure with mu(V)/mu(U) = R witness m->(U,V) >= log_C R. On finite
// spaces the best ratio per C is an exact linear program over weight
// vectors; on the other backends certificates come from named measure
// families (and, at the pipeline level, from squeeze measures).

#include <cmath>
#include <string>

#include "dbl/lp.hpp"
#include "dbl/measures.hpp"

namespace dbl {

struct MBoundWitness {
    Rat constant = 1;  // the C of the certificate
    Rat ratio = 1;     // mu(V)/mu(U) achieved by the witness measure
    std::string description = "none";
};

struct MBoundReport {
    Rat lower = 0;  // certified rational lower bound on m->(U,V)
    Rat upper = 0;  // 3 d(U,V), or d(U,V) when the sharp form applies
    Rat upper_general = 0;  // always 3 d(U,V)
    bool sharp_upper = false;
    unsigned distance = 0;  // d(U,V)
    MBoundWitness witness;

    double lower_float() const { return rat_to_double(lower); }
};

namespace detail {

// Best achievable mu(V)/mu(U) over C-doubling weight vectors, as a linear
// program: the doubling constraints are homogeneous, so normalize mu(U) = 1.
// The supremum over strictly positive weights equals the LP optimum over the
// closed cone.
inline std::optional<Rat> best_ratio_for_constant(const FiniteSpace& sp, Mask u, Mask v,
                                                  const Rat& c) {
    std::size_t n = sp.size();
    std::vector<std::vector<Rat>> rows;
    std::vector<Rat> rhs;
    for (std::size_t x = 0; x < n; ++x) {
        const auto& lv = sp.levels(x);
        for (std::size_t i = 0; i + 1 < lv.size(); ++i) {
            Mask inner = sp.closed_ball(x, lv[i]);
            Mask outer = sp.open_ball(x, 2 * lv[i + 1]);
            std::vector<Rat> row(n, Rat(0));
            for (std::size_t j = 0; j < n; ++j) {
                if (outer & (Mask(1) << j)) row[j] += 1;
                if (inner & (Mask(1) << j)) row[j] -= c;
            }
            rows.push_back(std::move(row));
            rhs.push_back(0);
        }
    }
    // mu(U) = 1 as a pair of inequalities
    std::vector<Rat> uplus(n, Rat(0)), uminus(n, Rat(0));
    for (std::size_t j = 0; j < n; ++j)
        if (u & (Mask(1) << j)) {
            uplus[j] = 1;
            uminus[j] = -1;
        }
    rows.push_back(uplus);
    rhs.push_back(1);
    rows.push_back(uminus);
    rhs.push_back(-1);

    std::vector<Rat> objective(n, Rat(0));
    for (std::size_t j = 0; j < n; ++j)
        if (v & (Mask(1) << j)) objective[j] = 1;

    LpResult res = lp_maximize(objective, rows, rhs);
    if (res.status != LpStatus::optimal) return std::nullopt;
    return res.value;
}

inline void consider(MBoundReport& rep, const Rat& c, const Rat& ratio,
                     const std::string& description) {
    Rat t = log_lower_bound(c, ratio);
    if (t > rep.lower) {
        rep.lower = t;
        rep.witness = {c, ratio, description};
    }
}

}  // namespace detail

// Directed lower bound on m->(U,V) for finite backends: sweep a geometric
// grid in log C, then refine around the best grid point (the objective is
// not assumed monotone in C).
inline void finite_m_lower(MBoundReport& rep, const FiniteSpace& sp, Mask u, Mask v) {
    std::vector<Rat> grid{Rat(17, 16), Rat(9, 8),  Rat(5, 4), Rat(3, 2), Rat(2),
                          Rat(3),      Rat(4),     Rat(6),    Rat(8),    Rat(16),
                          Rat(32),     Rat(64),    Rat(256)};
    Rat best_c = 0;
    for (const Rat& c : grid) {
        auto ratio = detail::best_ratio_for_constant(sp, u, v, c);
        if (!ratio) continue;
        Rat before = rep.lower;
        detail::consider(rep, c, *ratio, "finite-space weight LP");
        if (rep.lower > before || best_c == 0) best_c = c;
    }
    if (best_c == 0) return;
    // golden-section style refinement on the log C axis around the best point
    double lo = std::log(rat_to_double(best_c)) - 0.6;
    double hi = std::log(rat_to_double(best_c)) + 0.6;
    for (int round = 0; round < 10; ++round) {
        double g1 = lo + 0.382 * (hi - lo), g2 = lo + 0.618 * (hi - lo);
        Rat c1(static_cast<long>(std::exp(g1) * 65536), 65536);
        Rat c2(static_cast<long>(std::exp(g2) * 65536), 65536);
        Rat t1 = 0, t2 = 0;
        if (c1 > 1)
            if (auto r1 = detail::best_ratio_for_constant(sp, u, v, c1)) {
                t1 = log_lower_bound(c1, *r1);
                detail::consider(rep, c1, *r1, "finite-space weight LP (refined)");
            }
        if (c2 > 1)
            if (auto r2 = detail::best_ratio_for_constant(sp, u, v, c2)) {
                t2 = log_lower_bound(c2, *r2);
                detail::consider(rep, c2, *r2, "finite-space weight LP (refined)");
            }
        if (t1 >= t2)
            hi = g2;
        else
            lo = g1;
    }
}

inline void realline_m_lower(MBoundReport& rep, const IntervalSet& u, const IntervalSet& v) {
    // Lebesgue: exact constant 2
    PiecewiseDensity leb = PiecewiseDensity::lebesgue();
    Rat mu_u = leb.measure(u), mu_v = leb.measure(v);
    if (mu_u > 0) detail::consider(rep, Rat(2), Rat(mu_v / mu_u), "lebesgue");

    // jump densities concentrated where V sticks out of U's hull
    if (!v.empty() && !u.empty()) {
        for (int s : {2, 4, 8}) {
            PiecewiseDensity pd({u.min(), u.max()}, {Rat(1)}, Rat(s));
            DoublingEvidence ev = doubling_evidence(MeasureRep(pd));
            Rat du = pd.measure(u);
            if (du > 0)
                detail::consider(rep, ev.sound_value(), Rat(pd.measure(v) / du),
                                 "jump density outside hull(U), s=" + std::to_string(s));
        }
    }
}

inline void symbolic_m_lower(MBoundReport& rep, const CylinderSet& u, const CylinderSet& v) {
    unsigned a = u.alphabet_size();
    std::vector<BernoulliWeights> menu;
    menu.push_back(BernoulliWeights::uniform(a));
    if (a == 2) {
        menu.push_back(BernoulliWeights({Rat(1, 4), Rat(3, 4)}));
        menu.push_back(BernoulliWeights({Rat(3, 4), Rat(1, 4)}));
        menu.push_back(BernoulliWeights({Rat(1, 8), Rat(7, 8)}));
        menu.push_back(BernoulliWeights({Rat(7, 8), Rat(1, 8)}));
    }
    for (const auto& mu : menu) {
        Rat mu_u = mu.measure(u);
        if (mu_u == 0) continue;
        detail::consider(rep, mu.doubling_constant(), Rat(mu.measure(v) / mu_u),
                         "bernoulli menu");
    }
}

// Certified bracket for the directed pseudometric m->(U,V).
inline MBoundReport m_bounds_directed(const OpenSetHandle& u, const OpenSetHandle& v) {
    if (u.empty() || v.empty()) throw std::domain_error("m bounds need non-empty sets");
    MBoundReport rep;
    DistanceResult d = doubling_distance(u, v);
    if (d.infinite()) throw std::domain_error("m bounds need finite doubling distance");
    rep.distance = *d.value;
    switch (u.tag()) {
        case SpaceTag::realline:
            rep.sharp_upper = true;
            realline_m_lower(rep, u.intervals(), v.intervals());
            break;
        case SpaceTag::symbolic:
            rep.sharp_upper = true;
            symbolic_m_lower(rep, u.cylinders(), v.cylinders());
            break;
        case SpaceTag::finite:
            rep.sharp_upper = u.points().space->is_ultrametric();
            finite_m_lower(rep, *u.points().space, u.points().mask, v.points().mask);
            break;
    }
    rep.upper = Rat((rep.sharp_upper ? 1 : 3) * rep.distance);
    rep.upper_general = Rat(3 * rep.distance);
    if (rep.lower > rep.upper)
        throw std::logic_error("m bracket inverted; certificate or theorem check is wrong");
    return rep;
}

// Symmetric version: lower = max of the directed certificates, upper from d.
inline MBoundReport m_bounds(const OpenSetHandle& u, const OpenSetHandle& v) {
    MBoundReport uv = m_bounds_directed(u, v);
    MBoundReport vu = m_bounds_directed(v, u);
    MBoundReport rep = uv;
    if (vu.lower > rep.lower) {
        rep.lower = vu.lower;
        rep.witness = vu.witness;
        rep.witness.description += " (reverse direction)";
    }
    return rep;
}

}  // namespace dbl
