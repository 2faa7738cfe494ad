#pragma once

// The constructive machinery behind the comparability theorem: a schedule of
// proxy predecessors (W_m, S_m) subject to the four structural conditions
//
//   P1  each piece sits inside a ball inside W_m
//   P2  (W_m)_* subseteq W_{m+1} subseteq (W_m)_*^4
//   P3  pieces nest upward, and every piece contains a previous piece
//   P4  S \ W_m has non-empty interior for S in S_{m+1}
//
// plus the squeeze measures mu_{M,eps} built by stacking multipliers that
// compress the mass inside W_m by eps while preserving the mass of every
// piece of S_{m+1}. On the real line the schedule is the iterated
// predecessor with components as pieces; on finite spaces the full
// construction (maximal radii, escape witnesses, deduplication, remainder
// pieces) runs with every choice made exact.

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dbl/measures.hpp"

namespace dbl {

struct SqueezeLevel {
    OpenSetHandle w;
    std::vector<OpenSetHandle> pieces;          // empty when no partition at this level
    std::vector<OpenSetHandle> witness_balls;   // P1 witnesses, parallel to pieces
};

struct SqueezeSchedule {
    std::vector<SqueezeLevel> levels;
    std::size_t partition_levels = 0;  // partitions exist for m < partition_levels
    std::string provenance;

    const OpenSetHandle& w(std::size_t m) const { return levels.at(m).w; }
    const std::vector<OpenSetHandle>& pieces(std::size_t m) const { return levels.at(m).pieces; }
};

struct ScheduleCertificate {
    bool p1 = true, p2 = true, p3 = true, p4 = true;
    bool partitions_valid = true;
    bool counts_monotone = true;
    std::string witness;  // first violation, if any

    bool valid() const {
        return p1 && p2 && p3 && p4 && partitions_valid && counts_monotone;
    }
};

namespace detail {

inline bool handle_disjoint(const OpenSetHandle& a, const OpenSetHandle& b) {
    if (a.tag() == SpaceTag::finite) return (a.points().mask & b.points().mask) == 0;
    return a.intervals().intersect(b.intervals()).empty();
}

inline bool interior_nonempty_outside(const OpenSetHandle& s, const OpenSetHandle& w) {
    if (s.tag() == SpaceTag::finite) return (s.points().mask & ~w.points().mask) != 0;
    return !s.intervals().subtract_closure(w.intervals()).empty();
}

}  // namespace detail

// --- schedule construction ---------------------------------------------------

// Real line shortcut: W_m is the iterated predecessor and S_m its components.
inline SqueezeSchedule build_schedule_realline(const IntervalSet& u, const IntervalSet& v) {
    if (u.empty() || v.empty()) throw std::domain_error("schedule needs non-empty sets");
    SqueezeSchedule sched;
    sched.provenance = "realline-shortcut";
    IntervalSet w = u;
    for (unsigned guard = 0;; ++guard) {
        SqueezeLevel level{OpenSetHandle(w), {}, {}};
        for (const auto& c : w.components()) {
            level.pieces.emplace_back(IntervalSet({c}));
            level.witness_balls.emplace_back(IntervalSet({c}));
        }
        sched.levels.push_back(std::move(level));
        if (w.contains(v) && sched.levels.size() >= 3) break;
        if (guard > 200) throw std::logic_error("schedule failed to reach the target");
        w = predecessor(w);
    }
    sched.partition_levels = sched.levels.size();
    return sched;
}

// Full Part-I style construction on a finite space.
inline SqueezeSchedule build_schedule_finite(const FiniteSpacePtr& sp, Mask u, Mask v) {
    if (u == 0 || v == 0) throw std::domain_error("schedule needs non-empty sets");
    const FiniteSpace& space = *sp;
    const std::size_t n = space.size();
    SqueezeSchedule sched;
    sched.provenance = "finite-construction";

    // all inclusion-maximal balls contained in a mask
    auto maximal_balls_in = [&](Mask m) {
        std::vector<Mask> balls;
        for (std::size_t x = 0; x < n; ++x)
            for (const Rat& r : space.levels(x)) {
                Mask b = space.closed_ball(x, r);  // = open ball at the next breakpoint
                if (b != 0 && (b & ~m) == 0) balls.push_back(b);
            }
        std::sort(balls.begin(), balls.end());
        balls.erase(std::unique(balls.begin(), balls.end()), balls.end());
        std::vector<Mask> maximal;
        for (Mask b : balls) {
            bool dominated = false;
            for (Mask c : balls)
                if (c != b && (b & ~c) == 0) {
                    dominated = true;
                    break;
                }
            if (!dominated) maximal.push_back(b);
        }
        return maximal;
    };

    // minimal cover of u by maximal balls (exhaustive; spaces are small)
    auto minimal_cover = [&](Mask m) -> std::vector<Mask> {
        std::vector<Mask> balls = maximal_balls_in(m);
        for (std::size_t k = 1; k <= balls.size(); ++k) {
            std::vector<std::size_t> idx(k);
            // iterate over k-subsets in lexicographic order
            for (std::size_t i = 0; i < k; ++i) idx[i] = i;
            while (true) {
                Mask cover = 0;
                for (std::size_t i : idx) cover |= balls[i];
                if ((m & ~cover) == 0) {
                    std::vector<Mask> out;
                    for (std::size_t i : idx) out.push_back(balls[i]);
                    return out;
                }
                std::size_t pos = k;
                while (pos > 0) {
                    --pos;
                    if (idx[pos] + (k - pos) < balls.size()) {
                        ++idx[pos];
                        for (std::size_t q = pos + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
                        break;
                    }
                    if (pos == 0) {
                        pos = k;  // exhausted
                        break;
                    }
                }
                if (pos == k) break;
            }
        }
        throw std::logic_error("no ball cover found");
    };

    // level zero
    {
        std::vector<Mask> cover = minimal_cover(u);
        SqueezeLevel level{OpenSetHandle(FinitePointSet{sp, u}), {}, {}};
        Mask used = 0;
        for (Mask b : cover) {
            Mask piece = b & ~used;
            if (piece == 0) throw std::logic_error("minimal cover produced an empty piece");
            used |= b;
            level.pieces.emplace_back(FinitePointSet{sp, piece});
            level.witness_balls.emplace_back(FinitePointSet{sp, b});
        }
        sched.levels.push_back(std::move(level));
    }

    Mask w = u;
    bool partitions_open = true;
    for (unsigned guard = 0;; ++guard) {
        if (guard > 4 * n + 8) throw std::logic_error("schedule failed to reach the target");
        if ((v & ~w) == 0 && sched.levels.size() >= 3) break;
        Mask wstar = space.predecessor(w);
        if (!partitions_open || wstar == space.whole()) {
            // no further partitions are needed once the predecessor fills the
            // space; extend with plain predecessor levels (P2 holds trivially)
            partitions_open = false;
            sched.levels.push_back({OpenSetHandle(FinitePointSet{sp, wstar}), {}, {}});
            w = wstar;
            continue;
        }

        const auto& prev = sched.levels.back();
        std::size_t count = prev.pieces.size();
        std::vector<std::size_t> centers(count);
        std::vector<Rat> radii(count);
        std::vector<std::size_t> escapes(count);
        for (std::size_t i = 0; i < count; ++i) {
            Mask piece = prev.pieces[i].points().mask;
            // rho_i: the largest ball radius around any center that contains
            // the piece and stays inside wstar
            bool found = false;
            Rat best_rho;
            Rat best_in;
            std::size_t best_x = 0;
            for (std::size_t x = 0; x < n; ++x) {
                Rat max_in = 0;
                for (std::size_t s = 0; s < n; ++s)
                    if (piece & (Mask(1) << s)) max_in = std::max(max_in, space.distance(x, s));
                Rat min_out;
                bool have_out = false;
                for (std::size_t z = 0; z < n; ++z)
                    if (!(wstar & (Mask(1) << z))) {
                        Rat d = space.distance(x, z);
                        if (!have_out || d < min_out) min_out = d;
                        have_out = true;
                    }
                if (!have_out) throw std::logic_error("wstar is the whole space");
                if (max_in < min_out && (!found || min_out > best_rho)) {
                    found = true;
                    best_rho = min_out;
                    best_in = max_in;
                    best_x = x;
                }
            }
            if (!found) throw std::logic_error("P1 witness search failed");
            centers[i] = best_x;
            // smallest legal radius keeps the 7r inflation in check: any
            // r in (max(rho/2, reach), rho] works, take the midpoint
            Rat floor_r = std::max(Rat(best_rho / 2), best_in);
            radii[i] = (floor_r + best_rho) / 2;
            // escape point y_i in B(x_i, 2 r_i) \ W_m (exists: otherwise the
            // doubled ball would beat the maximal radius)
            Mask candidates = space.closed_ball(centers[i], 2 * radii[i]) & ~w;
            if (candidates == 0) throw std::logic_error("escape witness missing");
            escapes[i] = static_cast<std::size_t>(__builtin_ctzll(candidates));
        }

        // deduplicate escape points in order of first appearance
        std::vector<std::size_t> zs;
        std::vector<std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < count; ++i) {
            auto it = std::find(zs.begin(), zs.end(), escapes[i]);
            if (it == zs.end()) {
                zs.push_back(escapes[i]);
                groups.push_back({i});
            } else {
                groups[static_cast<std::size_t>(it - zs.begin())].push_back(i);
            }
        }
        std::size_t next_count = zs.size();
        std::vector<std::size_t> leaders(next_count);
        for (std::size_t k = 0; k < next_count; ++k) {
            std::size_t best = groups[k].front();
            for (std::size_t i : groups[k])
                if (radii[i] > radii[best]) best = i;
            leaders[k] = best;
        }

        Mask w_next = 0;
        std::vector<Mask> big_balls(next_count);
        for (std::size_t k = 0; k < next_count; ++k) {
            big_balls[k] = space.open_ball(centers[leaders[k]], 7 * radii[leaders[k]]);
            w_next |= big_balls[k];
        }

        // pieces: grouped previous pieces plus the escape point, then the
        // unclaimed remainder of each big ball in order
        std::vector<Mask> primed(next_count, 0);
        Mask primed_all = 0;
        for (std::size_t k = 0; k < next_count; ++k) {
            for (std::size_t i : groups[k]) {
                Mask piece = prev.pieces[i].points().mask;
                // the grouped piece must sit inside the leader's 7r ball
                Mask three = space.open_ball(centers[i], 3 * radii[i]);
                if ((piece & ~three) != 0 || (three & ~big_balls[k]) != 0)
                    throw std::logic_error("containment chain broke in the construction");
                primed[k] |= piece;
            }
            primed[k] |= Mask(1) << zs[k];
            primed_all |= primed[k];
        }
        SqueezeLevel level{OpenSetHandle(FinitePointSet{sp, w_next}), {}, {}};
        Mask used = 0;
        for (std::size_t k = 0; k < next_count; ++k) {
            Mask dk = big_balls[k] & ~used;
            used |= big_balls[k];
            Mask piece = primed[k] | (dk & ~primed_all);
            level.pieces.emplace_back(FinitePointSet{sp, piece});
            level.witness_balls.emplace_back(FinitePointSet{sp, big_balls[k]});
        }
        sched.levels.push_back(std::move(level));
        w = w_next;
    }
    sched.partition_levels = 0;
    for (const auto& lvl : sched.levels) {
        if (lvl.pieces.empty()) break;
        ++sched.partition_levels;
    }
    return sched;
}

inline SqueezeSchedule build_schedule(const OpenSetHandle& u, const OpenSetHandle& v) {
    u.require_same_backend(v);
    switch (u.tag()) {
        case SpaceTag::realline:
            return build_schedule_realline(u.intervals(), v.intervals());
        case SpaceTag::finite:
            return build_schedule_finite(u.points().space, u.points().mask, v.points().mask);
        default:
            throw std::invalid_argument("schedules exist for the realline and finite backends");
    }
}

// --- schedule certification ---------------------------------------------------

inline ScheduleCertificate certify_schedule(const SqueezeSchedule& sched) {
    ScheduleCertificate cert;
    auto fail = [&](bool& flag, const std::string& what) {
        flag = false;
        if (cert.witness.empty()) cert.witness = what;
    };
    for (std::size_t m = 0; m < sched.partition_levels; ++m) {
        const auto& lvl = sched.levels[m];
        // partition: disjoint, non-empty, union = W_m
        if (lvl.w.tag() == SpaceTag::finite) {
            Mask seen = 0;
            for (const auto& p : lvl.pieces) {
                if (p.points().mask == 0) fail(cert.partitions_valid, "empty piece");
                if (seen & p.points().mask) fail(cert.partitions_valid, "overlapping pieces");
                seen |= p.points().mask;
            }
            if (seen != lvl.w.points().mask) fail(cert.partitions_valid, "pieces miss W_m");
        } else {
            IntervalSet acc_iv;
            for (std::size_t i = 0; i < lvl.pieces.size(); ++i) {
                const auto& p = lvl.pieces[i].intervals();
                if (p.empty()) fail(cert.partitions_valid, "empty piece");
                if (!acc_iv.intersect(p).empty()) fail(cert.partitions_valid, "overlapping pieces");
                acc_iv = acc_iv.unite(p);
            }
            if (!(acc_iv == lvl.w.intervals())) fail(cert.partitions_valid, "pieces miss W_m");
        }
        // P1 with stored witnesses
        for (std::size_t i = 0; i < lvl.pieces.size(); ++i) {
            if (!lvl.witness_balls[i].contains(lvl.pieces[i]) ||
                !lvl.w.contains(lvl.witness_balls[i]))
                fail(cert.p1, "P1 witness fails at level " + std::to_string(m));
        }
    }
    for (std::size_t m = 0; m + 1 < sched.levels.size(); ++m) {
        const auto& cur = sched.levels[m];
        const auto& nxt = sched.levels[m + 1];
        OpenSetHandle star = cur.w.predecessor();
        OpenSetHandle star4 = star.predecessor().predecessor().predecessor();
        if (!nxt.w.contains(star) || !star4.contains(nxt.w))
            fail(cert.p2, "P2 fails at level " + std::to_string(m));
        if (m + 1 < sched.partition_levels) {
            if (nxt.pieces.size() > cur.pieces.size())
                fail(cert.counts_monotone, "piece count grew at level " + std::to_string(m + 1));
            for (const auto& prev_piece : cur.pieces) {
                bool nested = false;
                for (const auto& next_piece : nxt.pieces)
                    if (next_piece.contains(prev_piece)) {
                        nested = true;
                        break;
                    }
                if (!nested) fail(cert.p3, "P3 upward nesting fails at level " + std::to_string(m));
            }
            for (const auto& next_piece : nxt.pieces) {
                bool anchored = false;
                for (const auto& prev_piece : cur.pieces)
                    if (next_piece.contains(prev_piece)) {
                        anchored = true;
                        break;
                    }
                if (!anchored) fail(cert.p3, "P3 anchoring fails at level " + std::to_string(m));
                if (!detail::interior_nonempty_outside(next_piece, cur.w))
                    fail(cert.p4, "P4 fails at level " + std::to_string(m + 1));
            }
        }
    }
    return cert;
}

// --- squeeze measures ---------------------------------------------------------

struct SqueezeMeasure {
    MeasureRep measure;  // mu_{M,eps}
    MeasureRep base;     // lambda
    Rat eps;
    unsigned depth = 0;  // M
    Rat k_constant = 1;
    Rat admissibility_threshold;  // C^{-4} K^{-5}
};

// J_m(S): the union of level-m pieces contained in the level-(m+1) piece S.
inline OpenSetHandle nested_union(const SqueezeSchedule& sched, std::size_t m,
                                  const OpenSetHandle& s) {
    if (s.tag() == SpaceTag::finite) {
        Mask acc = 0;
        for (const auto& p : sched.pieces(m))
            if (s.contains(p)) acc |= p.points().mask;
        return OpenSetHandle(FinitePointSet{s.points().space, acc});
    }
    IntervalSet acc;
    for (const auto& p : sched.pieces(m))
        if (s.contains(p)) acc = acc.unite(p.intervals());
    return OpenSetHandle(acc);
}

inline Rat K_constant(const MeasureRep& lambda, const SqueezeSchedule& sched, unsigned depth) {
    if (depth + 1 > sched.partition_levels)
        throw std::domain_error("schedule lacks partitions for the requested depth");
    Rat k = 1;
    for (std::size_t m = 0; m < depth; ++m) {
        for (const auto& s : sched.pieces(m + 1)) {
            Rat whole = measure_of(lambda, s);
            Rat nested = measure_of(lambda, nested_union(sched, m, s));
            Rat rest = whole - nested;
            if (rest <= 0) throw std::logic_error("P4 violation: piece has no fresh mass");
            k = std::max(k, Rat(whole / rest));
        }
    }
    return k;
}

namespace detail {

// One multiplier level as a region map; applied exactly per backend.
inline MeasureRep apply_multiplier(const MeasureRep& mu, const SqueezeSchedule& sched,
                                   std::size_t m, const Rat& eps, const MeasureRep& lambda) {
    const OpenSetHandle& w_prev = sched.w(m);
    const OpenSetHandle& w_cur = sched.w(m + 1);
    // per-piece ratio values on S \ J_m(S)
    std::vector<Rat> ratios;
    for (const auto& s : sched.pieces(m + 1)) {
        Rat whole = measure_of(lambda, s);
        OpenSetHandle j = nested_union(sched, m, s);
        Rat nested = measure_of(lambda, j);
        Rat rest = whole - nested;
        if (rest <= 0) throw std::logic_error("P4 violation during multiplier build");
        ratios.push_back((whole - eps * nested) / rest);
    }
    if (std::holds_alternative<PointWeights>(mu)) {
        PointWeights pw = std::get<PointWeights>(mu);
        const auto& pieces = sched.pieces(m + 1);
        for (std::size_t p = 0; p < pw.weights.size(); ++p) {
            Mask bit = Mask(1) << p;
            if (w_prev.points().mask & bit) {
                pw.weights[p] *= eps;
            } else if (w_cur.points().mask & bit) {
                for (std::size_t i = 0; i < pieces.size(); ++i)
                    if (pieces[i].points().mask & bit) {
                        pw.weights[p] *= ratios[i];
                        break;
                    }
            }
        }
        return pw;
    }
    // realline: build the multiplier as a piecewise density and take the
    // product; all region boundaries are component endpoints
    std::vector<Rat> marks;
    auto add_marks = [&](const IntervalSet& s) {
        for (const auto& c : s.components()) {
            marks.push_back(c.lo);
            marks.push_back(c.hi);
        }
    };
    add_marks(w_prev.intervals());
    add_marks(w_cur.intervals());
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    if (marks.size() < 2) throw std::logic_error("degenerate multiplier region");
    std::vector<Rat> cell_values;
    const auto& pieces = sched.pieces(m + 1);
    for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
        Rat mid = (marks[i] + marks[i + 1]) / 2;
        Rat value = 1;
        if (w_prev.intervals().contains_point(mid)) {
            value = eps;
        } else if (w_cur.intervals().contains_point(mid)) {
            bool assigned = false;
            for (std::size_t p = 0; p < pieces.size(); ++p)
                if (pieces[p].intervals().contains_point(mid)) {
                    value = ratios[p];
                    assigned = true;
                    break;
                }
            if (!assigned) throw std::logic_error("cell inside W_{m+1} missed every piece");
        }
        cell_values.push_back(value);
    }
    PiecewiseDensity multiplier(marks, cell_values, Rat(1));
    return std::get<PiecewiseDensity>(mu).multiply(multiplier);
}

inline bool measures_agree_outside(const MeasureRep& mu, const MeasureRep& lambda,
                                   const OpenSetHandle& w) {
    if (std::holds_alternative<PointWeights>(mu)) {
        const auto& a = std::get<PointWeights>(mu);
        const auto& b = std::get<PointWeights>(lambda);
        for (std::size_t p = 0; p < a.weights.size(); ++p)
            if (!(w.points().mask & (Mask(1) << p)) && a.weights[p] != b.weights[p]) return false;
        return true;
    }
    const auto& a = std::get<PiecewiseDensity>(mu);
    const auto& b = std::get<PiecewiseDensity>(lambda);
    std::vector<Rat> marks = a.breaks();
    marks.insert(marks.end(), b.breaks().begin(), b.breaks().end());
    for (const auto& c : w.intervals().components()) {
        marks.push_back(c.lo);
        marks.push_back(c.hi);
    }
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    if (a.density_at(marks.front() - 1) != b.density_at(marks.front() - 1)) return false;
    if (a.density_at(marks.back() + 1) != b.density_at(marks.back() + 1)) return false;
    for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
        Rat mid = (marks[i] + marks[i + 1]) / 2;
        if (w.intervals().contains_point(mid)) continue;
        if (a.density_at(mid) != b.density_at(mid)) return false;
    }
    return true;
}

}  // namespace detail

// Builds mu_{M,eps} and verifies the mass identities exactly along the way.
inline SqueezeMeasure build_measure(const MeasureRep& lambda, const SqueezeSchedule& sched,
                                    const Rat& eps, unsigned depth) {
    if (eps <= 0 || eps >= 1) throw std::domain_error("eps must lie in (0,1)");
    SqueezeMeasure out;
    out.base = lambda;
    out.eps = eps;
    out.depth = depth;
    out.k_constant = depth == 0 ? Rat(1) : K_constant(lambda, sched, depth);
    Rat c = doubling_evidence(lambda).sound_value();
    out.admissibility_threshold = 1 / (rat_pow(c, 4) * rat_pow(out.k_constant, 5));
    if (eps >= out.admissibility_threshold)
        throw std::domain_error("eps is not admissible; threshold C^-4 K^-5 = " +
                                rat_to_string(out.admissibility_threshold));

    MeasureRep mu = lambda;
    for (std::size_t m = 0; m < depth; ++m) {
        mu = detail::apply_multiplier(mu, sched, m, eps, lambda);
        // exact mass identities (preserved pieces, untouched exterior)
        for (const auto& s : sched.pieces(m + 1))
            if (measure_of(mu, s) != measure_of(lambda, s))
                throw std::logic_error("piece mass not preserved at level " + std::to_string(m + 1));
        if (!detail::measures_agree_outside(mu, lambda, sched.w(m + 1)))
            throw std::logic_error("measure changed outside W_{m+1}");
    }
    // mu_{M,eps}(U) = eps^M lambda(U)
    if (measure_of(mu, sched.w(0)) != rat_pow(eps, depth) * measure_of(lambda, sched.w(0)))
        throw std::logic_error("U mass did not scale by eps^M");
    out.measure = std::move(mu);
    return out;
}

// --- certification reports -----------------------------------------------------

struct SqueezeCertifyReport {
    unsigned depth = 0;  // M
    Rat eps;
    bool doubling_certified = false;
    bool doubling_exact = false;  // exact constant vs sound bound
    std::string doubling_method;
    Rat doubling_threshold;  // eps^{-6}
    bool ratio_ok = false;
    Rat ratio_bound;  // eps^M lambda(U) / lambda(V \ W_M)
    double t_eps = 0;
    double t_limit = 0;  // M/6
    unsigned directed_uv = 0;
    bool distance_bound_ok = false;  // d->(U,V) <= 4(M+2)
};

// The minimal M with V inside W_{M+2}; requires the schedule to reach V.
inline unsigned minimal_depth(const SqueezeSchedule& sched, const OpenSetHandle& v) {
    for (std::size_t j = 0; j < sched.levels.size(); ++j)
        if (sched.w(j).contains(v)) return j <= 2 ? 0 : static_cast<unsigned>(j - 2);
    throw std::domain_error("schedule does not reach the target set");
}

inline Rat fresh_target_mass(const MeasureRep& lambda, const SqueezeSchedule& sched,
                             const OpenSetHandle& v, unsigned depth) {
    // lambda(V \ W_M), exact
    if (v.tag() == SpaceTag::finite) {
        Mask rest = v.points().mask & ~sched.w(depth).points().mask;
        return std::get<PointWeights>(lambda).measure(rest);
    }
    const auto& pd = std::get<PiecewiseDensity>(lambda);
    return pd.measure(v.intervals()) - pd.measure(v.intervals().intersect(sched.w(depth).intervals()));
}

inline SqueezeCertifyReport certify(const SqueezeMeasure& msr, const SqueezeSchedule& sched,
                                    const OpenSetHandle& v) {
    unsigned depth = msr.depth;
    if (depth + 2 >= sched.levels.size())
        throw std::domain_error("schedule too shallow for the requested depth");
    if (sched.w(depth + 1).contains(v))
        throw std::domain_error("schedule depth error: V already inside W_{M+1}");
    if (!sched.w(depth + 2).contains(v))
        throw std::domain_error("schedule depth error: V not inside W_{M+2}");

    SqueezeCertifyReport rep;
    rep.depth = depth;
    rep.eps = msr.eps;
    rep.doubling_threshold = rat_pow(1 / msr.eps, 6);

    if (std::holds_alternative<PointWeights>(msr.measure)) {
        const auto& pw = std::get<PointWeights>(msr.measure);
        Rat exact = pw.doubling_constant();
        rep.doubling_certified = exact <= rep.doubling_threshold;
        rep.doubling_exact = true;
        rep.doubling_method = "exact finite-space constant " + rat_to_string(exact);
    } else {
        auto cert = certify_doubling_upper(std::get<PiecewiseDensity>(msr.measure),
                                           rep.doubling_threshold);
        rep.doubling_certified = cert.certified;
        rep.doubling_exact = false;
        rep.doubling_method = cert.method;
    }

    const OpenSetHandle& u = sched.w(0);
    Rat mu_u = measure_of(msr.measure, u);
    Rat mu_v = measure_of(msr.measure, v);
    Rat lambda_u = measure_of(msr.base, u);
    Rat fresh = fresh_target_mass(msr.base, sched, v, depth);
    if (fresh <= 0) throw std::logic_error("target has no fresh mass outside W_M");
    rep.ratio_bound = rat_pow(msr.eps, depth) * lambda_u / fresh;
    // mu(U) = eps^M lambda(U) and mu(V) >= lambda(V \ W_M), both exact
    rep.ratio_ok = (mu_u == rat_pow(msr.eps, depth) * lambda_u) && (mu_v >= fresh) &&
                   (mu_u * fresh <= mu_v * rat_pow(msr.eps, depth) * lambda_u);

    double log_inv_eps = -std::log(rat_to_double(msr.eps));
    rep.t_eps = (depth - std::log(rat_to_double(Rat(lambda_u / fresh))) / log_inv_eps) / 6.0;
    rep.t_limit = depth / 6.0;

    DistanceResult d = directed_distance(u, v);
    rep.directed_uv = d.value.value_or(0);
    rep.distance_bound_ok = d.value.has_value() && *d.value <= 4 * (depth + 2);
    return rep;
}

// Certified rational lower bound on m->(U,V) from one admissible eps:
// m-> >= (M - log_{1/eps}(lambda(U)/lambda(V \ W_M))) / 6, clamped at zero.
inline Rat certified_t_lower(const MeasureRep& lambda, const SqueezeSchedule& sched,
                             const OpenSetHandle& v, unsigned depth, const Rat& eps) {
    Rat lambda_u = measure_of(lambda, sched.w(0));
    Rat fresh = fresh_target_mass(lambda, sched, v, depth);
    if (fresh <= 0) throw std::logic_error("target has no fresh mass outside W_M");
    Rat ratio = lambda_u / fresh;
    if (ratio <= 1) return Rat(depth, 6);
    Rat log_up = log_upper_bound(1 / eps, ratio);
    Rat t = (Rat(depth) - log_up) / 6;
    return t > 0 ? t : Rat(0);
}

// --- end-to-end pipeline --------------------------------------------------------

struct SqueezePipelineReport {
    SqueezeSchedule schedule;
    ScheduleCertificate schedule_cert;
    unsigned depth = 0;  // M
    Rat k_constant = 1;
    Rat threshold;  // C^{-4} K^{-5}
    std::vector<SqueezeCertifyReport> eps_reports;
    Rat best_t_lower;  // certified rational lower bound on m->(U,V)
};

// Builds the schedule for (U,V), certifies P1-P4, then sweeps eps over
// halvings of the admissibility threshold, certifying each squeeze measure.
inline SqueezePipelineReport run_squeeze_pipeline(const OpenSetHandle& u, const OpenSetHandle& v,
                                                  const MeasureRep& lambda,
                                                  unsigned halvings = 3) {
    SqueezePipelineReport rep;
    rep.schedule = build_schedule(u, v);
    rep.schedule_cert = certify_schedule(rep.schedule);
    if (!rep.schedule_cert.valid())
        throw std::logic_error("schedule certificate failed: " + rep.schedule_cert.witness);
    rep.depth = minimal_depth(rep.schedule, v);
    rep.k_constant = rep.depth == 0 ? Rat(1) : K_constant(lambda, rep.schedule, rep.depth);
    Rat c = doubling_evidence(lambda).sound_value();
    rep.threshold = 1 / (rat_pow(c, 4) * rat_pow(rep.k_constant, 5));
    Rat eps = rep.threshold;
    for (unsigned j = 1; j <= halvings; ++j) {
        eps /= 2;
        SqueezeMeasure msr = build_measure(lambda, rep.schedule, eps, rep.depth);
        rep.eps_reports.push_back(certify(msr, rep.schedule, v));
        Rat t = certified_t_lower(lambda, rep.schedule, v, rep.depth, eps);
        if (t > rep.best_t_lower) rep.best_t_lower = t;
    }
    return rep;
}

// --- heuristic bound on the distance to simplicity ----------------------------

// d(U, U_N) where U_N keeps the N largest components; an upper bound for the
// distance from U to the nearest simple set. Already-simple inputs give zero.
inline unsigned simple_approx_bound(const IntervalSet& u, unsigned n_keep) {
    if (u.empty()) throw std::domain_error("needs a non-empty set");
    if (n_keep == 0) throw std::domain_error("must keep at least one component");
    if (u.component_count() <= n_keep) return 0;
    std::vector<Interval> comps(u.components());
    std::stable_sort(comps.begin(), comps.end(), [](const Interval& a, const Interval& b) {
        return a.length() > b.length();
    });
    comps.resize(n_keep);
    IntervalSet kept(std::move(comps));
    DistanceResult d = doubling_distance(OpenSetHandle(kept), OpenSetHandle(u));
    if (!d.value) throw std::logic_error("distance to the trimmed set must be finite");
    return *d.value;
}

}  // namespace dbl
