#pragma once

// The n-stage game Gamma_n(y0) on a finite space. Player I plays (x_i, r_i)
// with delta(y_i, x_i) < 2 r_i; player II replies with y_{i+1} inside
// O(x_i, r_i); player I wins when y_n lands in U. Player I has a winning
// strategy iff y0 lies in the n-th iterated predecessor of U.

#include <map>
#include <stdexcept>
#include <vector>

#include "dbl/finite_space.hpp"

namespace dbl {

struct GameConfig {
    FiniteSpacePtr space;
    Mask target = 0;        // U
    std::size_t start = 0;  // y0
    unsigned horizon = 0;   // n
};

class GameSolver {
public:
    explicit GameSolver(FiniteSpacePtr space, Mask target, unsigned horizon_guard = 16)
        : space_(std::move(space)), target_(target), guard_(horizon_guard) {
        precompute_moves();
    }

    bool player_one_wins(std::size_t y0, unsigned horizon) {
        if (horizon > guard_) throw std::length_error("game horizon exceeds the solver guard");
        return wins(y0, horizon);
    }

private:
    // For a given y, player I's distinguishable moves are the distinct reply
    // sets O(x,r) over legal (x,r). For fixed x the reply set is constant on
    // each breakpoint interval (c_j, c_{j+1}] of {distances from x} together
    // with the legality threshold delta(y,x)/2; the interval is playable iff
    // its supremum exceeds the threshold.
    void precompute_moves() {
        const auto& sp = *space_;
        moves_.resize(sp.size());
        for (std::size_t y = 0; y < sp.size(); ++y) {
            std::vector<Mask> sets;
            for (std::size_t x = 0; x < sp.size(); ++x) {
                Rat threshold = sp.distance(y, x) / 2;
                const auto& lv = sp.levels(x);
                for (std::size_t j = 0; j < lv.size(); ++j) {
                    Rat sup = j + 1 < lv.size() ? lv[j + 1] : lv[j] + 1;  // tail is unbounded
                    bool playable = j + 1 < lv.size() ? (sup > threshold) : true;
                    if (!playable) continue;
                    sets.push_back(sp.closed_ball(x, lv[j]));
                }
            }
            std::sort(sets.begin(), sets.end());
            sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
            // a reply set that is a superset of another is never better for I
            std::vector<Mask> minimal;
            for (Mask s : sets) {
                bool dominated = false;
                for (Mask t : sets)
                    if (t != s && (t & ~s) == 0) {
                        dominated = true;
                        break;
                    }
                if (!dominated) minimal.push_back(s);
            }
            moves_[y] = std::move(minimal);
        }
    }

    bool wins(std::size_t y, unsigned n) {
        if (n == 0) return (target_ & (Mask(1) << y)) != 0;
        auto key = std::make_pair(y, n);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        bool result = false;
        for (Mask replies : moves_[y]) {
            bool all_good = true;
            for (std::size_t y2 = 0; y2 < space_->size() && all_good; ++y2)
                if (replies & (Mask(1) << y2))
                    if (!wins(y2, n - 1)) all_good = false;
            if (all_good) {
                result = true;
                break;
            }
        }
        memo_[key] = result;
        return result;
    }

    FiniteSpacePtr space_;
    Mask target_;
    unsigned guard_;
    std::vector<std::vector<Mask>> moves_;
    std::map<std::pair<std::size_t, unsigned>, bool> memo_;
};

inline bool game_solve(const GameConfig& cfg, unsigned horizon_guard = 16) {
    GameSolver solver(cfg.space, cfg.target, horizon_guard);
    return solver.player_one_wins(cfg.start, cfg.horizon);
}

}  // namespace dbl
