#pragma once

// Cylinder-set algebra on the ultrametric sequence space Sigma = Lambda^N
// with delta(i,j) = 2^{-n} where n is the length of the common prefix.
// Open sets are antichains of finite words; the empty word denotes Sigma.
// Every ball O(x,r) with r in (2^{-(n+1)}, 2^{-n}] equals the length-(n+1)
// cylinder of x, and doubling a ball strips one letter.

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dbl/rational.hpp"

namespace dbl {

class CylinderSet {
public:
    // Words are digit strings over '0'..'0'+m. Canonical form: an antichain
    // with every complete sibling family {w0,...,wm} collapsed to w.
    CylinderSet(unsigned alphabet_size, std::vector<std::string> words)
        : alphabet_(alphabet_size), words_(std::move(words)) {
        if (alphabet_ < 2 || alphabet_ > 10)
            throw std::invalid_argument("alphabet size must be in [2,10]");
        for (const auto& w : words_)
            for (char c : w)
                if (c < '0' || c >= char('0' + alphabet_))
                    throw std::invalid_argument("word letter outside alphabet: " + w);
        canonicalize();
    }

    static CylinderSet whole(unsigned alphabet_size) {
        return CylinderSet(alphabet_size, {""});
    }
    static CylinderSet empty_set(unsigned alphabet_size) {
        return CylinderSet(alphabet_size, {});
    }

    unsigned alphabet_size() const { return alphabet_; }
    const std::vector<std::string>& words() const { return words_; }
    bool empty() const { return words_.empty(); }
    bool is_whole() const { return words_.size() == 1 && words_[0].empty(); }

    std::size_t max_depth() const {
        std::size_t d = 0;
        for (const auto& w : words_) d = std::max(d, w.size());
        return d;
    }

    bool operator==(const CylinderSet& other) const {
        return alphabet_ == other.alphabet_ && words_ == other.words_;
    }

    // On canonical antichains [v] subseteq U holds iff some word of U is a
    // prefix of v (a complete cover by strict descendants would imply a
    // collapsible sibling family).
    bool contains_word(const std::string& v) const {
        for (const auto& w : words_)
            if (v.size() >= w.size() && v.compare(0, w.size(), w) == 0) return true;
        return false;
    }

    bool contains(const CylinderSet& v) const {
        for (const auto& w : v.words_)
            if (!contains_word(w)) return false;
        return true;
    }

    CylinderSet unite(const CylinderSet& other) const {
        std::vector<std::string> ws = words_;
        ws.insert(ws.end(), other.words_.begin(), other.words_.end());
        return CylinderSet(alphabet_, std::move(ws));
    }

private:
    void canonicalize() {
        std::sort(words_.begin(), words_.end());
        words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
        bool changed = true;
        while (changed) {
            changed = false;
            // drop words dominated by a proper prefix
            std::vector<std::string> kept;
            for (const auto& w : words_) {
                bool dominated = false;
                for (const auto& p : words_)
                    if (p.size() < w.size() && w.compare(0, p.size(), p) == 0) {
                        dominated = true;
                        break;
                    }
                if (!dominated) kept.push_back(w);
            }
            if (kept.size() != words_.size()) changed = true;
            words_ = std::move(kept);
            // collapse complete sibling families
            std::set<std::string> pool(words_.begin(), words_.end());
            std::vector<std::string> collapsed;
            std::set<std::string> consumed;
            for (const auto& w : words_) {
                if (consumed.count(w)) continue;
                if (!w.empty()) {
                    std::string parent = w.substr(0, w.size() - 1);
                    bool full = true;
                    for (unsigned a = 0; a < alphabet_; ++a)
                        if (!pool.count(parent + char('0' + a))) {
                            full = false;
                            break;
                        }
                    if (full) {
                        for (unsigned a = 0; a < alphabet_; ++a)
                            consumed.insert(parent + char('0' + a));
                        collapsed.push_back(parent);
                        changed = true;
                        continue;
                    }
                }
                collapsed.push_back(w);
            }
            std::sort(collapsed.begin(), collapsed.end());
            collapsed.erase(std::unique(collapsed.begin(), collapsed.end()), collapsed.end());
            words_ = std::move(collapsed);
        }
    }

    unsigned alphabet_;
    std::vector<std::string> words_;
};

// Predecessor on Sigma: every maximal cylinder [w] in canonical U doubles to
// [parent(w)]; deeper balls inside U double to cylinders those parents cover.
inline CylinderSet predecessor(const CylinderSet& u) {
    std::vector<std::string> parents;
    parents.reserve(u.words().size());
    for (const auto& w : u.words()) {
        if (w.empty()) return CylinderSet::whole(u.alphabet_size());
        parents.push_back(w.substr(0, w.size() - 1));
    }
    return CylinderSet(u.alphabet_size(), std::move(parents));
}

inline CylinderSet iterate_predecessor(CylinderSet u, unsigned n) {
    for (unsigned i = 0; i < n; ++i) u = predecessor(u);
    return u;
}

// Closed form for the directed distance on Sigma; cross-checked against the
// generic engine in tests.
inline unsigned strip_depth_distance(const CylinderSet& u, const CylinderSet& v) {
    if (u.empty()) throw std::domain_error("strip_depth_distance needs non-empty source");
    CylinderSet w = u;
    unsigned limit = static_cast<unsigned>(u.max_depth()) + 1;
    for (unsigned n = 0; n <= limit; ++n) {
        if (w.contains(v)) return n;
        w = predecessor(w);
    }
    throw std::logic_error("strip_depth_distance failed to stabilize");
}

// sigma^{-1}([w]) = union over letters a of [aw].
inline CylinderSet shift_preimage(const CylinderSet& u) {
    std::vector<std::string> ws;
    for (const auto& w : u.words())
        for (unsigned a = 0; a < u.alphabet_size(); ++a)
            ws.push_back(char('0' + a) + w);
    return CylinderSet(u.alphabet_size(), std::move(ws));
}

// --- permutation homeomorphisms --------------------------------------------
//
// f(i_1 i_2 ...) = (i_{r(1)}, i_{r(2)}, ...) for a bijection r of the
// positive integers given by a finite table extended by the identity. The
// table must itself be a permutation of {1..T}, otherwise the identity tail
// breaks bijectivity.

class PermutationSpec {
public:
    explicit PermutationSpec(std::vector<unsigned> table) : table_(std::move(table)) {
        std::vector<bool> seen(table_.size(), false);
        for (unsigned v : table_) {
            if (v < 1 || v > table_.size() || seen[v - 1])
                throw std::invalid_argument("permutation table must permute {1..T}");
            seen[v - 1] = true;
        }
    }

    static PermutationSpec identity() { return PermutationSpec(std::vector<unsigned>{}); }

    std::size_t table_size() const { return table_.size(); }

    // r(k), 1-based, identity beyond the table.
    unsigned apply(unsigned k) const {
        if (k == 0) throw std::invalid_argument("positions are 1-based");
        return k <= table_.size() ? table_[k - 1] : k;
    }

    PermutationSpec inverse() const {
        std::vector<unsigned> inv(table_.size());
        for (unsigned k = 1; k <= table_.size(); ++k) inv[table_[k - 1] - 1] = k;
        return PermutationSpec(std::move(inv));
    }

    // max over the table of n - r(n), clamped at zero.
    unsigned max_displacement() const {
        long best = 0;
        for (unsigned n = 1; n <= table_.size(); ++n)
            best = std::max(best, static_cast<long>(n) - static_cast<long>(table_[n - 1]));
        return static_cast<unsigned>(best);
    }

private:
    std::vector<unsigned> table_;
};

// f^{-1}([w_1..w_n]) = all sequences with letter w_k at position r(k),
// materialized as cylinders of length max_k r(k) with free positions
// enumerated. Guarded against blowup of the free-position count.
inline CylinderSet permutation_preimage(const PermutationSpec& r, const CylinderSet& u,
                                        std::size_t max_free_positions = 20) {
    std::vector<std::string> out;
    for (const auto& w : u.words()) {
        if (w.empty()) {
            out.push_back("");
            continue;
        }
        unsigned depth = 0;
        for (unsigned k = 1; k <= w.size(); ++k) depth = std::max(depth, r.apply(k));
        std::string pattern(depth, '*');
        for (unsigned k = 1; k <= w.size(); ++k) pattern[r.apply(k) - 1] = w[k - 1];
        std::size_t free_count = 0;
        for (char c : pattern)
            if (c == '*') ++free_count;
        if (free_count > max_free_positions)
            throw std::length_error("permutation preimage exceeds the enumeration guard");
        std::string word(pattern);
        // enumerate all assignments to free positions
        std::vector<std::size_t> free_idx;
        for (std::size_t i = 0; i < pattern.size(); ++i)
            if (pattern[i] == '*') free_idx.push_back(i);
        std::vector<unsigned> digits(free_idx.size(), 0);
        while (true) {
            for (std::size_t i = 0; i < free_idx.size(); ++i)
                word[free_idx[i]] = char('0' + digits[i]);
            out.push_back(word);
            std::size_t pos = 0;
            while (pos < digits.size() && ++digits[pos] == u.alphabet_size()) {
                digits[pos] = 0;
                ++pos;
            }
            if (pos == digits.size()) break;
        }
    }
    return CylinderSet(u.alphabet_size(), std::move(out));
}

struct F3BallWitness {
    std::string ball_word;  // O(y,rho) = [ball_word], O(y,2rho) = [parent]
    unsigned distance = 0;
};

struct PermutationF3Report {
    bool pass = false;
    unsigned max_displacement = 0;   // D = max(0, n - r(n)) over the table
    unsigned derived_bound = 0;      // D + 1 bounds the concentric distance
    unsigned claimed_bound = 0;      // K the check was run against
    unsigned observed_max = 0;       // worst concentric distance seen
    std::vector<F3BallWitness> failures;
};

// Concentric-ball F3 check for a permutation map over cylinder balls up to
// the given depth. For each depth-n ball [w] the pair is
// (f^{-1}[w], f^{-1}[w_1..w_{n-1}]); the distance is independent of the
// letters, so one word per depth suffices, but we scan a few to be safe.
inline PermutationF3Report permutation_f3_check(const PermutationSpec& r, unsigned alphabet,
                                                unsigned depth, unsigned claimed_bound = 0) {
    PermutationF3Report rep;
    rep.max_displacement = r.max_displacement();
    rep.derived_bound = rep.max_displacement + 1;
    rep.claimed_bound = claimed_bound == 0 ? rep.derived_bound : claimed_bound;
    for (unsigned n = 1; n <= depth; ++n) {
        std::vector<std::string> samples{std::string(n, '0'),
                                         std::string(n, char('0' + alphabet - 1))};
        for (const auto& w : samples) {
            CylinderSet ball(alphabet, {w});
            CylinderSet doubled(alphabet, {w.substr(0, w.size() - 1)});
            CylinderSet pre_small = permutation_preimage(r, ball);
            CylinderSet pre_big = permutation_preimage(r, doubled);
            unsigned d = 0;
            CylinderSet it = pre_small;
            while (!it.contains(pre_big)) {
                it = predecessor(it);
                ++d;
            }
            rep.observed_max = std::max(rep.observed_max, d);
            if (d > rep.claimed_bound) rep.failures.push_back({w, d});
        }
    }
    rep.pass = rep.failures.empty();
    return rep;
}

// Inversion-count closed form for the concentric distance at ball depth n:
// 1 + #{k < n : r(k) > r(n)}. Used as an independent oracle in tests.
inline unsigned permutation_concentric_distance_formula(const PermutationSpec& r, unsigned n) {
    unsigned count = 0;
    for (unsigned k = 1; k < n; ++k)
        if (r.apply(k) > r.apply(n)) ++count;
    return 1 + count;
}

}  // namespace dbl
