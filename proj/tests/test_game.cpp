#include <catch2/catch_amalgamated.hpp>

#include "dbl/game.hpp"

using namespace dbl;

namespace {

FiniteSpacePtr line3() {
    return std::make_shared<FiniteSpace>(std::vector<std::vector<Rat>>{
        {Rat(0), Rat(1), Rat(2)}, {Rat(1), Rat(0), Rat(1)}, {Rat(2), Rat(1), Rat(0)}});
}

}  // namespace

TEST_CASE("horizon zero: player I wins iff the start is in U") {
    auto sp = line3();
    REQUIRE(game_solve({sp, 0b001, 0, 0}));
    REQUIRE_FALSE(game_solve({sp, 0b001, 1, 0}));
}

TEST_CASE("documented one-step games on the three-point line") {
    auto sp = line3();
    // U = {0}, y0 = 1: player I plays x=0, r=1 and confines II to {0}
    REQUIRE(game_solve({sp, 0b001, 1, 1}));
    // y0 = 2 is out of reach in one step, matching 2 not in U_* = {0,1}
    REQUIRE_FALSE(game_solve({sp, 0b001, 2, 1}));
}

TEST_CASE("game value equals iterated predecessor membership exhaustively") {
    // all triangle-valid spaces on <= 4 points over the menu {1, 2, 4}
    std::vector<Rat> menu{Rat(1), Rat(2), Rat(4)};
    for (std::size_t n = 2; n <= 4; ++n) {
        std::size_t pairs = n * (n - 1) / 2;
        std::size_t total = 1;
        for (std::size_t i = 0; i < pairs; ++i) total *= menu.size();
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<std::vector<Rat>> d(n, std::vector<Rat>(n, Rat(0)));
            std::size_t c = code;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    d[i][j] = d[j][i] = menu[c % menu.size()];
                    c /= menu.size();
                }
            FiniteSpacePtr sp;
            try {
                sp = std::make_shared<FiniteSpace>(std::move(d));
            } catch (const std::invalid_argument&) {
                continue;  // triangle-invalid assignment
            }
            for (Mask u = 1; u <= sp->whole(); ++u) {
                GameSolver solver(sp, u);
                for (std::size_t y0 = 0; y0 < n; ++y0)
                    for (unsigned horizon = 0; horizon <= 3; ++horizon) {
                        bool game = solver.player_one_wins(y0, horizon);
                        bool pred = (sp->iterate_predecessor(u, horizon) >> y0) & 1;
                        REQUIRE(game == pred);
                    }
            }
        }
    }
}

TEST_CASE("horizon guard trips") {
    auto sp = line3();
    REQUIRE_THROWS_AS(game_solve({sp, 0b001, 0, 99}, 16), std::length_error);
}
