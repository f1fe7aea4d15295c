#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "alpi/bellman.hpp"
#include "alpi/chain.hpp"
#include "alpi/maze.hpp"

using namespace alpi;

TEST_CASE("chain layout") {
    const double gamma = 0.9;
    TabularMdp chain = build_chain(3, gamma);
    CHECK(chain.num_states() == 5);
    CHECK(chain.num_actions() == 2);
    int nonzero_rewards = 0;
    for (int s = 0; s < 5; ++s)
        for (int a = 0; a < 2; ++a) nonzero_rewards += chain.reward(s, a) != 0.0;
    CHECK(nonzero_rewards == 1);
    CHECK(chain.reward(3, kChainUp) == Catch::Approx(1.0 - gamma));
    CHECK_THROWS_AS(build_chain(0, gamma), std::invalid_argument);
}

TEST_CASE("chain optimal value closed forms") {
    const int n = 11;
    const double gamma = 0.93;
    OptimalSolution sol = solve_optimal(build_chain(n, gamma), 1e-11);
    CHECK(sol.value[n] == Catch::Approx(1.0).margin(1e-9));
    CHECK(sol.value[0] == Catch::Approx(std::pow(gamma, n)).margin(1e-9));
    CHECK(sol.value[n + 1] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("maze construction invariants") {
    MazeConfig cfg;
    cfg.seed = 12345;
    MazeModel maze = build_maze(cfg);
    const int S = maze.mdp.num_states();

    SECTION("shape and specials") {
        CHECK(S <= 900);
        CHECK(S > 600); // 30x30 with border and two pierced walls
        CHECK(maze.goal_states.size() == 4);
        CHECK(maze.trap_states.size() == 1);
        std::set<int> specials(maze.goal_states.begin(), maze.goal_states.end());
        specials.insert(maze.trap_states.begin(), maze.trap_states.end());
        specials.insert(maze.spawn_state);
        CHECK(specials.size() == 6);
        CHECK_NOTHROW(maze.mdp.validate());
    }

    SECTION("moving into a wall stays in place") {
        // The spawn sits in the top-left corner; up and left hit the border.
        auto [r, c] = maze.state_to_cell[maze.spawn_state];
        CHECK(r == 1);
        CHECK(c == 1);
        for (int a : {kMazeUp, kMazeLeft}) {
            auto row = maze.mdp.transitions(maze.spawn_state, a);
            REQUIRE(row.size() == 1);
            CHECK(row[0].next_state == maze.spawn_state);
            CHECK(row[0].probability == 1.0);
        }
    }

    SECTION("goal rows respawn uniformly over plain free cells") {
        for (int g : maze.goal_states) {
            for (int a = 0; a < 4; ++a) {
                auto row = maze.mdp.transitions(g, a);
                CHECK(static_cast<int>(row.size()) == S - 5);
                for (const Transition& t : row)
                    CHECK(t.probability == Catch::Approx(1.0 / (S - 5)).margin(1e-15));
            }
            CHECK(maze.mdp.reward(g, 0) == 1.0);
        }
    }

    SECTION("trap is absorbing and pays -1, so its optimal value is -1/(1-gamma)") {
        int t = maze.trap_states[0];
        for (int a = 0; a < 4; ++a) {
            auto row = maze.mdp.transitions(t, a);
            REQUIRE(row.size() == 1);
            CHECK(row[0].next_state == t);
            CHECK(maze.mdp.reward(t, a) == -1.0);
        }
        ValueFunction v_star = solve_optimal(maze.mdp, 1e-10).value;
        CHECK(v_star[t] == Catch::Approx(-50.0).margin(1e-6));
    }

    SECTION("same seed rebuilds the identical model") {
        MazeModel again = build_maze(cfg);
        CHECK(again.mdp.fingerprint() == maze.mdp.fingerprint());
        CHECK(again.goal_states == maze.goal_states);
        MazeConfig other = cfg;
        other.seed = 999;
        CHECK(build_maze(other).mdp.fingerprint() != maze.mdp.fingerprint());
    }

    SECTION("text rendering matches the model") {
        std::string text = maze.render_text();
        CHECK(std::count(text.begin(), text.end(), 'G') == 4);
        CHECK(std::count(text.begin(), text.end(), 'T') == 1);
        CHECK(std::count(text.begin(), text.end(), 'S') == 1);
        CHECK(std::count(text.begin(), text.end(), '.') == S - 6);
        CHECK(std::count(text.begin(), text.end(), '\n') == cfg.height);
    }
}

TEST_CASE("maze optimal value satisfies the fixed-point residual") {
    MazeConfig cfg;
    cfg.seed = 5;
    MazeModel maze = build_maze(cfg);
    ValueFunction v = solve_optimal(maze.mdp, 1e-10).value;
    CHECK(inf_norm_diff(apply_optimality_operator(maze.mdp, v), v) <= 1e-8);
}

TEST_CASE("maze rejects invalid configs") {
    MazeConfig tiny;
    tiny.width = 4;
    tiny.height = 4;
    CHECK_THROWS_AS(build_maze(tiny), std::invalid_argument);
    MazeConfig bad_gamma;
    bad_gamma.gamma = 1.0;
    CHECK_THROWS_AS(build_maze(bad_gamma), std::invalid_argument);
}

TEST_CASE("small maze variants stay valid across seeds") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        MazeConfig cfg;
        cfg.width = 12;
        cfg.height = 12;
        cfg.wall_col = 6;
        cfg.wall_row = 6;
        cfg.seed = seed;
        MazeModel maze = build_maze(cfg);
        CHECK_NOTHROW(maze.mdp.validate());
        CHECK(maze.goal_states.size() == 4);
    }
}
