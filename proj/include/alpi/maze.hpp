#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alpi/mdp.hpp"
#include "alpi/rng.hpp"

namespace alpi {

/// Grid world divided into four rooms by one vertical and one horizontal
/// wall, each pierced by two single-cell doors at seeded positions. Goal
/// cells pay +1 and teleport uniformly to a random free non-goal non-trap
/// cell; the trap pays -1 and is absorbing; bumping into a wall or the
/// border stays in place.
struct MazeConfig {
    int width = 30;
    int height = 30;
    std::uint64_t seed = 0;
    int num_goals = 4;
    int num_traps = 1;
    double gamma = 0.98;
    int wall_col = 15;
    int wall_row = 15;
};

/// Action order of the maze MDP.
enum MazeAction { kMazeUp = 0, kMazeDown = 1, kMazeRight = 2, kMazeLeft = 3 };

struct MazeModel {
    MazeConfig config;
    TabularMdp mdp;
    std::vector<int> cell_to_state;               // row*width+col -> state, -1 for walls
    std::vector<std::pair<int, int>> state_to_cell; // state -> (row, col)
    std::vector<int> goal_states;
    std::vector<int> trap_states;
    int spawn_state = 0;

    /// Plain-text layout: '#' wall, '.' free, 'G' goal, 'T' trap, 'S' spawn.
    std::string render_text() const {
        std::string out;
        for (int r = 0; r < config.height; ++r) {
            for (int c = 0; c < config.width; ++c) {
                int s = cell_to_state[r * config.width + c];
                char ch = '#';
                if (s >= 0) {
                    ch = '.';
                    if (std::find(goal_states.begin(), goal_states.end(), s) != goal_states.end())
                        ch = 'G';
                    else if (std::find(trap_states.begin(), trap_states.end(), s) !=
                             trap_states.end())
                        ch = 'T';
                    else if (s == spawn_state)
                        ch = 'S';
                }
                out += ch;
            }
            out += '\n';
        }
        return out;
    }
};

namespace detail {

inline MazeModel try_build_maze(const MazeConfig& cfg, CounterRng rng) {
    const int w = cfg.width;
    const int h = cfg.height;
    std::vector<char> wall(static_cast<std::size_t>(w) * h, 0);
    auto at = [&](int r, int c) -> char& { return wall[r * w + c]; };
    for (int r = 0; r < h; ++r) at(r, 0) = at(r, w - 1) = 1;
    for (int c = 0; c < w; ++c) at(0, c) = at(h - 1, c) = 1;
    for (int r = 1; r < h - 1; ++r) at(r, cfg.wall_col) = 1;
    for (int c = 1; c < w - 1; ++c) at(cfg.wall_row, c) = 1;

    auto pick = [&](int lo, int hi) { // inclusive range
        return lo + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(hi - lo + 1)));
    };
    at(pick(1, cfg.wall_row - 1), cfg.wall_col) = 0;
    at(pick(cfg.wall_row + 1, h - 2), cfg.wall_col) = 0;
    at(cfg.wall_row, pick(1, cfg.wall_col - 1)) = 0;
    at(cfg.wall_row, pick(cfg.wall_col + 1, w - 2)) = 0;

    MazeModel model{cfg, TabularMdp(1, 1, 0.5), {}, {}, {}, {}, 0};
    model.cell_to_state.assign(wall.size(), -1);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (!wall[r * w + c]) {
                model.cell_to_state[r * w + c] = static_cast<int>(model.state_to_cell.size());
                model.state_to_cell.emplace_back(r, c);
            }
    const int num_states = static_cast<int>(model.state_to_cell.size());

    // Free cells must form one connected region.
    {
        std::vector<char> seen(num_states, 0);
        std::deque<int> frontier{0};
        seen[0] = 1;
        int reached = 1;
        const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, 1, -1};
        while (!frontier.empty()) {
            int s = frontier.front();
            frontier.pop_front();
            auto [r, c] = model.state_to_cell[s];
            for (int d = 0; d < 4; ++d) {
                int t = model.cell_to_state[(r + dr[d]) * w + (c + dc[d])];
                if (t >= 0 && !seen[t]) {
                    seen[t] = 1;
                    ++reached;
                    frontier.push_back(t);
                }
            }
        }
        if (reached != num_states) throw std::runtime_error("maze: free cells disconnected");
    }

    int spawn = model.cell_to_state[1 * w + 1];
    if (spawn < 0) throw std::runtime_error("maze: spawn cell blocked");
    model.spawn_state = spawn;

    // Goals and trap: distinct free cells, none of them the spawn.
    std::vector<char> special(num_states, 0);
    special[spawn] = 1;
    auto place = [&]() {
        for (int tries = 0; tries < 1000; ++tries) {
            int s = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(num_states)));
            if (!special[s]) {
                special[s] = 1;
                return s;
            }
        }
        throw std::runtime_error("maze: could not place special cells");
    };
    for (int g = 0; g < cfg.num_goals; ++g) model.goal_states.push_back(place());
    for (int t = 0; t < cfg.num_traps; ++t) model.trap_states.push_back(place());
    std::sort(model.goal_states.begin(), model.goal_states.end());
    std::sort(model.trap_states.begin(), model.trap_states.end());

    // Respawn support: every free cell that is neither goal nor trap.
    std::vector<int> respawn;
    for (int s = 0; s < num_states; ++s) {
        bool is_goal = std::binary_search(model.goal_states.begin(), model.goal_states.end(), s);
        bool is_trap = std::binary_search(model.trap_states.begin(), model.trap_states.end(), s);
        if (!is_goal && !is_trap) respawn.push_back(s);
    }
    if (respawn.empty()) throw std::runtime_error("maze: no respawn cells left");
    const double respawn_p = 1.0 / static_cast<double>(respawn.size());
    std::vector<Transition> respawn_row;
    respawn_row.reserve(respawn.size());
    for (int s : respawn) respawn_row.push_back({s, respawn_p});

    TabularMdp mdp(num_states, 4, cfg.gamma);
    const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, 1, -1}; // up, down, right, left
    for (int s = 0; s < num_states; ++s) {
        bool is_goal = std::binary_search(model.goal_states.begin(), model.goal_states.end(), s);
        bool is_trap = std::binary_search(model.trap_states.begin(), model.trap_states.end(), s);
        auto [r, c] = model.state_to_cell[s];
        for (int a = 0; a < 4; ++a) {
            if (is_goal) {
                mdp.set_reward(s, a, 1.0);
                mdp.set_transitions(s, a, respawn_row);
            } else if (is_trap) {
                mdp.set_reward(s, a, -1.0);
                mdp.set_transitions(s, a, {{s, 1.0}});
            } else {
                int target = model.cell_to_state[(r + dr[a]) * w + (c + dc[a])];
                mdp.set_transitions(s, a, {{target >= 0 ? target : s, 1.0}});
            }
        }
    }
    mdp.validate();
    model.mdp = std::move(mdp);
    return model;
}

} // namespace detail

/// Deterministic in the seed: the same config always builds the same model.
/// A placement that violates the layout invariants retries on the next
/// substream, up to 100 attempts.
inline MazeModel build_maze(const MazeConfig& cfg) {
    if (cfg.width < 8 || cfg.height < 8)
        throw std::invalid_argument("build_maze: grid too small");
    if (cfg.wall_col < 2 || cfg.wall_col > cfg.width - 3 || cfg.wall_row < 2 ||
        cfg.wall_row > cfg.height - 3)
        throw std::invalid_argument("build_maze: dividing walls too close to the border");
    if (cfg.num_goals < 0 || cfg.num_traps < 0)
        throw std::invalid_argument("build_maze: negative special-cell count");
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
        throw std::invalid_argument("build_maze: gamma must lie strictly inside (0,1)");
    CounterRng base(cfg.seed);
    std::string last_error;
    for (int attempt = 0; attempt < 100; ++attempt) {
        try {
            return detail::try_build_maze(cfg, base.substream(attempt));
        } catch (const std::runtime_error& e) {
            last_error = e.what();
        }
    }
    throw std::runtime_error("build_maze: no valid layout after 100 attempts: " + last_error);
}

} // namespace alpi
