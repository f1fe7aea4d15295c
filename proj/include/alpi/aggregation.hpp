#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "alpi/maze.hpp"
#include "alpi/mdp.hpp"

namespace alpi {

/// Many-to-one grouping of states. group_of doubles as the lift map: the
/// aggregated value of group g is read back at every member state.
struct AggregationMap {
    std::vector<int> group_of;
    int num_groups = 0;

    void validate() const {
        if (num_groups <= 0) throw std::invalid_argument("aggregation map: no groups");
        std::vector<int> size(num_groups, 0);
        for (int g : group_of) {
            if (g < 0 || g >= num_groups)
                throw std::invalid_argument("aggregation map: group index out of range");
            ++size[g];
        }
        for (int s : size)
            if (s == 0) throw std::invalid_argument("aggregation map: empty group");
    }
};

/// Groups the maze's free cells into k x k blocks (walls excluded); blocks
/// may mix goal and plain cells. k = 1 is the identity partition.
inline AggregationMap grid_partition(const MazeModel& maze, int k) {
    if (k < 1) throw std::invalid_argument("grid_partition: k must be >= 1");
    const int blocks_per_row = (maze.config.width + k - 1) / k;
    std::vector<int> block_to_group(
        static_cast<std::size_t>(blocks_per_row) * ((maze.config.height + k - 1) / k), -1);
    AggregationMap map;
    map.group_of.resize(maze.state_to_cell.size());
    for (std::size_t s = 0; s < maze.state_to_cell.size(); ++s) {
        auto [r, c] = maze.state_to_cell[s];
        int block = (r / k) * blocks_per_row + (c / k);
        if (block_to_group[block] < 0) block_to_group[block] = map.num_groups++;
        map.group_of[s] = block_to_group[block];
    }
    map.validate();
    return map;
}

/// Aggregated model: transition mass between groups and rewards are the
/// uniform means over group members.
inline TabularMdp aggregate_mdp(const TabularMdp& mdp, const AggregationMap& map) {
    if (static_cast<int>(map.group_of.size()) != mdp.num_states())
        throw std::invalid_argument("aggregate_mdp: map does not match the MDP");
    map.validate();
    const int groups = map.num_groups;
    std::vector<int> group_size(groups, 0);
    for (int g : map.group_of) ++group_size[g];

    TabularMdp out(groups, mdp.num_actions(), mdp.discount());
    std::vector<double> mass(groups);
    for (int g = 0; g < groups; ++g) {
        for (int a = 0; a < mdp.num_actions(); ++a) {
            std::fill(mass.begin(), mass.end(), 0.0);
            double reward = 0.0;
            for (int s = 0; s < mdp.num_states(); ++s) {
                if (map.group_of[s] != g) continue;
                reward += mdp.reward(s, a);
                for (const Transition& t : mdp.transitions(s, a))
                    mass[map.group_of[t.next_state]] += t.probability;
            }
            out.set_reward(g, a, reward / group_size[g]);
            std::vector<Transition> row;
            for (int g2 = 0; g2 < groups; ++g2)
                if (mass[g2] > 0.0) row.push_back({g2, mass[g2] / group_size[g]});
            out.set_transitions(g, a, row);
        }
    }
    out.validate();
    return out;
}

/// Reads an aggregated value back onto the original states.
inline ValueFunction lift_value(const ValueFunction& v_agg, const AggregationMap& map) {
    if (static_cast<int>(v_agg.size()) != map.num_groups)
        throw std::invalid_argument("lift_value: value length does not match group count");
    ValueFunction v(map.group_of.size());
    for (std::size_t s = 0; s < map.group_of.size(); ++s) v[s] = v_agg[map.group_of[s]];
    return v;
}

/// Largest rank displacement between the state orderings induced by
/// |v_star - v_pi| and |v_tilde - v_pi| (descending distance, ties by state
/// index): the smallest m for which v_tilde is m-order-preserving here.
inline int order_preservation_m(const ValueFunction& v_star, const ValueFunction& v_tilde,
                                const ValueFunction& v_pi) {
    if (v_star.size() != v_tilde.size() || v_star.size() != v_pi.size())
        throw std::invalid_argument("order_preservation_m: length mismatch");
    const int n = static_cast<int>(v_star.size());
    auto positions = [&](const ValueFunction& ref) {
        std::vector<double> d(n);
        for (int s = 0; s < n; ++s) d[s] = std::abs(ref[s] - v_pi[s]);
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            if (d[a] != d[b]) return d[a] > d[b];
            return a < b;
        });
        std::vector<int> pos(n);
        for (int i = 0; i < n; ++i) pos[order[i]] = i;
        return pos;
    };
    std::vector<int> p = positions(v_star);
    std::vector<int> pt = positions(v_tilde);
    int m = 0;
    for (int s = 0; s < n; ++s) m = std::max(m, std::abs(p[s] - pt[s]));
    return m;
}

} // namespace alpi
