#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "alpi/mdp.hpp"
#include "alpi/rng.hpp"

namespace alpi {

struct RandomMdpConfig {
    int num_states = 8;
    int num_actions = 2;
    double gamma = 0.9;
    std::uint64_t seed = 0;
    int max_successors = 4;   // per (state, action), clamped to num_states
    double reward_lo = 0.0;
    double reward_hi = 1.0;
};

/// Seeded random MDP with sparse stochastic rows. The same config always
/// yields the same model.
inline TabularMdp random_mdp(const RandomMdpConfig& cfg) {
    if (cfg.num_states <= 0 || cfg.num_actions <= 0)
        throw std::invalid_argument("random_mdp: sizes must be positive");
    if (!(cfg.reward_lo <= cfg.reward_hi))
        throw std::invalid_argument("random_mdp: empty reward range");
    CounterRng rng(cfg.seed);
    TabularMdp mdp(cfg.num_states, cfg.num_actions, cfg.gamma);
    const int max_succ = std::max(1, std::min(cfg.max_successors, cfg.num_states));
    for (int s = 0; s < cfg.num_states; ++s) {
        for (int a = 0; a < cfg.num_actions; ++a) {
            mdp.set_reward(s, a, rng.next_in(cfg.reward_lo, cfg.reward_hi));
            int k = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_succ)));
            std::vector<int> targets;
            while (static_cast<int>(targets.size()) < k) {
                int t = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.num_states)));
                if (std::find(targets.begin(), targets.end(), t) == targets.end())
                    targets.push_back(t);
            }
            std::sort(targets.begin(), targets.end());
            std::vector<double> weights(targets.size());
            double total = 0.0;
            for (double& w : weights) {
                w = 0.05 + rng.next_double();
                total += w;
            }
            std::vector<Transition> row;
            for (std::size_t i = 0; i < targets.size(); ++i)
                row.push_back({targets[i], weights[i] / total});
            mdp.set_transitions(s, a, row);
        }
    }
    mdp.validate();
    return mdp;
}

} // namespace alpi
