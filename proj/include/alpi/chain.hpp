#pragma once

#include <stdexcept>

#include "alpi/mdp.hpp"

namespace alpi {

/// Chain benchmark: states 0..n walk forward under action 0 ("up"), state n
/// loops on itself, and action 1 ("down") drops every state into the
/// absorbing sink n+1. The only reward is (1 - gamma) for playing up at
/// state n, so the optimal value is gamma^(n-i) at state i and reward
/// information travels backwards one improvement step at a time.
inline constexpr int kChainUp = 0;
inline constexpr int kChainDown = 1;

inline TabularMdp build_chain(int n, double gamma) {
    if (n < 1) throw std::invalid_argument("build_chain: n must be at least 1");
    const int num_states = n + 2;
    const int sink = n + 1;
    TabularMdp mdp(num_states, 2, gamma);
    mdp.set_reward(n, kChainUp, 1.0 - gamma);
    for (int s = 0; s < num_states; ++s) {
        int up_target = s < n ? s + 1 : (s == n ? n : sink);
        mdp.set_transitions(s, kChainUp, {{up_target, 1.0}});
        mdp.set_transitions(s, kChainDown, {{sink, 1.0}});
    }
    mdp.validate();
    return mdp;
}

} // namespace alpi
