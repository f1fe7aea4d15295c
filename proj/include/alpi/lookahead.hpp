#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "alpi/bellman.hpp"
#include "alpi/mdp.hpp"
#include "alpi/query_ledger.hpp"

namespace alpi {

/// The two interchangeable ways of computing h-step lookahead values.
///   tree: forward exhaustive expansion from the root state. Every successor
///         with nonzero probability is visited, revisited states are expanded
///         again, and the ledger is charged one improve query per (node,
///         action) expansion -- the faithful forward-search cost.
///   dp:   bootstrap vector pushed through h-1 Bellman sweeps shared by all
///         states of an improvement call; charges eval queries per sweep and
///         no improve queries.
/// Both produce identical action values.
enum class LookaheadBackend { tree, dp };

namespace detail {

/// Memoized evaluator for the exhaustive lookahead tree.
///
/// The value of a tree node depends only on (state, remaining depth), and the
/// number of expansions under it satisfies
///     count(s, 0) = 0,
///     count(s, d) = A + sum_a sum_{s': P(s'|s,a)>0} count(s', d-1),
/// so both can be computed once per (state, depth) pair while still reporting
/// the exact expansion count of the uncached forward search.
class TreeLookahead {
  public:
    TreeLookahead(const TabularMdp& mdp, const ValueFunction& leaf, int horizon)
        : mdp_(mdp), leaf_(leaf), horizon_(horizon),
          value_(static_cast<std::size_t>(mdp.num_states()) * (horizon + 1)),
          count_(static_cast<std::size_t>(mdp.num_states()) * (horizon + 1), 0),
          ready_(static_cast<std::size_t>(mdp.num_states()) * (horizon + 1), 0) {}

    /// Action values of the root: q[a] = r(s,a) + gamma * E[value(s', h-1)].
    std::vector<double> root_values(int s) {
        std::vector<double> q(mdp_.num_actions());
        for (int a = 0; a < mdp_.num_actions(); ++a) {
            double exp = 0.0;
            for (const Transition& t : mdp_.transitions(s, a))
                exp += t.probability * node(t.next_state, horizon_ - 1).first;
            q[a] = mdp_.reward(s, a) + mdp_.discount() * exp;
        }
        return q;
    }

    /// Expansion count of the depth-h tree rooted at s.
    std::uint64_t root_count(int s) { return expansion_count(s, horizon_); }

  private:
    std::pair<double, std::uint64_t> node(int s, int d) {
        if (d == 0) return {leaf_[s], 0};
        std::size_t i = static_cast<std::size_t>(s) * (horizon_ + 1) + d;
        if (!ready_[i]) {
            double best = -kInfinity;
            std::uint64_t expansions = static_cast<std::uint64_t>(mdp_.num_actions());
            for (int a = 0; a < mdp_.num_actions(); ++a) {
                double exp = 0.0;
                for (const Transition& t : mdp_.transitions(s, a)) {
                    auto [v, c] = node(t.next_state, d - 1);
                    exp += t.probability * v;
                    expansions += c;
                }
                best = std::max(best, mdp_.reward(s, a) + mdp_.discount() * exp);
            }
            value_[i] = best;
            count_[i] = expansions;
            ready_[i] = 1;
        }
        return {value_[i], count_[i]};
    }

    std::uint64_t expansion_count(int s, int d) {
        if (d == 0) return 0;
        std::uint64_t c = static_cast<std::uint64_t>(mdp_.num_actions());
        for (int a = 0; a < mdp_.num_actions(); ++a)
            for (const Transition& t : mdp_.transitions(s, a))
                c += node(t.next_state, d - 1).second;
        return c;
    }

    const TabularMdp& mdp_;
    const ValueFunction& leaf_;
    int horizon_;
    std::vector<double> value_;
    std::vector<std::uint64_t> count_;
    std::vector<char> ready_;
};

/// W = T^(h-1) applied to the bootstrap vector; the dp backend's shared layers.
inline ValueFunction dp_layers(const TabularMdp& mdp, const ValueFunction& v, int h,
                               QueryLedger& ledger) {
    ValueFunction w = v;
    for (int i = 1; i < h; ++i) {
        w = apply_optimality_operator(mdp, w);
        ledger.add_eval(static_cast<std::uint64_t>(mdp.num_states()));
    }
    return w;
}

inline std::vector<double> one_step_row(const TabularMdp& mdp, const ValueFunction& w, int s) {
    std::vector<double> q(mdp.num_actions());
    for (int a = 0; a < mdp.num_actions(); ++a) q[a] = backup(mdp, w, s, a);
    return q;
}

} // namespace detail

/// Predicted ledger increment of one tree-backend improvement at state s:
/// the number of (node, action) expansions in the depth-h tree rooted there.
inline std::uint64_t tree_query_cost(const TabularMdp& mdp, int s, int h) {
    if (h < 1) throw std::invalid_argument("tree_query_cost: h must be >= 1");
    if (s < 0 || s >= mdp.num_states()) throw std::invalid_argument("tree_query_cost: bad state");
    ValueFunction zero(mdp.num_states(), 0.0);
    detail::TreeLookahead tree(mdp, zero, h);
    return tree.root_count(s);
}

/// Q_h(s, .): the h-step lookahead action values at state s with bootstrap v.
inline std::vector<double> q_h_state(const TabularMdp& mdp, const ValueFunction& v, int h, int s,
                                     LookaheadBackend backend, QueryLedger& ledger) {
    if (h < 1) throw std::invalid_argument("q_h_state: h must be >= 1");
    if (s < 0 || s >= mdp.num_states()) throw std::invalid_argument("q_h_state: bad state");
    check_value(mdp, v);
    if (backend == LookaheadBackend::tree) {
        detail::TreeLookahead tree(mdp, v, h);
        ledger.add_improve(h, tree.root_count(s));
        return tree.root_values(s);
    }
    ValueFunction w = detail::dp_layers(mdp, v, h, ledger);
    return detail::one_step_row(mdp, w, s);
}

/// Overwrites the rows of u at the given states with Q_h values. Other rows
/// are untouched. Ledger charges follow the backend contract; the dp
/// backend's Bellman layers are computed once and shared by all states of
/// the call.
inline void improve_states(const TabularMdp& mdp, const ValueFunction& v,
                           std::span<const int> states, int h, LookaheadBackend backend,
                           QueryLedger& ledger, ActionValueTable& u) {
    if (h < 1) throw std::invalid_argument("improve_states: h must be >= 1");
    if (states.empty()) return;
    check_value(mdp, v);
    if (backend == LookaheadBackend::tree) {
        detail::TreeLookahead tree(mdp, v, h);
        for (int s : states) {
            ledger.add_improve(h, tree.root_count(s));
            u.set_row(s, tree.root_values(s));
        }
        return;
    }
    ValueFunction w = detail::dp_layers(mdp, v, h, ledger);
    for (int s : states) u.set_row(s, detail::one_step_row(mdp, w, s));
}

} // namespace alpi
