#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "alpi/bellman.hpp"
#include "alpi/chain.hpp"
#include "alpi/lookahead.hpp"
#include "alpi/random_mdp.hpp"
#include "alpi/rng.hpp"

using namespace alpi;

namespace {

// Brute-force oracle: the uncached forward search, expanding every node
// again on revisits. Returns the root action values and counts one query
// per (node, action) expansion.
struct LiteralWalk {
    const TabularMdp& mdp;
    const ValueFunction& leaf;
    std::uint64_t expansions = 0;

    double node(int s, int d) {
        if (d == 0) return leaf[s];
        double best = -kInfinity;
        for (int a = 0; a < mdp.num_actions(); ++a) {
            ++expansions;
            double acc = 0.0;
            for (const Transition& t : mdp.transitions(s, a))
                acc += t.probability * node(t.next_state, d - 1);
            best = std::max(best, mdp.reward(s, a) + mdp.discount() * acc);
        }
        return best;
    }

    std::vector<double> root(int s, int h) {
        std::vector<double> q(mdp.num_actions());
        for (int a = 0; a < mdp.num_actions(); ++a) {
            ++expansions;
            double acc = 0.0;
            for (const Transition& t : mdp.transitions(s, a))
                acc += t.probability * node(t.next_state, h - 1);
            q[a] = mdp.reward(s, a) + mdp.discount() * acc;
        }
        return q;
    }
};

TabularMdp deterministic_fan(int num_actions) {
    // Root 0 fans to distinct states 1..A under the A actions; everything
    // else self-loops, so depth-2 trees from the root touch distinct nodes.
    const int n = num_actions + 1;
    TabularMdp mdp(n, num_actions, 0.9);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < num_actions; ++a)
            mdp.set_transitions(s, a, {{s == 0 ? a + 1 : s, 1.0}});
    mdp.validate();
    return mdp;
}

} // namespace

TEST_CASE("two-step lookahead on the chain by hand expansion") {
    const int n = 5;
    const double gamma = 0.9;
    TabularMdp chain = build_chain(n, gamma);
    ValueFunction zero(n + 2, 0.0);
    QueryLedger ledger;
    std::vector<double> q = q_h_state(chain, zero, 2, n - 1, LookaheadBackend::tree, ledger);
    CHECK(q[kChainUp] == Catch::Approx(gamma * (1.0 - gamma)).margin(1e-15));
    CHECK(q[kChainDown] == 0.0);
}

TEST_CASE("depth-1 lookahead reduces to the one-step backup") {
    RandomMdpConfig cfg;
    cfg.num_states = 7;
    cfg.num_actions = 3;
    cfg.seed = 5;
    TabularMdp mdp = random_mdp(cfg);
    CounterRng rng(12);
    ValueFunction v(7);
    for (double& x : v) x = rng.next_in(-1.0, 1.0);
    for (int s = 0; s < 7; ++s) {
        QueryLedger ledger;
        std::vector<double> q = q_h_state(mdp, v, 1, s, LookaheadBackend::tree, ledger);
        for (int a = 0; a < 3; ++a) CHECK(q[a] == backup(mdp, v, s, a));
        CHECK(ledger.improve_queries(1) == 3);
    }
}

TEST_CASE("tree and dp backends agree on a seeded stochastic model") {
    RandomMdpConfig cfg;
    cfg.num_states = 6;
    cfg.num_actions = 3;
    cfg.seed = 99;
    TabularMdp mdp = random_mdp(cfg);
    ValueFunction v(6);
    CounterRng rng(3);
    for (double& x : v) x = rng.next_in(-2.0, 2.0);
    for (int s = 0; s < 6; ++s) {
        QueryLedger lt, ld;
        std::vector<double> qt = q_h_state(mdp, v, 3, s, LookaheadBackend::tree, lt);
        std::vector<double> qd = q_h_state(mdp, v, 3, s, LookaheadBackend::dp, ld);
        for (int a = 0; a < 3; ++a) CHECK(std::abs(qt[a] - qd[a]) <= 1e-12);
        CHECK(ld.improve_total() == 0);
        CHECK(ld.eval_queries == 2 * 6); // two shared Bellman layers
        CHECK(lt.eval_queries == 0);
    }
}

TEST_CASE("backend equivalence on random models") {
    CounterRng master(2024);
    for (int rep = 0; rep < 40; ++rep) {
        RandomMdpConfig cfg;
        cfg.num_states = 2 + static_cast<int>(master.next_below(49));
        cfg.num_actions = 2 + static_cast<int>(master.next_below(3));
        cfg.gamma = master.next_in(0.5, 0.99);
        cfg.seed = master.next_u64();
        TabularMdp mdp = random_mdp(cfg);
        ValueFunction v(cfg.num_states);
        for (double& x : v) x = master.next_in(-1.0, 1.0);
        int h = 1 + static_cast<int>(master.next_below(4));
        int s = static_cast<int>(master.next_below(cfg.num_states));
        QueryLedger lt, ld;
        std::vector<double> qt = q_h_state(mdp, v, h, s, LookaheadBackend::tree, lt);
        std::vector<double> qd = q_h_state(mdp, v, h, s, LookaheadBackend::dp, ld);
        for (int a = 0; a < cfg.num_actions; ++a) CHECK(std::abs(qt[a] - qd[a]) <= 1e-12);
    }
}

TEST_CASE("tree backend matches the literal uncached walk") {
    CounterRng master(71);
    for (int rep = 0; rep < 25; ++rep) {
        RandomMdpConfig cfg;
        cfg.num_states = 2 + static_cast<int>(master.next_below(8));
        cfg.num_actions = 2 + static_cast<int>(master.next_below(3));
        cfg.seed = master.next_u64();
        TabularMdp mdp = random_mdp(cfg);
        ValueFunction v(cfg.num_states);
        for (double& x : v) x = master.next_in(-1.0, 1.0);
        int h = 1 + static_cast<int>(master.next_below(4));
        int s = static_cast<int>(master.next_below(cfg.num_states));

        LiteralWalk walk{mdp, v};
        std::vector<double> expected = walk.root(s, h);

        QueryLedger ledger;
        std::vector<double> got = q_h_state(mdp, v, h, s, LookaheadBackend::tree, ledger);
        for (int a = 0; a < cfg.num_actions; ++a)
            CHECK(got[a] == Catch::Approx(expected[a]).margin(1e-13));
        CHECK(ledger.improve_queries(h) == walk.expansions);
        CHECK(tree_query_cost(mdp, s, h) == walk.expansions);
    }
}

TEST_CASE("tree query cost closed forms") {
    SECTION("one step expands each action once") {
        TabularMdp mdp = deterministic_fan(4);
        CHECK(tree_query_cost(mdp, 0, 1) == 4);
    }
    SECTION("full 4-ary depth-2 tree with distinct successors") {
        TabularMdp mdp = deterministic_fan(4);
        CHECK(tree_query_cost(mdp, 0, 2) == 20);
    }
    SECTION("chain root expands both actions at three nodes") {
        TabularMdp chain = build_chain(4, 0.9);
        CHECK(tree_query_cost(chain, 0, 2) == 6);
        // Full binary tree from any chain state: sum of 2^i.
        for (int s = 0; s < 6; ++s) {
            std::uint64_t expect = 0;
            for (int h = 1; h <= 5; ++h) {
                expect += 1ULL << h;
                CHECK(tree_query_cost(chain, s, h) == expect);
            }
        }
    }
    CHECK_THROWS_AS(tree_query_cost(build_chain(2, 0.5), 0, 0), std::invalid_argument);
}

TEST_CASE("improve_states contracts") {
    const int n = 6;
    const double gamma = 0.9;
    TabularMdp chain = build_chain(n, gamma);
    ValueFunction zero(n + 2, 0.0);

    SECTION("empty set leaves table and ledger untouched") {
        ActionValueTable u(n + 2, 2);
        QueryLedger ledger;
        improve_states(chain, zero, std::vector<int>{}, 3, LookaheadBackend::tree, ledger, u);
        CHECK(ledger.total() == 0);
        for (int s = 0; s < n + 2; ++s) CHECK_FALSE(u.improved(s));
    }
    SECTION("one-step improvement of all states costs S*A tree queries") {
        ActionValueTable u(n + 2, 2);
        QueryLedger ledger;
        std::vector<int> all(n + 2);
        std::iota(all.begin(), all.end(), 0);
        improve_states(chain, zero, all, 1, LookaheadBackend::tree, ledger, u);
        CHECK(ledger.improve_queries(1) == static_cast<std::uint64_t>((n + 2) * 2));
        for (int s = 0; s < n + 2; ++s) CHECK(u.improved(s));
    }
    SECTION("three-step improvement at s_{n-2} by hand expansion") {
        ActionValueTable u(n + 2, 2);
        QueryLedger ledger;
        std::vector<int> states{n - 2};
        improve_states(chain, zero, states, 3, LookaheadBackend::tree, ledger, u);
        CHECK(u.at(n - 2, kChainUp) == Catch::Approx(gamma * gamma * (1.0 - gamma)).margin(1e-15));
        CHECK(u.at(n - 2, kChainDown) == 0.0);
        CHECK_FALSE(u.improved(n - 3));
    }
    SECTION("tree ledger increment equals the summed per-state cost exactly") {
        RandomMdpConfig cfg;
        cfg.num_states = 12;
        cfg.num_actions = 3;
        cfg.seed = 8;
        TabularMdp mdp = random_mdp(cfg);
        ValueFunction v(12, 0.25);
        ActionValueTable u(12, 3);
        QueryLedger ledger;
        std::vector<int> states{1, 4, 7, 11};
        improve_states(mdp, v, states, 3, LookaheadBackend::tree, ledger, u);
        std::uint64_t expect = 0;
        for (int s : states) expect += tree_query_cost(mdp, s, 3);
        CHECK(ledger.improve_queries(3) == expect);
        CHECK(ledger.total() == expect);
    }
    SECTION("dp backend charges S eval queries per shared Bellman layer") {
        RandomMdpConfig cfg;
        cfg.num_states = 10;
        cfg.num_actions = 2;
        cfg.seed = 9;
        TabularMdp mdp = random_mdp(cfg);
        ValueFunction v(10, 0.0);
        ActionValueTable u(10, 2);
        QueryLedger ledger;
        std::vector<int> states{0, 3, 9};
        improve_states(mdp, v, states, 4, LookaheadBackend::dp, ledger, u);
        CHECK(ledger.eval_queries == 3 * 10); // layers W1..W3, shared by all three states
        CHECK(ledger.improve_total() == 0);
    }
}

TEST_CASE("lookahead dominance above a policy value") {
    RandomMdpConfig cfg;
    cfg.num_states = 9;
    cfg.num_actions = 3;
    cfg.seed = 14;
    TabularMdp mdp = random_mdp(cfg);
    CounterRng rng(5);
    Policy pi(9);
    for (int& a : pi) a = static_cast<int>(rng.next_below(3));
    ValueFunction v = evaluate_policy(mdp, pi);
    for (int h : {2, 3, 4}) {
        for (int s = 0; s < 9; ++s) {
            QueryLedger ledger;
            std::vector<double> q1 = q_h_state(mdp, v, 1, s, LookaheadBackend::dp, ledger);
            std::vector<double> qh = q_h_state(mdp, v, h, s, LookaheadBackend::dp, ledger);
            double m1 = *std::max_element(q1.begin(), q1.end());
            double mh = *std::max_element(qh.begin(), qh.end());
            CHECK(mh >= m1 - 1e-12);
        }
    }
}

TEST_CASE("h-step operator contracts by gamma^h") {
    RandomMdpConfig cfg;
    cfg.num_states = 11;
    cfg.num_actions = 3;
    cfg.gamma = 0.9;
    cfg.seed = 23;
    TabularMdp mdp = random_mdp(cfg);
    CounterRng rng(6);
    for (int rep = 0; rep < 20; ++rep) {
        ValueFunction u(11), v(11);
        for (double& x : u) x = rng.next_in(-2.0, 2.0);
        for (double& x : v) x = rng.next_in(-2.0, 2.0);
        int h = 1 + static_cast<int>(rng.next_below(4));
        ValueFunction tu = u, tv = v;
        for (int i = 0; i < h; ++i) {
            tu = apply_optimality_operator(mdp, tu);
            tv = apply_optimality_operator(mdp, tv);
        }
        CHECK(inf_norm_diff(tu, tv) <= std::pow(cfg.gamma, h) * inf_norm_diff(u, v) + 1e-12);
    }
}

TEST_CASE("ledger snapshots serialize to phase/depth/queries rows") {
    QueryLedger ledger;
    ledger.add_eval(12);
    ledger.add_improve(1, 40);
    ledger.add_improve(3, 7);
    CHECK(ledger.to_csv() == "phase,depth,queries\neval,0,12\nimprove,1,40\nimprove,2,0\nimprove,3,7\n");
    CHECK(ledger.total() == 59);
    QueryLedger other;
    other.add_improve(2, 5);
    ledger.merge(other);
    CHECK(ledger.improve_queries(2) == 5);
    CHECK(ledger.total() == 64);
}

TEST_CASE("q_h_state rejects bad arguments") {
    TabularMdp chain = build_chain(3, 0.9);
    ValueFunction v(5, 0.0);
    QueryLedger ledger;
    CHECK_THROWS_AS(q_h_state(chain, v, 0, 0, LookaheadBackend::tree, ledger),
                    std::invalid_argument);
    CHECK_THROWS_AS(q_h_state(chain, v, 2, 9, LookaheadBackend::tree, ledger),
                    std::invalid_argument);
}
