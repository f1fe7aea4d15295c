#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "alpi/bellman.hpp"
#include "alpi/chain.hpp"
#include "alpi/random_mdp.hpp"
#include "alpi/rng.hpp"

using namespace alpi;

namespace {

TabularMdp single_state(double reward, double gamma) {
    TabularMdp mdp(1, 1, gamma);
    mdp.set_reward(0, 0, reward);
    mdp.set_transitions(0, 0, {{0, 1.0}});
    mdp.validate();
    return mdp;
}

// Independent oracle: dense transition tensor and a straight per-state loop
// over all actions and successors.
struct DenseOracle {
    int S, A;
    double gamma;
    std::vector<std::vector<std::vector<double>>> P; // [s][a][s']
    std::vector<std::vector<double>> R;              // [s][a]

    explicit DenseOracle(const TabularMdp& mdp)
        : S(mdp.num_states()), A(mdp.num_actions()), gamma(mdp.discount()),
          P(S, std::vector<std::vector<double>>(A, std::vector<double>(S, 0.0))),
          R(S, std::vector<double>(A, 0.0)) {
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                R[s][a] = mdp.reward(s, a);
                for (const Transition& t : mdp.transitions(s, a))
                    P[s][a][t.next_state] += t.probability;
            }
    }

    double q(const ValueFunction& v, int s, int a) const {
        double acc = R[s][a];
        for (int s2 = 0; s2 < S; ++s2) acc += gamma * P[s][a][s2] * v[s2];
        return acc;
    }

    ValueFunction bellman(const ValueFunction& v) const {
        ValueFunction out(S);
        for (int s = 0; s < S; ++s) {
            double best = q(v, s, 0);
            for (int a = 1; a < A; ++a) best = std::max(best, q(v, s, a));
            out[s] = best;
        }
        return out;
    }
};

ValueFunction chain_optimal_value(int n, double gamma) {
    ValueFunction v(n + 2, 0.0);
    for (int i = 0; i <= n; ++i) v[i] = std::pow(gamma, n - i);
    return v;
}

} // namespace

TEST_CASE("policy operator on a single self-loop state") {
    TabularMdp mdp = single_state(0.5, 0.5);
    CHECK(apply_policy_operator(mdp, {0}, {0.0})[0] == 0.5);
    CHECK(apply_policy_operator(mdp, {0}, {1.0})[0] == 1.0);
}

TEST_CASE("policy operator on the chain under the sink policy is zero") {
    TabularMdp chain = build_chain(6, 0.9);
    ValueFunction out = apply_policy_operator(chain, Policy(8, kChainDown), ValueFunction(8, 0.0));
    for (double x : out) CHECK(x == 0.0);
}

TEST_CASE("policy operator validates dimensions") {
    TabularMdp chain = build_chain(3, 0.9);
    CHECK_THROWS_AS(apply_policy_operator(chain, Policy(2, 0), ValueFunction(5, 0.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_policy_operator(chain, Policy(5, 0), ValueFunction(2, 0.0)),
                    std::invalid_argument);
}

TEST_CASE("optimality operator on the chain from zero") {
    const int n = 7;
    const double gamma = 0.9;
    TabularMdp chain = build_chain(n, gamma);
    ValueFunction out = apply_optimality_operator(chain, ValueFunction(n + 2, 0.0));
    for (int s = 0; s < n + 2; ++s) CHECK(out[s] == (s == n ? 1.0 - gamma : 0.0));
}

TEST_CASE("optimality operator fixes the optimal value") {
    RandomMdpConfig cfg;
    cfg.num_states = 9;
    cfg.num_actions = 3;
    cfg.seed = 11;
    TabularMdp mdp = random_mdp(cfg);
    ValueFunction v_star = solve_optimal(mdp, 1e-12).value;
    CHECK(inf_norm_diff(apply_optimality_operator(mdp, v_star), v_star) < 1e-10);
}

TEST_CASE("optimality operator matches the dense enumeration oracle") {
    RandomMdpConfig cfg;
    cfg.num_states = 5;
    cfg.num_actions = 3;
    cfg.seed = 42;
    TabularMdp mdp = random_mdp(cfg);
    DenseOracle oracle(mdp);
    CounterRng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        ValueFunction v(5);
        for (double& x : v) x = rng.next_in(-2.0, 2.0);
        ValueFunction got = apply_optimality_operator(mdp, v);
        ValueFunction want = oracle.bellman(v);
        for (int s = 0; s < 5; ++s) CHECK(got[s] == Catch::Approx(want[s]).margin(1e-13));
    }
}

TEST_CASE("evaluate_policy geometric series") {
    const double gamma = 0.7;
    TabularMdp mdp = single_state(1.0 - gamma, gamma);
    CHECK(evaluate_policy(mdp, {0})[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(evaluate_policy(mdp, {0}, EvalMethod::iterative, 1e-11)[0] ==
          Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("evaluate_policy on the chain") {
    const int n = 9;
    const double gamma = 0.9;
    TabularMdp chain = build_chain(n, gamma);
    ValueFunction closed_form = chain_optimal_value(n, gamma);

    SECTION("all-up policy matches the hand geometric series, both methods") {
        Policy up(n + 2, kChainUp);
        ValueFunction direct = evaluate_policy(chain, up);
        ValueFunction iter = evaluate_policy(chain, up, EvalMethod::iterative, 1e-10);
        for (int s = 0; s < n + 2; ++s) {
            CHECK(direct[s] == Catch::Approx(closed_form[s]).margin(1e-10));
            CHECK(iter[s] == Catch::Approx(closed_form[s]).margin(1e-10));
        }
    }
    SECTION("all-down policy is identically zero") {
        ValueFunction v = evaluate_policy(chain, Policy(n + 2, kChainDown));
        for (double x : v) CHECK(std::abs(x) < 1e-15);
        ValueFunction vi = evaluate_policy(chain, Policy(n + 2, kChainDown), EvalMethod::iterative);
        for (double x : vi) CHECK(x == 0.0);
    }
}

TEST_CASE("direct and iterative evaluation agree on random models") {
    for (int s_count : {20, 80, 200}) {
        RandomMdpConfig cfg;
        cfg.num_states = s_count;
        cfg.num_actions = 3;
        cfg.gamma = 0.92;
        cfg.seed = 1000 + s_count;
        TabularMdp mdp = random_mdp(cfg);
        CounterRng rng(s_count);
        Policy pi(s_count);
        for (int& a : pi) a = static_cast<int>(rng.next_below(3));
        ValueFunction direct = evaluate_policy(mdp, pi, EvalMethod::direct_solve);
        ValueFunction iter = evaluate_policy(mdp, pi, EvalMethod::iterative, 1e-9);
        CHECK(inf_norm_diff(direct, iter) < 1e-8);
        // Fixed-point residual of the exact evaluation.
        CHECK(inf_norm_diff(apply_policy_operator(mdp, pi, direct), direct) < 1e-8);
    }
}

TEST_CASE("greedy policy on the chain") {
    const int n = 6;
    TabularMdp chain = build_chain(n, 0.9);
    SECTION("greedy at the optimal value plays up along the chain") {
        Policy pi = greedy_policy(chain, chain_optimal_value(n, 0.9));
        for (int i = 0; i <= n; ++i) CHECK(pi[i] == kChainUp);
    }
    SECTION("greedy at zero ties to action 0 everywhere and up at the end") {
        Policy pi = greedy_policy(chain, ValueFunction(n + 2, 0.0));
        CHECK(pi[n] == kChainUp);
        for (int s = 0; s < n + 2; ++s) CHECK(pi[s] == 0);
    }
}

TEST_CASE("greedy policy is invariant under a uniform shift of v") {
    RandomMdpConfig cfg;
    cfg.num_states = 10;
    cfg.num_actions = 4;
    cfg.seed = 3;
    TabularMdp mdp = random_mdp(cfg);
    ValueFunction v(10);
    CounterRng rng(9);
    for (double& x : v) x = rng.next_in(0.0, 5.0);
    ValueFunction shifted = v;
    for (double& x : shifted) x += 3.25;
    CHECK(greedy_policy(mdp, v) == greedy_policy(mdp, shifted));
}

TEST_CASE("solve_optimal closed forms") {
    SECTION("chain") {
        const int n = 8;
        const double gamma = 0.9;
        OptimalSolution sol = solve_optimal(build_chain(n, gamma), 1e-10);
        ValueFunction closed_form = chain_optimal_value(n, gamma);
        for (int s = 0; s < n + 2; ++s)
            CHECK(sol.value[s] == Catch::Approx(closed_form[s]).margin(1e-9));
        for (int i = 0; i <= n; ++i) CHECK(sol.policy[i] == kChainUp);
    }
    SECTION("single state") {
        OptimalSolution sol = solve_optimal(single_state(0.3, 0.98), 1e-10);
        CHECK(sol.value[0] == Catch::Approx(15.0).margin(1e-8));
    }
    SECTION("random model satisfies the fixed-point residual bound") {
        RandomMdpConfig cfg;
        cfg.num_states = 14;
        cfg.num_actions = 3;
        cfg.seed = 21;
        TabularMdp mdp = random_mdp(cfg);
        const double tol = 1e-10;
        OptimalSolution sol = solve_optimal(mdp, tol);
        CHECK(inf_norm_diff(apply_optimality_operator(mdp, sol.value), sol.value) <= 10 * tol);
    }
}

TEST_CASE("bellman operator is a gamma-contraction on random pairs") {
    RandomMdpConfig cfg;
    cfg.num_states = 16;
    cfg.num_actions = 3;
    cfg.gamma = 0.88;
    cfg.seed = 31;
    TabularMdp mdp = random_mdp(cfg);
    CounterRng rng(4);
    for (int rep = 0; rep < 50; ++rep) {
        ValueFunction u(16), v(16);
        for (double& x : u) x = rng.next_in(-3.0, 3.0);
        for (double& x : v) x = rng.next_in(-3.0, 3.0);
        double lhs = inf_norm_diff(apply_optimality_operator(mdp, u), apply_optimality_operator(mdp, v));
        CHECK(lhs <= cfg.gamma * inf_norm_diff(u, v) + 1e-12);
    }
}

TEST_CASE("one optimal backup improves on the policy value pointwise") {
    RandomMdpConfig cfg;
    cfg.num_states = 12;
    cfg.num_actions = 3;
    cfg.seed = 17;
    TabularMdp mdp = random_mdp(cfg);
    CounterRng rng(2);
    for (int rep = 0; rep < 10; ++rep) {
        Policy pi(12);
        for (int& a : pi) a = static_cast<int>(rng.next_below(3));
        ValueFunction v = evaluate_policy(mdp, pi);
        ValueFunction improved = apply_optimality_operator(mdp, v);
        for (int s = 0; s < 12; ++s) CHECK(improved[s] >= v[s] - 1e-12);
    }
}
