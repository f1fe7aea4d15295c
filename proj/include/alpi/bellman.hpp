#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "alpi/mdp.hpp"

namespace alpi {

class SolverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class EvalMethod { direct_solve, iterative };

/// One-step backup of action a at state s: r(s,a) + gamma * E[v(s')].
inline double backup(const TabularMdp& mdp, const ValueFunction& v, int s, int a) {
    double exp = 0.0;
    for (const Transition& t : mdp.transitions(s, a)) exp += t.probability * v[t.next_state];
    return mdp.reward(s, a) + mdp.discount() * exp;
}

/// Policy operator: (T_pi v)(s) = r(s, pi(s)) + gamma * E[v(s')].
inline ValueFunction apply_policy_operator(const TabularMdp& mdp, const Policy& policy,
                                           const ValueFunction& v) {
    check_policy(mdp, policy);
    check_value(mdp, v);
    ValueFunction out(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s) out[s] = backup(mdp, v, s, policy[s]);
    return out;
}

/// Bellman optimality operator: (T v)(s) = max_a r(s,a) + gamma * E[v(s')].
inline ValueFunction apply_optimality_operator(const TabularMdp& mdp, const ValueFunction& v) {
    check_value(mdp, v);
    ValueFunction out(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s) {
        double best = -kInfinity;
        for (int a = 0; a < mdp.num_actions(); ++a) best = std::max(best, backup(mdp, v, s, a));
        out[s] = best;
    }
    return out;
}

/// Greedy policy w.r.t. v. Ties go to the lowest action index.
inline Policy greedy_policy(const TabularMdp& mdp, const ValueFunction& v) {
    check_value(mdp, v);
    Policy policy(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s) {
        int best = 0;
        double best_value = backup(mdp, v, s, 0);
        for (int a = 1; a < mdp.num_actions(); ++a) {
            double q = backup(mdp, v, s, a);
            if (q > best_value) {
                best = a;
                best_value = q;
            }
        }
        policy[s] = best;
    }
    return policy;
}

struct IterativeEvalResult {
    ValueFunction value;
    int sweeps = 0;
};

/// Fixed-point iteration for V_pi starting from zero. Stops once the sweep
/// residual drops below tol*(1-gamma)/gamma, which bounds the max-norm error
/// of the returned iterate by tol.
inline IterativeEvalResult evaluate_policy_iterative(const TabularMdp& mdp, const Policy& policy,
                                                     double tol) {
    check_policy(mdp, policy);
    if (!(tol > 0.0)) throw std::invalid_argument("evaluate_policy: tol must be positive");
    const double gamma = mdp.discount();
    const double threshold = tol * (1.0 - gamma) / gamma;
    ValueFunction v(mdp.num_states(), 0.0);
    // Residuals shrink by gamma per sweep; allow generous slack past the
    // worst-case count before declaring numerical failure.
    double reward_scale = 0.0;
    for (int s = 0; s < mdp.num_states(); ++s)
        reward_scale = std::max(reward_scale, std::abs(mdp.reward(s, policy[s])));
    long max_sweeps = 64;
    if (reward_scale > threshold)
        max_sweeps += static_cast<long>(std::ceil(std::log(reward_scale / threshold) /
                                                  std::log(1.0 / gamma)));
    IterativeEvalResult res;
    for (long k = 0; k < max_sweeps; ++k) {
        ValueFunction next(mdp.num_states());
        double delta = 0.0;
        for (int s = 0; s < mdp.num_states(); ++s) {
            next[s] = backup(mdp, v, s, policy[s]);
            delta = std::max(delta, std::abs(next[s] - v[s]));
        }
        v = std::move(next);
        ++res.sweeps;
        if (delta <= threshold) {
            res.value = std::move(v);
            return res;
        }
    }
    throw SolverError("evaluate_policy: iterative evaluation did not reach tolerance " +
                      std::to_string(tol) + " within " + std::to_string(max_sweeps) + " sweeps");
}

/// Dense solve of (I - gamma P_pi) v = r_pi.
inline ValueFunction evaluate_policy_direct(const TabularMdp& mdp, const Policy& policy) {
    check_policy(mdp, policy);
    const int n = mdp.num_states();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b(n);
    for (int s = 0; s < n; ++s) {
        b(s) = mdp.reward(s, policy[s]);
        for (const Transition& t : mdp.transitions(s, policy[s]))
            m(s, t.next_state) -= mdp.discount() * t.probability;
    }
    Eigen::VectorXd x = Eigen::PartialPivLU<Eigen::MatrixXd>(m).solve(b);
    ValueFunction v(n);
    for (int s = 0; s < n; ++s) {
        if (!std::isfinite(x(s)))
            throw SolverError("evaluate_policy: direct solve produced a non-finite value at state " +
                              std::to_string(s));
        v[s] = x(s);
    }
    return v;
}

/// Exact value of a stationary policy, the unique fixed point of T_pi.
inline ValueFunction evaluate_policy(const TabularMdp& mdp, const Policy& policy,
                                     EvalMethod method = EvalMethod::direct_solve,
                                     double tol = 1e-10) {
    if (method == EvalMethod::direct_solve) return evaluate_policy_direct(mdp, policy);
    return evaluate_policy_iterative(mdp, policy, tol).value;
}

struct OptimalSolution {
    ValueFunction value;
    Policy policy;
    int sweeps = 0; // value-iteration sweeps performed
};

/// Value iteration to within tol of the optimal value in max-norm, followed
/// by one greedy extraction.
inline OptimalSolution solve_optimal(const TabularMdp& mdp, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("solve_optimal: tol must be positive");
    const double gamma = mdp.discount();
    const double threshold = tol * (1.0 - gamma) / gamma;
    double reward_scale = 0.0;
    for (int s = 0; s < mdp.num_states(); ++s)
        for (int a = 0; a < mdp.num_actions(); ++a)
            reward_scale = std::max(reward_scale, std::abs(mdp.reward(s, a)));
    long max_sweeps = 64;
    if (reward_scale > threshold)
        max_sweeps += static_cast<long>(std::ceil(std::log(reward_scale / threshold) /
                                                  std::log(1.0 / gamma)));
    ValueFunction v(mdp.num_states(), 0.0);
    for (long k = 0; k < max_sweeps; ++k) {
        ValueFunction next = apply_optimality_operator(mdp, v);
        double delta = inf_norm_diff(next, v);
        v = std::move(next);
        if (delta <= threshold) return {v, greedy_policy(mdp, v), static_cast<int>(k + 1)};
    }
    throw SolverError("solve_optimal: value iteration did not reach tolerance " +
                      std::to_string(tol));
}

} // namespace alpi
