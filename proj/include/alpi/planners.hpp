#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alpi/bellman.hpp"
#include "alpi/format.hpp"
#include "alpi/lookahead.hpp"
#include "alpi/mdp.hpp"
#include "alpi/query_ledger.hpp"

namespace alpi {

/// Smallest integer h >= 1 with gamma^h <= kappa. Computed by repeated
/// multiplication and exact comparison so that boundary inputs like
/// kappa = gamma*gamma*gamma resolve to exactly 3.
inline int h_kappa(double kappa, double gamma) {
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::invalid_argument("h_kappa: kappa must lie strictly inside (0,1)");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("h_kappa: gamma must lie strictly inside (0,1)");
    double power = gamma;
    int h = 1;
    while (power > kappa) {
        power *= gamma;
        ++h;
    }
    return h;
}

/// Number of states a quantile theta selects out of n: ceil(theta*n), with
/// products that are within rounding noise of an integer snapped to it so
/// that budgets like 0.1 * 730 select exactly 73 states.
inline int quantile_count(double theta, int n) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("quantile_count: theta must lie in [0,1]");
    double x = theta * static_cast<double>(n);
    double r = std::round(x);
    double c = std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)) ? r : std::ceil(x);
    return std::min(n, std::max(0, static_cast<int>(c)));
}

struct QuantileCutoff {
    double threshold;        // smallest selected distance; +inf when none selected
    std::vector<int> states; // selected states, listed in increasing index order
};

/// Selects the ceil(theta*S) states of largest distance. Ties are broken by
/// lowest state index; theta = 0 selects none.
inline QuantileCutoff quantile_cutoff(const std::vector<double>& distances, double theta) {
    const int n = static_cast<int>(distances.size());
    const int count = quantile_count(theta, n);
    QuantileCutoff out{kInfinity, {}};
    if (count == 0) return out;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (distances[a] != distances[b]) return distances[a] > distances[b];
        return a < b;
    });
    out.states.assign(order.begin(), order.begin() + count);
    out.threshold = distances[out.states.back()];
    std::sort(out.states.begin(), out.states.end());
    return out;
}

/// Per-depth improvement budgets (theta_1 ... theta_H). A schedule is usable
/// only if some depth improves every state (theta_h = 1); otherwise states
/// can keep sentinel rows and the greedy extraction would be undefined.
struct QuantileSchedule {
    std::vector<double> thetas;

    int max_depth() const { return static_cast<int>(thetas.size()); }

    void validate() const {
        if (thetas.empty()) throw std::invalid_argument("quantile schedule: empty");
        bool full_sweep = false;
        for (double t : thetas) {
            if (!(t >= 0.0 && t <= 1.0))
                throw std::invalid_argument("quantile schedule: thetas must lie in [0,1]");
            if (t == 1.0) full_sweep = true;
        }
        if (!full_sweep)
            throw std::invalid_argument(
                "quantile schedule: theta_1 = 1 (or a full sweep at some depth) is required, "
                "otherwise unimproved states have no defined greedy action");
    }

    /// Schedule equivalent to a fixed h-step sweep.
    static QuantileSchedule single_depth(int h) {
        if (h < 1) throw std::invalid_argument("quantile schedule: depth must be >= 1");
        QuantileSchedule s;
        s.thetas.assign(h, 0.0);
        s.thetas[h - 1] = 1.0;
        return s;
    }

    /// Full depth-1 sweep plus the given (depth, theta) budgets.
    static QuantileSchedule with_deep_budgets(const std::vector<std::pair<int, double>>& budgets) {
        int max_h = 1;
        for (auto& [h, t] : budgets) max_h = std::max(max_h, h);
        QuantileSchedule s;
        s.thetas.assign(max_h, 0.0);
        s.thetas[0] = 1.0;
        for (auto& [h, t] : budgets) {
            if (h < 1) throw std::invalid_argument("quantile schedule: depth must be >= 1");
            s.thetas[h - 1] = t;
        }
        return s;
    }
};

struct TraceRow {
    int iter = 0;
    double dist_inf = 0.0; // ||V* - V_pi_t||_inf, measured against the true optimum
    int policy_changes = 0;
    QueryLedger queries;   // cumulative snapshot after this pass
    std::vector<int> states_improved_by_depth;
    double deep_fraction = 0.0; // fraction of states improved at depth > 1 this pass
};

/// Per-pass convergence record. The distance column is measured against the
/// true optimal value, also when a planner runs with an approximate one.
struct ConvergenceTrace {
    int max_depth = 1;
    std::vector<TraceRow> rows;

    /// CSV schema: iter,dist_inf,changes,queries_total,queries_eval,
    /// queries_h1..queries_hH,deep_fraction. Query columns are cumulative.
    std::string to_csv() const {
        std::string out = "iter,dist_inf,changes,queries_total,queries_eval";
        for (int h = 1; h <= max_depth; ++h) out += ",queries_h" + std::to_string(h);
        out += ",deep_fraction\n";
        for (const TraceRow& r : rows) {
            out += num_to_string(r.iter) + "," + num_to_string(r.dist_inf) + "," +
                   num_to_string(r.policy_changes) + "," + num_to_string(r.queries.total()) + "," +
                   num_to_string(r.queries.eval_queries);
            for (int h = 1; h <= max_depth; ++h)
                out += "," + num_to_string(r.queries.improve_queries(h));
            out += "," + num_to_string(r.deep_fraction) + "\n";
        }
        return out;
    }

    /// Observed per-pass contraction of the distance to the optimum.
    std::vector<double> contraction_ratios() const {
        std::vector<double> out;
        for (std::size_t i = 0; i + 1 < rows.size(); ++i)
            out.push_back(rows[i].dist_inf > 0.0 ? rows[i + 1].dist_inf / rows[i].dist_inf : 0.0);
        return out;
    }

    double max_deep_fraction() const {
        double m = 0.0;
        for (const TraceRow& r : rows) m = std::max(m, r.deep_fraction);
        return m;
    }

    std::uint64_t total_queries() const { return rows.empty() ? 0 : rows.back().queries.total(); }
};

struct PlannerOptions {
    LookaheadBackend backend = LookaheadBackend::tree;
    EvalMethod eval_method = EvalMethod::direct_solve;
    double eval_tol = 1e-10;  // iterative evaluation tolerance
    long max_iters = -1;      // cap on passes; -1 = classic bound for this MDP
    /// Optimal value used for the trace's distance column. Computed with
    /// solve_optimal(oracle_tol) when absent; never charged to the ledger.
    const ValueFunction* v_star_for_trace = nullptr;
    double oracle_tol = 1e-10;
    /// Called with (pass, V_pi_t) right after each evaluation; measurement
    /// only, runs outside the ledger.
    std::function<void(int, const ValueFunction&)> on_evaluate;
};

struct PlannerResult {
    std::string planner;
    Policy policy;
    ValueFunction value;
    ConvergenceTrace trace;
    long iterations = 0;
    bool converged = false;
    std::uint64_t mdp_fingerprint = 0;
    /// Queries spent preparing inputs (for example solving an aggregated
    /// model for an approximate optimum); included in total_queries().
    QueryLedger setup_queries;

    std::uint64_t total_queries() const { return trace.total_queries() + setup_queries.total(); }
};

/// Classic iteration bound for policy iteration:
/// ceil(S(A-1) log(1/(1-gamma)) / log(1/gamma)).
inline long pi_iteration_bound(const TabularMdp& mdp) {
    double b = mdp.num_states() * (mdp.num_actions() - 1) *
               std::log(1.0 / (1.0 - mdp.discount())) / std::log(1.0 / mdp.discount());
    return static_cast<long>(std::ceil(b));
}

/// Same bound with the h-step contraction: the denominator gains a factor h.
inline long h_pi_iteration_bound(const TabularMdp& mdp, int h) {
    if (h < 1) throw std::invalid_argument("h_pi_iteration_bound: h must be >= 1");
    double b = mdp.num_states() * (mdp.num_actions() - 1) *
               std::log(1.0 / (1.0 - mdp.discount())) / (h * std::log(1.0 / mdp.discount()));
    return static_cast<long>(std::ceil(b));
}

/// Iteration bound for the threshold planner, phrased with h_kappa - 1.
/// For kappa >= gamma the run degenerates to plain policy iteration and the
/// classic bound applies.
inline long tlpi_iteration_bound(const TabularMdp& mdp, double kappa) {
    int hk = h_kappa(kappa, mdp.discount());
    if (hk <= 1) return pi_iteration_bound(mdp);
    double b = mdp.num_states() * (mdp.num_actions() - 1) *
               std::log(1.0 / (1.0 - mdp.discount())) /
               ((hk - 1) * std::log(1.0 / mdp.discount()));
    return static_cast<long>(std::ceil(b));
}

namespace detail {

struct ImproveStats {
    std::vector<int> states_by_depth;
    long deep_union = 0; // distinct states improved at depth > 1
};

/// Greedy extraction from the action-value table. The incumbent action is
/// kept unless some action is strictly better; between strictly better
/// challengers the lowest index wins. Keeping the incumbent on exact ties is
/// what makes value information propagate one improvement at a time instead
/// of flipping tied states arbitrarily.
inline Policy extract_greedy(const ActionValueTable& u, const Policy& incumbent) {
    Policy next(incumbent);
    for (int s = 0; s < u.num_states(); ++s) {
        int best = incumbent[s];
        double best_value = u.at(s, best);
        for (int a = 0; a < u.num_actions(); ++a) {
            if (u.at(s, a) > best_value) {
                best = a;
                best_value = u.at(s, a);
            }
        }
        next[s] = best;
    }
    return next;
}

/// Shared evaluate/improve/extract loop. The improve callback fills the
/// action-value table from V_pi_t and reports what it touched.
///
/// Iterations are counted with the pass producing pi_1 as iteration zero:
/// a run whose policy changes in c passes reports c - 1 (and 1 when it was
/// stable from the start, for the single verification pass).
template <typename ImproveFn>
PlannerResult run_improvement_loop(const TabularMdp& mdp, Policy policy, std::string name,
                                   int max_depth, const PlannerOptions& opts, ImproveFn&& improve) {
    check_policy(mdp, policy);
    const int num_states = mdp.num_states();

    ValueFunction v_star_trace;
    if (opts.v_star_for_trace) {
        v_star_trace = *opts.v_star_for_trace;
        check_value(mdp, v_star_trace);
    } else {
        v_star_trace = solve_optimal(mdp, opts.oracle_tol).value;
    }

    const long max_passes = std::max<long>(1, opts.max_iters > 0 ? opts.max_iters
                                                                 : pi_iteration_bound(mdp) + 1);
    QueryLedger ledger;
    ConvergenceTrace trace;
    trace.max_depth = max_depth;
    ActionValueTable u(num_states, mdp.num_actions());
    ValueFunction v;
    long changing_passes = 0;
    bool converged = false;

    for (long pass = 0; pass < max_passes; ++pass) {
        if (opts.eval_method == EvalMethod::direct_solve) {
            v = evaluate_policy_direct(mdp, policy);
            ledger.add_eval(static_cast<std::uint64_t>(num_states));
        } else {
            IterativeEvalResult ev = evaluate_policy_iterative(mdp, policy, opts.eval_tol);
            v = std::move(ev.value);
            ledger.add_eval(static_cast<std::uint64_t>(ev.sweeps) *
                            static_cast<std::uint64_t>(num_states));
        }

        if (opts.on_evaluate) opts.on_evaluate(static_cast<int>(pass), v);

        u.reset();
        ImproveStats stats = improve(v, u, ledger);
        Policy next = extract_greedy(u, policy);

        int changes = 0;
        for (int s = 0; s < num_states; ++s) changes += next[s] != policy[s];

        TraceRow row;
        row.iter = static_cast<int>(pass);
        row.dist_inf = inf_norm_diff(v_star_trace, v);
        row.policy_changes = changes;
        row.queries = ledger;
        row.states_improved_by_depth = std::move(stats.states_by_depth);
        row.deep_fraction = static_cast<double>(stats.deep_union) / num_states;
        trace.rows.push_back(std::move(row));

        if (changes == 0) {
            converged = true;
            break;
        }
        policy = std::move(next);
        ++changing_passes;
    }

    PlannerResult result;
    result.planner = std::move(name);
    result.policy = std::move(policy);
    if (!converged) v = evaluate_policy(mdp, result.policy, opts.eval_method, opts.eval_tol);
    result.value = std::move(v);
    result.trace = std::move(trace);
    result.converged = converged;
    result.iterations = converged ? std::max<long>(changing_passes - 1, 1) : changing_passes;
    result.mdp_fingerprint = mdp.fingerprint();
    return result;
}

inline std::vector<int> all_states(int num_states) {
    std::vector<int> states(num_states);
    std::iota(states.begin(), states.end(), 0);
    return states;
}

} // namespace detail

/// h-step policy iteration: evaluate, improve every state with a depth-h
/// lookahead, repeat while the policy changes.
inline PlannerResult run_h_pi(const TabularMdp& mdp, const Policy& pi0, int h,
                              const PlannerOptions& opts = {}) {
    if (h < 1) throw std::invalid_argument("run_h_pi: h must be >= 1");
    const std::vector<int> states = detail::all_states(mdp.num_states());
    return detail::run_improvement_loop(
        mdp, pi0, "hpi(" + std::to_string(h) + ")", h, opts,
        [&](const ValueFunction& v, ActionValueTable& u, QueryLedger& ledger) {
            improve_states(mdp, v, states, h, opts.backend, ledger, u);
            detail::ImproveStats stats;
            stats.states_by_depth.assign(h, 0);
            stats.states_by_depth[h - 1] = mdp.num_states();
            stats.deep_union = h > 1 ? mdp.num_states() : 0;
            return stats;
        });
}

/// Classic policy iteration (one-step improvement everywhere).
inline PlannerResult run_pi(const TabularMdp& mdp, const Policy& pi0,
                            const PlannerOptions& opts = {}) {
    PlannerResult result = run_h_pi(mdp, pi0, 1, opts);
    result.planner = "pi";
    return result;
}

/// Threshold-based adaptive lookahead. Every pass improves all states one
/// step, then re-improves with a depth-h_kappa lookahead exactly the states
/// whose one-step result still sits farther than kappa times the current
/// distance from the reference optimum (minus the correction beta, which
/// compensates for an approximate reference; beta = 0 is the exact variant).
inline PlannerResult run_tlpi(const TabularMdp& mdp, const Policy& pi0, double kappa,
                              const ValueFunction& v_star, double beta,
                              const PlannerOptions& opts = {}) {
    check_value(mdp, v_star);
    if (!(beta >= 0.0)) throw std::invalid_argument("run_tlpi: beta must be non-negative");
    const int deep_depth = h_kappa(kappa, mdp.discount());
    const std::vector<int> states = detail::all_states(mdp.num_states());
    std::string name = "tlpi(kappa=" + num_to_string(kappa) +
                       (beta > 0.0 ? ",beta=" + num_to_string(beta) : "") + ")";
    return detail::run_improvement_loop(
        mdp, pi0, std::move(name), deep_depth, opts,
        [&, deep_depth](const ValueFunction& v, ActionValueTable& u, QueryLedger& ledger) {
            detail::ImproveStats stats;
            stats.states_by_depth.assign(deep_depth, 0);
            improve_states(mdp, v, states, 1, opts.backend, ledger, u);
            stats.states_by_depth[0] = mdp.num_states();
            // A one-step re-improvement recomputes identical values, so the
            // deep phase only exists for h_kappa >= 2. Once the measured
            // distance is within the evaluation's own noise the contraction
            // test compares rounding error; the deep set is empty at that
            // point. A positive beta deliberately keeps firing near the end,
            // that is the approximation-distrust the correction encodes.
            const double dist_floor =
                beta > 0.0 ? 0.0
                           : (opts.eval_method == EvalMethod::iterative ? 10.0 * opts.eval_tol
                                                                        : 1e-12);
            if (deep_depth > 1 && inf_norm_diff(v_star, v) > dist_floor) {
                const double dist = inf_norm_diff(v_star, v);
                std::vector<int> deep;
                for (int s = 0; s < mdp.num_states(); ++s)
                    if (std::abs(v_star[s] - u.row_max(s)) > kappa * dist - beta)
                        deep.push_back(s);
                improve_states(mdp, v, deep, deep_depth, opts.backend, ledger, u);
                stats.states_by_depth[deep_depth - 1] = static_cast<int>(deep.size());
                stats.deep_union = static_cast<long>(deep.size());
            }
            return stats;
        });
}

/// Threshold planner driven by an approximate optimum known to be within
/// epsilon in max-norm; applies the matching correction beta = epsilon*(kappa+1).
inline PlannerResult run_tlpi_corrected(const TabularMdp& mdp, const Policy& pi0, double kappa,
                                        const ValueFunction& v_star_approx, double epsilon,
                                        const PlannerOptions& opts = {}) {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("run_tlpi_corrected: epsilon must be >= 0");
    return run_tlpi(mdp, pi0, kappa, v_star_approx, epsilon * (kappa + 1.0), opts);
}

/// Quantile-based adaptive lookahead. For each depth h with budget theta_h,
/// the ceil(theta_h * S) states currently farthest from the reference
/// optimum (judged against the partially updated table, so states already
/// re-improved this pass rank by their new values) receive a depth-h
/// improvement. order_slack_m inflates every budget by m/S, the slack that
/// keeps guarantees under an m-order-preserving approximate reference.
inline PlannerResult run_qlpi(const TabularMdp& mdp, const Policy& pi0,
                              const QuantileSchedule& schedule, const ValueFunction& v_star,
                              int order_slack_m, const PlannerOptions& opts = {}) {
    schedule.validate();
    check_value(mdp, v_star);
    if (order_slack_m < 0) throw std::invalid_argument("run_qlpi: order_slack_m must be >= 0");
    const int max_depth = schedule.max_depth();
    std::vector<double> thetas = schedule.thetas;
    if (order_slack_m > 0)
        for (double& t : thetas)
            t = std::min(1.0, t + static_cast<double>(order_slack_m) / mdp.num_states());
    std::string name = "qlpi(";
    for (std::size_t i = 0; i < thetas.size(); ++i)
        name += (i ? "," : "") + num_to_string(thetas[i]);
    name += ")";
    return detail::run_improvement_loop(
        mdp, pi0, std::move(name), max_depth, opts,
        [&, thetas, max_depth](const ValueFunction& v, ActionValueTable& u, QueryLedger& ledger) {
            detail::ImproveStats stats;
            stats.states_by_depth.assign(max_depth, 0);
            std::vector<char> deep_mark(mdp.num_states(), 0);
            std::vector<double> distances(mdp.num_states());
            for (int h = 1; h <= max_depth; ++h) {
                if (thetas[h - 1] <= 0.0) continue;
                for (int s = 0; s < mdp.num_states(); ++s)
                    distances[s] = std::abs(v_star[s] - u.row_max(s));
                QuantileCutoff cut = quantile_cutoff(distances, thetas[h - 1]);
                improve_states(mdp, v, cut.states, h, opts.backend, ledger, u);
                stats.states_by_depth[h - 1] = static_cast<int>(cut.states.size());
                if (h > 1)
                    for (int s : cut.states) deep_mark[s] = 1;
            }
            for (char m : deep_mark) stats.deep_union += m;
            return stats;
        });
}

} // namespace alpi
