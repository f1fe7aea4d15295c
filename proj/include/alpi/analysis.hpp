#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alpi/bellman.hpp"
#include "alpi/format.hpp"
#include "alpi/mdp.hpp"
#include "alpi/planners.hpp"

namespace alpi {

/// Per-state contraction of one optimal backup towards the optimum:
/// ratio(s) = |V*(s) - T[V_pi](s)| / ||V* - V_pi||_inf, and the effective
/// lookahead log_gamma(ratio). States the backup lands exactly on the
/// optimum get the cap (they contract "at least this deep").
struct ContractionProfile {
    std::vector<double> ratio;
    std::vector<double> effective_lookahead; // capped at cap
    double cap = 20.0;
    bool valid = false;
};

inline ContractionProfile contraction_profile(const TabularMdp& mdp, const ValueFunction& v_star,
                                              const ValueFunction& v_pi, double cap = 20.0) {
    check_value(mdp, v_star);
    check_value(mdp, v_pi);
    const double dist = inf_norm_diff(v_star, v_pi);
    if (dist <= 1e-12)
        throw std::invalid_argument(
            "contraction_profile: v_pi coincides with v_star, profile undefined");
    ContractionProfile profile;
    profile.cap = cap;
    profile.valid = true;
    ValueFunction backed = apply_optimality_operator(mdp, v_pi);
    profile.ratio.resize(mdp.num_states());
    profile.effective_lookahead.resize(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s) {
        double rho = std::abs(v_star[s] - backed[s]) / dist;
        profile.ratio[s] = rho;
        double e = rho > 0.0 ? std::log(rho) / std::log(mdp.discount()) : kInfinity;
        profile.effective_lookahead[s] = std::min(e, cap);
    }
    return profile;
}

/// Fractions of states per effective-lookahead bin. Bin i spans
/// [edges[i], edges[i+1]); the last bin is open-ended so the capped values
/// always land somewhere. Fractions sum to one.
inline std::vector<std::pair<double, double>> histogram(const ContractionProfile& profile,
                                                        const std::vector<double>& edges) {
    if (profile.effective_lookahead.empty())
        throw std::invalid_argument("histogram: empty profile");
    if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()))
        throw std::invalid_argument("histogram: need at least two sorted bin edges");
    std::vector<std::pair<double, double>> bins;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) bins.emplace_back(edges[i], 0.0);
    const double weight = 1.0 / static_cast<double>(profile.effective_lookahead.size());
    for (double e : profile.effective_lookahead) {
        std::size_t b = 0;
        while (b + 1 < bins.size() && e >= edges[b + 1]) ++b;
        bins[b].second += weight;
    }
    return bins;
}

struct QueryComparisonRow {
    std::string planner;
    std::uint64_t total_queries = 0;
    long iterations = 0;
};

/// Total simulator queries per converged planner run on one MDP, sorted
/// ascending (preparation queries such as an aggregate pre-solve included).
inline std::vector<QueryComparisonRow> compare_query_counts(
    const std::vector<PlannerResult>& results) {
    if (results.empty()) return {};
    for (const PlannerResult& r : results) {
        if (!r.converged)
            throw std::invalid_argument("compare_query_counts: run did not converge: " + r.planner);
        if (r.mdp_fingerprint != results.front().mdp_fingerprint)
            throw std::invalid_argument("compare_query_counts: results mix different MDPs");
    }
    std::vector<QueryComparisonRow> rows;
    for (const PlannerResult& r : results)
        rows.push_back({r.planner, r.total_queries(), r.iterations});
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.total_queries < b.total_queries; });
    return rows;
}

inline std::string comparison_to_csv(const std::vector<QueryComparisonRow>& rows) {
    std::string out = "planner,total_queries,iterations\n";
    for (const QueryComparisonRow& r : rows)
        out += r.planner + "," + num_to_string(r.total_queries) + "," +
               num_to_string(static_cast<std::int64_t>(r.iterations)) + "\n";
    return out;
}

} // namespace alpi
