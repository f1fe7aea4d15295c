#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alpi/format.hpp"

namespace alpi {

/// Simulator-query counters. One query is one fetch of (reward, successor
/// distribution) for a single state-action pair. Evaluation queries and
/// improvement queries are tracked separately, the latter per lookahead
/// depth. Counters only ever grow during a run.
struct QueryLedger {
    std::uint64_t eval_queries = 0;
    std::vector<std::uint64_t> improve_queries_by_depth; // index h-1 holds depth h

    void add_eval(std::uint64_t n) { eval_queries += n; }

    void add_improve(int depth, std::uint64_t n) {
        if (depth < 1) throw std::invalid_argument("query ledger: depth must be >= 1");
        if (static_cast<int>(improve_queries_by_depth.size()) < depth)
            improve_queries_by_depth.resize(depth, 0);
        improve_queries_by_depth[depth - 1] += n;
    }

    std::uint64_t improve_queries(int depth) const {
        if (depth < 1 || depth > static_cast<int>(improve_queries_by_depth.size())) return 0;
        return improve_queries_by_depth[depth - 1];
    }

    std::uint64_t improve_total() const {
        std::uint64_t t = 0;
        for (std::uint64_t q : improve_queries_by_depth) t += q;
        return t;
    }

    std::uint64_t total() const { return eval_queries + improve_total(); }

    void merge(const QueryLedger& other) {
        eval_queries += other.eval_queries;
        if (improve_queries_by_depth.size() < other.improve_queries_by_depth.size())
            improve_queries_by_depth.resize(other.improve_queries_by_depth.size(), 0);
        for (std::size_t i = 0; i < other.improve_queries_by_depth.size(); ++i)
            improve_queries_by_depth[i] += other.improve_queries_by_depth[i];
    }

    /// Snapshot as CSV rows "phase,depth,queries". Evaluation uses depth 0.
    std::string to_csv() const {
        std::string out = "phase,depth,queries\n";
        out += "eval,0," + num_to_string(eval_queries) + "\n";
        for (std::size_t i = 0; i < improve_queries_by_depth.size(); ++i)
            out += "improve," + num_to_string(static_cast<int>(i + 1)) + "," +
                   num_to_string(improve_queries_by_depth[i]) + "\n";
        return out;
    }
};

} // namespace alpi
