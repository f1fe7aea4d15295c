#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "alpi/rng.hpp"

namespace alpi {

using ValueFunction = std::vector<double>;
using Policy = std::vector<int>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// One sparse transition entry: probability of landing in next_state.
struct Transition {
    int next_state;
    double probability;
};

/// Finite discounted MDP with sparse successor lists.
///
/// Invariants (checked by validate()):
///   - every (state, action) row has probabilities >= 0 summing to 1 within 1e-12,
///   - successor indices lie in [0, num_states),
///   - the discount is strictly inside (0, 1),
///   - rewards are finite.
///
/// Instances are filled once by a builder and treated as immutable afterwards;
/// all operators take const references and are safe to share across threads.
class TabularMdp {
  public:
    TabularMdp(int num_states, int num_actions, double discount)
        : num_states_(num_states), num_actions_(num_actions), discount_(discount),
          rewards_(static_cast<std::size_t>(num_states) * num_actions, 0.0),
          row_begin_(static_cast<std::size_t>(num_states) * num_actions + 1, 0) {
        if (num_states <= 0) throw std::invalid_argument("mdp: num_states must be positive");
        if (num_actions <= 0) throw std::invalid_argument("mdp: num_actions must be positive");
        if (!(discount > 0.0 && discount < 1.0))
            throw std::invalid_argument("mdp: discount must lie strictly inside (0,1)");
    }

    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }
    double discount() const { return discount_; }

    double reward(int s, int a) const { return rewards_[index(s, a)]; }
    void set_reward(int s, int a, double r) { rewards_[index(s, a)] = r; }

    std::span<const Transition> transitions(int s, int a) const {
        std::size_t i = index(s, a);
        return {transitions_.data() + row_begin_[i], row_begin_[i + 1] - row_begin_[i]};
    }

    /// Appends the transition row for (s, a). Rows must be set in row-major
    /// (state, action) order, each exactly once.
    void set_transitions(int s, int a, const std::vector<Transition>& row) {
        std::size_t i = index(s, a);
        if (i != rows_set_)
            throw std::logic_error("mdp: transition rows must be set in (state, action) order");
        for (const Transition& t : row) transitions_.push_back(t);
        row_begin_[i + 1] = transitions_.size();
        ++rows_set_;
    }

    void validate() const {
        if (rows_set_ != rewards_.size())
            throw std::invalid_argument("mdp: not all transition rows were set");
        for (int s = 0; s < num_states_; ++s) {
            for (int a = 0; a < num_actions_; ++a) {
                if (!std::isfinite(reward(s, a)))
                    throw std::invalid_argument("mdp: non-finite reward at state " +
                                                std::to_string(s) + ", action " + std::to_string(a));
                double sum = 0.0;
                for (const Transition& t : transitions(s, a)) {
                    if (t.next_state < 0 || t.next_state >= num_states_)
                        throw std::invalid_argument("mdp: successor index out of range at state " +
                                                    std::to_string(s));
                    if (!(t.probability >= 0.0))
                        throw std::invalid_argument("mdp: negative transition probability at state " +
                                                    std::to_string(s));
                    sum += t.probability;
                }
                if (std::abs(sum - 1.0) > 1e-12)
                    throw std::invalid_argument(
                        "mdp: transition probabilities for state " + std::to_string(s) +
                        ", action " + std::to_string(a) + " sum to " + std::to_string(sum));
            }
        }
    }

    /// Structural hash: identifies the MDP instance in result tables so that
    /// runs on different models are never compared by accident.
    std::uint64_t fingerprint() const {
        std::uint64_t h = CounterRng::mix(0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(num_states_));
        h = CounterRng::mix(h ^ static_cast<std::uint64_t>(num_actions_));
        h = CounterRng::mix(h ^ bits(discount_));
        for (double r : rewards_) h = CounterRng::mix(h ^ bits(r));
        for (const Transition& t : transitions_) {
            h = CounterRng::mix(h ^ static_cast<std::uint64_t>(t.next_state));
            h = CounterRng::mix(h ^ bits(t.probability));
        }
        return h;
    }

  private:
    static std::uint64_t bits(double x) {
        std::uint64_t u;
        static_assert(sizeof(u) == sizeof(x));
        __builtin_memcpy(&u, &x, sizeof(u));
        return u;
    }

    std::size_t index(int s, int a) const {
        if (s < 0 || s >= num_states_ || a < 0 || a >= num_actions_)
            throw std::out_of_range("mdp: state/action index out of range");
        return static_cast<std::size_t>(s) * num_actions_ + a;
    }

    int num_states_;
    int num_actions_;
    double discount_;
    std::vector<double> rewards_;
    std::vector<Transition> transitions_;
    std::vector<std::size_t> row_begin_;
    std::size_t rows_set_ = 0;
};

inline void check_policy(const TabularMdp& mdp, const Policy& policy) {
    if (static_cast<int>(policy.size()) != mdp.num_states())
        throw std::invalid_argument("policy: length does not match num_states");
    for (int a : policy)
        if (a < 0 || a >= mdp.num_actions())
            throw std::invalid_argument("policy: action index out of range");
}

inline void check_value(const TabularMdp& mdp, const ValueFunction& v) {
    if (static_cast<int>(v.size()) != mdp.num_states())
        throw std::invalid_argument("value function: length does not match num_states");
    for (double x : v)
        if (!std::isfinite(x))
            throw std::invalid_argument("value function: non-finite entry");
}

inline double inf_norm_diff(const ValueFunction& a, const ValueFunction& b) {
    if (a.size() != b.size()) throw std::invalid_argument("inf_norm_diff: length mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// S x A table of action values. Rows start at the +infinity sentinel, which
/// marks "not yet improved"; an improvement overwrites a whole row at once,
/// so a row is either all-sentinel or all-finite.
class ActionValueTable {
  public:
    ActionValueTable(int num_states, int num_actions)
        : num_states_(num_states), num_actions_(num_actions),
          values_(static_cast<std::size_t>(num_states) * num_actions, kInfinity) {}

    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }

    void reset() { values_.assign(values_.size(), kInfinity); }

    double at(int s, int a) const { return values_[static_cast<std::size_t>(s) * num_actions_ + a]; }

    bool improved(int s) const { return std::isfinite(at(s, 0)); }

    /// Largest entry of the row; +infinity for an untouched row.
    double row_max(int s) const {
        double m = -kInfinity;
        for (int a = 0; a < num_actions_; ++a) m = std::max(m, at(s, a));
        return m;
    }

    void set_row(int s, std::span<const double> q) {
        for (int a = 0; a < num_actions_; ++a)
            values_[static_cast<std::size_t>(s) * num_actions_ + a] = q[a];
    }

  private:
    int num_states_;
    int num_actions_;
    std::vector<double> values_;
};

} // namespace alpi
