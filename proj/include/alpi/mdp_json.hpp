#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "alpi/mdp.hpp"

namespace alpi {

/// Interchange schema:
/// {
///   "num_states": S, "num_actions": A, "gamma": g,
///   "rewards": [[r per action] per state],
///   "transitions": [[[ [next, prob], ... ] per action] per state]
/// }
inline nlohmann::json mdp_to_json(const TabularMdp& mdp) {
    nlohmann::json j;
    j["num_states"] = mdp.num_states();
    j["num_actions"] = mdp.num_actions();
    j["gamma"] = mdp.discount();
    auto& rewards = j["rewards"] = nlohmann::json::array();
    auto& transitions = j["transitions"] = nlohmann::json::array();
    for (int s = 0; s < mdp.num_states(); ++s) {
        nlohmann::json row_r = nlohmann::json::array();
        nlohmann::json row_t = nlohmann::json::array();
        for (int a = 0; a < mdp.num_actions(); ++a) {
            row_r.push_back(mdp.reward(s, a));
            nlohmann::json entries = nlohmann::json::array();
            for (const Transition& t : mdp.transitions(s, a))
                entries.push_back({t.next_state, t.probability});
            row_t.push_back(std::move(entries));
        }
        rewards.push_back(std::move(row_r));
        transitions.push_back(std::move(row_t));
    }
    return j;
}

inline TabularMdp mdp_from_json(const nlohmann::json& j) {
    const int num_states = j.at("num_states").get<int>();
    const int num_actions = j.at("num_actions").get<int>();
    TabularMdp mdp(num_states, num_actions, j.at("gamma").get<double>());
    const auto& rewards = j.at("rewards");
    const auto& transitions = j.at("transitions");
    if (static_cast<int>(rewards.size()) != num_states ||
        static_cast<int>(transitions.size()) != num_states)
        throw std::invalid_argument("mdp json: table sizes do not match num_states");
    for (int s = 0; s < num_states; ++s) {
        if (static_cast<int>(rewards[s].size()) != num_actions ||
            static_cast<int>(transitions[s].size()) != num_actions)
            throw std::invalid_argument("mdp json: row sizes do not match num_actions");
        for (int a = 0; a < num_actions; ++a) {
            mdp.set_reward(s, a, rewards[s][a].get<double>());
            std::vector<Transition> row;
            for (const auto& entry : transitions[s][a])
                row.push_back({entry.at(0).get<int>(), entry.at(1).get<double>()});
            mdp.set_transitions(s, a, row);
        }
    }
    mdp.validate();
    return mdp;
}

inline void save_mdp(const TabularMdp& mdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_mdp: cannot open " + path);
    out << mdp_to_json(mdp).dump(2) << '\n';
}

inline TabularMdp load_mdp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_mdp: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return mdp_from_json(j);
}

} // namespace alpi
