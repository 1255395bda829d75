#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "oda/errors.hpp"

namespace oda {

// Tiny deterministic tabular MDP used as an exact oracle environment in
// Q-learning tests.
struct SyntheticMdp {
    struct Entry {
        std::size_t next = 0;
        double cost = 0.0;
    };

    // table[state][action]
    std::vector<std::vector<Entry>> table;

    std::size_t n_states() const { return table.size(); }
    std::size_t n_actions() const { return table.empty() ? 0 : table[0].size(); }

    Entry step(std::size_t state, std::size_t action) const {
        if (state >= table.size() || action >= table[state].size())
            throw IndexError("synthetic MDP lookup out of range: state " + std::to_string(state) +
                             ", action " + std::to_string(action));
        return table[state][action];
    }
};

}  // namespace oda
