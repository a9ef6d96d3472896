#pragma once

// Seeded random formulas for differential testing.

#include "epimc/formula.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace epimc::logic {

enum class Fragment : std::uint8_t {
    Ctlk,      // every CTLK operator, no past
    Ctlpk,     // CTLK plus AY and AH
    Ectlk,     // existential operators and diamonds over literals
    Universal, // universal operators and boxes over literals
};

struct FormulaVocabulary {
    std::vector<std::string> atoms;
    std::uint32_t agents = 1; // agents are referenced by 1-based number
};

FormulaPtr random_formula(std::mt19937_64& rng, const FormulaVocabulary& vocab, Fragment fragment, int max_depth);

} // namespace epimc::logic
