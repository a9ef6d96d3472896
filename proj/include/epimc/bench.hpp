#pragma once

// Dining cryptographers benchmark generator.
//
// Cryptographer i sees its own coin and the coin of its left neighbour
// (i-1, cyclically), knows whether it paid, and after the announcements
// records the parity of the "different" utterances. The environment tosses
// all coins and picks the payer (0 for nobody) in a single first step.

#include "epimc/formula.hpp"
#include "epimc/system.hpp"

#include <cstdint>
#include <vector>

namespace epimc::bench {

struct DcInstance {
    model::InterpretedSystem system;
    // At the initial state: every cryptographer i that sees odd parity and
    // did not pay knows after the announcements that someone else paid,
    // without knowing who.
    logic::FormulaPtr specification;
    // AG of the specification, so the premise is met in some states.
    logic::FormulaPtr invariant;
    // EF(odd and not paid1).
    logic::FormulaPtr witness;

    std::vector<logic::FormulaPtr> formulas() const { return {specification, invariant, witness}; }
};

// Throws InvalidArgument for n < 3 or n > 12.
DcInstance generate_dc(std::uint32_t n);

std::string crypt_name(std::uint32_t i); // 1-based

} // namespace epimc::bench
