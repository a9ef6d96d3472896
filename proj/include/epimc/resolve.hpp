#pragma once

// Binding formula names (atoms, agent references, groups) to a system.

#include "epimc/formula.hpp"
#include "epimc/system.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace epimc {

// An agent reference is either a declared agent name or a 1-based index.
std::uint32_t resolve_agent(const model::InterpretedSystem& is, std::string_view ref);

// Sorted, duplicate-free agent indices; nullopt stands for every agent.
std::vector<std::uint32_t> resolve_group(const model::InterpretedSystem& is, const logic::Group& group);

std::uint32_t resolve_atom(const model::InterpretedSystem& is, std::string_view name);

// Throws NameResolutionError on the first undeclared name in `f`.
void check_names(const model::InterpretedSystem& is, const logic::Formula& f);

} // namespace epimc
