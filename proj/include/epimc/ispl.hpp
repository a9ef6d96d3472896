#pragma once

// Reader and writer for the ISPL-style input language (grammar in
// docs/grammar.md).

#include "epimc/formula.hpp"
#include "epimc/system.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace epimc::ispl {

struct Diagnostic {
    enum class Severity : std::uint8_t { Error, Warning };

    Severity severity = Severity::Error;
    std::string message;
    int line = 1;
    int column = 1;
    std::vector<std::string> expected;

    // "line:column: error: message"
    std::string to_string() const;
};

struct IsplModel {
    model::InterpretedSystem system;
    std::vector<logic::FormulaPtr> formulas;
};

struct ParseResult {
    std::optional<IsplModel> model; // set iff no error diagnostics
    std::vector<Diagnostic> diagnostics;
};

class IsplError : public Error {
public:
    explicit IsplError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

// Total on arbitrary input: never throws for malformed text.
ParseResult parse_ispl_diagnostics(std::string_view source);

// Throws IsplError carrying every diagnostic when the source is rejected.
IsplModel parse_ispl(std::string_view source);

std::string serialize_ispl(const model::InterpretedSystem& is, const std::vector<logic::FormulaPtr>& formulas);
inline std::string serialize_ispl(const IsplModel& m) { return serialize_ispl(m.system, m.formulas); }

// Guard syntax when `owner` is set (own local state as `Lstate=s`),
// valuation syntax otherwise.
std::string format_condition(const model::InterpretedSystem& is, const model::Condition& c,
                             std::optional<std::uint32_t> owner);

} // namespace epimc::ispl
