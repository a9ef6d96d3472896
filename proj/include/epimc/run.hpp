#pragma once

// Batch driver behind the command-line tool: runs the selected backends on
// the formulas of a model and collects verdicts, timings and statistics.

#include "epimc/formula.hpp"
#include "epimc/ispl.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace epimc::run {

enum class Backend : std::uint8_t { Explicit, Obdd, Bmc, Umc, All };
enum class Format : std::uint8_t { Text, Json };

Backend parse_backend(std::string_view name);
std::string_view backend_name(Backend b);

struct RunConfig {
    std::string input_path;
    // Model given directly (used instead of reading input_path when set).
    std::optional<ispl::IsplModel> model;
    Backend backend = Backend::All;
    // Formulas to check; the model's own formulas when empty.
    std::vector<std::string> formulas;
    // BMC only: largest bound (0: number of reachable states).
    std::optional<std::size_t> k_max;
    // Explicit only: state cap of the reachability closure.
    std::optional<std::size_t> max_states;
    Format format = Format::Text;
    // BMC only: directory for one DIMACS file per bound plus manifest.json.
    std::optional<std::string> emit_dimacs;
    // Fail on an agent with two matching evolution rules.
    bool deterministic = false;
    // BMC and UMC only: plain chronological DPLL instead of clause learning.
    bool dpll = false;

    // Throws InvalidArgument for flags the selected backend does not use.
    void validate() const;
};

enum class Verdict : std::uint8_t { True, False, Unknown, Unsupported };
std::string_view verdict_name(Verdict v);

struct BackendResult {
    Verdict verdict = Verdict::Unsupported;
    double seconds = 0;
    std::string message; // reason for Unknown / Unsupported
    nlohmann::json stats = nlohmann::json::object();
};

struct FormulaReport {
    std::string text;
    bool ectlk = false; // the negation normal form lies in ECTLK
    bool past = false;
    std::map<std::string, BackendResult> results; // by backend name
    bool disagreement = false;
    // Set when BMC misses a true formula on a model with deadlock states,
    // which bounded paths of exactly k transitions cannot represent.
    std::optional<std::string> divergence;
};

struct RunReport {
    std::string input;
    std::string backend;
    nlohmann::json model = nlohmann::json::object();
    std::vector<FormulaReport> formulas;
    double seconds = 0;
    int exit_code = 0;
};

// Exit codes of the command-line tool.
inline constexpr int kAllHold = 0;
inline constexpr int kSomeFail = 1;
inline constexpr int kError = 2;
inline constexpr int kDisagreement = 3;

// Loads the model, runs the backends and fills in the exit code. File and
// parse errors propagate as exceptions (IsplError carries line numbers).
RunReport run(const RunConfig& config);

nlohmann::json to_json(const RunReport& report);
std::string to_text(const RunReport& report);

} // namespace epimc::run
