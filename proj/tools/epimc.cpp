// Command-line front end: check, gen-dc, gen-random, stats.

#include "epimc/bench.hpp"
#include "epimc/explicit.hpp"
#include "epimc/random_formula.hpp"
#include "epimc/run.hpp"
#include "epimc/symbolic.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace epimc;
using nlohmann::json;

namespace {

void emit(const std::string& text, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path);
    out << text;
}

std::string read_input(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json model_stats(const ispl::IsplModel& m, std::size_t max_states)
{
    const auto& is = m.system;
    json out;
    out["agents"] = is.agent_names();
    bdd::BigCount space = 1;
    json locals = json::object();
    for (const auto& a : is.agents) {
        locals[a.name] = a.local_states.size();
        space *= a.local_states.size();
    }
    out["local_states"] = locals;
    out["global_state_space"] = space.str();
    out["formulas"] = m.formulas.size();

    symbolic::SymbolicModel sm(is);
    auto& mgr = sm.manager();
    out["state_bits"] = sm.encoding().state_bits();
    out["bdd_variables"] = sm.encoding().var_count;
    out["reachable_states"] = sm.count_states(sm.reachable()).str();
    out["reach_iterations"] = sm.stats().reach_iterations;
    out["reachable_bdd_nodes"] = mgr.dag_size(sm.reachable());
    out["transition_bdd_nodes"] = mgr.dag_size(sm.state_transition());
    out["bdd_nodes_allocated"] = mgr.node_count();
    try {
        model::ExplicitOptions opts;
        opts.max_states = max_states;
        const auto em = model::build_explicit_model(is, opts);
        std::size_t dead = 0;
        for (std::uint32_t i = 0; i < em.size(); ++i)
            dead += em.successors(i).empty();
        out["explicit_states"] = em.size();
        out["diameter"] = em.max_depth();
        out["deadlock_states"] = dead;
    } catch (const StateExplosionError&) {
        out["explicit_states"] = nullptr;
    }
    return out;
}

std::string stats_text(const json& j)
{
    std::ostringstream out;
    for (const auto& [key, value] : j.items())
        out << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
    return out.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Model checker for multi-agent systems with temporal, epistemic and past-time operators"};
    app.require_subcommand(1);

    run::RunConfig cfg;
    std::string backend = "all", format = "text", output;
    std::size_t kmax = 0, max_states = 0;
    std::string dimacs_dir;

    auto* check = app.add_subcommand("check", "Check the formulas of an ISPL model");
    check->add_option("input", cfg.input_path, "ISPL file")->required();
    check->add_option("--backend", backend, "explicit|obdd|bmc|umc|all")
        ->check(CLI::IsMember({"explicit", "obdd", "bmc", "umc", "all"}));
    check->add_option("--formula", cfg.formulas, "Formula to check instead of the model's own (repeatable)");
    auto* kmax_opt = check->add_option("--kmax", kmax, "Largest BMC bound (default: reachable states)");
    auto* states_opt = check->add_option("--max-states", max_states, "State cap of the explicit backend");
    check->add_option("--format", format, "text|json")->check(CLI::IsMember({"text", "json"}));
    auto* dimacs_opt = check->add_option("--emit-dimacs", dimacs_dir, "Write one DIMACS file per BMC bound here");
    check->add_flag("--deterministic", cfg.deterministic, "Reject agents with two matching evolution rules");
    check->add_flag("--dpll", cfg.dpll, "Plain DPLL without clause learning in the SAT solver (bmc, umc)");
    check->add_option("-o,--output", output, "Report file (default: standard output)");

    std::uint32_t dc_n = 3;
    auto* gen_dc = app.add_subcommand("gen-dc", "Write the dining cryptographers model for n agents");
    gen_dc->add_option("n", dc_n, "Number of cryptographers (3..12)")->required();
    gen_dc->add_option("-o,--output", output, "ISPL file (default: standard output)");

    std::uint64_t seed = 0;
    int n_formulas = 10, depth = 3;
    std::string fragment = "ctlk";
    auto* gen_random = app.add_subcommand("gen-random", "Write a seeded random interpreted system");
    gen_random->add_option("--seed", seed, "Generator seed");
    gen_random->add_option("--formulas", n_formulas, "Number of random formulas");
    gen_random->add_option("--depth", depth, "Maximal formula depth");
    gen_random->add_option("--fragment", fragment, "ctlk|ctlpk|ectlk|universal")
        ->check(CLI::IsMember({"ctlk", "ctlpk", "ectlk", "universal"}));
    gen_random->add_option("-o,--output", output, "ISPL file (default: standard output)");

    std::string stats_input;
    std::size_t stats_cap = 1'000'000;
    auto* stats = app.add_subcommand("stats", "Report state-space and BDD sizes of a model");
    stats->add_option("input", stats_input, "ISPL file")->required();
    stats->add_option("--max-states", stats_cap, "State cap of the explicit count");
    stats->add_option("--format", format, "text|json")->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : run::kError;
    }

    try {
        if (*check) {
            cfg.backend = run::parse_backend(backend);
            cfg.format = format == "json" ? run::Format::Json : run::Format::Text;
            if (*kmax_opt)
                cfg.k_max = kmax;
            if (*states_opt)
                cfg.max_states = max_states;
            if (*dimacs_opt)
                cfg.emit_dimacs = dimacs_dir;
            const auto report = run::run(cfg);
            emit(cfg.format == run::Format::Json ? run::to_json(report).dump(2) + "\n" : run::to_text(report), output);
            return report.exit_code;
        }
        if (*gen_dc) {
            const auto dc = bench::generate_dc(dc_n);
            emit(ispl::serialize_ispl(dc.system, dc.formulas()), output);
            return 0;
        }
        if (*gen_random) {
            const auto is = model::generate_random_system(seed);
            std::mt19937_64 rng(seed);
            const logic::Fragment frag = fragment == "ctlpk"   ? logic::Fragment::Ctlpk
                                         : fragment == "ectlk" ? logic::Fragment::Ectlk
                                         : fragment == "universal" ? logic::Fragment::Universal
                                                                   : logic::Fragment::Ctlk;
            std::vector<std::string> atoms;
            for (const auto& a : is.atoms)
                atoms.push_back(a.name);
            logic::FormulaVocabulary vocab{atoms, static_cast<std::uint32_t>(is.agents.size())};
            std::vector<logic::FormulaPtr> fs;
            for (int i = 0; i < n_formulas; ++i)
                fs.push_back(logic::random_formula(rng, vocab, frag, depth));
            emit(ispl::serialize_ispl(is, fs), output);
            return 0;
        }
        if (*stats) {
            const auto m = ispl::parse_ispl(read_input(stats_input));
            const auto j = model_stats(m, stats_cap);
            emit(format == "json" ? j.dump(2) + "\n" : stats_text(j), "");
            return 0;
        }
    } catch (const ispl::IsplError& e) {
        const std::string where = *check ? cfg.input_path : stats_input;
        for (const auto& d : e.diagnostics())
            std::cerr << where << ":" << d.to_string() << "\n";
        return run::kError;
    } catch (const text::ParseError& e) {
        std::cerr << "formula:" << e.line() << ":" << e.column() << ": error: " << e.bare_message() << "\n";
        return run::kError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return run::kError;
    }
    return run::kError;
}
