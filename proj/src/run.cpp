#include "epimc/run.hpp"

#include "epimc/bmc.hpp"
#include "epimc/explicit.hpp"
#include "epimc/resolve.hpp"
#include "epimc/symbolic.hpp"
#include "epimc/umc.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

namespace epimc::run {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out << text;
}

bool selected(Backend chosen, Backend b) { return chosen == b || chosen == Backend::All; }

bool decided(Verdict v) { return v == Verdict::True || v == Verdict::False; }

} // namespace

Backend parse_backend(std::string_view name)
{
    if (name == "explicit")
        return Backend::Explicit;
    if (name == "obdd")
        return Backend::Obdd;
    if (name == "bmc")
        return Backend::Bmc;
    if (name == "umc")
        return Backend::Umc;
    if (name == "all")
        return Backend::All;
    throw InvalidArgument("unknown backend '" + std::string(name) + "'");
}

std::string_view backend_name(Backend b)
{
    switch (b) {
    case Backend::Explicit: return "explicit";
    case Backend::Obdd: return "obdd";
    case Backend::Bmc: return "bmc";
    case Backend::Umc: return "umc";
    case Backend::All: return "all";
    }
    return "?";
}

std::string_view verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    case Verdict::Unknown: return "unknown";
    case Verdict::Unsupported: return "unsupported";
    }
    return "?";
}

void RunConfig::validate() const
{
    const bool bmc = selected(backend, Backend::Bmc);
    if (k_max && !bmc)
        throw InvalidArgument("--kmax applies to the bmc backend only");
    if (emit_dimacs && !bmc)
        throw InvalidArgument("--emit-dimacs applies to the bmc backend only");
    if (max_states && !selected(backend, Backend::Explicit))
        throw InvalidArgument("--max-states applies to the explicit backend only");
    if (dpll && !(bmc || selected(backend, Backend::Umc)))
        throw InvalidArgument("--dpll applies to the bmc and umc backends only");
    if (!model && input_path.empty())
        throw InvalidArgument("no input model");
}

RunReport run(const RunConfig& config)
{
    config.validate();
    const auto start = Clock::now();
    RunReport report;
    report.input = config.model ? std::string("<generated>") : config.input_path;
    report.backend = std::string(backend_name(config.backend));

    const ispl::IsplModel model = config.model ? *config.model : ispl::parse_ispl(read_file(config.input_path));
    std::vector<logic::FormulaPtr> formulas = model.formulas;
    if (!config.formulas.empty()) {
        formulas.clear();
        for (const auto& text : config.formulas)
            formulas.push_back(logic::parse_formula(text));
    }
    for (const auto& f : formulas)
        check_names(model.system, *f);

    const auto& is = model.system;
    report.model["agents"] = is.agent_names();
    report.model["atoms"] = is.atoms.size();

    // Explicit graph: needed for the explicit backend and, under `all`, for
    // classifying BMC misses on models with deadlocks.
    std::optional<model::ExplicitModel> em;
    std::size_t deadlocks = 0;
    if (selected(config.backend, Backend::Explicit)) {
        const auto t = Clock::now();
        model::ExplicitOptions opts;
        if (config.max_states)
            opts.max_states = *config.max_states;
        opts.deterministic = config.deterministic;
        em = model::build_explicit_model(is, opts);
        for (std::uint32_t i = 0; i < em->size(); ++i)
            deadlocks += em->successors(i).empty();
        report.model["explicit_states"] = em->size();
        report.model["diameter"] = em->max_depth();
        report.model["deadlock_states"] = deadlocks;
        report.model["explicit_build_seconds"] = since(t);
    }

    const bool need_symbolic = config.backend != Backend::Explicit;
    std::unique_ptr<symbolic::SymbolicModel> sm;
    std::size_t reachable = 0;
    if (need_symbolic) {
        const auto t = Clock::now();
        sm = std::make_unique<symbolic::SymbolicModel>(is, symbolic::SymbolicModel::Options{config.deterministic});
        const auto count = sm->count_states(sm->reachable());
        reachable = count.convert_to<std::size_t>();
        report.model["reachable_states"] = count.str();
        report.model["state_bits"] = sm->encoding().state_bits();
        report.model["bdd_variables"] = sm->encoding().var_count;
        report.model["reach_iterations"] = sm->stats().reach_iterations;
        report.model["symbolic_build_seconds"] = since(t);
        if (!em) {
            auto& mgr = sm->manager();
            const auto dead = mgr.and_(sm->reachable(), mgr.negate(sm->pre_exists(sm->reachable())));
            deadlocks = sm->count_states(dead).convert_to<std::size_t>();
            report.model["deadlock_states"] = deadlocks;
        }
    }

    std::unique_ptr<umc::UmcEngine> engine;
    if (selected(config.backend, Backend::Umc)) {
        const auto t = Clock::now();
        umc::UmcOptions opts;
        opts.solver.cdcl = !config.dpll;
        engine = std::make_unique<umc::UmcEngine>(*sm, opts);
        report.model["umc_reach_seconds"] = since(t);
        report.model["umc_reach_iterations"] = engine->stats().reach_iterations;
    }

    json manifest = json::array();
    if (config.emit_dimacs)
        std::filesystem::create_directories(*config.emit_dimacs);

    bool unsupported_alone = false;
    for (std::size_t idx = 0; idx < formulas.size(); ++idx) {
        const auto& f = formulas[idx];
        FormulaReport fr;
        fr.text = logic::format_formula(f);
        const auto nnf = logic::to_nnf(f);
        fr.ectlk = logic::is_ectlk(*nnf);
        fr.past = logic::has_past_operators(*f);

        if (em) {
            BackendResult r;
            const auto t = Clock::now();
            r.verdict = model::holds_initially(*em, *f) ? Verdict::True : Verdict::False;
            r.seconds = since(t);
            r.stats["states"] = em->size();
            fr.results["explicit"] = r;
        }
        if (selected(config.backend, Backend::Obdd)) {
            BackendResult r;
            if (fr.past) {
                r.message = "the OBDD backend has no past operators";
            } else {
                const auto before = sm->stats();
                const auto t = Clock::now();
                r.verdict = sm->check(*f) ? Verdict::True : Verdict::False;
                r.seconds = since(t);
                r.stats["fixpoint_iterations"] = sm->stats().fixpoint_iterations - before.fixpoint_iterations;
                r.stats["common_knowledge_iterations"] =
                    sm->stats().common_knowledge_iterations - before.common_knowledge_iterations;
                r.stats["bdd_nodes"] = sm->manager().node_count();
            }
            fr.results["obdd"] = r;
        }
        if (engine) {
            BackendResult r;
            const auto before = engine->stats();
            const auto t = Clock::now();
            r.verdict = engine->check(*f) ? Verdict::True : Verdict::False;
            r.seconds = since(t);
            const auto& after = engine->stats();
            r.stats["eliminations"] = after.eliminations - before.eliminations;
            r.stats["blocking_clauses"] = after.blocking_clauses - before.blocking_clauses;
            r.stats["solver_calls"] = after.solver_calls - before.solver_calls;
            r.stats["fixpoint_iterations"] = after.fixpoint_iterations - before.fixpoint_iterations;
            fr.results["umc"] = r;
        }
        std::size_t bmc_k_max = 0;
        if (selected(config.backend, Backend::Bmc)) {
            BackendResult r;
            if (!fr.ectlk) {
                r.message = "negation normal form is outside ECTLK";
            } else {
                bmc::BmcOptions opts;
                opts.k_max = config.k_max.value_or(0);
                opts.solver.cdcl = !config.dpll;
                if (config.emit_dimacs) {
                    opts.on_cnf = [&](std::size_t k, const sat::Cnf& cnf) {
                        const std::string name = "f" + std::to_string(idx + 1) + "_k" + std::to_string(k) + ".cnf";
                        write_file(std::filesystem::path(*config.emit_dimacs) / name, sat::to_dimacs(cnf));
                        manifest.push_back({{"formula", idx + 1},
                                            {"text", fr.text},
                                            {"k", k},
                                            {"file", name},
                                            {"variables", cnf.num_vars()},
                                            {"clauses", cnf.clauses().size()}});
                    };
                }
                const auto t = Clock::now();
                const auto res = bmc::bmc_check(*sm, *f, opts);
                r.seconds = since(t);
                bmc_k_max = res.k_max;
                r.verdict = res.holds ? Verdict::True : Verdict::Unknown;
                if (!res.holds)
                    r.message = "no witness up to k = " + std::to_string(res.k_max);
                r.stats["k"] = res.k;
                r.stats["k_max"] = res.k_max;
                json bounds = json::array();
                for (const auto& b : res.bounds)
                    bounds.push_back({{"k", b.k},
                                      {"paths", b.paths},
                                      {"variables", b.variables},
                                      {"clauses", b.clauses},
                                      {"seconds", b.seconds},
                                      {"satisfiable", b.satisfiable}});
                r.stats["bounds"] = bounds;
            }
            fr.results["bmc"] = r;
        }

        // Agreement among the decided verdicts, then BMC against them.
        std::optional<Verdict> reference;
        for (const auto& [name, r] : fr.results) {
            if (name == "bmc" || !decided(r.verdict))
                continue;
            if (reference && *reference != r.verdict)
                fr.disagreement = true;
            reference = reference.value_or(r.verdict);
        }
        if (auto it = fr.results.find("bmc"); it != fr.results.end() && reference) {
            const Verdict b = it->second.verdict;
            if (b == Verdict::True && *reference == Verdict::False)
                fr.disagreement = true;
            if (b == Verdict::Unknown && *reference == Verdict::True && bmc_k_max >= reachable) {
                if (deadlocks > 0)
                    fr.divergence = "bmc: the witness needs a path ending in a deadlock state";
                else
                    fr.disagreement = true;
            }
        }
        if (config.backend != Backend::All) {
            const auto& r = fr.results.at(std::string(backend_name(config.backend)));
            unsupported_alone = unsupported_alone || r.verdict == Verdict::Unsupported;
        }
        report.formulas.push_back(std::move(fr));
    }

    if (config.emit_dimacs)
        write_file(std::filesystem::path(*config.emit_dimacs) / "manifest.json", json{{"files", manifest}}.dump(2) + "\n");

    bool disagreement = false, failed = false;
    for (const auto& fr : report.formulas) {
        disagreement = disagreement || fr.disagreement;
        std::optional<Verdict> v;
        for (const char* name : {"explicit", "obdd", "umc", "bmc"}) {
            auto it = fr.results.find(name);
            if (it != fr.results.end() && it->second.verdict != Verdict::Unsupported) {
                v = it->second.verdict;
                break;
            }
        }
        failed = failed || (v && *v != Verdict::True);
    }
    report.exit_code = disagreement ? kDisagreement : unsupported_alone ? kError : failed ? kSomeFail : kAllHold;
    report.seconds = since(start);
    return report;
}

json to_json(const RunReport& report)
{
    json out;
    out["input"] = report.input;
    out["backend"] = report.backend;
    out["model"] = report.model;
    out["seconds"] = report.seconds;
    out["exit_code"] = report.exit_code;
    json formulas = json::array();
    for (std::size_t i = 0; i < report.formulas.size(); ++i) {
        const auto& fr = report.formulas[i];
        json f{{"index", i + 1},
               {"text", fr.text},
               {"ectlk", fr.ectlk},
               {"past", fr.past},
               {"disagreement", fr.disagreement}};
        if (fr.divergence)
            f["divergence"] = *fr.divergence;
        json results = json::object();
        for (const auto& [name, r] : fr.results) {
            json j{{"verdict", verdict_name(r.verdict)}, {"seconds", r.seconds}, {"stats", r.stats}};
            if (!r.message.empty())
                j["message"] = r.message;
            results[name] = j;
        }
        f["results"] = results;
        formulas.push_back(f);
    }
    out["formulas"] = formulas;
    return out;
}

std::string to_text(const RunReport& report)
{
    std::ostringstream out;
    out << "input: " << report.input << "\n";
    out << "backend: " << report.backend << "\n";
    for (const auto& [key, value] : report.model.items())
        out << "  " << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
    for (std::size_t i = 0; i < report.formulas.size(); ++i) {
        const auto& fr = report.formulas[i];
        out << "[" << i + 1 << "] " << fr.text << "\n";
        for (const char* name : {"explicit", "obdd", "umc", "bmc"}) {
            auto it = fr.results.find(name);
            if (it == fr.results.end())
                continue;
            const BackendResult& r = it->second;
            out << "    " << name << ": " << verdict_name(r.verdict);
            if (r.verdict != Verdict::Unsupported) {
                char buf[32];
                std::snprintf(buf, sizeof buf, " (%.3fs)", r.seconds);
                out << buf;
            }
            if (!r.message.empty())
                out << " - " << r.message;
            out << "\n";
        }
        if (fr.disagreement)
            out << "    DISAGREEMENT between backends\n";
        if (fr.divergence)
            out << "    note: " << *fr.divergence << "\n";
    }
    out << "exit: " << report.exit_code << "\n";
    return out.str();
}

} // namespace epimc::run
