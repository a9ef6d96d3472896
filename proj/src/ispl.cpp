#include "epimc/ispl.hpp"

#include "epimc/lexer.hpp"
#include "epimc/resolve.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace epimc::ispl {

std::string Diagnostic::to_string() const
{
    return std::to_string(line) + ":" + std::to_string(column) + ": " +
           (severity == Severity::Error ? "error: " : "warning: ") + message;
}

namespace {

std::string join_messages(const std::vector<Diagnostic>& ds)
{
    std::string out;
    for (const auto& d : ds) {
        if (!out.empty())
            out += "\n";
        out += d.to_string();
    }
    return out;
}

} // namespace

IsplError::IsplError(std::vector<Diagnostic> diagnostics)
    : Error(join_messages(diagnostics)), diagnostics_(std::move(diagnostics))
{
}

namespace {

using text::Token;
using text::TokenKind;
using text::TokenStream;

constexpr int kMaxConditionNesting = 400;

struct RawCond {
    enum class Kind : std::uint8_t { True, False, Not, And, Or, OwnLocal, AgentLocal, AgentAction };
    Kind kind = Kind::True;
    Token at;    // first token, for diagnostics
    Token agent; // AgentLocal / AgentAction
    Token value;
    std::vector<RawCond> children;
};

struct RawAgent {
    Token name;
    std::vector<Token> locals;
    std::vector<Token> actions;
    std::vector<std::pair<Token, std::vector<Token>>> protocol;
    std::vector<std::pair<Token, RawCond>> evolution;
};

struct RawModel {
    std::vector<RawAgent> agents;
    std::optional<Token> evaluation;
    std::vector<std::pair<Token, RawCond>> atoms;
    std::optional<Token> init;
    std::vector<std::pair<Token, Token>> init_assignments;
    std::optional<Token> formulae;
    std::vector<std::pair<Token, logic::FormulaPtr>> formulas;
    Token end;
};

class SyntaxParser {
public:
    explicit SyntaxParser(TokenStream& ts) : ts_(ts) {}

    RawModel parse(std::vector<Diagnostic>& diags)
    {
        RawModel m;
        while (!ts_.at(TokenKind::End)) {
            const Token head = ts_.peek();
            if (ts_.accept_word("Agent")) {
                m.agents.push_back(agent());
            } else if (ts_.accept_word("Evaluation")) {
                if (m.evaluation)
                    diags.push_back(error(head, "duplicate Evaluation section"));
                m.evaluation = head;
                evaluation(m);
            } else if (ts_.accept_word("InitStates")) {
                if (m.init)
                    diags.push_back(error(head, "duplicate InitStates section"));
                m.init = head;
                init_states(m);
            } else if (ts_.accept_word("Formulae")) {
                if (m.formulae)
                    diags.push_back(error(head, "duplicate Formulae section"));
                m.formulae = head;
                formulae(m);
            } else {
                ts_.fail({"'Agent'", "'Evaluation'", "'InitStates'", "'Formulae'", "end of input"});
            }
        }
        m.end = ts_.peek();
        return m;
    }

    static Diagnostic error(const Token& at, std::string message)
    {
        Diagnostic d;
        d.message = std::move(message);
        d.line = at.line;
        d.column = at.column;
        return d;
    }

private:
    bool at_end_of(std::string_view section) const
    {
        return ts_.at_word("end") && ts_.peek(1).kind == TokenKind::Ident && ts_.peek(1).text == section;
    }

    void close(std::string_view section)
    {
        ts_.expect_word("end");
        ts_.expect_word(section);
        ts_.accept(TokenKind::Semicolon);
    }

    std::vector<Token> name_set()
    {
        std::vector<Token> out;
        ts_.expect(TokenKind::LBrace);
        if (ts_.accept(TokenKind::RBrace))
            return out;
        out.push_back(ts_.expect(TokenKind::Ident));
        while (ts_.accept(TokenKind::Comma))
            out.push_back(ts_.expect(TokenKind::Ident));
        if (!ts_.accept(TokenKind::RBrace))
            ts_.fail({"','", "'}'"});
        return out;
    }

    RawAgent agent()
    {
        RawAgent a;
        a.name = ts_.expect(TokenKind::Ident);
        ts_.expect_word("Lstate");
        ts_.expect(TokenKind::Equals);
        a.locals = name_set();
        ts_.expect(TokenKind::Semicolon);
        ts_.expect_word("Action");
        ts_.expect(TokenKind::Equals);
        a.actions = name_set();
        ts_.accept(TokenKind::Semicolon);

        ts_.expect_word("Protocol");
        ts_.expect(TokenKind::Colon);
        while (!at_end_of("Protocol")) {
            Token state = ts_.expect(TokenKind::Ident);
            ts_.expect(TokenKind::Colon);
            auto acts = name_set();
            ts_.expect(TokenKind::Semicolon);
            a.protocol.emplace_back(std::move(state), std::move(acts));
        }
        close("Protocol");

        ts_.expect_word("Ev");
        ts_.expect(TokenKind::Colon);
        while (!at_end_of("Ev")) {
            Token target = ts_.expect(TokenKind::Ident);
            ts_.expect_word("if");
            auto guard = condition(0);
            ts_.expect(TokenKind::Semicolon);
            a.evolution.emplace_back(std::move(target), std::move(guard));
        }
        close("Ev");
        close("Agent");
        return a;
    }

    void evaluation(RawModel& m)
    {
        while (!at_end_of("Evaluation")) {
            Token name = ts_.expect(TokenKind::Ident);
            ts_.expect_word("if");
            auto cond = condition(0);
            ts_.expect(TokenKind::Semicolon);
            m.atoms.emplace_back(std::move(name), std::move(cond));
        }
        close("Evaluation");
    }

    void init_states(RawModel& m)
    {
        if (!at_end_of("InitStates")) {
            do {
                Token agent = ts_.expect(TokenKind::Ident);
                ts_.expect(TokenKind::Dot);
                ts_.expect_word("Lstate");
                ts_.expect(TokenKind::Equals);
                Token state = ts_.expect(TokenKind::Ident);
                m.init_assignments.emplace_back(std::move(agent), std::move(state));
            } while (ts_.accept_word("and"));
            ts_.expect(TokenKind::Semicolon);
        }
        close("InitStates");
    }

    void formulae(RawModel& m)
    {
        while (!at_end_of("Formulae")) {
            Token start = ts_.peek();
            auto f = logic::parse_formula(ts_);
            if (!ts_.at(TokenKind::Semicolon))
                ts_.fail({"'and'", "'or'", "'->'", "';'"});
            ts_.next();
            m.formulas.emplace_back(std::move(start), std::move(f));
        }
        close("Formulae");
    }

    RawCond condition(int nesting)
    {
        if (nesting > kMaxConditionNesting)
            ts_.fail_at(ts_.peek(), "condition nesting exceeds " + std::to_string(kMaxConditionNesting) + " levels");
        RawCond lhs = conjunction(nesting);
        if (!ts_.at_word("or"))
            return lhs;
        RawCond out;
        out.kind = RawCond::Kind::Or;
        out.at = lhs.at;
        out.children.push_back(std::move(lhs));
        while (ts_.accept_word("or"))
            out.children.push_back(conjunction(nesting));
        return out;
    }

    RawCond conjunction(int nesting)
    {
        RawCond lhs = factor(nesting);
        if (!ts_.at_word("and"))
            return lhs;
        RawCond out;
        out.kind = RawCond::Kind::And;
        out.at = lhs.at;
        out.children.push_back(std::move(lhs));
        while (ts_.accept_word("and"))
            out.children.push_back(factor(nesting));
        return out;
    }

    RawCond factor(int nesting)
    {
        if (nesting > kMaxConditionNesting)
            ts_.fail_at(ts_.peek(), "condition nesting exceeds " + std::to_string(kMaxConditionNesting) + " levels");
        RawCond c;
        c.at = ts_.peek();
        if (ts_.accept(TokenKind::LParen)) {
            RawCond inner = condition(nesting + 1);
            ts_.expect(TokenKind::RParen);
            return inner;
        }
        if (ts_.accept_word("not")) {
            c.kind = RawCond::Kind::Not;
            c.children.push_back(factor(nesting + 1));
            return c;
        }
        if (ts_.accept_word("true")) {
            c.kind = RawCond::Kind::True;
            return c;
        }
        if (ts_.accept_word("false")) {
            c.kind = RawCond::Kind::False;
            return c;
        }
        if (ts_.at_word("Lstate") && ts_.peek(1).kind == TokenKind::Equals) {
            ts_.next();
            ts_.next();
            c.kind = RawCond::Kind::OwnLocal;
            c.value = ts_.expect(TokenKind::Ident);
            return c;
        }
        if (!ts_.at(TokenKind::Ident))
            ts_.fail({"'('", "'not'", "'true'", "'false'", "'Lstate'", "agent name"});
        c.agent = ts_.next();
        ts_.expect(TokenKind::Dot);
        if (ts_.accept_word("Lstate"))
            c.kind = RawCond::Kind::AgentLocal;
        else if (ts_.accept_word("Action"))
            c.kind = RawCond::Kind::AgentAction;
        else
            ts_.fail({"'Lstate'", "'Action'"});
        ts_.expect(TokenKind::Equals);
        c.value = ts_.expect(TokenKind::Ident);
        return c;
    }

    TokenStream& ts_;
};

class Resolver {
public:
    Resolver(const RawModel& raw, std::vector<Diagnostic>& diags) : raw_(raw), diags_(diags) {}

    model::InterpretedSystem run()
    {
        model::InterpretedSystem is;
        if (raw_.agents.empty())
            err(raw_.end, "model declares no agents");
        for (const auto& ra : raw_.agents) {
            if (is.find_agent(ra.name.text))
                err(ra.name, "duplicate agent " + ra.name.text);
            model::AgentDef a;
            a.name = ra.name.text;
            for (const auto& t : ra.locals) {
                if (a.find_state(t.text))
                    err(t, "duplicate local state " + t.text + " in agent " + a.name);
                a.local_states.push_back(t.text);
            }
            if (a.local_states.empty())
                err(ra.name, "agent " + a.name + " declares no local states");
            for (const auto& t : ra.actions) {
                if (a.find_action(t.text))
                    err(t, "duplicate action " + t.text + " in agent " + a.name);
                a.actions.push_back(t.text);
            }
            if (a.actions.empty())
                err(ra.name, "agent " + a.name + " declares no actions");
            is.agents.push_back(std::move(a));
        }

        for (std::uint32_t i = 0; i < raw_.agents.size(); ++i) {
            const auto& ra = raw_.agents[i];
            auto& a = is.agents[i];
            a.protocol.assign(a.local_states.size(), {});
            std::vector<bool> covered(a.local_states.size(), false);
            for (const auto& [state, acts] : ra.protocol) {
                auto s = a.find_state(state.text);
                if (!s) {
                    err(state, "protocol of " + a.name + " names undeclared local state " + state.text);
                    continue;
                }
                if (covered[*s])
                    err(state, "duplicate protocol entry for " + state.text);
                covered[*s] = true;
                std::set<std::uint32_t> enabled;
                for (const auto& act : acts) {
                    if (auto x = a.find_action(act.text))
                        enabled.insert(*x);
                    else
                        err(act, "protocol of " + a.name + " names undeclared action " + act.text);
                }
                a.protocol[*s].assign(enabled.begin(), enabled.end());
            }
            for (std::uint32_t s = 0; s < covered.size(); ++s)
                if (!covered[s])
                    err(ra.name, "protocol incomplete for " + a.local_states[s]);
            for (const auto& [target, guard] : ra.evolution) {
                model::EvolutionRule rule;
                if (auto s = a.find_state(target.text))
                    rule.target = *s;
                else
                    err(target, "evolution of " + a.name + " targets undeclared local state " + target.text);
                rule.guard = condition(is, guard, i);
                a.evolution.push_back(std::move(rule));
            }
        }

        if (!raw_.evaluation)
            err(raw_.end, "missing Evaluation section");
        for (const auto& [name, cond] : raw_.atoms) {
            if (is.find_atom(name.text))
                err(name, "duplicate atom " + name.text);
            else if (is_reserved(name.text))
                err(name, "atom name " + name.text + " is a reserved word");
            is.atoms.push_back({name.text, condition(is, cond, std::nullopt)});
        }

        if (!raw_.init)
            err(raw_.end, "missing InitStates section");
        is.initial_state.assign(is.agents.size(), 0);
        std::vector<bool> assigned(is.agents.size(), false);
        for (const auto& [agent, state] : raw_.init_assignments) {
            auto i = is.find_agent(agent.text);
            if (!i) {
                err(agent, "undeclared agent " + agent.text);
                continue;
            }
            auto s = is.agents[*i].find_state(state.text);
            if (!s) {
                err(state, "undeclared local state " + state.text + " of agent " + agent.text);
                continue;
            }
            if (assigned[*i] && is.initial_state[*i] != *s)
                err(agent, "conflicting initial states for agent " + agent.text);
            assigned[*i] = true;
            is.initial_state[*i] = *s;
        }
        if (raw_.init)
            for (std::uint32_t i = 0; i < is.agents.size(); ++i)
                if (!assigned[i])
                    err(*raw_.init, "initial state missing for agent " + is.agents[i].name);

        if (!raw_.formulae)
            err(raw_.end, "missing Formulae section");
        else if (raw_.formulas.empty())
            err(*raw_.formulae, "Formulae section is empty");
        for (const auto& [start, f] : raw_.formulas) {
            try {
                check_names(is, *f);
            } catch (const NameResolutionError& e) {
                err(start, e.what());
            }
        }
        return is;
    }

private:
    static bool is_reserved(const std::string& name)
    {
        static const std::set<std::string> words{
            "not", "and", "or", "true", "false", "AX", "EX", "AG", "EG", "AF", "EF", "AY", "AH",
            "A", "E", "D", "C", "K", "Kbar", "Ebar", "Dbar", "Cbar", "U", "W"};
        return words.contains(name);
    }

    void err(const Token& at, std::string message) { diags_.push_back(SyntaxParser::error(at, std::move(message))); }

    // `owner` set: evolution guard of that agent; unset: atom valuation.
    model::Condition condition(const model::InterpretedSystem& is, const RawCond& c, std::optional<std::uint32_t> owner)
    {
        using K = RawCond::Kind;
        using model::Condition;
        switch (c.kind) {
        case K::True: return Condition::truth(true);
        case K::False: return Condition::truth(false);
        case K::Not: return Condition::negation(condition(is, c.children.front(), owner));
        case K::And:
        case K::Or: {
            std::vector<Condition> parts;
            for (const auto& ch : c.children)
                parts.push_back(condition(is, ch, owner));
            return c.kind == K::And ? Condition::conjunction(std::move(parts)) : Condition::disjunction(std::move(parts));
        }
        case K::OwnLocal: {
            if (!owner) {
                err(c.at, "'Lstate=' without an agent is only allowed in evolution guards");
                return Condition::truth(false);
            }
            auto s = is.agents[*owner].find_state(c.value.text);
            if (!s) {
                err(c.value, "undeclared local state " + c.value.text + " of agent " + is.agents[*owner].name);
                return Condition::truth(false);
            }
            return Condition::local_is(*owner, *s);
        }
        case K::AgentLocal:
        case K::AgentAction: {
            auto i = is.find_agent(c.agent.text);
            if (!i) {
                err(c.agent, "undeclared agent " + c.agent.text);
                return Condition::truth(false);
            }
            if (c.kind == K::AgentLocal) {
                if (owner && *owner != *i) {
                    err(c.agent, "evolution guard of " + is.agents[*owner].name + " reads the local state of " +
                                     c.agent.text);
                    return Condition::truth(false);
                }
                auto s = is.agents[*i].find_state(c.value.text);
                if (!s) {
                    err(c.value, "undeclared local state " + c.value.text + " of agent " + c.agent.text);
                    return Condition::truth(false);
                }
                return Condition::local_is(*i, *s);
            }
            if (!owner) {
                err(c.agent, "actions cannot occur in atom valuations");
                return Condition::truth(false);
            }
            auto x = is.agents[*i].find_action(c.value.text);
            if (!x) {
                err(c.value, "undeclared action " + c.value.text + " of agent " + c.agent.text);
                return Condition::truth(false);
            }
            return Condition::action_is(*i, *x);
        }
        }
        return Condition::truth(false);
    }

    const RawModel& raw_;
    std::vector<Diagnostic>& diags_;
};

} // namespace

ParseResult parse_ispl_diagnostics(std::string_view source)
{
    ParseResult result;
    try {
        TokenStream ts(text::tokenize(source));
        SyntaxParser parser(ts);
        RawModel raw = parser.parse(result.diagnostics);
        Resolver resolver(raw, result.diagnostics);
        model::InterpretedSystem is = resolver.run();
        if (result.diagnostics.empty()) {
            IsplModel m{std::move(is), {}};
            for (auto& [tok, f] : raw.formulas)
                m.formulas.push_back(std::move(f));
            result.model = std::move(m);
        }
    } catch (const text::ParseError& e) {
        Diagnostic d;
        d.message = e.bare_message();
        d.line = e.line();
        d.column = e.column();
        d.expected = e.expected();
        result.diagnostics.push_back(std::move(d));
    } catch (const std::exception& e) {
        Diagnostic d;
        d.message = e.what();
        result.diagnostics.push_back(std::move(d));
    }
    if (!result.diagnostics.empty())
        result.model.reset();
    return result;
}

IsplModel parse_ispl(std::string_view source)
{
    auto result = parse_ispl_diagnostics(source);
    if (!result.model)
        throw IsplError(std::move(result.diagnostics));
    return std::move(*result.model);
}

// ---------------------------------------------------------------------------

namespace {

void format_to(const model::InterpretedSystem& is, const model::Condition& c, std::optional<std::uint32_t> owner,
               std::string& out, bool nested)
{
    using K = model::Condition::Kind;
    switch (c.kind) {
    case K::True: out += "true"; return;
    case K::False: out += "false"; return;
    case K::LocalIs:
        if (owner && *owner == c.agent)
            out += "Lstate=";
        else
            out += is.agents[c.agent].name + ".Lstate=";
        out += is.agents[c.agent].local_states[c.value];
        return;
    case K::ActionIs:
        out += is.agents[c.agent].name + ".Action=" + is.agents[c.agent].actions[c.value];
        return;
    case K::Not:
        out += "not ";
        format_to(is, c.children.front(), owner, out, true);
        return;
    case K::And:
    case K::Or:
        if (nested)
            out += "(";
        for (std::size_t i = 0; i < c.children.size(); ++i) {
            if (i)
                out += c.kind == K::And ? " and " : " or ";
            format_to(is, c.children[i], owner, out, true);
        }
        if (nested)
            out += ")";
        return;
    }
}

std::string join(const std::vector<std::string>& names)
{
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i)
            out += ", ";
        out += names[i];
    }
    return out;
}

} // namespace

std::string format_condition(const model::InterpretedSystem& is, const model::Condition& c,
                             std::optional<std::uint32_t> owner)
{
    std::string out;
    format_to(is, c, owner, out, false);
    return out;
}

std::string serialize_ispl(const model::InterpretedSystem& is, const std::vector<logic::FormulaPtr>& formulas)
{
    std::string out;
    for (std::uint32_t i = 0; i < is.agents.size(); ++i) {
        const auto& a = is.agents[i];
        out += "Agent " + a.name + "\n";
        out += "  Lstate = {" + join(a.local_states) + "};\n";
        out += "  Action = {" + join(a.actions) + "};\n";
        out += "  Protocol:\n";
        for (std::uint32_t s = 0; s < a.local_states.size(); ++s) {
            std::vector<std::string> acts;
            if (s < a.protocol.size())
                for (auto x : a.protocol[s])
                    acts.push_back(a.actions[x]);
            out += "    " + a.local_states[s] + ": {" + join(acts) + "};\n";
        }
        out += "  end Protocol\n";
        out += "  Ev:\n";
        for (const auto& rule : a.evolution)
            out += "    " + a.local_states[rule.target] + " if " + format_condition(is, rule.guard, i) + ";\n";
        out += "  end Ev\n";
        out += "end Agent\n\n";
    }
    out += "Evaluation\n";
    for (const auto& atom : is.atoms)
        out += "  " + atom.name + " if " + format_condition(is, atom.condition, std::nullopt) + ";\n";
    out += "end Evaluation\n\n";
    out += "InitStates\n  ";
    for (std::uint32_t i = 0; i < is.agents.size(); ++i) {
        if (i)
            out += " and ";
        out += is.agents[i].name + ".Lstate=" + is.agents[i].local_states[is.initial_state[i]];
    }
    out += ";\nend InitStates\n\n";
    out += "Formulae\n";
    for (const auto& f : formulas)
        out += "  " + logic::format_formula(f) + ";\n";
    out += "end Formulae\n";
    return out;
}

} // namespace epimc::ispl
