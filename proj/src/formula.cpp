#include "epimc/formula.hpp"

#include <algorithm>
#include <set>

namespace epimc::logic {

namespace {

constexpr int kMaxNesting = 400;

FormulaPtr make(Op op, std::vector<FormulaPtr> args, std::string name = {}, Group group = std::nullopt)
{
    auto f = std::make_shared<Formula>();
    f->op = op;
    f->args = std::move(args);
    f->name = std::move(name);
    f->group = std::move(group);
    return f;
}

} // namespace

bool operator==(const Formula& a, const Formula& b)
{
    if (a.op != b.op || a.name != b.name || a.group != b.group || a.args.size() != b.args.size())
        return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (a.args[i] != b.args[i] && !(*a.args[i] == *b.args[i]))
            return false;
    return true;
}

bool is_group_op(Op op)
{
    switch (op) {
    case Op::E: case Op::Ebar: case Op::D: case Op::Dbar: case Op::C: case Op::Cbar:
        return true;
    default:
        return false;
    }
}

bool is_unary_temporal(Op op)
{
    switch (op) {
    case Op::AX: case Op::EX: case Op::AG: case Op::EG: case Op::AF: case Op::EF: case Op::AY: case Op::AH:
        return true;
    default:
        return false;
    }
}

std::string_view op_name(Op op)
{
    switch (op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Atom: return "atom";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "->";
    case Op::AX: return "AX";
    case Op::EX: return "EX";
    case Op::AG: return "AG";
    case Op::EG: return "EG";
    case Op::AF: return "AF";
    case Op::EF: return "EF";
    case Op::AU: return "AU";
    case Op::EU: return "EU";
    case Op::AW: return "AW";
    case Op::AY: return "AY";
    case Op::AH: return "AH";
    case Op::K: return "K";
    case Op::Kbar: return "Kbar";
    case Op::E: return "E";
    case Op::Ebar: return "Ebar";
    case Op::D: return "D";
    case Op::Dbar: return "Dbar";
    case Op::C: return "C";
    case Op::Cbar: return "Cbar";
    }
    return "?";
}

FormulaPtr truth(bool value)
{
    static const FormulaPtr t = make(Op::True, {});
    static const FormulaPtr f = make(Op::False, {});
    return value ? t : f;
}

FormulaPtr atom(std::string name)
{
    return make(Op::Atom, {}, std::move(name));
}

FormulaPtr neg(FormulaPtr f)
{
    return make(Op::Not, {std::move(f)});
}

FormulaPtr conj(FormulaPtr a, FormulaPtr b)
{
    return make(Op::And, {std::move(a), std::move(b)});
}

FormulaPtr disj(FormulaPtr a, FormulaPtr b)
{
    return make(Op::Or, {std::move(a), std::move(b)});
}

FormulaPtr implies(FormulaPtr a, FormulaPtr b)
{
    return make(Op::Implies, {std::move(a), std::move(b)});
}

FormulaPtr unary(Op op, FormulaPtr f)
{
    if (!is_unary_temporal(op))
        throw InvalidArgument("unary: not a unary temporal operator: " + std::string(op_name(op)));
    return make(op, {std::move(f)});
}

FormulaPtr until(Op op, FormulaPtr a, FormulaPtr b)
{
    if (op != Op::AU && op != Op::EU && op != Op::AW)
        throw InvalidArgument("until: not an until operator: " + std::string(op_name(op)));
    return make(op, {std::move(a), std::move(b)});
}

FormulaPtr knows(Op op, std::string agent, FormulaPtr f)
{
    if (op != Op::K && op != Op::Kbar)
        throw InvalidArgument("knows: not K or Kbar");
    return make(op, {std::move(f)}, std::move(agent));
}

FormulaPtr group_op(Op op, Group group, FormulaPtr f)
{
    if (!is_group_op(op))
        throw InvalidArgument("group_op: not a group operator: " + std::string(op_name(op)));
    if (group && group->empty())
        throw InvalidArgument("group_op: empty agent group");
    return make(op, {std::move(f)}, {}, std::move(group));
}

FormulaPtr conj_all(const std::vector<FormulaPtr>& fs)
{
    if (fs.empty())
        return truth(true);
    FormulaPtr acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i)
        acc = conj(acc, fs[i]);
    return acc;
}

FormulaPtr disj_all(const std::vector<FormulaPtr>& fs)
{
    if (fs.empty())
        return truth(false);
    FormulaPtr acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i)
        acc = disj(acc, fs[i]);
    return acc;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

const std::set<std::string_view>& keywords()
{
    static const std::set<std::string_view> words{
        "not", "and", "or", "true", "false", "AX", "EX", "AG", "EG", "AF", "EF", "AY", "AH",
        "A", "E", "D", "C", "K", "Kbar", "Ebar", "Dbar", "Cbar", "U", "W"};
    return words;
}

const std::vector<std::string>& formula_starts()
{
    static const std::vector<std::string> starts{"atom", "'('", "'not'", "temporal operator",
                                                 "epistemic operator", "'true'", "'false'"};
    return starts;
}

class FormulaParser {
public:
    explicit FormulaParser(text::TokenStream& ts) : ts_(ts) {}

    FormulaPtr implication()
    {
        Guard g(*this);
        auto lhs = disjunction();
        if (ts_.accept(text::TokenKind::Arrow))
            return implies(lhs, implication());
        return lhs;
    }

private:
    struct Guard {
        explicit Guard(FormulaParser& p) : p_(p)
        {
            if (++p_.nesting_ > kMaxNesting)
                p_.ts_.fail_at(p_.ts_.peek(), "formula nesting exceeds " + std::to_string(kMaxNesting) + " levels");
        }
        ~Guard() { --p_.nesting_; }
        FormulaParser& p_;
    };

    FormulaPtr disjunction()
    {
        auto lhs = conjunction();
        while (ts_.accept_word("or"))
            lhs = disj(lhs, conjunction());
        return lhs;
    }

    FormulaPtr conjunction()
    {
        auto lhs = prefix();
        while (ts_.accept_word("and"))
            lhs = conj(lhs, prefix());
        return lhs;
    }

    std::string agent_ref()
    {
        if (ts_.at(text::TokenKind::Ident) || ts_.at(text::TokenKind::Number))
            return ts_.next().text;
        ts_.fail({"agent name", "agent number"});
    }

    Group group()
    {
        if (!ts_.accept(text::TokenKind::LBrace))
            return std::nullopt;
        std::vector<std::string> agents{agent_ref()};
        while (ts_.accept(text::TokenKind::Comma))
            agents.push_back(agent_ref());
        ts_.expect(text::TokenKind::RBrace);
        return agents;
    }

    FormulaPtr until_tail(bool universal)
    {
        // Called after "A(" or "E(" has been consumed.
        auto lhs = implication();
        Op op;
        if (ts_.accept_word("U"))
            op = universal ? Op::AU : Op::EU;
        else if (universal && ts_.accept_word("W"))
            op = Op::AW;
        else
            ts_.fail(universal ? std::vector<std::string>{"'U'", "'W'"} : std::vector<std::string>{"'U'"});
        auto rhs = implication();
        ts_.expect(text::TokenKind::RParen);
        return until(op, lhs, rhs);
    }

    FormulaPtr prefix()
    {
        Guard g(*this);
        const text::Token& tok = ts_.peek();
        if (tok.kind == text::TokenKind::LParen) {
            ts_.next();
            auto inner = implication();
            ts_.expect(text::TokenKind::RParen);
            return inner;
        }
        if (tok.kind != text::TokenKind::Ident)
            ts_.fail(formula_starts());

        const std::string word = tok.text;
        if (word == "true" || word == "false") {
            ts_.next();
            return truth(word == "true");
        }
        if (word == "not") {
            ts_.next();
            return neg(prefix());
        }
        static const std::pair<std::string_view, Op> temporal[] = {
            {"AX", Op::AX}, {"EX", Op::EX}, {"AG", Op::AG}, {"EG", Op::EG},
            {"AF", Op::AF}, {"EF", Op::EF}, {"AY", Op::AY}, {"AH", Op::AH}};
        for (auto [kw, op] : temporal) {
            if (word == kw) {
                ts_.next();
                return unary(op, prefix());
            }
        }
        if (word == "K" || word == "Kbar") {
            ts_.next();
            auto agent = agent_ref();
            return knows(word == "K" ? Op::K : Op::Kbar, agent, prefix());
        }
        if (word == "A") {
            ts_.next();
            ts_.expect(text::TokenKind::LParen);
            return until_tail(true);
        }
        if (word == "E") {
            ts_.next();
            if (ts_.at(text::TokenKind::LParen)) {
                // "E (f U g)" or "E (f)", told apart after the first operand.
                ts_.next();
                auto inner = implication();
                if (ts_.accept_word("U")) {
                    auto rhs = implication();
                    ts_.expect(text::TokenKind::RParen);
                    return until(Op::EU, inner, rhs);
                }
                if (!ts_.at(text::TokenKind::RParen))
                    ts_.fail({"'U'", "')'"});
                ts_.next();
                return group_op(Op::E, std::nullopt, inner);
            }
            auto gr = group();
            return group_op(Op::E, std::move(gr), prefix());
        }
        static const std::pair<std::string_view, Op> groups[] = {
            {"D", Op::D}, {"C", Op::C}, {"Ebar", Op::Ebar}, {"Dbar", Op::Dbar}, {"Cbar", Op::Cbar}};
        for (auto [kw, op] : groups) {
            if (word == kw) {
                ts_.next();
                auto gr = group();
                return group_op(op, std::move(gr), prefix());
            }
        }
        if (keywords().contains(word))
            ts_.fail(formula_starts());
        ts_.next();
        return atom(word);
    }

    text::TokenStream& ts_;
    int nesting_ = 0;
};

} // namespace

FormulaPtr parse_formula(text::TokenStream& tokens)
{
    FormulaParser p(tokens);
    return p.implication();
}

FormulaPtr parse_formula(std::string_view source)
{
    text::TokenStream ts(text::tokenize(source));
    auto f = parse_formula(ts);
    if (!ts.at(text::TokenKind::End))
        ts.fail({"'and'", "'or'", "'->'", "end of input"});
    return f;
}

// ---------------------------------------------------------------------------
// Formatting

namespace {

void format_to(const Formula& f, std::string& out)
{
    auto group_text = [](const Group& g) {
        if (!g)
            return std::string();
        std::string s = "{";
        for (std::size_t i = 0; i < g->size(); ++i) {
            if (i)
                s += ",";
            s += (*g)[i];
        }
        return s + "}";
    };
    switch (f.op) {
    case Op::True: out += "true"; return;
    case Op::False: out += "false"; return;
    case Op::Atom: out += f.name; return;
    case Op::Not:
        out += "not ";
        format_to(*f.args[0], out);
        return;
    case Op::And:
    case Op::Or:
    case Op::Implies:
        out += "(";
        format_to(*f.args[0], out);
        out += f.op == Op::And ? " and " : f.op == Op::Or ? " or " : " -> ";
        format_to(*f.args[1], out);
        out += ")";
        return;
    case Op::AU:
    case Op::EU:
    case Op::AW:
        out += f.op == Op::EU ? "E(" : "A(";
        format_to(*f.args[0], out);
        out += f.op == Op::AW ? " W " : " U ";
        format_to(*f.args[1], out);
        out += ")";
        return;
    case Op::K:
    case Op::Kbar:
        out += op_name(f.op);
        out += " " + f.name + " ";
        format_to(*f.args[0], out);
        return;
    default:
        break;
    }
    out += op_name(f.op);
    if (is_group_op(f.op))
        out += group_text(f.group);
    out += " ";
    format_to(*f.args[0], out);
}

} // namespace

std::string format_formula(const Formula& f)
{
    std::string out;
    format_to(f, out);
    return out;
}

// ---------------------------------------------------------------------------
// Normal forms and classification

namespace {

FormulaPtr nnf(const FormulaPtr& f, bool negated);

FormulaPtr dual_group(Op op, const Formula& f, bool negated)
{
    static const std::pair<Op, Op> duals[] = {
        {Op::K, Op::Kbar}, {Op::E, Op::Ebar}, {Op::D, Op::Dbar}, {Op::C, Op::Cbar}};
    Op target = op;
    if (negated) {
        for (auto [a, b] : duals) {
            if (op == a) target = b;
            if (op == b) target = a;
        }
    }
    auto inner = nnf(f.args[0], negated);
    if (op == Op::K || op == Op::Kbar)
        return knows(target, f.name, inner);
    return group_op(target, f.group, inner);
}

FormulaPtr nnf(const FormulaPtr& f, bool negated)
{
    const auto& a = f->args;
    switch (f->op) {
    case Op::True:
    case Op::False:
        return truth((f->op == Op::True) != negated);
    case Op::Atom:
        return negated ? neg(f) : f;
    case Op::Not:
        return nnf(a[0], !negated);
    case Op::And:
        return negated ? disj(nnf(a[0], true), nnf(a[1], true)) : conj(nnf(a[0], false), nnf(a[1], false));
    case Op::Or:
        return negated ? conj(nnf(a[0], true), nnf(a[1], true)) : disj(nnf(a[0], false), nnf(a[1], false));
    case Op::Implies:
        return negated ? conj(nnf(a[0], false), nnf(a[1], true)) : disj(nnf(a[0], true), nnf(a[1], false));
    case Op::AX: return unary(negated ? Op::EX : Op::AX, nnf(a[0], negated));
    case Op::EX: return unary(negated ? Op::AX : Op::EX, nnf(a[0], negated));
    case Op::AG: return unary(negated ? Op::EF : Op::AG, nnf(a[0], negated));
    case Op::EF: return unary(negated ? Op::AG : Op::EF, nnf(a[0], negated));
    case Op::EG: return unary(negated ? Op::AF : Op::EG, nnf(a[0], negated));
    case Op::AF: return unary(negated ? Op::EG : Op::AF, nnf(a[0], negated));
    case Op::AY:
    case Op::AH: {
        auto inner = unary(f->op, nnf(a[0], false));
        return negated ? neg(inner) : inner;
    }
    case Op::AU:
        if (!negated)
            return until(Op::AU, nnf(a[0], false), nnf(a[1], false));
        {
            // not A(f U g) == E(not g U (not f and not g)) or EG not g
            auto nf = nnf(a[0], true);
            auto ng = nnf(a[1], true);
            return disj(until(Op::EU, ng, conj(nf, ng)), unary(Op::EG, ng));
        }
    case Op::EU:
        if (!negated)
            return until(Op::EU, nnf(a[0], false), nnf(a[1], false));
        {
            // not E(f U g) == A(not g W (not f and not g))
            auto nf = nnf(a[0], true);
            auto ng = nnf(a[1], true);
            return until(Op::AW, ng, conj(nf, ng));
        }
    case Op::AW:
        if (!negated)
            return until(Op::AW, nnf(a[0], false), nnf(a[1], false));
        {
            // not A(f W g) == E(not g U (not f and not g))
            auto nf = nnf(a[0], true);
            auto ng = nnf(a[1], true);
            return until(Op::EU, ng, conj(nf, ng));
        }
    case Op::K: case Op::Kbar: case Op::E: case Op::Ebar: case Op::D: case Op::Dbar: case Op::C: case Op::Cbar:
        return dual_group(f->op, *f, negated);
    }
    return f;
}

} // namespace

FormulaPtr to_nnf(const FormulaPtr& f)
{
    return nnf(f, false);
}

bool is_ectlk(const Formula& f)
{
    switch (f.op) {
    case Op::True:
    case Op::False:
    case Op::Atom:
        return true;
    case Op::Not:
        return f.args[0]->op == Op::Atom;
    case Op::And: case Op::Or: case Op::EX: case Op::EG: case Op::EU: case Op::EF:
    case Op::Kbar: case Op::Ebar: case Op::Dbar: case Op::Cbar:
        return std::all_of(f.args.begin(), f.args.end(), [](const FormulaPtr& a) { return is_ectlk(*a); });
    default:
        return false;
    }
}

bool has_past_operators(const Formula& f)
{
    if (f.op == Op::AY || f.op == Op::AH)
        return true;
    return std::any_of(f.args.begin(), f.args.end(), [](const FormulaPtr& a) { return has_past_operators(*a); });
}

std::size_t depth(const Formula& f)
{
    std::size_t d = 0;
    for (const auto& a : f.args)
        d = std::max(d, depth(*a));
    return f.args.empty() ? 0 : d + 1;
}

std::size_t size(const Formula& f)
{
    std::size_t n = 1;
    for (const auto& a : f.args)
        n += size(*a);
    return n;
}

std::vector<std::string> atoms_of(const Formula& f)
{
    std::set<std::string> names;
    std::vector<const Formula*> stack{&f};
    while (!stack.empty()) {
        const Formula* g = stack.back();
        stack.pop_back();
        if (g->op == Op::Atom)
            names.insert(g->name);
        for (const auto& a : g->args)
            stack.push_back(a.get());
    }
    return {names.begin(), names.end()};
}

} // namespace epimc::logic
