#include "epimc/random_formula.hpp"

namespace epimc::logic {

namespace {

class Generator {
public:
    Generator(std::mt19937_64& rng, const FormulaVocabulary& vocab, Fragment fragment)
        : rng_(rng), vocab_(vocab), fragment_(fragment)
    {
        if (vocab.atoms.empty() || vocab.agents == 0)
            throw InvalidArgument("random_formula: empty vocabulary");
    }

    FormulaPtr gen(int depth)
    {
        if (depth <= 0 || rng_() % 4 == 0)
            return leaf();
        switch (fragment_) {
        case Fragment::Ctlk:
        case Fragment::Ctlpk: return full(depth);
        case Fragment::Ectlk: return existential(depth);
        case Fragment::Universal: return universal(depth);
        }
        return leaf();
    }

private:
    FormulaPtr leaf()
    {
        const auto pick = rng_() % 10;
        if (pick == 0)
            return truth(rng_() & 1);
        auto a = atom(vocab_.atoms[rng_() % vocab_.atoms.size()]);
        if (fragment_ != Fragment::Ctlk && fragment_ != Fragment::Ctlpk && pick < 4)
            return neg(a);
        return a;
    }

    std::string agent() { return std::to_string(1 + rng_() % vocab_.agents); }

    Group group()
    {
        if (rng_() % 3 == 0)
            return std::nullopt;
        std::vector<std::string> g;
        const std::uint64_t mask = 1 + rng_() % ((std::uint64_t{1} << vocab_.agents) - 1);
        for (std::uint32_t i = 0; i < vocab_.agents; ++i)
            if (mask >> i & 1)
                g.push_back(std::to_string(i + 1));
        return g;
    }

    FormulaPtr full(int depth)
    {
        const int choices = fragment_ == Fragment::Ctlpk ? 22 : 20;
        switch (rng_() % choices) {
        case 0: return neg(gen(depth - 1));
        case 1: return conj(gen(depth - 1), gen(depth - 1));
        case 2: return disj(gen(depth - 1), gen(depth - 1));
        case 3: return implies(gen(depth - 1), gen(depth - 1));
        case 4: return unary(Op::AX, gen(depth - 1));
        case 5: return unary(Op::EX, gen(depth - 1));
        case 6: return unary(Op::AG, gen(depth - 1));
        case 7: return unary(Op::EG, gen(depth - 1));
        case 8: return unary(Op::AF, gen(depth - 1));
        case 9: return unary(Op::EF, gen(depth - 1));
        case 10: return until(Op::AU, gen(depth - 1), gen(depth - 1));
        case 11: return until(Op::EU, gen(depth - 1), gen(depth - 1));
        case 12: return knows(Op::K, agent(), gen(depth - 1));
        case 13: return knows(Op::Kbar, agent(), gen(depth - 1));
        case 14: return group_op(Op::E, group(), gen(depth - 1));
        case 15: return group_op(Op::D, group(), gen(depth - 1));
        case 16: return group_op(Op::C, group(), gen(depth - 1));
        case 17: return group_op(Op::Ebar, group(), gen(depth - 1));
        case 18: return group_op(Op::Dbar, group(), gen(depth - 1));
        case 19: return group_op(Op::Cbar, group(), gen(depth - 1));
        case 20: return unary(Op::AY, gen(depth - 1));
        default: return unary(Op::AH, gen(depth - 1));
        }
    }

    FormulaPtr existential(int depth)
    {
        switch (rng_() % 10) {
        case 0: return conj(gen(depth - 1), gen(depth - 1));
        case 1: return disj(gen(depth - 1), gen(depth - 1));
        case 2: return unary(Op::EX, gen(depth - 1));
        case 3: return unary(Op::EG, gen(depth - 1));
        case 4: return unary(Op::EF, gen(depth - 1));
        case 5: return until(Op::EU, gen(depth - 1), gen(depth - 1));
        case 6: return knows(Op::Kbar, agent(), gen(depth - 1));
        case 7: return group_op(Op::Ebar, group(), gen(depth - 1));
        case 8: return group_op(Op::Dbar, group(), gen(depth - 1));
        default: return group_op(Op::Cbar, group(), gen(depth - 1));
        }
    }

    FormulaPtr universal(int depth)
    {
        switch (rng_() % 10) {
        case 0: return conj(gen(depth - 1), gen(depth - 1));
        case 1: return disj(gen(depth - 1), gen(depth - 1));
        case 2: return unary(Op::AX, gen(depth - 1));
        case 3: return unary(Op::AG, gen(depth - 1));
        case 4: return unary(Op::AF, gen(depth - 1));
        case 5: return until(Op::AU, gen(depth - 1), gen(depth - 1));
        case 6: return knows(Op::K, agent(), gen(depth - 1));
        case 7: return group_op(Op::E, group(), gen(depth - 1));
        case 8: return group_op(Op::D, group(), gen(depth - 1));
        default: return group_op(Op::C, group(), gen(depth - 1));
        }
    }

    std::mt19937_64& rng_;
    const FormulaVocabulary& vocab_;
    Fragment fragment_;
};

} // namespace

FormulaPtr random_formula(std::mt19937_64& rng, const FormulaVocabulary& vocab, Fragment fragment, int max_depth)
{
    return Generator(rng, vocab, fragment).gen(max_depth);
}

} // namespace epimc::logic
