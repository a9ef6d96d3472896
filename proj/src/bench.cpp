#include "epimc/bench.hpp"

namespace epimc::bench {

using model::Condition;
using namespace logic;

std::string crypt_name(std::uint32_t i)
{
    return "Crypt" + std::to_string(i);
}

namespace {

std::string coin_string(std::uint32_t coins, std::uint32_t n)
{
    std::string s;
    for (std::uint32_t j = 0; j < n; ++j)
        s += (coins >> j & 1) ? '1' : '0';
    return s;
}

const char* kSeen[] = {"eq", "diff"};
const char* kPaid[] = {"unpaid", "paid"};
const char* kParity[] = {"none", "even", "odd"};

std::string crypt_state(int seen, int paid, int parity)
{
    return std::string(kSeen[seen]) + "_" + kPaid[paid] + "_" + kParity[parity];
}

// Index into the cryptographer's local-state list.
std::uint32_t crypt_index(int seen, int paid, int parity)
{
    return 1 + static_cast<std::uint32_t>(parity * 4 + seen * 2 + paid);
}

} // namespace

DcInstance generate_dc(std::uint32_t n)
{
    if (n < 3)
        throw InvalidArgument("dining cryptographers needs at least 3 cryptographers, got " + std::to_string(n));
    if (n > 12)
        throw InvalidArgument("dining cryptographers generator supports at most 12 cryptographers");

    model::InterpretedSystem is;
    const std::uint32_t env = n;
    const std::uint32_t n_coins = 1u << n;

    model::AgentDef environment;
    environment.name = "Environment";
    environment.local_states.push_back("start");
    for (std::uint32_t coins = 0; coins < n_coins; ++coins)
        for (std::uint32_t payer = 0; payer <= n; ++payer) {
            environment.local_states.push_back("c" + coin_string(coins, n) + "_p" + std::to_string(payer));
            environment.actions.push_back("toss_" + coin_string(coins, n) + "_" + std::to_string(payer));
        }
    environment.actions.push_back("idle");
    const std::uint32_t idle = static_cast<std::uint32_t>(environment.actions.size() - 1);
    environment.protocol.resize(environment.local_states.size(), {idle});
    environment.protocol[0].clear();
    for (std::uint32_t x = 0; x < idle; ++x)
        environment.protocol[0].push_back(x);
    auto toss = [&](std::uint32_t coins, std::uint32_t payer) { return coins * (n + 1) + payer; };
    for (std::uint32_t coins = 0; coins < n_coins; ++coins)
        for (std::uint32_t payer = 0; payer <= n; ++payer)
            environment.evolution.push_back(
                {1 + toss(coins, payer),
                 Condition::conjunction({Condition::local_is(env, 0), Condition::action_is(env, toss(coins, payer))})});

    enum CryptAction : std::uint32_t { kWait, kSayEqual, kSayDiff };
    for (std::uint32_t i = 0; i < n; ++i) {
        model::AgentDef c;
        c.name = crypt_name(i + 1);
        c.local_states.push_back("init");
        for (int parity = 0; parity < 3; ++parity)
            for (int seen = 0; seen < 2; ++seen)
                for (int paid = 0; paid < 2; ++paid)
                    c.local_states.push_back(crypt_state(seen, paid, parity));
        c.actions = {"wait", "say_equal", "say_diff"};
        c.protocol.resize(c.local_states.size(), {kWait});
        for (int seen = 0; seen < 2; ++seen)
            for (int paid = 0; paid < 2; ++paid)
                c.protocol[crypt_index(seen, paid, 0)] = {(seen != paid) ? kSayDiff : kSayEqual};

        // Round 1: observe the two visible coins and whether we paid.
        const std::uint32_t left = (i + n - 1) % n;
        for (int seen = 0; seen < 2; ++seen)
            for (int paid = 0; paid < 2; ++paid) {
                std::vector<Condition> tosses;
                for (std::uint32_t coins = 0; coins < n_coins; ++coins)
                    for (std::uint32_t payer = 0; payer <= n; ++payer) {
                        const int differs = ((coins >> i) & 1) != ((coins >> left) & 1);
                        const int me = payer == i + 1;
                        if (differs == seen && me == paid)
                            tosses.push_back(Condition::action_is(env, toss(coins, payer)));
                    }
                c.evolution.push_back({crypt_index(seen, paid, 0),
                                       Condition::conjunction({Condition::local_is(i, 0),
                                                               Condition::disjunction(std::move(tosses))})});
            }
        is.agents.push_back(std::move(c));
    }

    // Round 2: record the parity of the "different" announcements.
    std::vector<Condition> by_parity[2];
    for (std::uint32_t says = 0; says < n_coins; ++says) {
        std::vector<Condition> parts;
        for (std::uint32_t j = 0; j < n; ++j)
            parts.push_back(Condition::action_is(j, (says >> j & 1) ? kSayDiff : kSayEqual));
        by_parity[__builtin_popcount(says) & 1].push_back(Condition::conjunction(std::move(parts)));
    }
    const Condition even = Condition::disjunction(by_parity[0]);
    const Condition odd = Condition::disjunction(by_parity[1]);
    for (std::uint32_t i = 0; i < n; ++i) {
        auto& c = is.agents[i];
        for (int seen = 0; seen < 2; ++seen)
            for (int paid = 0; paid < 2; ++paid) {
                const auto from = Condition::local_is(i, crypt_index(seen, paid, 0));
                c.evolution.push_back({crypt_index(seen, paid, 1), Condition::conjunction({from, even})});
                c.evolution.push_back({crypt_index(seen, paid, 2), Condition::conjunction({from, odd})});
            }
    }
    is.agents.push_back(std::move(environment));
    is.initial_state.assign(n + 1, 0);

    for (std::uint32_t i = 0; i < n; ++i) {
        std::vector<Condition> paid_states;
        for (int parity = 0; parity < 3; ++parity)
            for (int seen = 0; seen < 2; ++seen)
                paid_states.push_back(Condition::local_is(i, crypt_index(seen, 1, parity)));
        is.atoms.push_back({"paid" + std::to_string(i + 1), Condition::disjunction(std::move(paid_states))});
    }
    std::vector<Condition> odd_states;
    for (int seen = 0; seen < 2; ++seen)
        for (int paid = 0; paid < 2; ++paid)
            odd_states.push_back(Condition::local_is(0, crypt_index(seen, paid, 2)));
    is.atoms.push_back({"odd", Condition::disjunction(std::move(odd_states))});

    // (odd and not paid_i) -> AX (K_i (or_{j != i} paid_j) and and_{k != i} not K_i paid_k)
    std::vector<FormulaPtr> conjuncts;
    for (std::uint32_t i = 1; i <= n; ++i) {
        std::vector<FormulaPtr> others, ignorance;
        for (std::uint32_t j = 1; j <= n; ++j) {
            if (j == i)
                continue;
            others.push_back(atom("paid" + std::to_string(j)));
            ignorance.push_back(neg(knows(Op::K, crypt_name(i), atom("paid" + std::to_string(j)))));
        }
        auto knowledge = conj(knows(Op::K, crypt_name(i), disj_all(others)), conj_all(ignorance));
        auto premise = conj(atom("odd"), neg(atom("paid" + std::to_string(i))));
        conjuncts.push_back(implies(premise, unary(Op::AX, knowledge)));
    }
    DcInstance out;
    out.system = std::move(is);
    out.specification = conj_all(conjuncts);
    out.invariant = unary(Op::AG, out.specification);
    out.witness = unary(Op::EF, conj(atom("odd"), neg(atom("paid1"))));
    return out;
}

} // namespace epimc::bench
