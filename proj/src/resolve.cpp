#include "epimc/resolve.hpp"

#include <algorithm>
#include <charconv>

namespace epimc {

std::uint32_t resolve_agent(const model::InterpretedSystem& is, std::string_view ref)
{
    if (auto idx = is.find_agent(ref))
        return *idx;
    std::uint32_t n = 0;
    auto [ptr, ec] = std::from_chars(ref.data(), ref.data() + ref.size(), n);
    if (ec == std::errc() && ptr == ref.data() + ref.size() && n >= 1 && n <= is.agents.size())
        return n - 1;
    throw NameResolutionError("undeclared agent '" + std::string(ref) + "'");
}

std::vector<std::uint32_t> resolve_group(const model::InterpretedSystem& is, const logic::Group& group)
{
    std::vector<std::uint32_t> out;
    if (!group) {
        for (std::uint32_t i = 0; i < is.agents.size(); ++i)
            out.push_back(i);
        return out;
    }
    if (group->empty())
        throw NameResolutionError("empty agent group");
    for (const auto& ref : *group)
        out.push_back(resolve_agent(is, ref));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::uint32_t resolve_atom(const model::InterpretedSystem& is, std::string_view name)
{
    if (auto idx = is.find_atom(name))
        return *idx;
    throw NameResolutionError("undeclared atom '" + std::string(name) + "'");
}

void check_names(const model::InterpretedSystem& is, const logic::Formula& f)
{
    using logic::Op;
    if (f.op == Op::Atom)
        resolve_atom(is, f.name);
    else if (f.op == Op::K || f.op == Op::Kbar)
        resolve_agent(is, f.name);
    else if (logic::is_group_op(f.op))
        resolve_group(is, f.group);
    for (const auto& a : f.args)
        check_names(is, *a);
}

} // namespace epimc
