#pragma once

#include "epimc/ispl.hpp"

#include <fstream>
#include <sstream>
#include <string>

#ifndef EPIMC_FIXTURE_DIR
#error "EPIMC_FIXTURE_DIR must be defined"
#endif

inline std::string fixture_path(const std::string& name)
{
    return std::string(EPIMC_FIXTURE_DIR) + "/" + name;
}

inline std::string read_fixture(const std::string& name)
{
    std::ifstream in(fixture_path(name), std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open fixture " + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline epimc::ispl::IsplModel load_fixture(const std::string& name)
{
    return epimc::ispl::parse_ispl(read_fixture(name));
}
