#pragma once

#include <stdexcept>
#include <string>

namespace epimc {

// Base for every error raised by the checker libraries.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NameResolutionError : public Error {
public:
    using Error::Error;
};

// A formula outside the fragment a backend supports (e.g. non-ECTLK for BMC).
class FragmentError : public Error {
public:
    using Error::Error;
};

class UnsupportedOperator : public Error {
public:
    using Error::Error;
};

class StateExplosionError : public Error {
public:
    explicit StateExplosionError(std::size_t cap)
        : Error("state-space cap of " + std::to_string(cap) + " states exceeded"), cap_(cap) {}
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t cap_;
};

} // namespace epimc
