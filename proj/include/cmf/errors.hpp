#pragma once

#include <stdexcept>
#include <string>

namespace cmf {

// Malformed or inconsistent input data (duplicate entries, bad file lines, ...).
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure inside a solver (divergence, singular system, ...).
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Violated preconditions are reported as std::invalid_argument.

} // namespace cmf
