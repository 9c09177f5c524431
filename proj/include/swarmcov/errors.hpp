#pragma once

#include <stdexcept>
#include <string>

namespace swarmcov {

// Bad user input: invalid parameters, malformed files, mismatched domains.
class parameter_error : public std::invalid_argument {
public:
    explicit parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

// Input was well-formed but the computation cannot produce a meaningful
// answer: non-convergence, trajectory too short, degenerate samples.
class analysis_error : public std::runtime_error {
public:
    explicit analysis_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace swarmcov
