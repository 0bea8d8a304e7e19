#pragma once

#include <stdexcept>
#include <string>

namespace dtv {

/// Thrown when a computation cannot certify its result at the available
/// truncation order.  Carries the order that would suffice so callers
/// (and the CLI, via exit code 3) can retry.
class truncation_error : public std::runtime_error {
public:
    truncation_error(const std::string& what, int required_order)
        : std::runtime_error(what), required_trunc_order(required_order) {}

    int required_trunc_order;
};

/// Evaluation requested at (or too close to) a pole of the function.
class pole_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// spectral_polynomial found a non-constant peel coefficient: the operator
/// pair does not actually commute (or the truncation is too coarse).
class not_commuting_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace dtv
