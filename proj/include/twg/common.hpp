#ifndef TWG_COMMON_HPP
#define TWG_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace twg {

// Input could not be parsed (bad syntax, arity mismatch, unbound variable, ...).
struct parse_error : std::runtime_error {
    int line = 0;
    explicit parse_error(const std::string& msg, int ln = 0)
        : std::runtime_error(ln > 0 ? "line " + std::to_string(ln) + ": " + msg : msg), line(ln) {}
};

// A precondition of an operation was violated (invalid TD, wrong matrix kind, ...).
struct invalid_input : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A certified width bound failed to hold. Encoders throw this instead of
// emitting an artifact whose certificate would be wrong.
struct bound_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An intermediate encoding exceeded the configured size cap. This signals the
// inherent tower growth of iterated quantifier elimination, not a bug.
struct resource_limit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void check(bool cond, const char* msg) {
    if (!cond) throw invalid_input(msg);
}

} // namespace twg

#endif
