#ifndef CENSEG_ERROR_HPP
#define CENSEG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace censeg {

enum class errc {
    io,       // file missing / unreadable / unwritable
    parse,    // malformed input text
    invalid,  // precondition or invariant violation
    numeric,  // optimizer or numerical failure
    internal,
};

class error : public std::runtime_error {
public:
    error(errc kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    errc kind() const noexcept { return kind_; }

private:
    errc kind_;
};

[[noreturn]] inline void fail(errc kind, const std::string& msg) { throw error(kind, msg); }

}  // namespace censeg

#endif
