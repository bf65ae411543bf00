#pragma once

#include <stdexcept>
#include <string>

namespace riccishape {

enum class errc {
    invalid_argument = 1,
    parse,
    validation,
    numeric,
    no_convergence,
    io,
};

class Error : public std::runtime_error {
public:
    Error(errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

} // namespace riccishape
