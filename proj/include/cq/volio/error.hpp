#pragma once

#include <stdexcept>
#include <string>

namespace cq::volio {

enum class Errc {
    BadMagic,
    UnsupportedDatatype,
    Truncated,
    BadRank,
    InvalidRequest,
    EmptyPlan,
    IndexOutOfRange,
    BadFormat,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code)
    {
    }
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace cq::volio
