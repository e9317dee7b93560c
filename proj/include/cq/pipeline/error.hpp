#pragma once

#include <stdexcept>
#include <string>

namespace cq::pipeline {

enum class Errc {
    InvalidConfig,
    UnknownKey,
    MissingKey,
    EmptyInput,
    MissingDiffusionModel,
    BadMagic,
    BadVersion,
    Truncated,
    DuplicateName,
    NoRuns,
    Io,
};

const char* to_string(Errc code) noexcept;

/// Validation errors map to exit code 1, everything else to 2.
bool is_validation(Errc code) noexcept;

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

}  // namespace cq::pipeline
