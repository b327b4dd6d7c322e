#pragma once

#include <stdexcept>
#include <string>

namespace risfso {

/// Stable error categories. The numeric values are mirrored by the C API
/// status codes in risfso.h and must not be renumbered.
enum class ErrorCode : int {
    InvalidParams = 1,
    NonConvergent = 2,
    PoleHit = 3,
    Domain = 4,
    Strip = 5,
    Spec = 6,
    DegenerateExponents = 7,
    Config = 8,
    UnknownProfile = 9,
    Compute = 10,
    Io = 11,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define RISFSO_DEFINE_ERROR(Name, Code)                                         \
    class Name : public Error {                                                  \
    public:                                                                      \
        explicit Name(const std::string& what) : Error(ErrorCode::Code, what) {} \
    };

RISFSO_DEFINE_ERROR(InvalidParams, InvalidParams)
RISFSO_DEFINE_ERROR(NonConvergent, NonConvergent)
RISFSO_DEFINE_ERROR(PoleHit, PoleHit)
RISFSO_DEFINE_ERROR(DomainError, Domain)
RISFSO_DEFINE_ERROR(StripError, Strip)
RISFSO_DEFINE_ERROR(SpecError, Spec)
RISFSO_DEFINE_ERROR(DegenerateExponents, DegenerateExponents)
RISFSO_DEFINE_ERROR(ConfigError, Config)
RISFSO_DEFINE_ERROR(UnknownProfile, UnknownProfile)
RISFSO_DEFINE_ERROR(ComputeError, Compute)
RISFSO_DEFINE_ERROR(IoError, Io)

#undef RISFSO_DEFINE_ERROR

}  // namespace risfso
