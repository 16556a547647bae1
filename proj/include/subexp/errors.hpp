// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace subexp {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag used in CLI failure records.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define SUBEXP_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name, what) {}         \
    }

SUBEXP_DEFINE_ERROR(ValueError);
SUBEXP_DEFINE_ERROR(SchemaError);
SUBEXP_DEFINE_ERROR(NonIntegrable);
SUBEXP_DEFINE_ERROR(NotConvergent);
SUBEXP_DEFINE_ERROR(QuadratureNotConverged);
SUBEXP_DEFINE_ERROR(DimensionTooLarge);
SUBEXP_DEFINE_ERROR(TargetOutOfRange);
SUBEXP_DEFINE_ERROR(TargetOutsideM);
SUBEXP_DEFINE_ERROR(StateSpaceTooLarge);
SUBEXP_DEFINE_ERROR(NonLattice);
SUBEXP_DEFINE_ERROR(TooLargeForBruteForce);
SUBEXP_DEFINE_ERROR(MuNotAttainable);
SUBEXP_DEFINE_ERROR(UnsupportedMode);

#undef SUBEXP_DEFINE_ERROR

}  // namespace subexp
