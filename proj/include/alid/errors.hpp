#pragma once

#include <stdexcept>
#include <string>

namespace alid {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input data problems.
struct NonFiniteComponent : Error { using Error::Error; };
struct MalformedRow : Error { using Error::Error; };
struct EmptyFile : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };

// Dynamics / geometry problems.
struct ImmunizeSingleton : Error { using Error::Error; };
struct ZeroDensity : Error { using Error::Error; };
struct DegenerateStart : Error { using Error::Error; };
struct SeedExcluded : Error { using Error::Error; };

// Capacity / configuration problems.
struct TooLarge : Error { using Error::Error; };
struct InfeasibleSpec : Error { using Error::Error; };
struct NotIndexed : Error { using Error::Error; };

} // namespace alid
