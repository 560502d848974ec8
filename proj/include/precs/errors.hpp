// errors.hpp — typed error conditions surfaced by the simulation library
#pragma once

#include <stdexcept>
#include <string>

namespace precs {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// model validation
struct EmptySpectrum : Error { using Error::Error; };
struct DegenerateSpectrum : Error { using Error::Error; };
struct NonPositiveHbar : Error { using Error::Error; };

// dynamics
struct StepTooLarge : Error { using Error::Error; };

// phase-space field
struct VanishingWeight : Error { using Error::Error; };
struct GridTooCoarse : Error { using Error::Error; };
struct NotDisjoint : Error { using Error::Error; };

// Fock-space oracle
struct TruncationLeak : Error { using Error::Error; };

// run configuration
struct ConfigError : Error { using Error::Error; };

} // namespace precs
