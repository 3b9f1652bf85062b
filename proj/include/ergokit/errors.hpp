#pragma once

#include <stdexcept>
#include <string>

namespace ergokit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// numerics
struct NonSymmetric : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct IllConditioned : Error { using Error::Error; };
struct NonPositiveInput : Error { using Error::Error; };

// model
struct EvenSites : Error { using Error::Error; };
struct DimensionOverflow : Error { using Error::Error; };
struct ZeroMatrix : Error { using Error::Error; };

// spectral
struct DegenerateSpectrum : Error { using Error::Error; };
struct EmptyGrid : Error { using Error::Error; };
struct NoIntersection : Error { using Error::Error; };
struct NonPositiveTime : Error { using Error::Error; };

// dynamics
struct DimensionMismatch : Error { using Error::Error; };
struct SiteOutOfRange : Error { using Error::Error; };
struct WindowTooSmall : Error { using Error::Error; };

// krylov
struct ZeroOperator : Error { using Error::Error; };
struct SequenceTooShort : Error { using Error::Error; };
struct NotNormalized : Error { using Error::Error; };

// entanglement
struct CutOutOfRange : Error { using Error::Error; };
struct NotDensityMatrix : Error { using Error::Error; };

// cli
struct ConfigError : Error { using Error::Error; };

}  // namespace ergokit
