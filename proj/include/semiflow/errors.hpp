#pragma once

#include <stdexcept>
#include <string>

namespace semiflow {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A point lies outside the domain of the map, grid, or branch word.
struct DomainError : Error {
    using Error::Error;
};

/// Partition intervals (or branch images inside one interval) intersect.
struct OverlapError : Error {
    using Error::Error;
};

/// A sampled inverse-branch derivative has modulus >= 1.
struct ExpansionError : Error {
    using Error::Error;
};

/// No power of the transition matrix is entrywise positive.
struct MixingError : Error {
    using Error::Error;
};

/// A branch image escapes its target interval, or the images fail to
/// cover the target.
struct RangeError : Error {
    using Error::Error;
};

/// Power iteration failed to converge.
struct ConvergenceError : Error {
    using Error::Error;
};

/// Neumann series shows no decay; the point s is at or near the spectrum.
struct DivergenceError : Error {
    using Error::Error;
};

/// Contraction probe hit its iteration cap without reaching the target.
struct NoContractionError : Error {
    using Error::Error;
};

/// The witness oscillation D|b| is too small to place partition points.
struct InsufficientOscillationError : Error {
    using Error::Error;
};

/// An input function violates the seminorm hypothesis of a probe.
struct HypothesisError : Error {
    using Error::Error;
};

/// Branch words have different lengths or incompatible domains.
struct WordMismatchError : Error {
    using Error::Error;
};

/// Too few usable samples to fit a decay model.
struct InsufficientDataError : Error {
    using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace semiflow
