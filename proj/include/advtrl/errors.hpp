#pragma once

#include <stdexcept>
#include <string>

namespace advtrl {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define ADVTRL_ERROR(NAME)                  \
    struct NAME : Error {                   \
        using Error::Error;                 \
    }

// env
ADVTRL_ERROR(StepAfterTerminal);
ADVTRL_ERROR(InvalidLevel);
ADVTRL_ERROR(InvalidVariant);

// augment
ADVTRL_ERROR(NonPositiveSigma);
ADVTRL_ERROR(InvalidCell);
ADVTRL_ERROR(InvalidFactor);
ADVTRL_ERROR(DimensionMismatch);

// nn
ADVTRL_ERROR(ShapeMismatch);
ADVTRL_ERROR(NonFiniteGradient);
ADVTRL_ERROR(IoError);
ADVTRL_ERROR(CorruptCheckpoint);
ADVTRL_ERROR(VersionMismatch);

// dqn
ADVTRL_ERROR(UnknownState);
ADVTRL_ERROR(BufferTooSmall);

// eval
ADVTRL_ERROR(IncomparableCurves);
ADVTRL_ERROR(EmptyInput);

// cli
ADVTRL_ERROR(ConfigError);
ADVTRL_ERROR(MissingCheckpoint);
ADVTRL_ERROR(MissingBaseline);

#undef ADVTRL_ERROR

}  // namespace advtrl
