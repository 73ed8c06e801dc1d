#include "risra/error.hpp"

namespace risra {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::NonPowerOfTwoElements: return "NonPowerOfTwoElements";
    case ErrorKind::ProbeExceedsCoherence: return "ProbeExceedsCoherence";
    case ErrorKind::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorKind::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorKind::InvalidSchedule: return "InvalidSchedule";
    case ErrorKind::EmptyGrantSet: return "EmptyGrantSet";
    case ErrorKind::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorKind::StepSizeOutOfRange: return "StepSizeOutOfRange";
    case ErrorKind::SkipCapExceeded: return "SkipCapExceeded";
    case ErrorKind::MissingLambdaStar: return "MissingLambdaStar";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Io: return "IoError";
    }
    return "Error";
}

} // namespace risra
