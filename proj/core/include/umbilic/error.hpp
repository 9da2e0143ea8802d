#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace umbilic {

enum class ErrorKind {
    RankDeficient,
    ContainmentViolated,
    DomainExceeded,
    NormalOutsideBundle,
    DerivativeUnavailable,
    InsufficientSamples,
    StepRejected,
    OutOfSpan,
    MeanCurvatureVanishes,
    TauFloorViolated,
    ConfigInvalid,
    ExpressionInvalid,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind so that
/// scenario runners can record it per seed instead of aborting.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace umbilic
