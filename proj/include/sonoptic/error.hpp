#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sonoptic {

// Base error carrying a stable machine-readable kind tag; the CLI prints
// "error: <kind>: <message>" and exits nonzero.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define SONOPTIC_DEFINE_ERROR(Name)               \
    struct Name : Error {                         \
        explicit Name(const std::string& message) \
            : Error(#Name, message) {}            \
    }

SONOPTIC_DEFINE_ERROR(MalformedFile);
SONOPTIC_DEFINE_ERROR(DimensionTooSmall);
SONOPTIC_DEFINE_ERROR(IllegalLabelValue);
SONOPTIC_DEFINE_ERROR(DimensionMismatch);
SONOPTIC_DEFINE_ERROR(MissingFile);
SONOPTIC_DEFINE_ERROR(InconsistentDimensions);
SONOPTIC_DEFINE_ERROR(UnknownLabel);
SONOPTIC_DEFINE_ERROR(EmptyRegion);
SONOPTIC_DEFINE_ERROR(EmptyHighlight);
SONOPTIC_DEFINE_ERROR(EmptyShadow);
SONOPTIC_DEFINE_ERROR(ObjectAboveSensor);
SONOPTIC_DEFINE_ERROR(RankDeficientFit);
SONOPTIC_DEFINE_ERROR(RegionTooSmall);
SONOPTIC_DEFINE_ERROR(ZeroWeights);
SONOPTIC_DEFINE_ERROR(MissingClass);
SONOPTIC_DEFINE_ERROR(SingularCovariance);
SONOPTIC_DEFINE_ERROR(DegenerateSplit);
SONOPTIC_DEFINE_ERROR(InvalidSpec);
SONOPTIC_DEFINE_ERROR(InvalidArgument);

#undef SONOPTIC_DEFINE_ERROR

}  // namespace sonoptic
