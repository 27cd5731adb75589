#pragma once

#include <stdexcept>
#include <string>

namespace camo {

/// Base of every error thrown by the toolkit. `kind()` is a stable short tag
/// used in machine-readable error output.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define CAMO_DEFINE_ERROR(Name, tag)                                          \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& what) : Error(tag, what) {}          \
    };

CAMO_DEFINE_ERROR(IngestError, "ingest")
CAMO_DEFINE_ERROR(ValidationError, "validation")
CAMO_DEFINE_ERROR(DomainError, "domain")
CAMO_DEFINE_ERROR(BehindCameraError, "behind_camera")
CAMO_DEFINE_ERROR(ShapeError, "shape")
CAMO_DEFINE_ERROR(ContractError, "contract")
CAMO_DEFINE_ERROR(UnsupportedShapeError, "unsupported_shape")
CAMO_DEFINE_ERROR(SampleError, "sample")
CAMO_DEFINE_ERROR(TrainingError, "training")
CAMO_DEFINE_ERROR(ConfigError, "config")
CAMO_DEFINE_ERROR(ConflictError, "conflict")
CAMO_DEFINE_ERROR(NotFoundError, "not_found")
CAMO_DEFINE_ERROR(ForbiddenError, "forbidden")

#undef CAMO_DEFINE_ERROR

}  // namespace camo
