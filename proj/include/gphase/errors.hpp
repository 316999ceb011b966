// errors.hpp: Exception types raised by the gphase library

#pragma once

#include <stdexcept>
#include <string>

namespace gphase {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define GPHASE_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                     \
    public:                                                         \
        explicit Name(const std::string& what) : Error(what) {}     \
    }

// qmat
GPHASE_DEFINE_ERROR(NonHermitianInput);
GPHASE_DEFINE_ERROR(DimensionMismatch);
GPHASE_DEFINE_ERROR(InvalidDensityMatrix);

// gp-core
GPHASE_DEFINE_ERROR(UnwrapFailure);
GPHASE_DEFINE_ERROR(InvalidInitialValue);
GPHASE_DEFINE_ERROR(DegenerateEigenvector);
GPHASE_DEFINE_ERROR(EigenbranchCrossing);

// baths
GPHASE_DEFINE_ERROR(DimensionTooLarge);
GPHASE_DEFINE_ERROR(DegenerateGroundState);

// perturbative
GPHASE_DEFINE_ERROR(DomainError);
GPHASE_DEFINE_ERROR(StencilConditioning);
GPHASE_DEFINE_ERROR(QuadratureNonconvergence);

// parameter records and CLI
GPHASE_DEFINE_ERROR(ValidationError);
GPHASE_DEFINE_ERROR(ConfigParseError);

#undef GPHASE_DEFINE_ERROR

}  // namespace gphase
