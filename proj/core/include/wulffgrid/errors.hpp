#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wulffgrid {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define WULFFGRID_ERROR(Name)                                                   \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}   \
    }

// geometry
WULFFGRID_ERROR(DegenerateHull);
WULFFGRID_ERROR(Unbounded);
WULFFGRID_ERROR(Empty);
WULFFGRID_ERROR(DimensionMismatch);
WULFFGRID_ERROR(ZeroVector);
WULFFGRID_ERROR(FormatMismatch);

// lattice energies
WULFFGRID_ERROR(ZeroDirection);
WULFFGRID_ERROR(SingularMap);
WULFFGRID_ERROR(NotInLattice);
WULFFGRID_ERROR(InfeasibleCount);
WULFFGRID_ERROR(SpanDeficient);
WULFFGRID_ERROR(ChannelNotInSupport);
WULFFGRID_ERROR(InvalidPotential);

// wulff
WULFFGRID_ERROR(MixedSigns);
WULFFGRID_ERROR(Degenerate);

// multigrid / quasicrystal
WULFFGRID_ERROR(DetConditionViolated);
WULFFGRID_ERROR(DegenerateTranslations);
WULFFGRID_ERROR(SingularSubset);
WULFFGRID_ERROR(GenericityViolation);
WULFFGRID_ERROR(MissingNormal);
WULFFGRID_ERROR(InvalidSubset);

// config documents
WULFFGRID_ERROR(ConfigError);

#undef WULFFGRID_ERROR

// Tiling failures carry the offending sample point.
class TilingError : public Error {
public:
    TilingError(const std::string& what, std::vector<double> witness)
        : Error(what), witness_(std::move(witness)) {}
    const std::vector<double>& witness() const { return witness_; }

private:
    std::vector<double> witness_;
};

class OverlapDetected : public TilingError {
public:
    OverlapDetected(const std::string& what, std::vector<double> witness)
        : TilingError("OverlapDetected: " + what, std::move(witness)) {}
};

class GapDetected : public TilingError {
public:
    GapDetected(const std::string& what, std::vector<double> witness)
        : TilingError("GapDetected: " + what, std::move(witness)) {}
};

}  // namespace wulffgrid
