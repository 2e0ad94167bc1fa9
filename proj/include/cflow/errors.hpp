#ifndef CFLOW_ERRORS_HPP
#define CFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

#include "cflow/types.hpp"

namespace cflow {

// Numeric failures map to CLI exit code 2, usage problems to exit code 1.
class Error : public std::runtime_error {
public:
    Error(const char* kind, const std::string& what, bool numeric)
        : std::runtime_error(std::string(kind) + ": " + what), kind_(kind), numeric_(numeric) {}
    const char* kind() const noexcept { return kind_; }
    bool numeric() const noexcept { return numeric_; }

private:
    const char* kind_;
    bool numeric_;
};

#define CFLOW_ERROR(Name, numeric)                                              \
    class Name : public Error {                                                 \
    public:                                                                     \
        explicit Name(const std::string& what) : Error(#Name, what, numeric) {} \
    };

CFLOW_ERROR(PoleError, true)
CFLOW_ERROR(NonConvergence, true)
CFLOW_ERROR(BranchCut, true)
CFLOW_ERROR(SingularSystem, true)
CFLOW_ERROR(NoConvergence, true)
CFLOW_ERROR(CollisionError, true)
CFLOW_ERROR(BranchCollision, true)
CFLOW_ERROR(DomainError, true)
CFLOW_ERROR(SingularFlow, true)
CFLOW_ERROR(DivisionByZero, true)
CFLOW_ERROR(ExceptionalPoint, true)
CFLOW_ERROR(Overflow, true)
CFLOW_ERROR(StepSizeUnderflow, true)
CFLOW_ERROR(TruncationWarning, true)
CFLOW_ERROR(DegenerateTrajectory, true)
CFLOW_ERROR(RangeError, false)
CFLOW_ERROR(DimensionMismatch, false)
CFLOW_ERROR(ParseError, false)
CFLOW_ERROR(ValidationError, false)
CFLOW_ERROR(SchemaError, false)

#undef CFLOW_ERROR

// Finite-time divergence of a flow; keeps everything integrated before tau*.
class BlowUp : public Error {
public:
    BlowUp(const std::string& what, cplx tau_star, Trajectory partial)
        : Error("BlowUp", what, true), tau_star(tau_star), partial(std::move(partial)) {}
    cplx tau_star;
    Trajectory partial;
};

}  // namespace cflow

#endif
