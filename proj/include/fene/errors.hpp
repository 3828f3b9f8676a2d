// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fene {

// Stable error codes, mirrored one-to-one by the C API status values.
enum class ErrorCode : int {
    ok = 0,
    invalid_argument,
    domain,
    missing_moment,
    dimension_mismatch,
    rejection_overflow,
    newton_divergence,
    singular_jacobian,
    infeasible_moments,
    quadrature_failure,
    support_violation,
    bin_mismatch,
    too_few_batches,
    parse,
    io,
    internal,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

#define FENE_DEFINE_ERROR(Name, code_value)                                             \
    class Name : public Error {                                                         \
      public:                                                                           \
        explicit Name(const std::string& what) : Error(ErrorCode::code_value, what) {}  \
    }

FENE_DEFINE_ERROR(InvalidArgumentError, invalid_argument);
FENE_DEFINE_ERROR(DomainError, domain);
FENE_DEFINE_ERROR(MissingMomentError, missing_moment);
FENE_DEFINE_ERROR(DimensionMismatchError, dimension_mismatch);
FENE_DEFINE_ERROR(RejectionOverflowError, rejection_overflow);
FENE_DEFINE_ERROR(NewtonDivergenceError, newton_divergence);
FENE_DEFINE_ERROR(SingularJacobianError, singular_jacobian);
FENE_DEFINE_ERROR(InfeasibleMomentsError, infeasible_moments);
FENE_DEFINE_ERROR(QuadratureFailureError, quadrature_failure);
FENE_DEFINE_ERROR(SupportViolationError, support_violation);
FENE_DEFINE_ERROR(BinMismatchError, bin_mismatch);
FENE_DEFINE_ERROR(TooFewBatchesError, too_few_batches);
FENE_DEFINE_ERROR(ParseError, parse);
FENE_DEFINE_ERROR(IoError, io);
FENE_DEFINE_ERROR(InternalError, internal);

#undef FENE_DEFINE_ERROR

} // namespace fene
