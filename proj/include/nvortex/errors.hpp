#pragma once

#include <stdexcept>
#include <string>

namespace nvortex {

/// Base of every library error. `category()` groups errors for the CLI exit codes.
class Error : public std::runtime_error {
public:
  enum class Category { Numerical, Infeasible, Config };

  Error(Category c, const std::string& what) : std::runtime_error(what), category_(c) {}
  Category category() const noexcept { return category_; }

private:
  Category category_;
};

#define NVORTEX_DEFINE_ERROR(Name, Cat)                                   \
  class Name : public Error {                                             \
  public:                                                                 \
    explicit Name(const std::string& what)                                \
        : Error(Category::Cat, std::string(#Name ": ") + what) {}         \
  };

// configuration space
NVORTEX_DEFINE_ERROR(CollisionError, Infeasible)
NVORTEX_DEFINE_ERROR(OutsideDomainError, Infeasible)
NVORTEX_DEFINE_ERROR(InvalidArgument, Config)
NVORTEX_DEFINE_ERROR(PreconditionError, Infeasible)

// solvers
NVORTEX_DEFINE_ERROR(NoConvergence, Numerical)
NVORTEX_DEFINE_ERROR(SingularJacobian, Numerical)
NVORTEX_DEFINE_ERROR(ToleranceAmbiguity, Numerical)
NVORTEX_DEFINE_ERROR(TruncationUnstable, Numerical)

// symmetry
NVORTEX_DEFINE_ERROR(NotSymmetric, Infeasible)
NVORTEX_DEFINE_ERROR(StrengthMismatch, Infeasible)

// loops
NVORTEX_DEFINE_ERROR(CollisionOnLoop, Infeasible)
NVORTEX_DEFINE_ERROR(OutsideDomainOnLoop, Infeasible)
NVORTEX_DEFINE_ERROR(LoopLeftDomain, Infeasible)

// continuation
NVORTEX_DEFINE_ERROR(SeedRejected, Infeasible)
NVORTEX_DEFINE_ERROR(SolverFailure, Numerical)
NVORTEX_DEFINE_ERROR(NotApplicable, Infeasible)

// degree and winding
NVORTEX_DEFINE_ERROR(SingularBlock, Numerical)
NVORTEX_DEFINE_ERROR(DegenerateOrbit, Numerical)
NVORTEX_DEFINE_ERROR(ZeroOnContour, Numerical)
NVORTEX_DEFINE_ERROR(AmbiguousWinding, Numerical)

#undef NVORTEX_DEFINE_ERROR

/// Thrown by the Newton loop solver when the bordered Jacobian is rank deficient.
class JacobianSingular : public Error {
public:
  JacobianSingular(const std::string& what, int kernel_dim)
      : Error(Category::Numerical, "JacobianSingular: " + what), kernel_dimension(kernel_dim) {}
  int kernel_dimension;
};

}  // namespace nvortex
