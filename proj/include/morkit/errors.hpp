#pragma once

#include <stdexcept>
#include <string>

namespace morkit
{

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error
{
   public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error
{
   public:
    using Error::Error;
};

class IndexOutOfRange : public Error
{
   public:
    using Error::Error;
};

class MissingParameter : public Error
{
   public:
    using Error::Error;
};

class InvalidArgument : public Error
{
   public:
    using Error::Error;
};

class NotSupported : public Error
{
   public:
    using Error::Error;
};

/// Singular systems, non-convergence and NaN/Inf blow-ups.
class SolverError : public Error
{
   public:
    explicit SolverError(const std::string& what, double residual = -1.0)
        : Error(what), residual_(residual)
    {
    }

    /// Last residual norm, or a negative value if not applicable.
    double residual() const noexcept { return residual_; }

   private:
    double residual_;
};

}  // namespace morkit
