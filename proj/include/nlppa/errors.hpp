#ifndef NLPPA_ERRORS_HPP
#define NLPPA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nlppa
{

/// Dimension mismatch or otherwise malformed argument.
class InvalidInput : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Regularization or step parameter outside its admissible range.
class InvalidParameter : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A quadratic form that must be positive came out negative beyond tolerance.
class PdViolation : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Subproblem failure inside an iteration; carries the iteration index.
class SolverError : public std::runtime_error
{
public:
    SolverError(const std::string& what, long iteration = -1)
        : std::runtime_error(iteration >= 0 ? "iteration " + std::to_string(iteration) + ": " + what : what),
          m_iteration(iteration)
    {
    }

    long iteration() const noexcept { return m_iteration; }

private:
    long m_iteration;
};

/// Ground-truth computation could not certify a solution.
class OracleFailure : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Serialized instance or report could not be read.
class FormatError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace nlppa

#endif // NLPPA_ERRORS_HPP
