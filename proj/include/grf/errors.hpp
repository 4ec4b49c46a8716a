#ifndef GRF_ERRORS_HPP
#define GRF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace grf {

// Invalid argument value (out of the mathematical domain of an operation).
class DomainError : public std::invalid_argument {
  public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Result not representable as a finite double.
class OverflowError : public std::range_error {
  public:
    explicit OverflowError(const std::string& what) : std::range_error(what) {}
};

// A numerical routine could not reach its accuracy target.
class AccuracyError : public std::runtime_error {
  public:
    explicit AccuracyError(const std::string& what) : std::runtime_error(what) {}
};

// Inconsistent or unsupported configuration (mismatched domains, bad sizes).
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Matrix factorization broke down; `pivot` is the index of the failing pivot
// in the original (unpermuted) numbering, or -1 when not applicable.
class FactorizationError : public std::runtime_error {
  public:
    FactorizationError(const std::string& what, long pivot_index)
        : std::runtime_error(what), pivot(pivot_index) {}
    long pivot;
};

// A model failed semantic validation; `index` points at the offending
// coefficient or entry when there is one.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::string& what, long index = -1)
        : std::runtime_error(what), index(index) {}
    long index;
};

}  // namespace grf

#endif  // GRF_ERRORS_HPP
