#ifndef GSR_ERROR_HPP
#define GSR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace gsr {

enum class ErrorKind {
  dimension_mismatch,
  non_finite,
  non_convergence,
  singular,
  asymmetric,
  invalid_word,
  budget_exceeded,
  invalid_input,
  condition_k,
  inconsistent,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::non_finite: return "non_finite";
    case ErrorKind::non_convergence: return "non_convergence";
    case ErrorKind::singular: return "singular";
    case ErrorKind::asymmetric: return "asymmetric";
    case ErrorKind::invalid_word: return "invalid_word";
    case ErrorKind::budget_exceeded: return "budget_exceeded";
    case ErrorKind::invalid_input: return "invalid_input";
    case ErrorKind::condition_k: return "condition_k";
    case ErrorKind::inconsistent: return "inconsistent";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gsr

#endif  // GSR_ERROR_HPP
