// errors.hpp - exception types thrown across the library
#ifndef WICKBENCH_ERRORS_HPP
#define WICKBENCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wickbench {

struct ModeCountExceeded : std::runtime_error {
  explicit ModeCountExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct SiteOutOfRange : std::out_of_range {
  explicit SiteOutOfRange(const std::string& what) : std::out_of_range(what) {}
};

struct KernelNotHermitian : std::invalid_argument {
  explicit KernelNotHermitian(const std::string& what) : std::invalid_argument(what) {}
};

struct RangeViolation : std::invalid_argument {
  explicit RangeViolation(const std::string& what) : std::invalid_argument(what) {}
};

struct EigenFailure : std::runtime_error {
  explicit EigenFailure(const std::string& what) : std::runtime_error(what) {}
};

struct OverflowRisk : std::runtime_error {
  explicit OverflowRisk(const std::string& what) : std::runtime_error(what) {}
};

struct OddOperatorUnsupported : std::invalid_argument {
  explicit OddOperatorUnsupported(const std::string& what) : std::invalid_argument(what) {}
};

struct CumulantOrderExceeded : std::invalid_argument {
  explicit CumulantOrderExceeded(const std::string& what) : std::invalid_argument(what) {}
};

struct SeriesDivergenceSuspected : std::runtime_error {
  explicit SeriesDivergenceSuspected(const std::string& what) : std::runtime_error(what) {}
};

struct PositiveTimeUnsupported : std::invalid_argument {
  explicit PositiveTimeUnsupported(const std::string& what) : std::invalid_argument(what) {}
};

struct QuadratureBudgetExceeded : std::runtime_error {
  explicit QuadratureBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct UnitarityLost : std::runtime_error {
  explicit UnitarityLost(const std::string& what) : std::runtime_error(what) {}
};

struct ObservableNotQuadratic : std::invalid_argument {
  explicit ObservableNotQuadratic(const std::string& what) : std::invalid_argument(what) {}
};

struct DegenerateFit : std::runtime_error {
  explicit DegenerateFit(const std::string& what) : std::runtime_error(what) {}
};

struct BudgetUnattainable : std::runtime_error {
  explicit BudgetUnattainable(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::invalid_argument {
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace wickbench

#endif
