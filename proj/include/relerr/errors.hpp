#pragma once

#include <stdexcept>
#include <string>

namespace relerr {

// Every contract violation carries a stable kind tag ("grid-mismatch",
// "empty-neighborhood", ...) so the CLI can report which contract failed.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& what) : Error("invalid-argument", what) {}
};

struct GridMismatch : Error {
  explicit GridMismatch(const std::string& what) : Error("grid-mismatch", what) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error("parse-error", what) {}
};

struct EstimationImpossible : Error {
  explicit EstimationImpossible(const std::string& what)
      : Error("estimation-impossible", what) {}
};

struct DegenerateFit : Error {
  explicit DegenerateFit(const std::string& what) : Error("degenerate-fit", what) {}
};

struct EmptyNeighborhood : Error {
  EmptyNeighborhood(const std::string& what, std::size_t neighbors)
      : Error("empty-neighborhood", what), neighbors_(neighbors) {}
  std::size_t neighbors() const noexcept { return neighbors_; }

 private:
  std::size_t neighbors_;
};

struct BandwidthSelectionFailed : Error {
  explicit BandwidthSelectionFailed(const std::string& what)
      : Error("bandwidth-selection-failed", what) {}
};

struct DegenerateDesign : Error {
  explicit DegenerateDesign(const std::string& what) : Error("degenerate-design", what) {}
};

struct RunawayRejection : Error {
  explicit RunawayRejection(const std::string& what) : Error("runaway-rejection", what) {}
};

struct CalibrationFailed : Error {
  explicit CalibrationFailed(const std::string& what) : Error("calibration-failed", what) {}
};

struct EmptyReport : Error {
  explicit EmptyReport(const std::string& what) : Error("empty-report", what) {}
};

struct NoData : Error {
  explicit NoData(const std::string& what) : Error("no-data", what) {}
};

}  // namespace relerr
