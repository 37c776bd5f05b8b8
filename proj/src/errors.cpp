#include "georeshape/errors.hpp"

namespace georeshape {

namespace {

std::string describe_resolution(const std::string& reference,
                                const std::vector<std::string>& candidates, bool ambiguous) {
  std::string msg = ambiguous ? "ambiguous object '" + reference + "', candidates:"
                              : "unknown object '" + reference + "', known objects:";
  for (const auto& c : candidates) msg += " " + c;
  return msg;
}

}  // namespace

ResolutionError::ResolutionError(const std::string& reference,
                                 std::vector<std::string> candidates, bool ambiguous)
    : Error(describe_resolution(reference, candidates, ambiguous)),
      candidates_(std::move(candidates)) {}

NumericError::NumericError(int iteration, int waypoint)
    : Error("non-finite force at iteration " + std::to_string(iteration) + ", waypoint " +
            std::to_string(waypoint)),
      iteration_(iteration),
      waypoint_(waypoint) {}

}  // namespace georeshape
