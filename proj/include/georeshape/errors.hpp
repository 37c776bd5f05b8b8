#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace georeshape {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Not enough points for the requested statistic.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class NoClusterError : public Error {
 public:
  NoClusterError() : Error("no object cluster found") {}
};

class DegenerateCloudError : public Error {
 public:
  DegenerateCloudError() : Error("degenerate cloud") {}
};

/// Structured-document validation failure. `path()` names the offending
/// field, e.g. "constraints[1].intensity".
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// An object reference that matched nothing, or more than one object.
class ResolutionError : public Error {
 public:
  /// `ambiguous` distinguishes several matches from no match; in the latter
  /// case `candidates` lists every known object.
  ResolutionError(const std::string& reference, std::vector<std::string> candidates,
                  bool ambiguous);
  const std::vector<std::string>& candidates() const { return candidates_; }

 private:
  std::vector<std::string> candidates_;
};

class InterpretationError : public Error {
 public:
  explicit InterpretationError(const std::string& what,
                               std::vector<std::string> raw_replies = {})
      : Error(what), raw_replies_(std::move(raw_replies)) {}
  const std::vector<std::string>& raw_replies() const { return raw_replies_; }

 private:
  std::vector<std::string> raw_replies_;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

/// Non-finite force during optimization.
class NumericError : public Error {
 public:
  NumericError(int iteration, int waypoint);
  int iteration() const { return iteration_; }
  int waypoint() const { return waypoint_; }

 private:
  int iteration_;
  int waypoint_;
};

}  // namespace georeshape
