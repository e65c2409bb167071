#pragma once

#include <stdexcept>
#include <string>

namespace cori {

/// Malformed input document (bad JSON, missing field, wrong type).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A base-frame point lands at or behind the camera plane.
class ProjectionError : public std::runtime_error {
 public:
  ProjectionError(int waypoint_index, double depth);
  int waypoint_index() const { return waypoint_index_; }

 private:
  int waypoint_index_;
};

class DeidentificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model or scorer endpoint failure. status is the HTTP status, 0 when no
/// response was received.
class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& message, int status = 0)
      : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

}  // namespace cori
