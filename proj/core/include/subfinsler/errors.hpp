#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace subfinsler {

/// Caller supplied inconsistent data (dimension mismatch, zero covector, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested operation is not available for this norm family or group.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An invariant that the library maintains internally failed to hold.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Polytope construction failure (asymmetric input, 0 not interior, degenerate hull).
class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FaceEvent {
  double t = 0.0;
  int from_face = -1;
  int to_face = -1;
};

/// Numerical failure during integration; carries the time where it happened
/// and the event log accumulated so far.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t, std::vector<FaceEvent> events = {})
      : std::runtime_error(what), t_(t), events_(std::move(events)) {}

  double time() const noexcept { return t_; }
  const std::vector<FaceEvent>& events() const noexcept { return events_; }

 private:
  double t_;
  std::vector<FaceEvent> events_;
};

}  // namespace subfinsler
