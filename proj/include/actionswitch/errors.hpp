#pragma once

#include <stdexcept>
#include <string>

namespace actionswitch {

// Invalid argument values: inverted intervals, out-of-range labels, bad dims,
// non-finite logits.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An instance set needs more simultaneous switches than configured (strict
// encoding only).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Streaming call sequence violated (e.g. skipped frame index).
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed files and records.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace actionswitch
