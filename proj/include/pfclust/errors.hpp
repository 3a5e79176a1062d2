#pragma once

#include <stdexcept>
#include <string>

namespace pfclust {

// Malformed or unreadable input (files, manifests, configuration).
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input on which the affinity model is undefined, e.g. every point identical.
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pfclust
