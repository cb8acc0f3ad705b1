#pragma once

#include <stdexcept>
#include <string>

namespace reprof {

// Malformed input or a violated precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configuration that needs infinite bandwidth or admits no feasible point.
class Infeasible : public std::runtime_error {
 public:
  Infeasible(const std::string& what, std::string flow_id = {})
      : std::runtime_error(what), flow_id_(std::move(flow_id)) {}
  const std::string& flow_id() const { return flow_id_; }

 private:
  std::string flow_id_;
};

}  // namespace reprof
