#pragma once

#include <stdexcept>
#include <string>

namespace copostab {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& msg) : Error("dimension error: " + msg) {}
};

struct SingularError : Error {
  explicit SingularError(const std::string& msg) : Error("singular matrix: " + msg) {}
};

struct AsymmetryError : Error {
  explicit AsymmetryError(const std::string& msg) : Error("matrix not symmetric: " + msg) {}
};

struct PartitionError : Error {
  explicit PartitionError(const std::string& msg) : Error("index partition error: " + msg) {}
};

struct StepSizeError : Error {
  explicit StepSizeError(const std::string& msg) : Error("step size error: " + msg) {}
};

struct NoSolutionError : Error {
  explicit NoSolutionError(const std::string& msg) : Error("complementarity problem unsolvable: " + msg) {}
};

struct EmptyResult : Error {
  explicit EmptyResult(const std::string& msg) : Error("empty result: " + msg) {}
};

struct PreconditionError : Error {
  explicit PreconditionError(const std::string& msg) : Error("precondition violated: " + msg) {}
};

struct BudgetError : Error {
  explicit BudgetError(const std::string& msg) : Error("enumeration budget exceeded: " + msg) {}
};

struct NegativityError : Error {
  explicit NegativityError(const std::string& msg) : Error("negative entry not allowed: " + msg) {}
};

struct UnknownExample : Error {
  explicit UnknownExample(const std::string& msg) : Error("unknown example: " + msg) {}
};

struct InputError : Error {
  explicit InputError(const std::string& msg) : Error("input error: " + msg) {}
};

}  // namespace copostab
