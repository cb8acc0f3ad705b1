#pragma once

#include <utility>
#include <vector>

// Small dense two-phase simplex (Bland's rule) for the ordering polytopes.
// All variables are implicitly nonnegative; the objective is minimized.
namespace reprof::lp {

enum class Sense { LE, GE, EQ };

struct Row {
  std::vector<std::pair<int, double>> coef;
  Sense sense = Sense::LE;
  double rhs = 0.0;
};

struct Problem {
  int num_vars = 0;
  std::vector<Row> rows;
  std::vector<double> cost;  // size num_vars; empty means feasibility only
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  std::vector<double> x;
  double value = 0.0;
};

Result solve(const Problem& p);

}  // namespace reprof::lp
