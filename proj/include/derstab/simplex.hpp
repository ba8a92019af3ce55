#pragma once

#include <Eigen/Core>

namespace derstab::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
    Status status = Status::Infeasible;
    Eigen::VectorXd x;      // primal solution of the standard form
    double objective = 0.0;
    Eigen::VectorXd duals;  // simplex multipliers; solve max bᵀy s.t. Aᵀy ≤ c
};

/// Two-phase dense tableau simplex for  min cᵀx  s.t.  Ax = b, x ≥ 0.
/// Dantzig pricing with a permanent switch to Bland's rule when the objective
/// stalls, which protects against cycling on degenerate bases.
Solution solve_standard_form(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                             const Eigen::VectorXd& c);

}  // namespace derstab::lp
