#pragma once

#include <Eigen/Dense>

namespace wulffgrid::detail {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;
    Eigen::VectorXd x;
};

// maximize c.x  subject to  A x <= b,  x >= 0   (dense dictionary simplex)
LpResult solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

}  // namespace wulffgrid::detail
