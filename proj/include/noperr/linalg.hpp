#pragma once

#include <Eigen/Dense>

namespace noperr {

struct PowerIterOptions {
    int max_iter = 1000;
    double tol = 1e-10;
};

// Largest singular value by power iteration on M^* M from a fixed start
// vector (all ones, normalized), so the result is deterministic.
double spectral_norm(const Eigen::MatrixXd& m, PowerIterOptions opt = {});
double spectral_norm(const Eigen::MatrixXcd& m, PowerIterOptions opt = {});
// same iteration started from x (updated in place); used to sweep many
// similar matrices, e.g. a kernel along the grid
double spectral_norm_warm(const Eigen::MatrixXcd& m, Eigen::VectorXcd& x, PowerIterOptions opt = {});

}  // namespace noperr
