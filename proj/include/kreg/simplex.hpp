#pragma once

#include <Eigen/Dense>
#include <functional>

namespace kreg {

// Nelder-Mead downhill simplex with the standard coefficients
// (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
struct NelderMeadOptions {
    int max_iterations = 500;
    double x_tolerance = 1e-7;   // relative simplex diameter
    double f_tolerance = 1e-10;  // relative value spread
    double initial_step = 0.25;  // offset of the extra vertices from x0
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0,
                             const NelderMeadOptions& options = {});

}  // namespace kreg
