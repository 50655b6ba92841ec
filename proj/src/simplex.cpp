#include "kreg/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace kreg {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0,
                             const NelderMeadOptions& options) {
    const Eigen::Index dim = x0.size();
    const int m = static_cast<int>(dim) + 1;

    std::vector<Eigen::VectorXd> vertex(m, x0);
    std::vector<double> value(m);
    for (int i = 1; i < m; ++i) vertex[i][i - 1] += options.initial_step;
    for (int i = 0; i < m; ++i) value[i] = f(vertex[i]);

    std::vector<int> order(m);
    auto sort_vertices = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return value[a] < value[b]; });
    };

    NelderMeadResult result;
    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        sort_vertices();
        const int best = order[0];
        const int worst = order[m - 1];

        double diameter = 0.0;
        double spread = 0.0;
        for (int i = 1; i < m; ++i) {
            diameter = std::max(diameter,
                                (vertex[order[i]] - vertex[best]).cwiseAbs().maxCoeff());
            spread = std::max(spread, std::abs(value[order[i]] - value[best]));
        }
        const double x_scale = std::max(1.0, vertex[best].cwiseAbs().maxCoeff());
        const double f_scale = std::max(1.0, std::abs(value[best]));
        if (diameter <= options.x_tolerance * x_scale &&
            spread <= options.f_tolerance * f_scale) {
            result.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (int i = 0; i < m - 1; ++i) centroid += vertex[order[i]];
        centroid /= static_cast<double>(m - 1);

        const Eigen::VectorXd reflected = centroid + kReflect * (centroid - vertex[worst]);
        const double f_reflected = f(reflected);

        const double f_second_worst = value[order[m - 2]];
        if (f_reflected < value[best]) {
            const Eigen::VectorXd expanded =
                centroid + kExpand * kReflect * (centroid - vertex[worst]);
            const double f_expanded = f(expanded);
            if (f_expanded < f_reflected) {
                vertex[worst] = expanded;
                value[worst] = f_expanded;
            } else {
                vertex[worst] = reflected;
                value[worst] = f_reflected;
            }
        } else if (f_reflected < f_second_worst) {
            vertex[worst] = reflected;
            value[worst] = f_reflected;
        } else {
            bool shrink = false;
            if (f_reflected < value[worst]) {
                // Outside contraction.
                const Eigen::VectorXd contracted =
                    centroid + kContract * kReflect * (centroid - vertex[worst]);
                const double f_contracted = f(contracted);
                if (f_contracted <= f_reflected) {
                    vertex[worst] = contracted;
                    value[worst] = f_contracted;
                } else {
                    shrink = true;
                }
            } else {
                // Inside contraction.
                const Eigen::VectorXd contracted =
                    centroid - kContract * (centroid - vertex[worst]);
                const double f_contracted = f(contracted);
                if (f_contracted < value[worst]) {
                    vertex[worst] = contracted;
                    value[worst] = f_contracted;
                } else {
                    shrink = true;
                }
            }
            if (shrink) {
                const int anchor = best;
                for (int i = 1; i < m; ++i) {
                    const int v = order[i];
                    vertex[v] = vertex[anchor] + kShrink * (vertex[v] - vertex[anchor]);
                    value[v] = f(vertex[v]);
                }
            }
        }
    }

    sort_vertices();
    result.x = vertex[order[0]];
    result.value = value[order[0]];
    result.iterations = iter;
    return result;
}

}  // namespace kreg
