#pragma once

// Independent reference computations used to derive the frozen values in the
// unit tests. They share no code with the library solvers.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

// Minimizes w^T S w over w = (a, 1 - a) on a grid of a in [lo, hi].
inline double grid_min_pair(const Eigen::Matrix2d& s, double lo, double hi, double step = 1e-5) {
    double best_a = lo;
    double best = std::numeric_limits<double>::infinity();
    for (double a = lo; a <= hi + 1e-15; a += step) {
        const Eigen::Vector2d w(a, 1.0 - a);
        const double v = w.dot(s * w);
        if (v < best) {
            best = v;
            best_a = a;
        }
    }
    return best_a;
}

// Minimizes w^T S w over the 3-simplex on a grid with the given resolution.
inline Eigen::Vector3d grid_min_simplex3(const Eigen::Matrix3d& s, int steps = 400) {
    Eigen::Vector3d best_w = Eigen::Vector3d::Constant(1.0 / 3.0);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= steps; ++i) {
        for (int j = 0; i + j <= steps; ++j) {
            const Eigen::Vector3d w(double(i) / steps, double(j) / steps, double(steps - i - j) / steps);
            const double v = w.dot(s * w);
            if (v < best) {
                best = v;
                best_w = w;
            }
        }
    }
    return best_w;
}

// Textbook formula with explicit inverses: S^-1 J (J^T S^-1 J)^-1.
inline Eigen::MatrixXd maximal_by_inverse(const Eigen::MatrixXd& s, const Eigen::MatrixXd& j) {
    const Eigen::MatrixXd si = s.inverse();
    return si * j * (j.transpose() * si * j).inverse();
}

// Mean and standard error of a sample.
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
    MeanSe r;
    for (double x : v) r.mean += x;
    r.mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    return r;
}

}  // namespace oracle
