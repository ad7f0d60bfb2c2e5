#pragma once

// Random solver instances shared by the unit and acceptance tests.

#include "plpca/datamodel.hpp"
#include "plpca/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace instances {

using plpca::Rng;

inline Eigen::MatrixXd gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols)
{
    Eigen::MatrixXd M(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            M(i, j) = rng.normal();
    return M;
}

struct Instance {
    Eigen::MatrixXd X;
    std::vector<int> labels;
    Eigen::MatrixXd Y;
    int k = 1;
};

inline Instance random_instance(Rng& rng, int max_n = 40, int max_m = 60)
{
    Instance in;
    const int n = 8 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_n - 7)));
    const int m = 3 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_m - 2)));
    const int c = 2 + static_cast<int>(rng.below(3));
    in.X = gaussian(rng, n, m);
    for (int i = 0; i < n; ++i) {
        in.labels.push_back(i % c);
        in.X(i, i % m) += 3.0 * (i % c);
    }
    in.Y = plpca::one_hot(in.labels, c).Y;
    in.k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min({8, n, m}))));
    return in;
}

inline double orthonormality_error(const Eigen::MatrixXd& Q)
{
    return (Q.transpose() * Q - Eigen::MatrixXd::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff();
}

inline bool non_increasing(const std::vector<double>& trace)
{
    for (std::size_t i = 1; i < trace.size(); ++i)
        if (trace[i] > trace[i - 1] + 1e-10 * std::abs(trace[i - 1]))
            return false;
    return true;
}

} // namespace instances
