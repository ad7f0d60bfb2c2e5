#pragma once

#include "plpca/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace plpca {

/// KNN similarity graph with Gaussian-kernel weights and its Laplacian L = D - W.
template <typename Scalar>
struct GraphLaplacian {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Matrix W; ///< symmetric, zero diagonal, entries in [0, 1]
    Matrix D; ///< diagonal degree matrix
    Matrix L;
    Scalar eta{1};
    int knn_k = 0;
};

/// All pairwise squared Euclidean distances between the rows of X.
/// Computed from explicit differences so coincident rows give exactly 0.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
pairwise_sq_distances(const Eigen::MatrixBase<Derived>& X)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = X.rows();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d2 =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            d2(i, j) = d2(j, i) = (X.row(i) - X.row(j)).squaredNorm();
    return d2;
}

/// Symmetrized (union) KNN adjacency: i~j iff j is among i's knn_k nearest
/// rows or i is among j's. Neighbor ties are broken by lower index.
/// Returns a 0/1 matrix.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
knn_adjacency(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& d2, int knn_k)
{
    const Eigen::Index n = d2.rows();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    std::vector<Eigen::Index> order;
    for (Eigen::Index i = 0; i < n; ++i) {
        order.resize(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        order.erase(order.begin() + i);
        std::partial_sort(order.begin(), order.begin() + knn_k, order.end(),
                          [&](Eigen::Index a, Eigen::Index b) {
                              return d2(i, a) < d2(i, b) || (d2(i, a) == d2(i, b) && a < b);
                          });
        for (int r = 0; r < knn_k; ++r) {
            const auto j = order[static_cast<std::size_t>(r)];
            A(i, j) = A(j, i) = Scalar(1);
        }
    }
    return A;
}

/// Builds the Gaussian-weighted KNN graph over the rows of X.
///
/// Edge weights are exp(-|x_i - x_j|^2 / eta). When eta is absent it is set to
/// the squared median distance over connected pairs (1 if that median is 0).
template <typename Derived>
GraphLaplacian<typename Derived::Scalar>
build_knn_graph(const Eigen::MatrixBase<Derived>& X, int knn_k,
                std::optional<typename Derived::Scalar> eta = std::nullopt)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = X.rows();
    if (knn_k < 1 || knn_k > n - 1)
        throw Error(ErrorCategory::config, "knn_k must lie in [1, n-1]; got " + std::to_string(knn_k) +
                                               " with n = " + std::to_string(n));
    if (!X.allFinite())
        throw Error(ErrorCategory::numerical, "graph input contains NaN or Inf");
    if (eta && !(*eta > Scalar(0)))
        throw Error(ErrorCategory::config, "kernel bandwidth eta must be positive");

    const auto d2 = pairwise_sq_distances(X);
    const auto A = knn_adjacency<Scalar>(d2, knn_k);

    GraphLaplacian<Scalar> g;
    g.knn_k = knn_k;
    if (eta) {
        g.eta = *eta;
    } else {
        std::vector<Scalar> dist;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j)
                if (A(i, j) != Scalar(0))
                    dist.push_back(std::sqrt(d2(i, j)));
        std::sort(dist.begin(), dist.end());
        const std::size_t h = dist.size() / 2;
        const Scalar median = dist.size() % 2 ? dist[h] : (dist[h - 1] + dist[h]) / Scalar(2);
        g.eta = median > Scalar(0) ? median * median : Scalar(1);
    }

    g.W = (A.array() * (-d2.array() / g.eta).exp()).matrix();
    g.D = g.W.rowwise().sum().asDiagonal();
    g.L = g.D - g.W;
    return g;
}

/// tr(Q^T L Q). For L = D - W this equals 1/2 * sum_{i,j} W_ij |Q_i - Q_j|^2.
template <typename DerivedQ, typename DerivedL>
typename DerivedQ::Scalar laplacian_quadratic(const Eigen::MatrixBase<DerivedQ>& Q,
                                              const Eigen::MatrixBase<DerivedL>& L)
{
    if (L.rows() != L.cols() || L.cols() != Q.rows())
        throw Error(ErrorCategory::shape, "laplacian_quadratic: L is " + std::to_string(L.rows()) + "x" +
                                              std::to_string(L.cols()) + ", Q has " + std::to_string(Q.rows()) +
                                              " rows");
    return (Q.transpose() * L * Q).trace();
}

} // namespace plpca
