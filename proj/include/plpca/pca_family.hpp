#pragma once

#include "plpca/datamodel.hpp"
#include "plpca/error.hpp"
#include "plpca/graph.hpp"
#include "plpca/persistence.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace plpca {

enum class Method { PCA, SDSPCA, GLPCA, LSDSPCA, RLSDSPCA, PLPCA_SIMPLE, PLPCA_FULL };

inline constexpr Method kAllMethods[] = {Method::PLPCA_FULL, Method::PLPCA_SIMPLE, Method::RLSDSPCA,
                                         Method::LSDSPCA,    Method::SDSPCA,       Method::GLPCA,
                                         Method::PCA};

std::string to_string(Method m);
Method method_from_string(const std::string& s);

/// Which terms of the shared objective a method switches on.
struct MethodTerms {
    bool l21_loss = false; ///< L2,1 data loss instead of squared Frobenius
    bool labels = false;   ///< alpha |Y - A Q^T|_F^2
    bool sparsity = false; ///< beta |Q|_{2,1}
    bool graph = false;    ///< gamma tr(Q^T R Q)
    bool persistent = false; ///< R is the aggregated persistent Laplacian rather than L
};

MethodTerms terms_of(Method m);

struct SolverConfig {
    Method method = Method::PLPCA_FULL;
    int k = 2;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double theta = 1e-6;
    int max_iter = 200;
    double mu = 1.0;

    int p = 6;
    std::vector<double> zeta{1, 1, 1, 1, 1, 1};
    int knn_k = 5;
    std::optional<double> eta; ///< absent means the median heuristic
    FilterDirection direction = FilterDirection::as_text;
};

/// Checks config invariants against an n x m problem. Throws Error(config).
void validate(const SolverConfig& cfg, Eigen::Index n, Eigen::Index m);

struct ProjectionModel {
    Eigen::MatrixXd U; ///< m x k principal directions
    Eigen::MatrixXd Q; ///< n x k projected training rows, Q^T Q = I
    Eigen::MatrixXd A; ///< c x k label fit (empty for unsupervised methods)
    Eigen::MatrixXd projection; ///< m x k orthonormal basis of span(U); a sample row maps to row * projection
    std::vector<double> objective_trace;
    int iterations_run = 0;
    bool converged = false;
    /// The last eigen-step could not lower the objective beyond double-precision
    /// noise and was discarded; the returned iterate is the one before it.
    bool precision_limited = false;

    // Final solver state.
    Eigen::VectorXd loss_weights;   ///< E: per-feature L2,1 reweighting
    Eigen::VectorXd sparse_weights; ///< G: per-sample L2,1 reweighting
    Eigen::MatrixXd multiplier;     ///< C: k x k multiplier of Q^T Q = I
    double mu = 1.0;
};

/// Graph regularizer for a method: the weighted KNN Laplacian, or the
/// aggregated persistent Laplacian built from its filtered family.
struct Regularizer {
    Eigen::MatrixXd matrix; ///< n x n; empty when the method has no graph term or gamma == 0
    std::optional<GraphLaplacian<double>> graph;
    std::optional<PersistentRegularizer<double>> persistent;
};

Regularizer build_regularizer(const Eigen::MatrixXd& X, const SolverConfig& cfg);

/// Sum of the Euclidean norms of the rows.
template <typename Derived>
typename Derived::Scalar l21_norm(const Eigen::MatrixBase<Derived>& M)
{
    return M.rowwise().norm().sum();
}

/// Orthonormal eigenvectors of the k algebraically smallest eigenvalues of a
/// symmetric matrix.
///
/// The result is deterministic: inside a cluster of (numerically) equal
/// eigenvalues the basis is rebuilt by projecting the standard basis vectors
/// onto the eigenspace with largest-residual pivoting (lowest index wins
/// ties), and every column is signed so its largest-magnitude entry is positive.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
q_subproblem(const Eigen::MatrixBase<Derived>& M, Eigen::Index k)
{
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = M.rows();
    if (M.cols() != n)
        throw Error(ErrorCategory::shape, "q_subproblem: matrix must be square");
    if (k < 1 || k > n)
        throw Error(ErrorCategory::config, "q_subproblem: k must lie in [1, n]");
    const Scalar scale = std::max(Scalar(1), M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-10) * scale)
        throw Error(ErrorCategory::numerical, "q_subproblem: matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCategory::numerical, "q_subproblem: eigensolver did not converge");
    const Vector& lambda = es.eigenvalues();
    const Matrix& V = es.eigenvectors();

    // A cluster is measured from its first eigenvalue so that near-ties cannot
    // chain into a wide band.
    const Scalar cluster_tol = Scalar(1e-13) * std::max(Scalar(1), lambda.cwiseAbs().maxCoeff());
    Matrix out(n, k);
    Eigen::Index start = 0;
    while (start < k) {
        Eigen::Index end = start + 1;
        while (end < n && lambda(end) - lambda(start) <= cluster_tol)
            ++end;
        const Eigen::Index size = end - start;
        const Eigen::Index take = std::min(size, k - start);
        if (size == 1) {
            out.col(start) = V.col(start);
        } else {
            const Matrix basis = V.middleCols(start, size);
            // Residuals of e_i after removing the already chosen directions,
            // expressed in eigenspace coordinates (row i of basis).
            Matrix coords = basis.transpose(); // size x n, column i = coords of P e_i
            Matrix chosen(size, take);
            for (Eigen::Index c = 0; c < take; ++c) {
                Eigen::Index best = 0;
                Scalar best_norm = Scalar(-1);
                for (Eigen::Index i = 0; i < n; ++i) {
                    const Scalar nrm = coords.col(i).norm();
                    if (nrm > best_norm * (Scalar(1) + Scalar(1e-12))) {
                        best_norm = nrm;
                        best = i;
                    }
                }
                const Vector dir = coords.col(best) / best_norm;
                chosen.col(c) = dir;
                coords -= dir * (dir.transpose() * coords);
            }
            out.middleCols(start, take) = basis * chosen;
        }
        start += take;
    }

    for (Eigen::Index c = 0; c < k; ++c) {
        Eigen::Index arg = 0;
        const auto col = out.col(c);
        for (Eigen::Index i = 1; i < n; ++i)
            if (std::abs(col(i)) > std::abs(col(arg)) * (Scalar(1) + Scalar(1e-12)))
                arg = i;
        if (col(arg) < Scalar(0))
            out.col(c) = -out.col(c);
    }
    return out;
}

/// Evaluates the method's objective at (U, Q, A) with regularizer R.
/// Y may be empty for unsupervised methods; R may be empty when the graph term is off.
double objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const SolverConfig& cfg,
                 const ProjectionModel& model, const Eigen::MatrixXd& R);

/// Same, building the regularizer from X and cfg.
double objective(const ExpressionDataset& ds, const std::optional<OneHotMatrix>& Y, const SolverConfig& cfg,
                 const ProjectionModel& model);

/// Alternating minimization with a caller-supplied regularizer matrix.
ProjectionModel fit_with_regularizer(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const SolverConfig& cfg,
                                     const Eigen::MatrixXd& R);

ProjectionModel fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const SolverConfig& cfg);

ProjectionModel fit(const ExpressionDataset& ds, const std::optional<OneHotMatrix>& Y, const SolverConfig& cfg);

/// Maps sample rows (r x m) to k coordinates through the learned projection.
Eigen::MatrixXd embed(const ProjectionModel& model, const Eigen::MatrixXd& rows);

} // namespace plpca
