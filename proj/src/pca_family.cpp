#include "plpca/pca_family.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>

namespace plpca {

namespace {

constexpr double kReweightFloor = 1e-10;
constexpr double kMonotoneSlack = 1e-10;
constexpr double kMuGrowth = 1.1;
constexpr double kMuMax = 1e6;
constexpr double kEigenNoise = 64.0 * std::numeric_limits<double>::epsilon();

struct MethodName {
    Method method;
    const char* name;
};

constexpr MethodName kMethodNames[] = {
    {Method::PCA, "PCA"},         {Method::SDSPCA, "SDSPCA"},
    {Method::GLPCA, "GLPCA"},     {Method::LSDSPCA, "LSDSPCA"},
    {Method::RLSDSPCA, "RLSDSPCA"}, {Method::PLPCA_SIMPLE, "PLPCA_SIMPLE"},
    {Method::PLPCA_FULL, "PLPCA_FULL"},
};

// Inverse-norm weights 1 / (2 max(|v|, floor)) for the rows of M.
Eigen::VectorXd reweight(const Eigen::MatrixXd& M)
{
    return (2.0 * M.rowwise().norm().array().max(kReweightFloor)).inverse().matrix();
}

} // namespace

std::string to_string(Method m)
{
    for (const auto& entry : kMethodNames)
        if (entry.method == m)
            return entry.name;
    return "unknown";
}

Method method_from_string(const std::string& s)
{
    std::string upper;
    for (char ch : s)
        upper.push_back(ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    for (const auto& entry : kMethodNames)
        if (upper == entry.name)
            return entry.method;
    // Common spellings.
    if (s == "pLPCA")
        return Method::PLPCA_SIMPLE;
    if (upper == "PLPCA")
        return Method::PLPCA_FULL;
    throw Error(ErrorCategory::config, "unknown method '" + s + "'");
}

MethodTerms terms_of(Method m)
{
    switch (m) {
    case Method::PCA: return {};
    case Method::SDSPCA: return {false, true, true, false, false};
    case Method::GLPCA: return {false, false, false, true, false};
    case Method::LSDSPCA: return {false, true, true, true, false};
    case Method::RLSDSPCA: return {true, true, true, true, false};
    case Method::PLPCA_SIMPLE: return {false, false, false, true, true};
    case Method::PLPCA_FULL: return {true, true, true, true, true};
    }
    return {};
}

void validate(const SolverConfig& cfg, Eigen::Index n, Eigen::Index m)
{
    if (cfg.k < 1 || cfg.k > std::min(n, m))
        throw Error(ErrorCategory::config, "k = " + std::to_string(cfg.k) + " outside [1, min(n, m)] = [1, " +
                                               std::to_string(std::min(n, m)) + "]");
    if (!(cfg.theta > 0.0))
        throw Error(ErrorCategory::config, "convergence tolerance theta must be positive");
    if (cfg.max_iter < 1)
        throw Error(ErrorCategory::config, "max_iter must be >= 1");
    if (!(cfg.mu > 0.0))
        throw Error(ErrorCategory::config, "mu must be positive");
    for (double w : {cfg.alpha, cfg.beta, cfg.gamma})
        if (!std::isfinite(w) || w < 0.0)
            throw Error(ErrorCategory::config, "weights alpha, beta, gamma must be finite and nonnegative");
}

Regularizer build_regularizer(const Eigen::MatrixXd& X, const SolverConfig& cfg)
{
    Regularizer reg;
    const auto terms = terms_of(cfg.method);
    if (!terms.graph || cfg.gamma == 0.0)
        return reg;
    reg.graph = build_knn_graph(X, cfg.knn_k, cfg.eta);
    if (!terms.persistent) {
        reg.matrix = reg.graph->L;
        return reg;
    }
    if (static_cast<int>(cfg.zeta.size()) != cfg.p)
        throw Error(ErrorCategory::config, "zeta has " + std::to_string(cfg.zeta.size()) +
                                               " weights but p = " + std::to_string(cfg.p));
    reg.persistent = aggregate_pl(filtered_family(reg.graph->L, cfg.p, cfg.direction), cfg.zeta, cfg.direction);
    reg.matrix = reg.persistent->PL;
    return reg;
}

double objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const SolverConfig& cfg,
                 const ProjectionModel& model, const Eigen::MatrixXd& R)
{
    const auto terms = terms_of(cfg.method);
    const auto& U = model.U;
    const auto& Q = model.Q;
    if (U.rows() != X.cols() || Q.rows() != X.rows() || U.cols() != Q.cols())
        throw Error(ErrorCategory::shape, "objective: model shapes do not match the data");

    // Residual in the samples x features layout; the L2,1 loss sums the norms
    // of its feature columns (the rows of the features x samples residual).
    const Eigen::MatrixXd residual = X - Q * U.transpose();
    double value = terms.l21_loss ? l21_norm(residual.transpose()) : residual.squaredNorm();

    if (terms.labels && cfg.alpha != 0.0) {
        if (Y.cols() != Q.rows() || model.A.rows() != Y.rows() || model.A.cols() != Q.cols())
            throw Error(ErrorCategory::shape, "objective: label matrix shapes do not match");
        value += cfg.alpha * (Y - model.A * Q.transpose()).squaredNorm();
    }
    if (terms.sparsity && cfg.beta != 0.0)
        value += cfg.beta * l21_norm(Q);
    if (terms.graph && cfg.gamma != 0.0)
        value += cfg.gamma * laplacian_quadratic(Q, R);
    return value;
}

double objective(const ExpressionDataset& ds, const std::optional<OneHotMatrix>& Y, const SolverConfig& cfg,
                 const ProjectionModel& model)
{
    const Eigen::MatrixXd labels = Y ? Y->Y : Eigen::MatrixXd();
    return objective(ds.X, labels, cfg, model, build_regularizer(ds.X, cfg).matrix);
}

ProjectionModel fit_with_regularizer(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const SolverConfig& cfg,
                                     const Eigen::MatrixXd& R)
{
    const Eigen::Index n = X.rows();
    const Eigen::Index m = X.cols();
    validate(cfg, n, m);
    if (!X.allFinite())
        throw Error(ErrorCategory::numerical, "fit: data contains NaN or Inf");
    const auto terms = terms_of(cfg.method);
    if (terms.labels && Y.size() == 0)
        throw Error(ErrorCategory::config, to_string(cfg.method) + " is supervised and needs a label matrix");
    if (terms.labels && Y.cols() != n)
        throw Error(ErrorCategory::shape, "label matrix has " + std::to_string(Y.cols()) + " columns for " +
                                              std::to_string(n) + " samples");
    const bool use_graph = terms.graph && cfg.gamma != 0.0;
    if (use_graph && (R.rows() != n || R.cols() != n))
        throw Error(ErrorCategory::shape, "regularizer must be n x n");

    const bool use_labels = terms.labels && cfg.alpha != 0.0;
    const bool use_sparsity = terms.sparsity && cfg.beta != 0.0;

    // Iteration-independent part of the Q-step matrix.
    Eigen::MatrixXd fixed = Eigen::MatrixXd::Zero(n, n);
    if (!terms.l21_loss)
        fixed.noalias() -= X * X.transpose();
    if (use_labels)
        fixed.noalias() -= cfg.alpha * (Y.transpose() * Y);
    if (use_graph)
        fixed += cfg.gamma * R;

    ProjectionModel model;
    model.loss_weights = Eigen::VectorXd::Ones(m);
    model.sparse_weights = Eigen::VectorXd::Ones(n);
    model.multiplier = Eigen::MatrixXd::Identity(cfg.k, cfg.k);
    model.mu = cfg.mu;

    Eigen::MatrixXd Q_prev;
    struct {
        Eigen::MatrixXd Q, U, A;
    } previous;
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        Eigen::MatrixXd Mq = fixed;
        if (terms.l21_loss)
            Mq.noalias() -= X * model.loss_weights.asDiagonal() * X.transpose();
        if (use_sparsity)
            Mq.diagonal() += cfg.beta * model.sparse_weights;
        Mq = 0.5 * (Mq + Mq.transpose()).eval();

        previous.Q = model.Q;
        previous.U = model.U;
        previous.A = model.A;
        try {
            model.Q = q_subproblem(Mq, cfg.k);
        } catch (const Error& e) {
            throw Error(ErrorCategory::numerical, "iteration " + std::to_string(iter) + ": " + e.what());
        }
        model.U = X.transpose() * model.Q;
        if (terms.labels)
            model.A = Y * model.Q;

        const double value = objective(X, Y, cfg, model, R);
        if (!std::isfinite(value))
            throw Error(ErrorCategory::numerical, "iteration " + std::to_string(iter) + ": objective is not finite");
        if (!model.objective_trace.empty()) {
            const double last = model.objective_trace.back();
            if (value > last + kMonotoneSlack * std::abs(last)) {
                // Large reweighting entries inflate |Mq|, and the eigen-step is
                // only accurate to about eps |Mq| per selected direction. A rise
                // inside that bound means the majorizer can no longer make
                // progress in double precision: keep the previous iterate.
                const double noise = kEigenNoise * static_cast<double>(cfg.k) *
                                     Mq.cwiseAbs().rowwise().sum().maxCoeff();
                if (value - last > noise)
                    throw Error(ErrorCategory::numerical, "iteration " + std::to_string(iter) +
                                                              ": objective rose from " + std::to_string(last) +
                                                              " to " + std::to_string(value));
                model.Q = previous.Q;
                model.U = previous.U;
                model.A = previous.A;
                model.precision_limited = true;
                break;
            }
        }
        model.objective_trace.push_back(value);
        model.iterations_run = iter;

        // Majorizer weights at the new iterate.
        if (terms.l21_loss)
            model.loss_weights = reweight((X - model.Q * model.U.transpose()).transpose());
        if (use_sparsity)
            model.sparse_weights = reweight(model.Q);
        // The eigen-step holds Q^T Q = I exactly, so the multiplier is the
        // Rayleigh block and the penalty only follows its schedule.
        model.multiplier = model.Q.transpose() * Mq * model.Q;
        model.mu = std::min(model.mu * kMuGrowth, kMuMax);

        if (iter > 1 && l21_norm(model.Q - Q_prev) < cfg.theta) {
            model.converged = true;
            break;
        }
        Q_prev = model.Q;
    }

    // Orthogonal projection onto span(U): U (U^T U)^{-1/2}, pseudo-inverse
    // square root on a rank-deficient Gram matrix.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram(model.U.transpose() * model.U);
    const Eigen::VectorXd& ev = gram.eigenvalues();
    const double cutoff = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    Eigen::VectorXd inv_sqrt = Eigen::VectorXd::Zero(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > cutoff)
            inv_sqrt(i) = 1.0 / std::sqrt(ev(i));
    model.projection = model.U * gram.eigenvectors() * inv_sqrt.asDiagonal() * gram.eigenvectors().transpose();
    return model;
}

ProjectionModel fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const SolverConfig& cfg)
{
    validate(cfg, X.rows(), X.cols());
    return fit_with_regularizer(X, Y, cfg, build_regularizer(X, cfg).matrix);
}

ProjectionModel fit(const ExpressionDataset& ds, const std::optional<OneHotMatrix>& Y, const SolverConfig& cfg)
{
    return fit(ds.X, Y ? Y->Y : Eigen::MatrixXd(), cfg);
}

Eigen::MatrixXd embed(const ProjectionModel& model, const Eigen::MatrixXd& rows)
{
    if (rows.cols() != model.projection.rows())
        throw Error(ErrorCategory::shape, "embed: rows have " + std::to_string(rows.cols()) + " features, model has " +
                                              std::to_string(model.projection.rows()));
    return rows * model.projection;
}

} // namespace plpca
