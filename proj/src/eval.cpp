#include "plpca/eval.hpp"

#include "plpca/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace plpca {

KnnResult knn_predict(const Eigen::MatrixXd& train, const std::vector<int>& train_labels, const Eigen::MatrixXd& test,
                      int k_neighbors, int classes)
{
    const Eigen::Index n_train = train.rows();
    if (n_train == 0)
        throw Error(ErrorCategory::config, "knn_predict: empty training set");
    if (static_cast<Eigen::Index>(train_labels.size()) != n_train)
        throw Error(ErrorCategory::shape, "knn_predict: one label per training row required");
    if (k_neighbors < 1 || k_neighbors > n_train)
        throw Error(ErrorCategory::config, "knn_predict: k_neighbors must lie in [1, #train]");
    if (test.cols() != train.cols())
        throw Error(ErrorCategory::shape, "knn_predict: train and test dimensions differ");
    for (int y : train_labels)
        if (y < 0 || y >= classes)
            throw Error(ErrorCategory::range, "knn_predict: training label outside [0, classes)");

    KnnResult result;
    result.predicted.resize(static_cast<std::size_t>(test.rows()));
    result.votes = Eigen::MatrixXd::Zero(test.rows(), classes);

    std::vector<double> dist(static_cast<std::size_t>(n_train));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n_train));
    std::vector<int> count(static_cast<std::size_t>(classes));
    std::vector<double> summed(static_cast<std::size_t>(classes));
    for (Eigen::Index t = 0; t < test.rows(); ++t) {
        for (Eigen::Index i = 0; i < n_train; ++i)
            dist[static_cast<std::size_t>(i)] = (train.row(i) - test.row(t)).norm();
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::partial_sort(order.begin(), order.begin() + k_neighbors, order.end(), [&](Eigen::Index a, Eigen::Index b) {
            const double da = dist[static_cast<std::size_t>(a)];
            const double db = dist[static_cast<std::size_t>(b)];
            return da < db || (da == db && a < b);
        });

        std::fill(count.begin(), count.end(), 0);
        std::fill(summed.begin(), summed.end(), 0.0);
        for (int r = 0; r < k_neighbors; ++r) {
            const auto i = static_cast<std::size_t>(order[static_cast<std::size_t>(r)]);
            const auto y = static_cast<std::size_t>(train_labels[i]);
            ++count[y];
            summed[y] += dist[i];
        }

        int best = -1;
        for (int c = 0; c < classes; ++c) {
            const auto cc = static_cast<std::size_t>(c);
            if (count[cc] == 0)
                continue;
            if (best < 0) {
                best = c;
                continue;
            }
            const auto bb = static_cast<std::size_t>(best);
            const double margin = 1e-12 * std::max(summed[cc], summed[bb]);
            if (count[cc] > count[bb] || (count[cc] == count[bb] && summed[cc] < summed[bb] - margin))
                best = c;
        }
        result.predicted[static_cast<std::size_t>(t)] = best;
        for (int c = 0; c < classes; ++c)
            result.votes(t, c) = static_cast<double>(count[static_cast<std::size_t>(c)]) / k_neighbors;
    }
    return result;
}

Eigen::MatrixXi confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted, int classes)
{
    if (truth.size() != predicted.size())
        throw Error(ErrorCategory::shape, "confusion_matrix: truth and prediction lengths differ");
    Eigen::MatrixXi C = Eigen::MatrixXi::Zero(classes, classes);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= classes || predicted[i] < 0 || predicted[i] >= classes)
            throw Error(ErrorCategory::range, "confusion_matrix: label outside [0, classes)");
        ++C(truth[i], predicted[i]);
    }
    return C;
}

MacroMetrics macro_metrics(const Eigen::MatrixXi& confusion)
{
    const Eigen::Index c = confusion.rows();
    if (confusion.cols() != c || c == 0)
        throw Error(ErrorCategory::shape, "macro_metrics: confusion matrix must be square and nonempty");
    if ((confusion.array() < 0).any())
        throw Error(ErrorCategory::range, "macro_metrics: negative count");
    const long total = confusion.cast<long>().sum();
    if (total == 0)
        throw Error(ErrorCategory::config, "macro_metrics: no predictions");

    MacroMetrics mm;
    mm.acc = static_cast<double>(confusion.trace()) / static_cast<double>(total);
    for (Eigen::Index i = 0; i < c; ++i) {
        const long tp = confusion(i, i);
        const long actual = confusion.row(i).cast<long>().sum();
        const long called = confusion.col(i).cast<long>().sum();
        if (actual == 0)
            mm.undefined_recall.push_back(static_cast<int>(i));
        if (called == 0)
            mm.undefined_precision.push_back(static_cast<int>(i));
        mm.recall.push_back(actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0);
        mm.precision.push_back(called ? static_cast<double>(tp) / static_cast<double>(called) : 0.0);
    }
    mm.macro_rec = std::accumulate(mm.recall.begin(), mm.recall.end(), 0.0) / static_cast<double>(c);
    mm.macro_pre = std::accumulate(mm.precision.begin(), mm.precision.end(), 0.0) / static_cast<double>(c);
    const double denom = mm.macro_pre + mm.macro_rec;
    mm.macro_f1 = denom > 0.0 ? 2.0 * mm.macro_pre * mm.macro_rec / denom : 0.0;
    return mm;
}

AucResult macro_auc(const Eigen::MatrixXd& scores, const std::vector<int>& truth, const std::vector<int>& predicted,
                    AucMode mode)
{
    const Eigen::Index n = scores.rows();
    const Eigen::Index c = scores.cols();
    if (static_cast<Eigen::Index>(truth.size()) != n)
        throw Error(ErrorCategory::shape, "macro_auc: one truth label per score row required");
    if (mode == AucMode::hard && static_cast<Eigen::Index>(predicted.size()) != n)
        throw Error(ErrorCategory::shape, "macro_auc: hard mode needs one prediction per row");

    Eigen::MatrixXd s = scores;
    if (mode == AucMode::hard) {
        s.setZero();
        for (Eigen::Index i = 0; i < n; ++i)
            s(i, predicted[static_cast<std::size_t>(i)]) = 1.0;
    }

    AucResult out;
    double sum = 0.0;
    for (Eigen::Index l = 0; l < c; ++l) {
        double wins = 0.0;
        long pos = 0, neg = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (truth[static_cast<std::size_t>(i)] != l)
                continue;
            ++pos;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (truth[static_cast<std::size_t>(j)] == l)
                    continue;
                if (s(i, l) > s(j, l))
                    wins += 1.0;
                else if (s(i, l) == s(j, l))
                    wins += 0.5;
            }
        }
        neg = static_cast<long>(n) - pos;
        if (pos == 0 || neg == 0) {
            out.undefined.push_back(static_cast<int>(l));
            continue;
        }
        sum += wins / (static_cast<double>(pos) * static_cast<double>(neg));
    }
    out.value = c ? sum / static_cast<double>(c) : 0.0;
    return out;
}

std::string to_string(AucMode m) { return m == AucMode::hard ? "hard" : "score"; }

AucMode auc_mode_from_string(const std::string& s)
{
    if (s == "hard")
        return AucMode::hard;
    if (s == "score")
        return AucMode::score;
    throw Error(ErrorCategory::config, "unknown AUC mode '" + s + "'");
}

std::string to_string(EvalMode m) { return m == EvalMode::inductive ? "inductive" : "transductive"; }

EvalMode eval_mode_from_string(const std::string& s)
{
    if (s == "inductive")
        return EvalMode::inductive;
    if (s == "transductive")
        return EvalMode::transductive;
    throw Error(ErrorCategory::config, "unknown evaluation mode '" + s + "'");
}

std::vector<int> default_dims()
{
    std::vector<int> dims;
    for (int k = 100; k >= 5; k -= 5)
        dims.push_back(k);
    dims.push_back(1);
    return dims;
}

namespace {

template <typename Vec>
Eigen::MatrixXd take_rows(const Eigen::MatrixXd& M, const Vec& idx)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), M.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = M.row(idx[i]);
    return out;
}

std::vector<int> take(const std::vector<int>& v, const std::vector<int>& idx)
{
    std::vector<int> out;
    out.reserve(idx.size());
    for (int i : idx)
        out.push_back(v[static_cast<std::size_t>(i)]);
    return out;
}

DimensionMetrics average(const std::vector<DimensionMetrics>& xs)
{
    DimensionMetrics m;
    for (const auto& x : xs) {
        m.acc += x.acc;
        m.macro_rec += x.macro_rec;
        m.macro_pre += x.macro_pre;
        m.macro_f1 += x.macro_f1;
        m.macro_auc += x.macro_auc;
    }
    const double n = static_cast<double>(xs.size());
    if (n > 0) {
        m.acc /= n;
        m.macro_rec /= n;
        m.macro_pre /= n;
        m.macro_f1 /= n;
        m.macro_auc /= n;
    }
    return m;
}

/// Runs f(i) for i in [0, count) on up to `jobs` threads; rethrows the first
/// failure by index so the reported error does not depend on scheduling.
template <typename F>
void parallel_for(std::size_t count, int jobs, F&& f)
{
    std::vector<std::exception_ptr> errors(count);
    auto body = [&](std::size_t i) {
        try {
            f(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const auto workers = static_cast<std::size_t>(std::max(1, jobs));
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < std::min(workers, count); ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++)
                    body(i);
            });
        for (auto& t : pool)
            t.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace

EvalReport sweep_dimensions(const ExpressionDataset& ds, const SolverConfig& config, const EvalOptions& options)
{
    if (options.dims.empty())
        throw Error(ErrorCategory::config, "sweep_dimensions: dims list is empty");
    const int c = ds.classes();
    const auto splits = make_splits(ds, options.plan);
    const bool transductive = options.mode == EvalMode::transductive;

    std::size_t min_train = static_cast<std::size_t>(ds.samples());
    for (const auto& s : splits)
        min_train = std::min(min_train, s.train.size());
    const auto fit_rows = transductive ? static_cast<Eigen::Index>(ds.samples()) : static_cast<Eigen::Index>(min_train);
    const auto limit = std::min(fit_rows, ds.features());
    for (int k : options.dims)
        if (k < 1 || k > limit)
            throw Error(ErrorCategory::config, "dimension " + std::to_string(k) + " outside [1, " +
                                                   std::to_string(limit) + "] for this dataset and split");
    if (options.k_neighbors < 1 || static_cast<std::size_t>(options.k_neighbors) > min_train)
        throw Error(ErrorCategory::config, "k_neighbors exceeds the training set size");

    const auto terms = terms_of(config.method);
    struct Prepared {
        Eigen::MatrixXd X_fit;
        Eigen::MatrixXd Y_fit;
        Eigen::MatrixXd R;
        Eigen::MatrixXd X_train;
        Eigen::MatrixXd X_test;
        std::vector<int> y_train;
        std::vector<int> y_test;
    };
    std::vector<Prepared> prepared(splits.size());
    parallel_for(splits.size(), options.jobs, [&](std::size_t r) {
        auto& p = prepared[r];
        const auto& split = splits[r];
        p.X_train = take_rows(ds.X, split.train);
        p.X_test = take_rows(ds.X, split.test);
        p.y_train = take(ds.labels, split.train);
        p.y_test = take(ds.labels, split.test);
        try {
            if (transductive) {
                p.X_fit = ds.X;
                p.Y_fit = one_hot(ds.labels, c).Y;
                for (int i : split.test)
                    p.Y_fit.col(i).setZero(); // test labels hidden from the fit
            } else {
                p.X_fit = p.X_train;
                p.Y_fit = one_hot(p.y_train, c).Y;
            }
            if (!terms.labels)
                p.Y_fit.resize(0, 0);
            p.R = build_regularizer(p.X_fit, config).matrix;
        } catch (const Error& e) {
            throw Error(e.category(), "repetition " + std::to_string(r) + ": " + e.what());
        }
    });

    const std::size_t n_dims = options.dims.size();
    const std::size_t n_reps = splits.size();
    EvalReport report;
    report.method = to_string(config.method);
    report.dims = options.dims;
    report.per_repetition.assign(n_dims, std::vector<DimensionMetrics>(n_reps));
    report.confusion.assign(n_dims, std::vector<Eigen::MatrixXi>(n_reps));

    parallel_for(n_dims * n_reps, options.jobs, [&](std::size_t cell) {
        const std::size_t d = cell / n_reps;
        const std::size_t r = cell % n_reps;
        const auto& p = prepared[r];
        const int k = options.dims[d];
        try {
            SolverConfig cfg = config;
            cfg.k = k;
            const auto model = fit_with_regularizer(p.X_fit, p.Y_fit, cfg, p.R);
            Eigen::MatrixXd train_emb, test_emb;
            if (transductive) {
                train_emb = take_rows(model.Q, splits[r].train);
                test_emb = take_rows(model.Q, splits[r].test);
            } else {
                train_emb = embed(model, p.X_train);
                test_emb = embed(model, p.X_test);
            }
            const auto knn = knn_predict(train_emb, p.y_train, test_emb, options.k_neighbors, c);
            const auto conf = confusion_matrix(p.y_test, knn.predicted, c);
            const auto mm = macro_metrics(conf);
            DimensionMetrics dm;
            dm.acc = mm.acc;
            dm.macro_rec = mm.macro_rec;
            dm.macro_pre = mm.macro_pre;
            dm.macro_f1 = mm.macro_f1;
            dm.macro_auc = macro_auc(knn.votes, p.y_test, knn.predicted, options.auc).value;
            report.per_repetition[d][r] = dm;
            report.confusion[d][r] = conf;
        } catch (const Error& e) {
            throw Error(e.category(), "repetition " + std::to_string(r) + ", k = " + std::to_string(k) + ": " +
                                          e.what());
        }
    });

    for (std::size_t d = 0; d < n_dims; ++d)
        report.per_dimension.push_back(average(report.per_repetition[d]));
    report.means = average(report.per_dimension);
    return report;
}

RSScores rs_scores(const Eigen::MatrixXd& projected, const std::vector<int>& truth, const std::vector<int>& predicted)
{
    const Eigen::Index n = projected.rows();
    if (static_cast<Eigen::Index>(truth.size()) != n || static_cast<Eigen::Index>(predicted.size()) != n)
        throw Error(ErrorCategory::shape, "rs_scores: one truth and one predicted label per row required");
    int classes = 0;
    for (int y : truth) {
        if (y < 0)
            throw Error(ErrorCategory::range, "rs_scores: negative class id");
        classes = std::max(classes, y + 1);
    }

    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            dist(i, j) = dist(j, i) = (projected.row(i) - projected.row(j)).norm();

    RSScores rs;
    rs.truth = truth;
    rs.predicted = predicted;
    rs.d_max = n ? dist.maxCoeff() : 0.0;
    rs.R = Eigen::VectorXd::Zero(n);
    rs.S = Eigen::VectorXd::Zero(n);
    rs.r_max.assign(static_cast<std::size_t>(classes), 0.0);

    std::vector<int> class_size(static_cast<std::size_t>(classes), 0);
    for (int y : truth)
        ++class_size[static_cast<std::size_t>(y)];

    Eigen::VectorXd raw = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int yi = truth[static_cast<std::size_t>(i)];
        double residue = 0.0, similarity = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (truth[static_cast<std::size_t>(j)] != yi)
                residue += dist(i, j);
            else
                similarity += rs.d_max > 0.0 ? 1.0 - dist(i, j) / rs.d_max : 1.0;
        }
        raw(i) = residue;
        rs.S(i) = similarity / class_size[static_cast<std::size_t>(yi)];
        auto& top = rs.r_max[static_cast<std::size_t>(yi)];
        top = std::max(top, residue);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const double top = rs.r_max[static_cast<std::size_t>(truth[static_cast<std::size_t>(i)])];
        rs.R(i) = top > 0.0 ? raw(i) / top : 0.0;
    }
    return rs;
}

std::vector<BenchmarkRow> outlier_benchmark(const std::vector<int>& outlier_counts,
                                            const std::vector<SolverConfig>& configs, const SynthOptions& synth,
                                            NormMode norm, const EvalOptions& options)
{
    std::vector<BenchmarkRow> rows;
    for (int count : outlier_counts) {
        SynthOptions opt = synth;
        opt.n_outliers = count;
        const auto ds = normalize(synth_outliers(opt), norm);
        for (const auto& cfg : configs) {
            BenchmarkRow row;
            row.n_outliers = count;
            row.dataset = std::to_string(count) + " outliers";
            row.report = sweep_dimensions(ds, cfg, options);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

SolverConfig default_solver_config(Method m)
{
    SolverConfig cfg;
    cfg.method = m;
    cfg.alpha = 1e-4;
    cfg.beta = 0.5;
    cfg.gamma = 1e-1;
    return cfg;
}

} // namespace plpca
