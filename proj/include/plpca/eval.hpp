#pragma once

#include "plpca/datamodel.hpp"
#include "plpca/pca_family.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace plpca {

struct KnnResult {
    std::vector<int> predicted;
    Eigen::MatrixXd votes; ///< rows x classes, vote fractions summing to 1
};

/// Majority vote over the k_neighbors nearest training rows (Euclidean).
/// Neighbors are ranked by (distance, training index). A vote tie goes to the
/// class whose voters have the smaller summed distance (sums within a relative
/// 1e-12 count as equal), then to the smaller class id.
KnnResult knn_predict(const Eigen::MatrixXd& train, const std::vector<int>& train_labels, const Eigen::MatrixXd& test,
                      int k_neighbors, int classes);

/// Rows are true classes, columns predicted classes.
Eigen::MatrixXi confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted, int classes);

struct MacroMetrics {
    double acc = 0;
    double macro_rec = 0;
    double macro_pre = 0;
    double macro_f1 = 0;
    std::vector<double> recall;
    std::vector<double> precision;
    std::vector<int> undefined_recall;    ///< classes with no true samples (recall set to 0)
    std::vector<int> undefined_precision; ///< classes never predicted (precision set to 0)
};

/// Macro-F1 is the harmonic mean of macro precision and macro recall, not the
/// mean of per-class F1 scores.
MacroMetrics macro_metrics(const Eigen::MatrixXi& confusion);

enum class AucMode { score, hard };

struct AucResult {
    double value = 0;
    std::vector<int> undefined; ///< classes lacking positives or negatives (counted as 0)
};

/// One-vs-rest ROC AUC averaged over classes. In hard mode the scores are the
/// 0/1 indicators of the predictions, which makes each class AUC its balanced
/// accuracy (TPR + TNR) / 2.
AucResult macro_auc(const Eigen::MatrixXd& scores, const std::vector<int>& truth, const std::vector<int>& predicted,
                    AucMode mode);

std::string to_string(AucMode m);
AucMode auc_mode_from_string(const std::string& s);

enum class EvalMode { inductive, transductive };

std::string to_string(EvalMode m);
EvalMode eval_mode_from_string(const std::string& s);

struct DimensionMetrics {
    double acc = 0;
    double macro_rec = 0;
    double macro_pre = 0;
    double macro_f1 = 0;
    double macro_auc = 0;
};

struct EvalOptions {
    std::vector<int> dims;
    SplitPlan plan;
    int k_neighbors = 5;
    AucMode auc = AucMode::hard;
    EvalMode mode = EvalMode::inductive;
    int jobs = 1;
};

/// The 21 subspace sizes 100, 95, ..., 5, 1.
std::vector<int> default_dims();

struct EvalReport {
    std::string method;
    std::vector<int> dims;
    std::vector<DimensionMetrics> per_dimension;             ///< aligned with dims, averaged over repetitions
    DimensionMetrics means;                                  ///< average of per_dimension
    std::vector<std::vector<DimensionMetrics>> per_repetition; ///< [dim][repetition]
    std::vector<std::vector<Eigen::MatrixXi>> confusion;     ///< [dim][repetition]
};

/// For every split and every k: fit on the training rows (labels from training
/// rows only), embed, classify the held-out rows with KNN and score them.
/// Repetitions are averaged first, then dimensions.
EvalReport sweep_dimensions(const ExpressionDataset& ds, const SolverConfig& config, const EvalOptions& options);

struct RSScores {
    Eigen::VectorXd R; ///< residue, normalized per class by its largest raw residue
    Eigen::VectorXd S; ///< similarity
    std::vector<int> truth;
    std::vector<int> predicted;
    std::vector<double> r_max; ///< per class raw maximum
    double d_max = 0;
};

/// Residue and similarity per sample. Classes are the true labels; predicted
/// labels are carried along for coloring. A class whose raw residues are all 0
/// gets R = 0; with d_max = 0 every similarity is 1.
RSScores rs_scores(const Eigen::MatrixXd& projected, const std::vector<int>& truth, const std::vector<int>& predicted);

struct BenchmarkRow {
    int n_outliers = 0;
    std::string dataset;
    EvalReport report;
};

/// Runs each configuration through sweep_dimensions on synthetic outlier
/// data, one dataset per outlier count.
std::vector<BenchmarkRow> outlier_benchmark(const std::vector<int>& outlier_counts,
                                            const std::vector<SolverConfig>& configs, const SynthOptions& synth,
                                            NormMode norm, const EvalOptions& options);

/// Hyperparameters used for a method when nothing else is specified.
SolverConfig default_solver_config(Method m);

} // namespace plpca
