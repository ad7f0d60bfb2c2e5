#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace plpca {

/// Samples x features expression matrix with one class id per sample.
///
/// The internal orientation is always samples x features regardless of how
/// the source file was laid out. Class ids are dense in [0, class_names.size()).
struct ExpressionDataset {
    Eigen::MatrixXd X;
    std::vector<int> labels;
    std::vector<std::string> gene_ids;
    std::vector<std::string> sample_ids;
    std::vector<std::string> class_names;

    Eigen::Index samples() const { return X.rows(); }
    Eigen::Index features() const { return X.cols(); }
    int classes() const { return static_cast<int>(class_names.size()); }
};

/// Throws plpca::Error when a dataset breaks a structural invariant:
/// n >= 2, m >= 1, c >= 2, every class present, ids sized to match, all finite.
void validate(const ExpressionDataset& ds);

enum class Orientation { genes_by_samples, samples_by_genes };

/// Where the per-sample labels come from: a separate one-column CSV, or a
/// named row/column inside the expression file itself.
struct LabelSource {
    std::optional<std::filesystem::path> file;
    std::optional<std::string> column;
    /// Explicit class order. When empty the classes are the sorted distinct
    /// label tokens (numerically sorted when every token is an integer).
    std::vector<std::string> classes;
};

ExpressionDataset ingest_csv(const std::filesystem::path& path, Orientation orientation,
                             const LabelSource& labels);

enum class NormMode { minmax, zscore, none };

/// Per-feature normalization. Constant features map to zeros in both modes.
/// zscore uses the population standard deviation.
ExpressionDataset normalize(const ExpressionDataset& ds, NormMode mode);

struct OneHotMatrix {
    Eigen::MatrixXd Y; ///< c x n, column j has a single 1 at row labels[j]
    int classes = 0;
};

OneHotMatrix one_hot(const std::vector<int>& labels, int classes);

enum class SplitMode { repeated_holdout, kfold };

struct SplitPlan {
    int repetitions = 5;
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
    bool stratified = true;
    SplitMode mode = SplitMode::repeated_holdout;
};

struct Split {
    std::vector<int> train;
    std::vector<int> test;
};

/// Repeated random train/test partitions, or k-fold folds when
/// plan.mode == kfold (repetitions is then the fold count). Index lists
/// are sorted ascending.
std::vector<Split> make_splits(const std::vector<int>& labels, const SplitPlan& plan);
std::vector<Split> make_splits(const ExpressionDataset& ds, const SplitPlan& plan);

struct SynthOptions {
    int n_per_class = 80;
    int dims = 20;
    int n_outliers = 2;
    double separation = 6.0; ///< distance between the class means, in units of sigma
    double sigma = 1.0;
    std::uint64_t seed = 0;
};

/// Nominal cluster spread sigma * sqrt(dims) (RMS radius of one cluster).
double synth_spread(const SynthOptions& opt);

/// Two Gaussian clusters plus n_outliers far points with alternating labels.
/// Regular samples come first; the outliers are the last n_outliers rows.
ExpressionDataset synth_outliers(const SynthOptions& opt);

/// Writes the dataset in genes_by_samples layout (header row of sample ids,
/// first column gene ids) plus a one-column label file with a header.
void write_dataset_csv(const ExpressionDataset& ds, const std::filesystem::path& data_path,
                       const std::filesystem::path& labels_path);

} // namespace plpca
