#pragma once

#include "plpca/datamodel.hpp"
#include "plpca/eval.hpp"
#include "plpca/pca_family.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace plpca::cli {

struct DatasetSource {
    std::string path; ///< empty selects the synthetic generator
    Orientation orientation = Orientation::genes_by_samples;
    std::string labels_path;
    std::string label_column;
    NormMode normalization = NormMode::minmax;
    SynthOptions synthetic; ///< seed is taken from RunConfig::seed
};

/// Value lists swept by gridsearch. An empty list means "the solver value".
struct GridSpec {
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> gamma;
    std::vector<int> p;
    std::vector<std::vector<double>> zeta;
};

struct RunConfig {
    std::string command;
    std::string preset;
    std::uint64_t seed = 0;
    DatasetSource dataset;
    std::vector<Method> methods;
    SolverConfig solver; ///< method field unused; see methods
    SplitPlan split;     ///< seed unused; see seed
    std::vector<int> dims;
    int k_neighbors = 5;
    AucMode auc = AucMode::hard;
    EvalMode eval_mode = EvalMode::inductive;
    int jobs = 1;
    bool dump_graph = false;
    GridSpec grid;
    std::vector<int> outlier_counts{2, 4, 8};
    int rs_k = 2;

    std::filesystem::path out = "out"; ///< not serialized
};

/// Defaults for a subcommand (dims and method list depend on it).
RunConfig default_config(const std::string& command);

std::vector<std::string> preset_names();

/// Overwrites method and solver fields with a named preset. Throws Error(config).
void apply_preset(RunConfig& cfg, const std::string& name);

/// Overlays the fields present in a JSON document onto cfg. Unknown keys are
/// configuration errors.
void apply_json(RunConfig& cfg, const std::string& json_text);

/// The fully resolved configuration as JSON (everything except `out`).
std::string to_json(const RunConfig& cfg);

/// Command-line values that take precedence over the config file.
struct Overrides {
    std::optional<std::filesystem::path> config;
    std::optional<std::string> preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
    std::optional<int> jobs;
    std::optional<std::string> methods; ///< comma separated
    std::optional<std::string> dims;    ///< comma separated, or "default"
    std::optional<std::string> data;
    std::optional<std::string> labels;
    std::optional<std::string> label_column;
    std::optional<std::string> orientation;
    std::optional<std::string> normalization;
    std::optional<int> k;
    std::optional<int> n_outliers;
    std::optional<std::string> outlier_counts;
    std::optional<int> rs_k;
    std::optional<std::string> eval_mode;
    std::optional<std::string> auc;
    bool dump_graph = false;
};

/// defaults -> file preset -> config file -> flag preset -> other flags.
RunConfig resolve(const std::string& command, const Overrides& flags);

/// Dataset named by the config, normalized.
ExpressionDataset load_dataset(const RunConfig& cfg);

/// Subcommands. Each returns the process exit code and throws plpca::Error
/// on failure; outputs are only written once the computation succeeded.
int cmd_reduce(const RunConfig& cfg);
int cmd_evaluate(const RunConfig& cfg);
int cmd_gridsearch(const RunConfig& cfg);
int cmd_bench_outliers(const RunConfig& cfg);
int cmd_rs(const RunConfig& cfg);
int cmd_synth(const RunConfig& cfg);

int run(const RunConfig& cfg);

} // namespace plpca::cli
