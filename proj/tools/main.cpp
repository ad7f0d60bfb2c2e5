#include "plpca/cli.hpp"
#include "plpca/error.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_common(CLI::App& sub, plpca::cli::Overrides& o)
{
    sub.add_option("--config", o.config, "JSON run configuration");
    sub.add_option("--preset", o.preset, "named hyperparameter preset");
    sub.add_option("--seed", o.seed, "seed for splits and synthetic data");
    sub.add_option("--out", o.out, "output directory");
    sub.add_option("--jobs", o.jobs, "worker threads");
    sub.add_option("--method", o.methods, "comma-separated method names");
    sub.add_option("--dims", o.dims, "comma-separated subspace sizes, or 'default'");
    sub.add_option("--data", o.data, "expression CSV");
    sub.add_option("--labels", o.labels, "one-column label CSV");
    sub.add_option("--label-column", o.label_column, "label row/column name inside the data file");
    sub.add_option("--orientation", o.orientation, "genes_by_samples or samples_by_genes");
    sub.add_option("--normalization", o.normalization, "minmax, zscore or none");
    sub.add_option("--k", o.k, "target dimension for reduce");
    sub.add_option("--n-outliers", o.n_outliers, "outliers in the synthetic dataset");
    sub.add_option("--outliers", o.outlier_counts, "comma-separated outlier counts for bench-outliers");
    sub.add_option("--rs-k", o.rs_k, "dimension for R-S scores");
    sub.add_option("--eval-mode", o.eval_mode, "inductive or transductive");
    sub.add_option("--auc", o.auc, "hard or score");
    sub.add_flag("--dump-graph", o.dump_graph, "write W, L and PL in coordinate format");
}

int fail(plpca::ErrorCategory category, const std::string& message)
{
    std::cerr << "error: " << plpca::category_name(category) << ": " << message << "\n";
    return static_cast<int>(category);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Persistent-Laplacian-regularized PCA toolkit"};
    app.require_subcommand(1);
    plpca::cli::Overrides overrides;
    const char* commands[][2] = {
        {"reduce", "fit one method and write U, Q, A and the objective trace"},
        {"evaluate", "dimension sweep with KNN classification"},
        {"gridsearch", "evaluate every cell of a hyperparameter grid"},
        {"bench-outliers", "synthetic outlier robustness table"},
        {"rs", "residue-similarity scores per class"},
        {"synth", "write a synthetic outlier dataset"},
    };
    for (const auto& [name, help] : commands)
        add_common(*app.add_subcommand(name, help), overrides);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::string message = e.what();
        return fail(plpca::ErrorCategory::config, message);
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return plpca::cli::run(plpca::cli::resolve(command, overrides));
    } catch (const plpca::Error& e) {
        return fail(e.category(), e.what());
    } catch (const std::bad_alloc&) {
        return fail(plpca::ErrorCategory::numerical, "out of memory");
    }
}
