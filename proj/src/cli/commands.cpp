#include "plpca/cli.hpp"

#include "plpca/csv.hpp"
#include "plpca/error.hpp"
#include "plpca/report.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

namespace plpca::cli {

namespace fs = std::filesystem;

namespace {

void progress(const RunConfig& cfg, const std::string& message)
{
    std::cerr << "[" << cfg.command << "] " << message << "\n";
}

void prepare_out(const RunConfig& cfg)
{
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec)
        throw Error(ErrorCategory::io, "cannot create output directory " + cfg.out.string() + ": " + ec.message());
}

void emit(const RunConfig& cfg, const std::string& name, const std::string& contents)
{
    csv::write_atomic(cfg.out / name, contents);
}

void emit_config(const RunConfig& cfg) { emit(cfg, "config.json", to_json(cfg)); }

SolverConfig solver_for(const RunConfig& cfg, Method m)
{
    SolverConfig s = cfg.solver;
    s.method = m;
    return s;
}

EvalOptions eval_options(const RunConfig& cfg)
{
    EvalOptions opt;
    opt.dims = cfg.dims;
    opt.plan = cfg.split;
    opt.plan.seed = cfg.seed;
    opt.k_neighbors = cfg.k_neighbors;
    opt.auc = cfg.auc;
    opt.mode = cfg.eval_mode;
    opt.jobs = cfg.jobs;
    return opt;
}

SynthOptions synth_options(const RunConfig& cfg)
{
    SynthOptions s = cfg.dataset.synthetic;
    s.seed = cfg.seed;
    return s;
}

std::vector<std::string> component_header(const std::string& first, Eigen::Index k)
{
    std::vector<std::string> h{first};
    for (Eigen::Index j = 1; j <= k; ++j)
        h.push_back("PC" + std::to_string(j));
    return h;
}

std::string file_safe(std::string s)
{
    for (char& ch : s)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_' && ch != '.')
            ch = '_';
    return s;
}

std::string zeta_text(const std::vector<double>& zeta)
{
    std::string out;
    for (std::size_t i = 0; i < zeta.size(); ++i)
        out += (i ? ";" : "") + csv::format(zeta[i]);
    return out;
}

// Leave-one-out KNN labels inside an embedding.
std::vector<int> loo_predict(const Eigen::MatrixXd& emb, const std::vector<int>& labels, int k_neighbors, int classes)
{
    const Eigen::Index n = emb.rows();
    std::vector<int> predicted(static_cast<std::size_t>(n));
    Eigen::MatrixXd rest(n - 1, emb.cols());
    std::vector<int> rest_labels(static_cast<std::size_t>(n - 1));
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index r = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i)
                continue;
            rest.row(r) = emb.row(j);
            rest_labels[static_cast<std::size_t>(r)] = labels[static_cast<std::size_t>(j)];
            ++r;
        }
        const int kk = std::min<int>(k_neighbors, static_cast<int>(n - 1));
        predicted[static_cast<std::size_t>(i)] = knn_predict(rest, rest_labels, emb.row(i), kk, classes).predicted[0];
    }
    return predicted;
}

} // namespace

ExpressionDataset load_dataset(const RunConfig& cfg)
{
    ExpressionDataset ds;
    if (cfg.dataset.path.empty()) {
        ds = synth_outliers(synth_options(cfg));
    } else {
        LabelSource labels;
        if (!cfg.dataset.labels_path.empty())
            labels.file = cfg.dataset.labels_path;
        if (!cfg.dataset.label_column.empty())
            labels.column = cfg.dataset.label_column;
        ds = ingest_csv(cfg.dataset.path, cfg.dataset.orientation, labels);
    }
    return normalize(ds, cfg.dataset.normalization);
}

int cmd_reduce(const RunConfig& cfg)
{
    if (cfg.methods.size() != 1)
        throw Error(ErrorCategory::config, "reduce takes exactly one method");
    const auto ds = load_dataset(cfg);
    const SolverConfig solver = solver_for(cfg, cfg.methods.front());
    const bool supervised = terms_of(solver.method).labels;
    const auto Y = supervised ? std::optional<OneHotMatrix>(one_hot(ds.labels, ds.classes())) : std::nullopt;
    progress(cfg, "fitting " + to_string(solver.method) + " with k = " + std::to_string(solver.k));
    const auto model = fit(ds, Y, solver);

    std::optional<Regularizer> dump;
    if (cfg.dump_graph) {
        SolverConfig graph_cfg = solver;
        if (!terms_of(graph_cfg.method).graph)
            graph_cfg.method = Method::GLPCA;
        if (graph_cfg.gamma == 0.0)
            graph_cfg.gamma = 1.0;
        dump = build_regularizer(ds.X, graph_cfg);
    }

    prepare_out(cfg);
    const auto k = model.Q.cols();
    emit(cfg, "U.csv", csv::matrix_to_csv(model.U, component_header("gene_id", k), ds.gene_ids));
    emit(cfg, "Q.csv", csv::matrix_to_csv(model.Q, component_header("sample_id", k), ds.sample_ids));
    if (supervised)
        emit(cfg, "A.csv", csv::matrix_to_csv(model.A, component_header("class", k), ds.class_names));
    emit(cfg, "trace.json", report::trace_json(model));
    if (dump) {
        emit(cfg, "W.coo", csv::matrix_to_coo(dump->graph->W));
        emit(cfg, "L.coo", csv::matrix_to_coo(dump->graph->L));
        if (dump->persistent)
            emit(cfg, "PL.coo", csv::matrix_to_coo(dump->persistent->PL));
    }
    emit_config(cfg);
    return 0;
}

int cmd_evaluate(const RunConfig& cfg)
{
    const auto ds = load_dataset(cfg);
    const auto options = eval_options(cfg);
    std::vector<EvalReport> reports;
    for (Method m : cfg.methods) {
        progress(cfg, to_string(m));
        reports.push_back(sweep_dimensions(ds, solver_for(cfg, m), options));
    }
    prepare_out(cfg);
    emit(cfg, "table.csv", report::table_csv(reports));
    for (const auto& r : reports)
        emit(cfg, "curve_" + r.method + ".csv", report::curve_csv(r));
    emit(cfg, "report.json", report::reports_json(reports));
    emit_config(cfg);
    return 0;
}

int cmd_gridsearch(const RunConfig& cfg)
{
    const auto ds = load_dataset(cfg);
    const auto options = eval_options(cfg);
    const auto& g = cfg.grid;
    auto or_value = [](const auto& list, const auto& value) {
        return list.empty() ? std::vector<std::decay_t<decltype(value)>>{value} : list;
    };
    const auto alphas = or_value(g.alpha, cfg.solver.alpha);
    const auto betas = or_value(g.beta, cfg.solver.beta);
    const auto gammas = or_value(g.gamma, cfg.solver.gamma);
    const auto ps = or_value(g.p, cfg.solver.p);
    const auto zetas = or_value(g.zeta, cfg.solver.zeta);

    struct Cell {
        SolverConfig solver;
        std::optional<DimensionMetrics> means;
        std::string error;
        std::optional<ErrorCategory> category;
    };
    std::vector<Cell> cells;
    for (Method m : cfg.methods)
        for (double a : alphas)
            for (double b : betas)
                for (double c : gammas)
                    for (int p : ps)
                        for (const auto& z : zetas) {
                            Cell cell;
                            cell.solver = solver_for(cfg, m);
                            cell.solver.alpha = a;
                            cell.solver.beta = b;
                            cell.solver.gamma = c;
                            cell.solver.p = p;
                            cell.solver.zeta = z;
                            cells.push_back(std::move(cell));
                        }

    for (std::size_t i = 0; i < cells.size(); ++i) {
        auto& cell = cells[i];
        progress(cfg, "cell " + std::to_string(i + 1) + "/" + std::to_string(cells.size()));
        try {
            cell.means = sweep_dimensions(ds, cell.solver, options).means;
        } catch (const Error& e) {
            cell.error = e.what();
            cell.category = e.category();
        }
    }

    std::vector<std::size_t> order(cells.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ma = cells[a].means;
        const auto& mb = cells[b].means;
        if (ma.has_value() != mb.has_value())
            return ma.has_value();
        if (!ma)
            return false;
        if (ma->acc != mb->acc)
            return ma->acc > mb->acc;
        return ma->macro_f1 > mb->macro_f1;
    });

    std::string out = "rank,Method,alpha,beta,gamma,p,zeta,Mean ACC,Mean Macro-REC,Mean Macro-PRE,Mean Macro-F1,"
                      "Macro-AUC,error\n";
    int rank = 0;
    for (std::size_t i : order) {
        const auto& cell = cells[i];
        const auto& s = cell.solver;
        out += std::to_string(++rank) + "," + to_string(s.method) + "," + csv::format(s.alpha) + "," +
               csv::format(s.beta) + "," + csv::format(s.gamma) + "," + std::to_string(s.p) + "," +
               zeta_text(s.zeta) + ",";
        if (cell.means) {
            const auto& m = *cell.means;
            out += csv::format(m.acc) + "," + csv::format(m.macro_rec) + "," + csv::format(m.macro_pre) + "," +
                   csv::format(m.macro_f1) + "," + csv::format(m.macro_auc) + ",\n";
        } else {
            std::string msg = cell.error;
            std::replace(msg.begin(), msg.end(), '"', '\'');
            out += "NaN,NaN,NaN,NaN,NaN,\"" + msg + "\"\n";
        }
    }
    prepare_out(cfg);
    emit(cfg, "gridsearch.csv", out);
    emit_config(cfg);

    for (const auto& cell : cells)
        if (cell.category) {
            std::cerr << "error: " << category_name(*cell.category) << ": grid cell failed: " << cell.error << "\n";
            return static_cast<int>(*cell.category);
        }
    return 0;
}

int cmd_bench_outliers(const RunConfig& cfg)
{
    std::vector<SolverConfig> configs;
    for (Method m : cfg.methods)
        configs.push_back(solver_for(cfg, m));
    progress(cfg, "outlier counts x methods = " + std::to_string(cfg.outlier_counts.size()) + " x " +
                      std::to_string(configs.size()));
    const auto rows =
        outlier_benchmark(cfg.outlier_counts, configs, synth_options(cfg), cfg.dataset.normalization, eval_options(cfg));
    std::vector<EvalReport> reports;
    for (const auto& r : rows)
        reports.push_back(r.report);
    prepare_out(cfg);
    emit(cfg, "table8.csv", report::benchmark_csv(rows));
    emit(cfg, "report.json", report::reports_json(reports));
    emit_config(cfg);
    return 0;
}

int cmd_rs(const RunConfig& cfg)
{
    const auto ds = load_dataset(cfg);
    struct Output {
        std::string name;
        std::string contents;
    };
    std::vector<Output> outputs;
    for (Method m : cfg.methods) {
        SolverConfig solver = solver_for(cfg, m);
        solver.k = cfg.rs_k;
        const bool supervised = terms_of(m).labels;
        const auto Y = supervised ? std::optional<OneHotMatrix>(one_hot(ds.labels, ds.classes())) : std::nullopt;
        progress(cfg, to_string(m) + " at k = " + std::to_string(solver.k));
        const auto model = fit(ds, Y, solver);
        const auto predicted = loo_predict(model.Q, ds.labels, cfg.k_neighbors, ds.classes());
        const auto rs = rs_scores(model.Q, ds.labels, predicted);
        for (int c = 0; c < ds.classes(); ++c)
            outputs.push_back({"rs_" + to_string(m) + "_" + file_safe(ds.class_names[static_cast<std::size_t>(c)]) +
                                   ".csv",
                               report::rs_csv(rs, ds.sample_ids, ds.class_names, c)});
    }
    prepare_out(cfg);
    for (const auto& o : outputs)
        emit(cfg, o.name, o.contents);
    emit_config(cfg);
    return 0;
}

int cmd_synth(const RunConfig& cfg)
{
    const auto ds = synth_outliers(synth_options(cfg));
    prepare_out(cfg);
    write_dataset_csv(ds, cfg.out / "data.csv", cfg.out / "labels.csv");
    emit_config(cfg);
    return 0;
}

int run(const RunConfig& cfg)
{
    if (cfg.command == "reduce")
        return cmd_reduce(cfg);
    if (cfg.command == "evaluate")
        return cmd_evaluate(cfg);
    if (cfg.command == "gridsearch")
        return cmd_gridsearch(cfg);
    if (cfg.command == "bench-outliers")
        return cmd_bench_outliers(cfg);
    if (cfg.command == "rs")
        return cmd_rs(cfg);
    if (cfg.command == "synth")
        return cmd_synth(cfg);
    throw Error(ErrorCategory::config, "unknown command '" + cfg.command + "'");
}

} // namespace plpca::cli
