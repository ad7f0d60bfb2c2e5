#include "plpca/report.hpp"

#include "plpca/csv.hpp"

#include <json.hpp>

namespace plpca::report {

namespace {

using nlohmann::ordered_json;

constexpr const char* kTableHeader = "Method,Mean ACC,Mean Macro-REC,Mean Macro-PRE,Mean Macro-F1,Macro-AUC\n";

std::string metric_fields(const DimensionMetrics& m)
{
    return csv::format(m.acc) + "," + csv::format(m.macro_rec) + "," + csv::format(m.macro_pre) + "," +
           csv::format(m.macro_f1) + "," + csv::format(m.macro_auc);
}

ordered_json metrics_json(const DimensionMetrics& m)
{
    return {{"acc", m.acc},
            {"macro_rec", m.macro_rec},
            {"macro_pre", m.macro_pre},
            {"macro_f1", m.macro_f1},
            {"macro_auc", m.macro_auc}};
}

ordered_json matrix_json(const Eigen::MatrixXi& M)
{
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

std::string table_csv(const std::vector<EvalReport>& reports)
{
    std::string out = kTableHeader;
    for (const auto& r : reports)
        out += r.method + "," + metric_fields(r.means) + "\n";
    return out;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows)
{
    std::string out = std::string("Dataset,") + kTableHeader;
    for (const auto& row : rows)
        out += row.dataset + "," + row.report.method + "," + metric_fields(row.report.means) + "\n";
    return out;
}

std::string curve_csv(const EvalReport& report)
{
    std::string out = "k,acc,macro_rec,macro_pre,macro_f1,macro_auc\n";
    for (std::size_t d = 0; d < report.dims.size(); ++d)
        out += std::to_string(report.dims[d]) + "," + metric_fields(report.per_dimension[d]) + "\n";
    return out;
}

std::string reports_json(const std::vector<EvalReport>& reports)
{
    ordered_json all = ordered_json::array();
    for (const auto& r : reports) {
        ordered_json per_dim = ordered_json::array();
        for (std::size_t d = 0; d < r.dims.size(); ++d) {
            ordered_json reps = ordered_json::array();
            for (std::size_t rep = 0; rep < r.per_repetition[d].size(); ++rep) {
                auto entry = metrics_json(r.per_repetition[d][rep]);
                entry["confusion"] = matrix_json(r.confusion[d][rep]);
                reps.push_back(std::move(entry));
            }
            ordered_json entry{{"k", r.dims[d]}};
            entry.update(metrics_json(r.per_dimension[d]));
            entry["repetitions"] = std::move(reps);
            per_dim.push_back(std::move(entry));
        }
        all.push_back({{"method", r.method}, {"means", metrics_json(r.means)}, {"per_dimension", std::move(per_dim)}});
    }
    return all.dump(2) + "\n";
}

std::string rs_csv(const RSScores& rs, const std::vector<std::string>& sample_ids,
                   const std::vector<std::string>& class_names, int only_class)
{
    auto name = [&](int c) {
        return c >= 0 && static_cast<std::size_t>(c) < class_names.size() ? class_names[static_cast<std::size_t>(c)]
                                                                          : std::to_string(c);
    };
    std::string out = "sample_id,R,S,true,predicted\n";
    for (Eigen::Index i = 0; i < rs.R.size(); ++i) {
        const auto ii = static_cast<std::size_t>(i);
        if (only_class >= 0 && rs.truth[ii] != only_class)
            continue;
        const std::string id = ii < sample_ids.size() ? sample_ids[ii] : std::to_string(i);
        out += id + "," + csv::format(rs.R(i)) + "," + csv::format(rs.S(i)) + "," + name(rs.truth[ii]) + "," +
               name(rs.predicted[ii]) + "\n";
    }
    return out;
}

std::string trace_json(const ProjectionModel& model)
{
    ordered_json j;
    j["objective_trace"] = model.objective_trace;
    j["iterations_run"] = model.iterations_run;
    j["converged"] = model.converged;
    j["precision_limited"] = model.precision_limited;
    j["mu"] = model.mu;
    return j.dump(2) + "\n";
}

} // namespace plpca::report
