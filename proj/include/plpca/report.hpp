#pragma once

#include "plpca/eval.hpp"
#include "plpca/pca_family.hpp"

#include <string>
#include <vector>

namespace plpca::report {

/// Method,Mean ACC,Mean Macro-REC,Mean Macro-PRE,Mean Macro-F1,Macro-AUC
std::string table_csv(const std::vector<EvalReport>& reports);

/// Same columns with a leading Dataset column, one row per benchmark cell.
std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);

/// k,acc,macro_rec,macro_pre,macro_f1,macro_auc in sweep order.
std::string curve_csv(const EvalReport& report);

/// Full report including per-repetition metrics and confusion matrices.
std::string reports_json(const std::vector<EvalReport>& reports);

/// sample_id,R,S,true,predicted for the rows whose true class is `only_class`
/// (all rows when negative). Labels are written by class name.
std::string rs_csv(const RSScores& rs, const std::vector<std::string>& sample_ids,
                   const std::vector<std::string>& class_names, int only_class = -1);

/// Objective trace and final solver state.
std::string trace_json(const ProjectionModel& model);

} // namespace plpca::report
