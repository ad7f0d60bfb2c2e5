#include "plpca/cli.hpp"

#include "plpca/error.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace plpca::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const std::vector<int> kBenchDims{20, 15, 10, 5, 2, 1};

struct Preset {
    const char* name;
    Method method;
    std::vector<double> zeta;
    double alpha;
    double beta;
    double gamma;
    int rs_k;
};

const std::vector<Preset>& presets()
{
    static const std::vector<Preset> table{
        {"coad-plpca", Method::PLPCA_FULL, {0.5, 3, 1, 2, 2, 1}, 1e-5, 0.5, 1e-4, 100},
        {"coad-plpca-alt-gamma", Method::PLPCA_FULL, {0.5, 3, 1, 2, 2, 1}, 1e-5, 0.5, 1000, 100},
        {"multisource-plpca", Method::PLPCA_FULL, {0.5, 0, 0, 3, 0, 6}, 1e-4, 0.5, 1e-4, 65},
        {"multisource-plpca-alt-gamma", Method::PLPCA_FULL, {0.5, 0, 0, 3, 0, 6}, 1e-4, 0.5, 0.1, 65},
        {"coad-plpca-simple", Method::PLPCA_SIMPLE, {2, 3, 0, 0, 2, 1}, 0, 0, 1000, 100},
        {"multisource-plpca-simple", Method::PLPCA_SIMPLE, {0.5, 0, 0, 3, 2, 6}, 0, 0, 0.1, 65},
    };
    return table;
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCategory::config, what); }

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!obj.is_object())
        bad(where + " must be a JSON object");
    std::set<std::string> names(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items())
        if (!names.count(key))
            bad("unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& obj, const char* key, T& into)
{
    if (obj.contains(key))
        into = obj.at(key).get<T>();
}

std::string to_string(Orientation o) { return o == Orientation::genes_by_samples ? "genes_by_samples" : "samples_by_genes"; }

Orientation orientation_from_string(const std::string& s)
{
    if (s == "genes_by_samples")
        return Orientation::genes_by_samples;
    if (s == "samples_by_genes")
        return Orientation::samples_by_genes;
    bad("unknown orientation '" + s + "'");
}

std::string to_string(NormMode m)
{
    switch (m) {
    case NormMode::minmax: return "minmax";
    case NormMode::zscore: return "zscore";
    case NormMode::none: return "none";
    }
    return "none";
}

NormMode norm_from_string(const std::string& s)
{
    if (s == "minmax")
        return NormMode::minmax;
    if (s == "zscore")
        return NormMode::zscore;
    if (s == "none")
        return NormMode::none;
    bad("unknown normalization '" + s + "'");
}

std::string to_string(SplitMode m) { return m == SplitMode::kfold ? "kfold" : "repeated_holdout"; }

SplitMode split_mode_from_string(const std::string& s)
{
    if (s == "repeated_holdout")
        return SplitMode::repeated_holdout;
    if (s == "kfold")
        return SplitMode::kfold;
    bad("unknown split mode '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

std::vector<int> int_list(const std::string& s, const char* what)
{
    std::vector<int> out;
    for (const auto& item : split_list(s)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            bad(std::string("invalid ") + what + " entry '" + item + "'");
        }
    }
    if (out.empty())
        bad(std::string(what) + " list is empty");
    return out;
}

std::vector<Method> method_list(const std::vector<std::string>& names)
{
    std::vector<Method> out;
    for (const auto& n : names)
        out.push_back(method_from_string(n));
    if (out.empty())
        bad("method list is empty");
    return out;
}

void apply_solver(SolverConfig& s, const json& j)
{
    reject_unknown(j, {"k", "alpha", "beta", "gamma", "theta", "max_iter", "mu", "p", "zeta", "knn_k", "eta", "direction"},
                   "solver");
    read(j, "k", s.k);
    read(j, "alpha", s.alpha);
    read(j, "beta", s.beta);
    read(j, "gamma", s.gamma);
    read(j, "theta", s.theta);
    read(j, "max_iter", s.max_iter);
    read(j, "mu", s.mu);
    read(j, "p", s.p);
    read(j, "zeta", s.zeta);
    read(j, "knn_k", s.knn_k);
    if (j.contains("eta")) {
        if (j.at("eta").is_null() || j.at("eta") == "auto")
            s.eta.reset();
        else
            s.eta = j.at("eta").get<double>();
    }
    if (j.contains("direction"))
        s.direction = filter_direction_from_string(j.at("direction").get<std::string>());
}

void apply_document(RunConfig& cfg, const json& doc)
{
    reject_unknown(doc,
                   {"command", "preset", "seed", "dataset", "methods", "solver", "split", "dims", "k_neighbors", "auc",
                    "eval_mode", "jobs", "dump_graph", "grid", "outlier_counts", "rs_k"},
                   "config");
    // Only the name is recorded here; resolve() applies a file preset's values.
    read(doc, "preset", cfg.preset);
    read(doc, "seed", cfg.seed);
    if (doc.contains("dataset")) {
        const auto& d = doc.at("dataset");
        reject_unknown(d, {"path", "orientation", "labels", "label_column", "normalization", "synthetic"}, "dataset");
        read(d, "path", cfg.dataset.path);
        read(d, "labels", cfg.dataset.labels_path);
        read(d, "label_column", cfg.dataset.label_column);
        if (d.contains("orientation"))
            cfg.dataset.orientation = orientation_from_string(d.at("orientation").get<std::string>());
        if (d.contains("normalization"))
            cfg.dataset.normalization = norm_from_string(d.at("normalization").get<std::string>());
        if (d.contains("synthetic")) {
            const auto& s = d.at("synthetic");
            reject_unknown(s, {"n_per_class", "dims", "n_outliers", "separation", "sigma"}, "dataset.synthetic");
            read(s, "n_per_class", cfg.dataset.synthetic.n_per_class);
            read(s, "dims", cfg.dataset.synthetic.dims);
            read(s, "n_outliers", cfg.dataset.synthetic.n_outliers);
            read(s, "separation", cfg.dataset.synthetic.separation);
            read(s, "sigma", cfg.dataset.synthetic.sigma);
        }
    }
    if (doc.contains("methods"))
        cfg.methods = method_list(doc.at("methods").get<std::vector<std::string>>());
    if (doc.contains("solver"))
        apply_solver(cfg.solver, doc.at("solver"));
    if (doc.contains("split")) {
        const auto& s = doc.at("split");
        reject_unknown(s, {"repetitions", "test_fraction", "stratified", "mode"}, "split");
        read(s, "repetitions", cfg.split.repetitions);
        read(s, "test_fraction", cfg.split.test_fraction);
        read(s, "stratified", cfg.split.stratified);
        if (s.contains("mode"))
            cfg.split.mode = split_mode_from_string(s.at("mode").get<std::string>());
    }
    read(doc, "dims", cfg.dims);
    read(doc, "k_neighbors", cfg.k_neighbors);
    if (doc.contains("auc"))
        cfg.auc = auc_mode_from_string(doc.at("auc").get<std::string>());
    if (doc.contains("eval_mode"))
        cfg.eval_mode = eval_mode_from_string(doc.at("eval_mode").get<std::string>());
    read(doc, "jobs", cfg.jobs);
    read(doc, "dump_graph", cfg.dump_graph);
    if (doc.contains("grid")) {
        const auto& g = doc.at("grid");
        reject_unknown(g, {"alpha", "beta", "gamma", "p", "zeta"}, "grid");
        read(g, "alpha", cfg.grid.alpha);
        read(g, "beta", cfg.grid.beta);
        read(g, "gamma", cfg.grid.gamma);
        read(g, "p", cfg.grid.p);
        read(g, "zeta", cfg.grid.zeta);
    }
    read(doc, "outlier_counts", cfg.outlier_counts);
    read(doc, "rs_k", cfg.rs_k);
}

json parse_document(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        bad(std::string("config is not valid JSON: ") + e.what());
    }
}

void check(const RunConfig& cfg)
{
    if (cfg.methods.empty())
        bad("no method selected");
    if (cfg.jobs < 1)
        bad("jobs must be >= 1");
    if (cfg.k_neighbors < 1)
        bad("k_neighbors must be >= 1");
    if (cfg.rs_k < 1)
        bad("rs_k must be >= 1");
    if (cfg.dims.empty())
        bad("dims list is empty");
    if (!(cfg.split.test_fraction > 0.0 && cfg.split.test_fraction < 1.0))
        bad("test_fraction must lie in (0, 1)");
    if (cfg.split.repetitions < 1)
        bad("repetitions must be >= 1");
    for (int c : cfg.outlier_counts)
        if (c < 0)
            bad("outlier counts must be nonnegative");
}

} // namespace

RunConfig default_config(const std::string& command)
{
    RunConfig cfg;
    cfg.command = command;
    const SolverConfig base = default_solver_config(Method::PLPCA_FULL);
    cfg.solver = base;
    if (command == "bench-outliers") {
        cfg.methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
        cfg.dims = kBenchDims;
        // Synthetic features already share one scale; min-max would let the
        // outliers set every feature's range.
        cfg.dataset.normalization = NormMode::none;
    } else {
        cfg.methods = {Method::PLPCA_FULL};
        cfg.dims = default_dims();
    }
    return cfg;
}

std::vector<std::string> preset_names()
{
    std::vector<std::string> names;
    for (const auto& p : presets())
        names.emplace_back(p.name);
    return names;
}

void apply_preset(RunConfig& cfg, const std::string& name)
{
    for (const auto& p : presets()) {
        if (name != p.name)
            continue;
        cfg.preset = name;
        cfg.methods = {p.method};
        cfg.solver.alpha = p.alpha;
        cfg.solver.beta = p.beta;
        cfg.solver.gamma = p.gamma;
        cfg.solver.p = static_cast<int>(p.zeta.size());
        cfg.solver.zeta = p.zeta;
        cfg.rs_k = p.rs_k;
        return;
    }
    std::string known;
    for (const auto& n : preset_names())
        known += (known.empty() ? "" : ", ") + n;
    bad("unknown preset '" + name + "' (known: " + known + ")");
}

void apply_json(RunConfig& cfg, const std::string& json_text)
{
    try {
        apply_document(cfg, parse_document(json_text));
    } catch (const json::exception& e) {
        bad(std::string("config value has the wrong type: ") + e.what());
    }
}

std::string to_json(const RunConfig& cfg)
{
    ordered_json j;
    j["command"] = cfg.command;
    j["preset"] = cfg.preset;
    j["seed"] = cfg.seed;
    const auto& d = cfg.dataset;
    j["dataset"] = {{"path", d.path},
                    {"orientation", to_string(d.orientation)},
                    {"labels", d.labels_path},
                    {"label_column", d.label_column},
                    {"normalization", to_string(d.normalization)},
                    {"synthetic",
                     {{"n_per_class", d.synthetic.n_per_class},
                      {"dims", d.synthetic.dims},
                      {"n_outliers", d.synthetic.n_outliers},
                      {"separation", d.synthetic.separation},
                      {"sigma", d.synthetic.sigma}}}};
    std::vector<std::string> methods;
    for (Method m : cfg.methods)
        methods.push_back(plpca::to_string(m));
    j["methods"] = methods;
    const auto& s = cfg.solver;
    j["solver"] = {{"k", s.k},
                   {"alpha", s.alpha},
                   {"beta", s.beta},
                   {"gamma", s.gamma},
                   {"theta", s.theta},
                   {"max_iter", s.max_iter},
                   {"mu", s.mu},
                   {"p", s.p},
                   {"zeta", s.zeta},
                   {"knn_k", s.knn_k},
                   {"eta", s.eta ? ordered_json(*s.eta) : ordered_json("auto")},
                   {"direction", plpca::to_string(s.direction)}};
    j["split"] = {{"repetitions", cfg.split.repetitions},
                  {"test_fraction", cfg.split.test_fraction},
                  {"stratified", cfg.split.stratified},
                  {"mode", to_string(cfg.split.mode)}};
    j["dims"] = cfg.dims;
    j["k_neighbors"] = cfg.k_neighbors;
    j["auc"] = plpca::to_string(cfg.auc);
    j["eval_mode"] = plpca::to_string(cfg.eval_mode);
    j["jobs"] = cfg.jobs;
    j["dump_graph"] = cfg.dump_graph;
    j["grid"] = {{"alpha", cfg.grid.alpha},
                 {"beta", cfg.grid.beta},
                 {"gamma", cfg.grid.gamma},
                 {"p", cfg.grid.p},
                 {"zeta", cfg.grid.zeta}};
    j["outlier_counts"] = cfg.outlier_counts;
    j["rs_k"] = cfg.rs_k;
    return j.dump(2) + "\n";
}

RunConfig resolve(const std::string& command, const Overrides& flags)
{
    RunConfig cfg = default_config(command);

    json doc = json::object();
    if (flags.config) {
        std::ifstream in(*flags.config);
        if (!in)
            throw Error(ErrorCategory::io, "cannot open config file " + flags.config->string());
        std::stringstream buf;
        buf << in.rdbuf();
        doc = parse_document(buf.str());
        if (!doc.is_object())
            bad("config must be a JSON object");
    }

    // A preset named in the file sits below the file's own fields; one named
    // on the command line sits above them.
    if (doc.contains("preset") && !flags.preset) {
        const auto& name = doc.at("preset");
        if (!name.is_string())
            bad("preset must be a string");
        if (!name.get<std::string>().empty())
            apply_preset(cfg, name.get<std::string>());
    }
    doc.erase("preset");
    doc.erase("command");
    try {
        apply_document(cfg, doc);
    } catch (const json::exception& e) {
        bad(std::string("config value has the wrong type: ") + e.what());
    }
    if (flags.preset)
        apply_preset(cfg, *flags.preset);

    if (flags.seed)
        cfg.seed = *flags.seed;
    if (flags.out)
        cfg.out = *flags.out;
    if (flags.jobs)
        cfg.jobs = *flags.jobs;
    if (flags.methods)
        cfg.methods = method_list(split_list(*flags.methods));
    if (flags.dims)
        cfg.dims = *flags.dims == "default" ? default_dims() : int_list(*flags.dims, "dims");
    if (flags.data)
        cfg.dataset.path = *flags.data;
    if (flags.labels)
        cfg.dataset.labels_path = *flags.labels;
    if (flags.label_column)
        cfg.dataset.label_column = *flags.label_column;
    if (flags.orientation)
        cfg.dataset.orientation = orientation_from_string(*flags.orientation);
    if (flags.normalization)
        cfg.dataset.normalization = norm_from_string(*flags.normalization);
    if (flags.k)
        cfg.solver.k = *flags.k;
    if (flags.n_outliers)
        cfg.dataset.synthetic.n_outliers = *flags.n_outliers;
    if (flags.outlier_counts)
        cfg.outlier_counts = int_list(*flags.outlier_counts, "outlier count");
    if (flags.rs_k)
        cfg.rs_k = *flags.rs_k;
    if (flags.eval_mode)
        cfg.eval_mode = eval_mode_from_string(*flags.eval_mode);
    if (flags.auc)
        cfg.auc = auc_mode_from_string(*flags.auc);
    if (flags.dump_graph)
        cfg.dump_graph = true;

    check(cfg);
    return cfg;
}

} // namespace plpca::cli
