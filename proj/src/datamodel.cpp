#include "plpca/datamodel.hpp"

#include "plpca/csv.hpp"
#include "plpca/error.hpp"
#include "plpca/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace plpca {

namespace {

std::string coord(long row, long col)
{
    return "(" + std::to_string(row) + "," + std::to_string(col) + ")";
}

bool is_integer_token(const std::string& s)
{
    long long v = 0;
    const auto* first = s.data() + ((!s.empty() && s[0] == '-') ? 1 : 0);
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    return !s.empty() && ec == std::errc{} && ptr == s.data() + s.size() && first != ptr;
}

/// Maps label tokens to dense class ids.
std::pair<std::vector<int>, std::vector<std::string>>
encode_labels(const std::vector<std::string>& tokens, const std::vector<std::string>& explicit_classes)
{
    std::vector<std::string> classes = explicit_classes;
    if (classes.empty()) {
        std::set<std::string> distinct(tokens.begin(), tokens.end());
        classes.assign(distinct.begin(), distinct.end());
        if (std::all_of(classes.begin(), classes.end(), is_integer_token)) {
            std::sort(classes.begin(), classes.end(), [](const std::string& a, const std::string& b) {
                return std::stoll(a) < std::stoll(b);
            });
        }
    }
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < classes.size(); ++i)
        index.emplace(classes[i], static_cast<int>(i));

    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (std::size_t j = 0; j < tokens.size(); ++j) {
        const auto it = index.find(tokens[j]);
        if (it == index.end())
            throw Error(ErrorCategory::labeling,
                        "unknown label '" + tokens[j] + "' for sample " + std::to_string(j));
        ids.push_back(it->second);
    }
    return {ids, classes};
}

bool all_non_numeric(const std::vector<std::string>& row, std::size_t from)
{
    double tmp = 0;
    for (std::size_t j = from; j < row.size(); ++j)
        if (csv::to_double(row[j], tmp))
            return false;
    return row.size() > from;
}

std::vector<std::string> read_label_file(const std::filesystem::path& path, std::size_t n)
{
    const auto table = csv::read(path);
    std::vector<std::string> tokens;
    for (const auto& row : table.rows)
        tokens.push_back(row.back());
    if (tokens.size() == n + 1)
        tokens.erase(tokens.begin()); // header
    if (tokens.size() != n)
        throw Error(ErrorCategory::labeling, "label file '" + path.string() + "' has " +
                                                 std::to_string(tokens.size()) + " labels for " +
                                                 std::to_string(n) + " samples");
    return tokens;
}

} // namespace

void validate(const ExpressionDataset& ds)
{
    const auto n = ds.samples();
    const auto m = ds.features();
    if (n < 2 || m < 1)
        throw Error(ErrorCategory::shape, "dataset needs n >= 2 samples and m >= 1 features, got " +
                                              std::to_string(n) + "x" + std::to_string(m));
    if (static_cast<Eigen::Index>(ds.labels.size()) != n)
        throw Error(ErrorCategory::labeling, "label count " + std::to_string(ds.labels.size()) +
                                                 " != sample count " + std::to_string(n));
    if (static_cast<Eigen::Index>(ds.gene_ids.size()) != m ||
        static_cast<Eigen::Index>(ds.sample_ids.size()) != n)
        throw Error(ErrorCategory::shape, "identifier lists do not match the matrix shape");
    const int c = ds.classes();
    if (c < 2)
        throw Error(ErrorCategory::labeling, "dataset needs at least 2 classes");
    std::vector<int> counts(static_cast<std::size_t>(c), 0);
    for (int y : ds.labels) {
        if (y < 0 || y >= c)
            throw Error(ErrorCategory::range, "class id " + std::to_string(y) + " outside [0, c)");
        ++counts[static_cast<std::size_t>(y)];
    }
    for (int k = 0; k < c; ++k)
        if (counts[static_cast<std::size_t>(k)] == 0)
            throw Error(ErrorCategory::labeling, "class '" + ds.class_names[static_cast<std::size_t>(k)] +
                                                     "' has no samples");
    if (!ds.X.allFinite())
        throw Error(ErrorCategory::numerical, "expression matrix contains NaN or Inf");
}

ExpressionDataset ingest_csv(const std::filesystem::path& path, Orientation orientation,
                             const LabelSource& label_source)
{
    if (!std::filesystem::exists(path))
        throw Error(ErrorCategory::io, "no such file '" + path.string() + "'");
    auto table = csv::read(path);
    auto& rows = table.rows;
    if (rows.empty())
        throw ParseError("empty file '" + path.string() + "'", 1);

    const std::size_t width = rows.front().size();
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].size() != width)
            throw ParseError("ragged row " + std::to_string(table.lines[r]) + ": expected " +
                                 std::to_string(width) + " fields, found " + std::to_string(rows[r].size()),
                             table.lines[r]);
    if (width < 2)
        throw ParseError("expected an id column plus at least one value column", table.lines[0]);

    // Header row: every field after the id column is non-numeric.
    const bool has_header = all_non_numeric(rows.front(), 1);
    const std::size_t first_data = has_header ? 1 : 0;

    // Optional embedded label line (a row in genes_by_samples, a column otherwise).
    std::vector<std::string> label_tokens;
    std::optional<std::size_t> label_row;
    std::optional<std::size_t> label_col;
    if (label_source.column) {
        const auto& name = *label_source.column;
        if (orientation == Orientation::genes_by_samples) {
            for (std::size_t r = first_data; r < rows.size(); ++r)
                if (rows[r][0] == name)
                    label_row = r;
            if (!label_row)
                throw Error(ErrorCategory::labeling, "no label row named '" + name + "'");
        } else {
            if (has_header)
                for (std::size_t c = 1; c < width; ++c)
                    if (rows.front()[c] == name)
                        label_col = c;
            if (!label_col)
                throw Error(ErrorCategory::labeling, "no label column named '" + name + "'");
        }
    }

    std::vector<std::size_t> data_rows;
    for (std::size_t r = first_data; r < rows.size(); ++r)
        if (!label_row || r != *label_row)
            data_rows.push_back(r);
    std::vector<std::size_t> data_cols;
    for (std::size_t c = 1; c < width; ++c)
        if (!label_col || c != *label_col)
            data_cols.push_back(c);

    Eigen::MatrixXd raw(static_cast<Eigen::Index>(data_rows.size()), static_cast<Eigen::Index>(data_cols.size()));
    for (std::size_t i = 0; i < data_rows.size(); ++i) {
        const auto r = data_rows[i];
        for (std::size_t j = 0; j < data_cols.size(); ++j) {
            const auto c = data_cols[j];
            double v = 0;
            if (!csv::to_double(rows[r][c], v))
                throw ParseError("non-numeric cell " + coord(table.lines[r], static_cast<long>(c) + 1) +
                                     ": '" + rows[r][c] + "'",
                                 table.lines[r], static_cast<long>(c) + 1);
            raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }

    std::vector<std::string> row_ids;
    for (auto r : data_rows)
        row_ids.push_back(rows[r][0]);
    std::vector<std::string> col_ids;
    for (auto c : data_cols)
        col_ids.push_back(has_header ? rows.front()[c] : "c" + std::to_string(c));

    ExpressionDataset ds;
    if (orientation == Orientation::genes_by_samples) {
        ds.X = raw.transpose();
        ds.gene_ids = std::move(row_ids);
        ds.sample_ids = std::move(col_ids);
        if (label_row)
            for (auto c : data_cols)
                label_tokens.push_back(rows[*label_row][c]);
    } else {
        ds.X = std::move(raw);
        ds.sample_ids = std::move(row_ids);
        ds.gene_ids = std::move(col_ids);
        if (label_col)
            for (auto r : data_rows)
                label_tokens.push_back(rows[r][*label_col]);
    }

    if (!label_source.column) {
        if (!label_source.file)
            throw Error(ErrorCategory::labeling, "no label source given");
        label_tokens = read_label_file(*label_source.file, ds.sample_ids.size());
    }
    auto [ids, classes] = encode_labels(label_tokens, label_source.classes);
    ds.labels = std::move(ids);
    ds.class_names = std::move(classes);
    validate(ds);
    return ds;
}

ExpressionDataset normalize(const ExpressionDataset& ds, NormMode mode)
{
    ExpressionDataset out = ds;
    if (mode == NormMode::none)
        return out;
    const auto n = static_cast<double>(ds.samples());
    for (Eigen::Index j = 0; j < ds.features(); ++j) {
        auto col = out.X.col(j);
        if (mode == NormMode::minmax) {
            const double lo = col.minCoeff();
            const double range = col.maxCoeff() - lo;
            if (range > 0.0)
                col = ((col.array() - lo) / range).matrix();
            else
                col.setZero();
        } else {
            const double mean = col.mean();
            const double var = (col.array() - mean).square().sum() / n;
            if (var > 0.0)
                col = ((col.array() - mean) / std::sqrt(var)).matrix();
            else
                col.setZero();
        }
    }
    return out;
}

OneHotMatrix one_hot(const std::vector<int>& labels, int classes)
{
    if (classes < 1)
        throw Error(ErrorCategory::config, "class count must be positive");
    OneHotMatrix oh;
    oh.classes = classes;
    oh.Y = Eigen::MatrixXd::Zero(classes, static_cast<Eigen::Index>(labels.size()));
    for (std::size_t j = 0; j < labels.size(); ++j) {
        const int y = labels[j];
        if (y < 0 || y >= classes)
            throw Error(ErrorCategory::range, "label " + std::to_string(y) + " at sample " + std::to_string(j) +
                                                  " outside [0, " + std::to_string(classes) + ")");
        oh.Y(y, static_cast<Eigen::Index>(j)) = 1.0;
    }
    return oh;
}

std::vector<Split> make_splits(const std::vector<int>& labels, const SplitPlan& plan)
{
    const int n = static_cast<int>(labels.size());
    if (plan.repetitions < 1)
        throw Error(ErrorCategory::config, "split repetitions must be >= 1");
    if (n < 2)
        throw Error(ErrorCategory::config, "need at least 2 samples to split");

    int classes = 0;
    for (int y : labels)
        classes = std::max(classes, y + 1);
    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(classes));
    for (int i = 0; i < n; ++i)
        by_class[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])].push_back(i);
    if (plan.stratified)
        for (std::size_t c = 0; c < by_class.size(); ++c)
            if (by_class[c].size() == 1)
                throw Error(ErrorCategory::config,
                            "class " + std::to_string(c) + " has a single sample; cannot stratify");

    Rng rng(plan.seed);
    std::vector<Split> splits;

    auto finish = [n](std::vector<int> test) {
        std::sort(test.begin(), test.end());
        Split s;
        s.test = std::move(test);
        std::vector<char> in_test(static_cast<std::size_t>(n), 0);
        for (int i : s.test)
            in_test[static_cast<std::size_t>(i)] = 1;
        for (int i = 0; i < n; ++i)
            if (!in_test[static_cast<std::size_t>(i)])
                s.train.push_back(i);
        return s;
    };

    if (plan.mode == SplitMode::kfold) {
        const int folds = plan.repetitions;
        if (folds < 2 || folds > n)
            throw Error(ErrorCategory::config, "k-fold needs 2 <= folds <= n");
        std::vector<int> order;
        if (plan.stratified) {
            for (auto members : by_class) {
                rng.shuffle(members);
                order.insert(order.end(), members.begin(), members.end());
            }
        } else {
            order.resize(static_cast<std::size_t>(n));
            std::iota(order.begin(), order.end(), 0);
            rng.shuffle(order);
        }
        std::vector<std::vector<int>> fold_members(static_cast<std::size_t>(folds));
        for (std::size_t i = 0; i < order.size(); ++i)
            fold_members[i % static_cast<std::size_t>(folds)].push_back(order[i]);
        for (auto& f : fold_members)
            splits.push_back(finish(std::move(f)));
        return splits;
    }

    if (!(plan.test_fraction > 0.0 && plan.test_fraction < 1.0))
        throw Error(ErrorCategory::config, "test_fraction must lie in (0, 1)");
    if (plan.test_fraction * n < 1.0)
        throw Error(ErrorCategory::config, "test_fraction * n < 1: empty test set");

    for (int rep = 0; rep < plan.repetitions; ++rep) {
        std::vector<int> test;
        if (plan.stratified) {
            for (auto members : by_class) {
                if (members.empty())
                    continue;
                rng.shuffle(members);
                const int size = static_cast<int>(members.size());
                const int take = std::clamp(static_cast<int>(std::lround(plan.test_fraction * size)), 1, size - 1);
                test.insert(test.end(), members.begin(), members.begin() + take);
            }
        } else {
            std::vector<int> all(static_cast<std::size_t>(n));
            std::iota(all.begin(), all.end(), 0);
            rng.shuffle(all);
            const int take = std::clamp(static_cast<int>(std::lround(plan.test_fraction * n)), 1, n - 1);
            test.assign(all.begin(), all.begin() + take);
        }
        splits.push_back(finish(std::move(test)));
    }
    return splits;
}

std::vector<Split> make_splits(const ExpressionDataset& ds, const SplitPlan& plan)
{
    return make_splits(ds.labels, plan);
}

double synth_spread(const SynthOptions& opt)
{
    return opt.sigma * std::sqrt(static_cast<double>(opt.dims));
}

ExpressionDataset synth_outliers(const SynthOptions& opt)
{
    if (opt.n_per_class < 10)
        throw Error(ErrorCategory::config, "synthetic data needs n_per_class >= 10");
    if (opt.dims < 1 || opt.n_outliers < 0 || !(opt.sigma > 0.0) || opt.separation < 0.0)
        throw Error(ErrorCategory::config, "invalid synthetic dataset options");

    Rng rng(opt.seed);
    const Eigen::Index d = opt.dims;
    const Eigen::Index n_regular = 2 * static_cast<Eigen::Index>(opt.n_per_class);
    const Eigen::Index n = n_regular + opt.n_outliers;

    auto random_unit = [&] {
        Eigen::VectorXd v(d);
        do {
            for (Eigen::Index i = 0; i < d; ++i)
                v(i) = rng.normal();
        } while (v.norm() == 0.0);
        return Eigen::VectorXd(v.normalized());
    };

    const Eigen::VectorXd axis = random_unit();
    const Eigen::VectorXd mean0 = Eigen::VectorXd::Zero(d);
    const Eigen::VectorXd mean1 = opt.separation * opt.sigma * axis;

    ExpressionDataset ds;
    ds.X.resize(n, d);
    ds.labels.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n_regular; ++i) {
        const int y = i < opt.n_per_class ? 0 : 1;
        const Eigen::VectorXd& mean = y == 0 ? mean0 : mean1;
        for (Eigen::Index j = 0; j < d; ++j)
            ds.X(i, j) = mean(j) + opt.sigma * rng.normal();
        ds.labels[static_cast<std::size_t>(i)] = y;
    }

    // Outliers sit 6-9 spreads from their own class mean, pushed away from
    // the other class, so they are >= 5 spreads from both means.
    const double spread = synth_spread(opt);
    for (int o = 0; o < opt.n_outliers; ++o) {
        const int y = o % 2;
        const Eigen::VectorXd away = y == 0 ? Eigen::VectorXd(-axis) : axis;
        const Eigen::VectorXd dir = (random_unit() + 2.0 * away).normalized();
        const double radius = spread * rng.uniform(6.0, 9.0);
        const Eigen::VectorXd& mean = y == 0 ? mean0 : mean1;
        ds.X.row(n_regular + o) = (mean + radius * dir).transpose();
        ds.labels[static_cast<std::size_t>(n_regular + o)] = y;
    }

    for (Eigen::Index j = 0; j < d; ++j)
        ds.gene_ids.push_back("g" + std::to_string(j));
    for (Eigen::Index i = 0; i < n; ++i)
        ds.sample_ids.push_back(i < n_regular ? "s" + std::to_string(i) : "outlier" + std::to_string(i - n_regular));
    ds.class_names = {"0", "1"};
    validate(ds);
    return ds;
}

void write_dataset_csv(const ExpressionDataset& ds, const std::filesystem::path& data_path,
                       const std::filesystem::path& labels_path)
{
    std::vector<std::string> header{"gene_id"};
    header.insert(header.end(), ds.sample_ids.begin(), ds.sample_ids.end());
    csv::write_atomic(data_path, csv::matrix_to_csv(ds.X.transpose(), header, ds.gene_ids));

    std::string labels = "label\n";
    for (int y : ds.labels)
        labels += ds.class_names[static_cast<std::size_t>(y)] + '\n';
    csv::write_atomic(labels_path, labels);
}

} // namespace plpca
