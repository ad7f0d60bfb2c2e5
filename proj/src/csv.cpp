#include "plpca/csv.hpp"

#include "plpca/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace plpca::csv {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_line(std::string_view line)
{
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                current.push_back('"');
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                current.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.emplace_back(trim(current));
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    fields.emplace_back(trim(current));
    return fields;
}

} // namespace

Table parse(std::string_view text)
{
    Table table;
    std::size_t start = 0;
    long line_no = 0;
    while (start <= text.size()) {
        ++line_no;
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        const auto line = text.substr(start, end - start);
        if (!trim(line).empty()) {
            table.rows.push_back(split_line(line));
            table.lines.push_back(line_no);
        }
        start = end + 1;
    }
    return table;
}

Table read(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCategory::io, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool to_double(std::string_view field, double& out)
{
    field = trim(field);
    if (field.empty())
        return false;
    if (field.front() == '+')
        field.remove_prefix(1);
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

std::string format(double value)
{
    if (value == 0.0)
        return "0"; // folds -0
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_atomic(const std::filesystem::path& path, const std::string& contents)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCategory::io, "cannot write '" + tmp.string() + "'");
        out << contents;
        if (!out)
            throw Error(ErrorCategory::io, "write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw Error(ErrorCategory::io, "cannot rename into '" + path.string() + "': " + ec.message());
}

std::string matrix_to_csv(const Eigen::MatrixXd& M, const std::vector<std::string>& header,
                          const std::vector<std::string>& row_ids)
{
    std::string out;
    if (!header.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (j)
                out += ',';
            out += header[j];
        }
        out += '\n';
    }
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        bool first = true;
        if (!row_ids.empty()) {
            out += row_ids[static_cast<std::size_t>(i)];
            first = false;
        }
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (!first)
                out += ',';
            out += format(M(i, j));
            first = false;
        }
        out += '\n';
    }
    return out;
}

std::string matrix_to_coo(const Eigen::MatrixXd& M)
{
    std::string out;
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            if (M(i, j) != 0.0)
                out += std::to_string(i) + ' ' + std::to_string(j) + ' ' + format(M(i, j)) + '\n';
    return out;
}

} // namespace plpca::csv
