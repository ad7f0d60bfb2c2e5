#include "plpca/persistence.hpp"

#include "json.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <set>

namespace plpca {

namespace {

const std::vector<Simplex> kNoSimplices;

void add_with_faces(std::vector<std::set<Simplex>>& by_dim, const Simplex& s)
{
    const std::size_t q = s.size() - 1;
    if (by_dim.size() <= q)
        by_dim.resize(q + 1);
    if (!by_dim[q].insert(s).second || q == 0)
        return;
    for (std::size_t i = 0; i < s.size(); ++i) {
        Simplex face;
        face.reserve(s.size() - 1);
        for (std::size_t j = 0; j < s.size(); ++j)
            if (j != i)
                face.push_back(s[j]);
        add_with_faces(by_dim, face);
    }
}

} // namespace

SimplicialComplex SimplicialComplex::from_simplices(int vertex_count, const std::vector<Simplex>& simplices)
{
    if (vertex_count < 0)
        throw Error(ErrorCategory::config, "vertex count must be nonnegative");
    std::vector<std::set<Simplex>> by_dim(vertex_count > 0 ? 1 : 0);
    for (int v = 0; v < vertex_count; ++v)
        by_dim[0].insert(Simplex{v});
    for (auto s : simplices) {
        if (s.empty())
            throw Error(ErrorCategory::config, "empty simplex");
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw Error(ErrorCategory::config, "simplex repeats a vertex");
        if (s.front() < 0 || s.back() >= vertex_count)
            throw Error(ErrorCategory::range, "simplex vertex outside [0, vertex_count)");
        add_with_faces(by_dim, s);
    }

    SimplicialComplex K;
    K.vertex_count_ = vertex_count;
    for (auto& level : by_dim) {
        K.by_dim_.emplace_back(level.begin(), level.end()); // std::set order is lexicographic
        auto& index = K.index_.emplace_back();
        const auto& list = K.by_dim_.back();
        for (std::size_t i = 0; i < list.size(); ++i)
            index.emplace(list[i], static_cast<int>(i));
    }
    while (!K.by_dim_.empty() && K.by_dim_.back().empty()) {
        K.by_dim_.pop_back();
        K.index_.pop_back();
    }
    return K;
}

const std::vector<Simplex>& SimplicialComplex::simplices(int q) const
{
    if (q < 0 || q >= static_cast<int>(by_dim_.size()))
        return kNoSimplices;
    return by_dim_[static_cast<std::size_t>(q)];
}

std::optional<int> SimplicialComplex::index_of(const Simplex& s) const
{
    if (s.empty() || s.size() > index_.size())
        return std::nullopt;
    const auto& index = index_[s.size() - 1];
    const auto it = index.find(s);
    if (it == index.end())
        return std::nullopt;
    return it->second;
}

bool SimplicialComplex::is_subcomplex_of(const SimplicialComplex& other) const
{
    for (int q = 0; q <= dimension(); ++q)
        for (const auto& s : simplices(q))
            if (!other.contains(s))
                return false;
    return true;
}

SimplicialComplex build_complex_vr(const Eigen::MatrixXd& points, double epsilon, int max_dim)
{
    if (epsilon < 0.0 || max_dim < 0)
        throw Error(ErrorCategory::config, "build_complex_vr: need epsilon >= 0 and max_dim >= 0");
    const int n = static_cast<int>(points.rows());
    std::vector<std::vector<char>> adjacent(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if ((points.row(i) - points.row(j)).norm() <= epsilon)
                adjacent[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    adjacent[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = 1;

    // Grow cliques by appending larger vertices adjacent to every member.
    std::vector<Simplex> all;
    std::vector<Simplex> frontier;
    for (int v = 0; v < n; ++v)
        frontier.push_back({v});
    for (int q = 1; q <= max_dim && !frontier.empty(); ++q) {
        std::vector<Simplex> next;
        for (const auto& s : frontier)
            for (int v = s.back() + 1; v < n; ++v) {
                const bool ok = std::all_of(s.begin(), s.end(), [&](int u) {
                    return adjacent[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] != 0;
                });
                if (ok) {
                    Simplex t = s;
                    t.push_back(v);
                    next.push_back(std::move(t));
                }
            }
        all.insert(all.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return SimplicialComplex::from_simplices(n, all);
}

IntMatrix boundary_matrix(const SimplicialComplex& K, int q)
{
    if (q < 0)
        throw Error(ErrorCategory::config, "boundary order must be >= 0");
    const auto& cols = K.simplices(q);
    if (q == 0)
        return IntMatrix::Zero(0, static_cast<Eigen::Index>(cols.size()));
    const auto& rows = K.simplices(q - 1);
    IntMatrix B = IntMatrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto& s = cols[c];
        for (std::size_t i = 0; i < s.size(); ++i) {
            Simplex face;
            for (std::size_t j = 0; j < s.size(); ++j)
                if (j != i)
                    face.push_back(s[j]);
            const auto r = K.index_of(face);
            if (!r)
                throw Error(ErrorCategory::inclusion, "complex is not face-closed");
            B(*r, static_cast<Eigen::Index>(c)) = i % 2 == 0 ? 1 : -1;
        }
    }
    return B;
}

Eigen::MatrixXd combinatorial_laplacian(const SimplicialComplex& K, int q)
{
    const Eigen::MatrixXd down = boundary_matrix(K, q).cast<double>();
    const Eigen::MatrixXd up = boundary_matrix(K, q + 1).cast<double>();
    const auto n = static_cast<Eigen::Index>(K.count(q));
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    if (up.cols() > 0)
        L += up * up.transpose();
    if (down.rows() > 0)
        L += down.transpose() * down;
    return L;
}

Eigen::MatrixXd persistent_laplacian_matrix(const SimplicialComplex& K_t, const SimplicialComplex& K_tp, int q)
{
    if (!K_t.is_subcomplex_of(K_tp))
        throw Error(ErrorCategory::inclusion, "persistent Laplacian needs K_t to be a subcomplex of K_tp");
    if (q < 0)
        throw Error(ErrorCategory::config, "Laplacian order must be >= 0");

    const auto n_t = static_cast<Eigen::Index>(K_t.count(q));
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n_t, n_t);

    const Eigen::MatrixXd down = boundary_matrix(K_t, q).cast<double>();
    if (down.rows() > 0)
        L += down.transpose() * down;

    const Eigen::MatrixXd big = boundary_matrix(K_tp, q + 1).cast<double>();
    if (big.cols() == 0 || n_t == 0)
        return L;

    // Split rows of the big boundary into q-simplices inside K_t (reordered
    // to K_t's basis) and those only present in K_tp.
    const auto& rows_tp = K_tp.simplices(q);
    const auto n_out = static_cast<Eigen::Index>(rows_tp.size()) - n_t;
    Eigen::MatrixXd inside(n_t, big.cols());
    Eigen::MatrixXd outside(n_out, big.cols());
    Eigen::Index o = 0;
    for (std::size_t r = 0; r < rows_tp.size(); ++r) {
        const auto idx = K_t.index_of(rows_tp[r]);
        if (idx)
            inside.row(*idx) = big.row(static_cast<Eigen::Index>(r));
        else
            outside.row(o++) = big.row(static_cast<Eigen::Index>(r));
    }

    Eigen::MatrixXd basis; // orthonormal columns spanning ker(outside)
    if (n_out == 0) {
        basis = Eigen::MatrixXd::Identity(big.cols(), big.cols());
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(outside, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double tol = static_cast<double>(std::max(outside.rows(), outside.cols())) *
                           std::numeric_limits<double>::epsilon() * (sv.size() ? sv(0) : 0.0);
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > tol)
                ++rank;
        basis = svd.matrixV().rightCols(big.cols() - rank);
    }
    if (basis.cols() > 0) {
        const Eigen::MatrixXd restricted = inside * basis;
        L += restricted * restricted.transpose();
    }
    return L;
}

double zero_tolerance(const Eigen::VectorXd& eigenvalues)
{
    const double top = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    return 1e-8 * std::max(1.0, top);
}

PersistentSpectrum spectrum_of(const Eigen::MatrixXd& laplacian, int q, int t, int p)
{
    PersistentSpectrum s;
    s.q = q;
    s.t = t;
    s.p = p;
    if (laplacian.rows() == 0) {
        s.eigenvalues.resize(0);
        return s;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCategory::numerical, "eigensolver failed on persistent Laplacian");
    s.eigenvalues = es.eigenvalues();
    const double tol = zero_tolerance(s.eigenvalues);
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
        if (std::abs(s.eigenvalues(i)) < tol) {
            s.eigenvalues(i) = 0.0;
            ++s.betti;
        }
    return s;
}

PersistentSpectrum persistent_laplacian_q(const SimplicialComplex& K_t, const SimplicialComplex& K_tp, int q, int t,
                                          int p)
{
    return spectrum_of(persistent_laplacian_matrix(K_t, K_tp, q), q, t, p);
}

std::string spectrum_to_json(const PersistentSpectrum& s)
{
    nlohmann::ordered_json j;
    j["q"] = s.q;
    j["t"] = s.t;
    j["p"] = s.p;
    j["eigenvalues"] = std::vector<double>(s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size());
    j["betti"] = s.betti;
    return j.dump();
}

std::string to_string(FilterDirection d)
{
    return d == FilterDirection::as_text ? "as_text" : "as_equation";
}

FilterDirection filter_direction_from_string(const std::string& s)
{
    if (s == "as_text")
        return FilterDirection::as_text;
    if (s == "as_equation")
        return FilterDirection::as_equation;
    throw Error(ErrorCategory::config, "unknown filter direction '" + s + "'");
}

} // namespace plpca
