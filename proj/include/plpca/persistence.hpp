#pragma once

#include "plpca/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace plpca {

/// Sorted vertex list [v0 < v1 < ... < vq].
using Simplex = std::vector<int>;
using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// Face-closed set of simplices. Within each dimension the simplices are
/// unique and lexicographically ordered; that order is the chain basis.
class SimplicialComplex {
public:
    SimplicialComplex() = default;

    /// Closes the given simplices under taking faces. Vertices referenced by a
    /// simplex must lie in [0, vertex_count); every vertex becomes a 0-simplex.
    static SimplicialComplex from_simplices(int vertex_count, const std::vector<Simplex>& simplices);

    int vertex_count() const { return vertex_count_; }
    /// Highest dimension holding at least one simplex (-1 when empty).
    int dimension() const { return static_cast<int>(by_dim_.size()) - 1; }
    /// q-simplices in basis order; empty for q < 0 or q > dimension().
    const std::vector<Simplex>& simplices(int q) const;
    std::size_t count(int q) const { return simplices(q).size(); }
    std::optional<int> index_of(const Simplex& s) const;
    bool contains(const Simplex& s) const { return index_of(s).has_value(); }
    bool is_subcomplex_of(const SimplicialComplex& other) const;

private:
    int vertex_count_ = 0;
    std::vector<std::vector<Simplex>> by_dim_;
    std::vector<std::map<Simplex, int>> index_;
};

/// Vietoris-Rips complex: an edge joins points at distance <= epsilon, and
/// every clique of q+1 vertices becomes a q-simplex for q <= max_dim.
SimplicialComplex build_complex_vr(const Eigen::MatrixXd& points, double epsilon, int max_dim);

/// Signed incidence matrix of the q-th boundary operator, rows indexed by
/// (q-1)-simplices and columns by q-simplices. Face i of [v0..vq] (vertex vi
/// removed) carries sign (-1)^i. For q = 0 the result is the 0 x n0 zero map.
IntMatrix boundary_matrix(const SimplicialComplex& K, int q);

/// L_q = B_{q+1} B_{q+1}^T + B_q^T B_q, of side #q-simplices.
Eigen::MatrixXd combinatorial_laplacian(const SimplicialComplex& K, int q);

/// Matrix of the q-order persistent Laplacian for the inclusion K_t -> K_tp.
///
/// The up part uses the boundary operator restricted to the (q+1)-chains of
/// K_tp whose boundary lies in the q-chains of K_t, taken with an orthonormal
/// basis of that subspace. Throws Error(inclusion) when K_t is not a subcomplex.
Eigen::MatrixXd persistent_laplacian_matrix(const SimplicialComplex& K_t, const SimplicialComplex& K_tp, int q);

struct PersistentSpectrum {
    int q = 0;
    int t = 0;
    int p = 0;
    Eigen::VectorXd eigenvalues; ///< ascending, near-zero values snapped to 0
    int betti = 0;                ///< multiplicity of the zero eigenvalue
};

/// Harmonic threshold: 1e-8 relative to the largest eigenvalue (absolute when that is below 1).
double zero_tolerance(const Eigen::VectorXd& eigenvalues);

/// Eigen-decomposes a symmetric matrix and counts its zero eigenvalues.
PersistentSpectrum spectrum_of(const Eigen::MatrixXd& laplacian, int q = 0, int t = 0, int p = 0);

PersistentSpectrum persistent_laplacian_q(const SimplicialComplex& K_t, const SimplicialComplex& K_tp, int q,
                                          int t = 0, int p = 0);

/// {"q":..,"t":..,"p":..,"eigenvalues":[..],"betti":..}
std::string spectrum_to_json(const PersistentSpectrum& s);

// Exact integer routes (rational elimination), intended for desk-scale complexes.
int exact_rank(const IntMatrix& M);
int betti_exact(const SimplicialComplex& K, int q);
/// dim ker B_q^t - rank B_{q+1}^{t,p}
int persistent_betti_exact(const SimplicialComplex& K_t, const SimplicialComplex& K_tp, int q);

// ---------------------------------------------------------------------------
// Filtered Laplacian family and its weighted aggregate.

enum class FilterDirection {
    as_text,     ///< keep an edge at step t iff l_ij <= threshold_t (nested, growing)
    as_equation, ///< keep an edge at step t iff l_ij > threshold_t (as printed; L^p = 0)
};

std::string to_string(FilterDirection d);
FilterDirection filter_direction_from_string(const std::string& s);

/// Binarizes a weighted Laplacian at p thresholds l_min + (t/p) d, t = 1..p,
/// where l_min, l_max and d = l_max - l_min range over the graph's edges
/// (nonzero off-diagonal entries). Kept edges become -1, the diagonal holds
/// the count of kept edges in the row. Non-edges are never kept.
template <typename Derived>
std::vector<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>>
filtered_family(const Eigen::MatrixBase<Derived>& L, int p, FilterDirection direction = FilterDirection::as_text)
{
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index n = L.rows();
    if (p < 1)
        throw Error(ErrorCategory::config, "filtration count p must be >= 1");
    if (L.cols() != n)
        throw Error(ErrorCategory::shape, "filtered_family: Laplacian must be square");

    bool any_edge = false;
    Scalar l_min{0}, l_max{0};
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Scalar v = L(i, j);
            if (v == Scalar(0))
                continue;
            if (!any_edge) {
                l_min = l_max = v;
                any_edge = true;
            }
            l_min = std::min(l_min, v);
            l_max = std::max(l_max, v);
        }
    if (!any_edge)
        throw Error(ErrorCategory::config, "filtered_family: Laplacian has no off-diagonal nonzero");
    const Scalar d = l_max - l_min;

    std::vector<Matrix> family;
    family.reserve(static_cast<std::size_t>(p));
    for (int t = 1; t <= p; ++t) {
        // The last threshold is l_max itself, not l_min + d with its rounding.
        const Scalar threshold = t == p ? l_max : l_min + (Scalar(t) / Scalar(p)) * d;
        Matrix Lt = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const Scalar v = L(i, j);
                if (v == Scalar(0))
                    continue;
                const bool keep = direction == FilterDirection::as_text ? v <= threshold : v > threshold;
                if (keep)
                    Lt(i, j) = Lt(j, i) = Scalar(-1);
            }
        Lt.diagonal() = -Lt.rowwise().sum();
        family.push_back(std::move(Lt));
    }
    return family;
}

template <typename Scalar>
struct PersistentRegularizer {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    std::vector<Matrix> family; ///< L^1 .. L^p
    std::vector<Scalar> zeta;   ///< renormalized to sum 1
    Matrix PL;
    FilterDirection direction = FilterDirection::as_text;
};

/// PL = sum_t zeta_t L^t with zeta renormalized to sum to one.
template <typename Scalar>
PersistentRegularizer<Scalar>
aggregate_pl(std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> family,
             const std::vector<Scalar>& zeta, FilterDirection direction = FilterDirection::as_text)
{
    if (family.empty() || zeta.size() != family.size())
        throw Error(ErrorCategory::config, "aggregate_pl: need one weight per filtration (" +
                                               std::to_string(zeta.size()) + " weights, " +
                                               std::to_string(family.size()) + " Laplacians)");
    Scalar total{0};
    for (Scalar z : zeta) {
        if (!(z >= Scalar(0)) || !std::isfinite(static_cast<double>(z)))
            throw Error(ErrorCategory::config, "aggregate_pl: weights must be finite and nonnegative");
        total += z;
    }
    if (!(total > Scalar(0)))
        throw Error(ErrorCategory::config, "aggregate_pl: all weights are zero");

    PersistentRegularizer<Scalar> r;
    r.direction = direction;
    // Per entry, the weights are first summed over members sharing a value, so
    // a family of identical members reproduces L^1 exactly (weight share 1).
    const Eigen::Index rows = family.front().rows(), cols = family.front().cols();
    for (const auto& Lt : family)
        if (Lt.rows() != rows || Lt.cols() != cols)
            throw Error(ErrorCategory::shape, "aggregate_pl: family members differ in size");
    r.PL = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(rows, cols);
    std::vector<std::pair<Scalar, Scalar>> groups; // (entry value, summed weight)
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            groups.clear();
            for (std::size_t t = 0; t < family.size(); ++t) {
                const Scalar v = family[t](i, j);
                if (v == Scalar(0) || zeta[t] == Scalar(0))
                    continue;
                auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == v; });
                if (it == groups.end())
                    groups.emplace_back(v, zeta[t]);
                else
                    it->second += zeta[t];
            }
            Scalar sum{0};
            for (const auto& [v, w] : groups)
                sum += v * (w / total);
            r.PL(i, j) = sum;
        }
    for (Scalar z : zeta)
        r.zeta.push_back(z / total);
    r.family = std::move(family);
    return r;
}

} // namespace plpca
