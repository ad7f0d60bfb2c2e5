#pragma once

// Independent reference implementations used only by the tests. None of these
// share code with the library routines they check.

#include "plpca/persistence.hpp"
#include "plpca/rng.hpp"

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;
using RationalMatrix = std::vector<std::vector<Rational>>;

inline RationalMatrix to_rational(const plpca::IntMatrix& M)
{
    RationalMatrix a(static_cast<std::size_t>(M.rows()), std::vector<Rational>(static_cast<std::size_t>(M.cols())));
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = M(i, j);
    return a;
}

/// Reduced row echelon form over Q; returns the pivot columns.
inline std::vector<std::size_t> rref(RationalMatrix& a, std::size_t cols)
{
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t c = 0; c < cols && row < a.size(); ++c) {
        std::size_t p = row;
        while (p < a.size() && a[p][c] == 0)
            ++p;
        if (p == a.size())
            continue;
        std::swap(a[p], a[row]);
        const Rational lead = a[row][c];
        for (auto& v : a[row])
            v /= lead;
        for (std::size_t r = 0; r < a.size(); ++r) {
            if (r == row || a[r][c] == 0)
                continue;
            const Rational f = a[r][c];
            for (std::size_t k = 0; k < cols; ++k)
                a[r][k] -= f * a[row][k];
        }
        pivots.push_back(c);
        ++row;
    }
    return pivots;
}

inline int rank(const RationalMatrix& M, std::size_t cols)
{
    RationalMatrix a = M;
    return static_cast<int>(rref(a, cols).size());
}

inline int rank(const plpca::IntMatrix& M)
{
    if (M.rows() == 0 || M.cols() == 0)
        return 0;
    return rank(to_rational(M), static_cast<std::size_t>(M.cols()));
}

/// Basis of the right nullspace {x : M x = 0}, one vector per free column.
inline RationalMatrix nullspace(const plpca::IntMatrix& M)
{
    const auto cols = static_cast<std::size_t>(M.cols());
    RationalMatrix a = to_rational(M);
    const auto pivots = rref(a, cols);
    std::vector<bool> is_pivot(cols, false);
    for (auto p : pivots)
        is_pivot[p] = true;
    RationalMatrix basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f])
            continue;
        std::vector<Rational> v(cols, Rational(0));
        v[f] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r)
            v[pivots[r]] = -a[r][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

inline int betti(const plpca::SimplicialComplex& K, int q)
{
    return static_cast<int>(K.count(q)) - rank(plpca::boundary_matrix(K, q)) - rank(plpca::boundary_matrix(K, q + 1));
}

/// dim ker B_q^t - rank(B_in N) where N spans the (q+1)-chains of K_tp whose
/// boundary has no component outside K_t.
inline int persistent_betti(const plpca::SimplicialComplex& K_t, const plpca::SimplicialComplex& K_tp, int q)
{
    const int ker = static_cast<int>(K_t.count(q)) - rank(plpca::boundary_matrix(K_t, q));
    const plpca::IntMatrix B = plpca::boundary_matrix(K_tp, q + 1);
    if (B.cols() == 0)
        return ker;
    std::vector<Eigen::Index> in_rows, out_rows;
    const auto& faces = K_tp.simplices(q);
    for (std::size_t r = 0; r < faces.size(); ++r)
        (K_t.contains(faces[r]) ? in_rows : out_rows).push_back(static_cast<Eigen::Index>(r));

    plpca::IntMatrix B_out(static_cast<Eigen::Index>(out_rows.size()), B.cols());
    for (std::size_t i = 0; i < out_rows.size(); ++i)
        B_out.row(static_cast<Eigen::Index>(i)) = B.row(out_rows[i]);
    RationalMatrix N;
    if (out_rows.empty()) {
        for (Eigen::Index c = 0; c < B.cols(); ++c) {
            std::vector<Rational> e(static_cast<std::size_t>(B.cols()), Rational(0));
            e[static_cast<std::size_t>(c)] = 1;
            N.push_back(std::move(e));
        }
    } else {
        N = nullspace(B_out);
    }
    if (N.empty() || in_rows.empty())
        return ker;

    // Columns of B_in * N, stored as rows of its transpose (rank is the same).
    RationalMatrix image;
    for (const auto& v : N) {
        std::vector<Rational> col(in_rows.size(), Rational(0));
        for (std::size_t i = 0; i < in_rows.size(); ++i)
            for (Eigen::Index c = 0; c < B.cols(); ++c)
                if (B(in_rows[i], c) != 0)
                    col[i] += B(in_rows[i], c) * v[static_cast<std::size_t>(c)];
        image.push_back(std::move(col));
    }
    return ker - rank(image, in_rows.size());
}

/// Random point cloud with small integer coordinates (exact distances).
inline Eigen::MatrixXd random_points(plpca::Rng& rng, int n, int dim, int range = 6)
{
    Eigen::MatrixXd P(n, dim);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j)
            P(i, j) = static_cast<double>(rng.below(static_cast<std::uint64_t>(range)));
    return P;
}

/// Vietoris-Rips complex on 3..8 random integer points with a random scale.
inline plpca::SimplicialComplex random_vr(plpca::Rng& rng, int max_dim = 2)
{
    const int n = 3 + static_cast<int>(rng.below(6));
    const int dim = 2 + static_cast<int>(rng.below(2));
    return plpca::build_complex_vr(random_points(rng, n, dim), rng.uniform(0.0, 6.0), max_dim);
}

/// Randomly drops simplices of dimension >= 1 from K together with all their
/// cofaces. The vertex set is kept, so the result is a subcomplex of K.
inline plpca::SimplicialComplex random_subcomplex(plpca::Rng& rng, const plpca::SimplicialComplex& K)
{
    std::set<plpca::Simplex> dropped;
    std::vector<plpca::Simplex> keep;
    for (int q = 1; q <= K.dimension(); ++q)
        for (const auto& s : K.simplices(q)) {
            bool face_dropped = false;
            for (std::size_t i = 0; i < s.size(); ++i) {
                plpca::Simplex face = s;
                face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
                face_dropped = face_dropped || dropped.count(face) > 0;
            }
            if (face_dropped || rng.uniform() < 0.25)
                dropped.insert(s);
            else
                keep.push_back(s);
        }
    return plpca::SimplicialComplex::from_simplices(K.vertex_count(), keep);
}

/// Number of connected components of the graph with adjacency A != 0.
inline int components(const Eigen::MatrixXd& A)
{
    const auto n = static_cast<std::size_t>(A.rows());
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0.0)
                parent[find(i)] = find(j);
    int count = 0;
    for (std::size_t i = 0; i < n; ++i)
        count += find(i) == i;
    return count;
}

/// 1/2 sum_{i,j} W_ij |Q_i - Q_j|^2 by direct double loop.
inline double pairwise_energy(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& W)
{
    double total = 0.0;
    for (Eigen::Index i = 0; i < Q.rows(); ++i)
        for (Eigen::Index j = 0; j < Q.rows(); ++j) {
            double d2 = 0.0;
            for (Eigen::Index c = 0; c < Q.cols(); ++c)
                d2 += (Q(i, c) - Q(j, c)) * (Q(i, c) - Q(j, c));
            total += W(i, j) * d2;
        }
    return 0.5 * total;
}

/// Brute-force KNN on integer-valued coordinates. Squared distances are exact
/// integers, so ranking and tie detection need no tolerance.
inline std::vector<int> knn(const Eigen::MatrixXd& train, const std::vector<int>& labels, const Eigen::MatrixXd& test,
                            int k, int classes)
{
    std::vector<int> out;
    for (Eigen::Index t = 0; t < test.rows(); ++t) {
        std::vector<std::pair<long, int>> d;
        for (Eigen::Index i = 0; i < train.rows(); ++i) {
            long s = 0;
            for (Eigen::Index c = 0; c < train.cols(); ++c) {
                const long diff = std::lround(train(i, c) - test(t, c));
                s += diff * diff;
            }
            d.emplace_back(s, static_cast<int>(i));
        }
        std::sort(d.begin(), d.end());
        std::vector<int> votes(static_cast<std::size_t>(classes), 0);
        std::vector<double> summed(static_cast<std::size_t>(classes), 0.0);
        for (int r = 0; r < k; ++r) {
            const int y = labels[static_cast<std::size_t>(d[static_cast<std::size_t>(r)].second)];
            ++votes[static_cast<std::size_t>(y)];
            summed[static_cast<std::size_t>(y)] += std::sqrt(static_cast<double>(d[static_cast<std::size_t>(r)].first));
        }
        const int top = *std::max_element(votes.begin(), votes.end());
        int best = -1;
        for (int c = 0; c < classes; ++c) {
            if (votes[static_cast<std::size_t>(c)] != top)
                continue;
            if (best < 0 || summed[static_cast<std::size_t>(c)] <
                                summed[static_cast<std::size_t>(best)] -
                                    1e-12 * std::max(summed[static_cast<std::size_t>(c)],
                                                     summed[static_cast<std::size_t>(best)]))
                best = c;
        }
        out.push_back(best);
    }
    return out;
}

struct Counted {
    double acc, rec, pre, f1;
};

/// Macro metrics by walking (truth, prediction) pairs expanded from the counts.
inline Counted count_metrics(const Eigen::MatrixXi& C)
{
    const int c = static_cast<int>(C.rows());
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j)
            for (int r = 0; r < C(i, j); ++r)
                pairs.emplace_back(i, j);
    double correct = 0, rec_sum = 0, pre_sum = 0;
    for (auto [t, p] : pairs)
        correct += t == p;
    for (int k = 0; k < c; ++k) {
        double tp = 0, fn = 0, fp = 0;
        for (auto [t, p] : pairs) {
            tp += t == k && p == k;
            fn += t == k && p != k;
            fp += t != k && p == k;
        }
        rec_sum += tp + fn > 0 ? tp / (tp + fn) : 0.0;
        pre_sum += tp + fp > 0 ? tp / (tp + fp) : 0.0;
    }
    Counted out{};
    out.acc = correct / static_cast<double>(pairs.size());
    out.rec = rec_sum / c;
    out.pre = pre_sum / c;
    out.f1 = out.rec + out.pre > 0 ? 2 * out.rec * out.pre / (out.rec + out.pre) : 0.0;
    return out;
}

/// Largest principal angle between the column spaces of two orthonormal
/// bases of equal width: asin of the spectral norm of (I - A A^T) B.
inline double max_principal_angle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B)
{
    const Eigen::MatrixXd residual = B - A * (A.transpose() * B);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
    const double s = svd.singularValues().size() ? svd.singularValues().maxCoeff() : 0.0;
    return std::asin(std::min(1.0, s));
}

} // namespace oracle
