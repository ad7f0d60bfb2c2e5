#include "plpca/persistence.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace plpca {

namespace {

using BigInt = boost::multiprecision::cpp_int;

// Fraction-free (Bareiss) elimination; every intermediate stays an integer.
int bareiss_rank(std::vector<std::vector<BigInt>> a)
{
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a.front().size() : 0;
    BigInt prev = 1;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t pivot = rank;
        while (pivot < rows && a[pivot][c] == 0)
            ++pivot;
        if (pivot == rows)
            continue;
        std::swap(a[pivot], a[rank]);
        for (std::size_t r = rank + 1; r < rows; ++r) {
            for (std::size_t k = c + 1; k < cols; ++k)
                a[r][k] = (a[rank][c] * a[r][k] - a[r][c] * a[rank][k]) / prev;
            a[r][c] = 0;
        }
        prev = a[rank][c];
        ++rank;
    }
    return static_cast<int>(rank);
}

std::vector<std::vector<BigInt>> to_big(const IntMatrix& M)
{
    std::vector<std::vector<BigInt>> a(static_cast<std::size_t>(M.rows()),
                                       std::vector<BigInt>(static_cast<std::size_t>(M.cols())));
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = M(i, j);
    return a;
}

} // namespace

int exact_rank(const IntMatrix& M)
{
    if (M.rows() == 0 || M.cols() == 0)
        return 0;
    return bareiss_rank(to_big(M));
}

int betti_exact(const SimplicialComplex& K, int q)
{
    const int n_q = static_cast<int>(K.count(q));
    return n_q - exact_rank(boundary_matrix(K, q)) - exact_rank(boundary_matrix(K, q + 1));
}

int persistent_betti_exact(const SimplicialComplex& K_t, const SimplicialComplex& K_tp, int q)
{
    if (!K_t.is_subcomplex_of(K_tp))
        throw Error(ErrorCategory::inclusion, "persistent Betti number needs K_t to be a subcomplex of K_tp");
    const int kernel_dim = static_cast<int>(K_t.count(q)) - exact_rank(boundary_matrix(K_t, q));

    // The restricted operator acts on ker(B_out); its rank is
    // dim ker B_out - dim(ker B_out cap ker B_in) = rank B - rank B_out.
    const IntMatrix big = boundary_matrix(K_tp, q + 1);
    const auto& rows_tp = K_tp.simplices(q);
    std::vector<Eigen::Index> out_rows;
    for (std::size_t r = 0; r < rows_tp.size(); ++r)
        if (!K_t.contains(rows_tp[r]))
            out_rows.push_back(static_cast<Eigen::Index>(r));
    IntMatrix outside(static_cast<Eigen::Index>(out_rows.size()), big.cols());
    for (std::size_t i = 0; i < out_rows.size(); ++i)
        outside.row(static_cast<Eigen::Index>(i)) = big.row(out_rows[i]);
    const int restricted_rank = exact_rank(big) - exact_rank(outside);
    return kernel_dim - restricted_rank;
}

} // namespace plpca
