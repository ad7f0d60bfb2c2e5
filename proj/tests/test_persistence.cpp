#include "oracles.hpp"
#include "plpca/graph.hpp"
#include "plpca/persistence.hpp"

#include <doctest.h>

#include <json.hpp>

using namespace plpca;

namespace {

SimplicialComplex hollow_triangle() { return SimplicialComplex::from_simplices(3, {{0, 1}, {1, 2}, {0, 2}}); }

SimplicialComplex hollow_square() { return SimplicialComplex::from_simplices(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}); }

int zero_count(const Eigen::MatrixXd& L) { return spectrum_of(L).betti; }

std::set<std::pair<int, int>> edges(const Eigen::MatrixXd& L)
{
    std::set<std::pair<int, int>> out;
    for (Eigen::Index i = 0; i < L.rows(); ++i)
        for (Eigen::Index j = i + 1; j < L.cols(); ++j)
            if (L(i, j) != 0.0)
                out.emplace(static_cast<int>(i), static_cast<int>(j));
    return out;
}

} // namespace

TEST_CASE("Vietoris-Rips construction")
{
    Eigen::MatrixXd tri(3, 2);
    tri << 0, 0, 1, 0, 0, 1;
    const auto K = build_complex_vr(tri, 1.5, 2);
    CHECK(K.count(0) == 3);
    CHECK(K.count(1) == 3);
    CHECK(K.count(2) == 1);

    CHECK(build_complex_vr(tri, 0.0, 2).count(1) == 0);
    CHECK(build_complex_vr(tri, 0.0, 2).dimension() == 0);

    Eigen::MatrixXd sq(4, 2);
    sq << 0, 0, 1, 0, 1, 1, 0, 1;
    const auto S = build_complex_vr(sq, 1.2, 2);
    CHECK(S.count(1) == 4);
    CHECK(S.count(2) == 0);
    CHECK(oracle::betti(S, 1) == 1);
    CHECK(zero_count(combinatorial_laplacian(S, 1)) == 1);
}

TEST_CASE("boundary matrix signs")
{
    const auto edge = SimplicialComplex::from_simplices(2, {{0, 1}});
    const IntMatrix B1 = boundary_matrix(edge, 1);
    REQUIRE(B1.rows() == 2);
    REQUIRE(B1.cols() == 1);
    CHECK(B1(0, 0) == -1);
    CHECK(B1(1, 0) == 1);

    const auto tri = SimplicialComplex::from_simplices(3, {{0, 1, 2}});
    const IntMatrix B2 = boundary_matrix(tri, 2);
    // Edge rows in lexicographic order: [0,1], [0,2], [1,2].
    REQUIRE(tri.simplices(1) == std::vector<Simplex>{{0, 1}, {0, 2}, {1, 2}});
    CHECK(B2(*tri.index_of({1, 2}), 0) == 1);
    CHECK(B2(*tri.index_of({0, 2}), 0) == -1);
    CHECK(B2(*tri.index_of({0, 1}), 0) == 1);
    CHECK((boundary_matrix(tri, 1) * B2).isZero());

    const IntMatrix empty = boundary_matrix(hollow_triangle(), 2);
    CHECK(empty.rows() == 3);
    CHECK(empty.cols() == 0);
    CHECK(boundary_matrix(tri, 0).rows() == 0);
    CHECK(boundary_matrix(tri, 0).cols() == 3);
}

TEST_CASE("complex is face closed and ordered")
{
    const auto K = SimplicialComplex::from_simplices(5, {{1, 3, 4}, {0, 2}});
    CHECK(K.count(0) == 5);
    CHECK(K.simplices(1) == std::vector<Simplex>{{0, 2}, {1, 3}, {1, 4}, {3, 4}});
    CHECK(K.count(2) == 1);
    CHECK(K.simplices(5).empty());
    CHECK_THROWS_AS(SimplicialComplex::from_simplices(2, {{0, 2}}), Error);
}

TEST_CASE("triangle Laplacians")
{
    const Eigen::MatrixXd L0 = combinatorial_laplacian(hollow_triangle(), 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L0);
    CHECK(es.eigenvalues()(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(es.eigenvalues()(1) == doctest::Approx(3.0));
    CHECK(es.eigenvalues()(2) == doctest::Approx(3.0));
    Eigen::Matrix3d cycle;
    cycle << 2, -1, -1, -1, 2, -1, -1, -1, 2;
    CHECK(L0 == cycle);

    CHECK(zero_count(combinatorial_laplacian(hollow_triangle(), 1)) == 1);
    const auto filled = SimplicialComplex::from_simplices(3, {{0, 1, 2}});
    CHECK(zero_count(combinatorial_laplacian(filled, 1)) == 0);
    CHECK(oracle::betti(filled, 1) == 0);
}

TEST_CASE("persistent Laplacian examples")
{
    const auto K = hollow_triangle();
    const auto snap = persistent_laplacian_q(K, K, 1);
    CHECK(snap.betti == 1);
    CHECK((persistent_laplacian_matrix(K, K, 0) - combinatorial_laplacian(K, 0)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((persistent_laplacian_matrix(K, K, 1) - combinatorial_laplacian(K, 1)).cwiseAbs().maxCoeff() < 1e-12);

    const auto filled_square =
        SimplicialComplex::from_simplices(4, {{0, 1, 2}, {0, 2, 3}, {0, 1, 3}, {1, 2, 3}});
    CHECK(hollow_square().is_subcomplex_of(filled_square));
    CHECK(persistent_laplacian_q(hollow_square(), filled_square, 1).betti == 0);
    CHECK(persistent_betti_exact(hollow_square(), filled_square, 1) == 0);
    CHECK(oracle::persistent_betti(hollow_square(), filled_square, 1) == 0);

    const auto two = SimplicialComplex::from_simplices(4, {{0, 1}, {2, 3}});
    const auto joined = SimplicialComplex::from_simplices(4, {{0, 1}, {1, 2}, {2, 3}});
    CHECK(persistent_laplacian_q(two, joined, 0).betti == 1);
    CHECK(persistent_laplacian_q(two, two, 0).betti == 2);

    CHECK_THROWS_AS(persistent_laplacian_q(joined, two, 0), Error);
    try {
        persistent_laplacian_q(joined, two, 0);
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::inclusion);
    }
}

TEST_CASE("spectrum JSON record")
{
    const auto s = persistent_laplacian_q(hollow_triangle(), hollow_triangle(), 1, 2, 3);
    const auto j = nlohmann::json::parse(spectrum_to_json(s));
    CHECK(j["q"] == 1);
    CHECK(j["t"] == 2);
    CHECK(j["p"] == 3);
    CHECK(j["betti"] == 1);
    CHECK(j["eigenvalues"].size() == 3);
}

TEST_CASE("boundary of a boundary vanishes on random complexes")
{
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const auto K = oracle::random_vr(rng, 3);
        for (int q = 1; q < K.dimension(); ++q)
            CHECK((boundary_matrix(K, q) * boundary_matrix(K, q + 1)).isZero());
    }
}

TEST_CASE("zero multiplicity matches rational Betti numbers")
{
    Rng rng(32);
    for (int trial = 0; trial < 100; ++trial) {
        const auto K = oracle::random_vr(rng);
        for (int q = 0; q <= K.dimension(); ++q) {
            const int expected = oracle::betti(K, q);
            CHECK(zero_count(combinatorial_laplacian(K, q)) == expected);
            CHECK(betti_exact(K, q) == expected);
        }
    }
}

TEST_CASE("persistent Betti numbers match the rank formula")
{
    Rng rng(33);
    for (int trial = 0; trial < 60; ++trial) {
        const auto K_tp = oracle::random_vr(rng);
        const auto K_t = oracle::random_subcomplex(rng, K_tp);
        REQUIRE(K_t.is_subcomplex_of(K_tp));
        for (int q = 0; q <= K_t.dimension(); ++q) {
            const int expected = oracle::persistent_betti(K_t, K_tp, q);
            CHECK(persistent_laplacian_q(K_t, K_tp, q).betti == expected);
            CHECK(persistent_betti_exact(K_t, K_tp, q) == expected);
        }
    }
}

TEST_CASE("filtered family degenerate and worked cases")
{
    Eigen::Matrix2d L;
    L << 0.4, -0.4, -0.4, 0.4;
    Eigen::Matrix2d unit;
    unit << 1, -1, -1, 1;
    for (const auto& Lt : filtered_family(L, 4))
        CHECK(Lt == unit);

    // Path 0-1-2-3 with off-diagonals -0.9, -0.5, -0.1.
    Eigen::Matrix4d P = Eigen::Matrix4d::Zero();
    P(0, 1) = P(1, 0) = -0.9;
    P(1, 2) = P(2, 1) = -0.5;
    P(2, 3) = P(3, 2) = -0.1;
    P.diagonal() = -P.rowwise().sum();
    // Thresholds -0.9 + (t/3) 0.8: about -0.633, -0.367 and -0.1.
    const auto fam = filtered_family(P, 3);
    CHECK(edges(fam[0]) == std::set<std::pair<int, int>>{{0, 1}});
    CHECK(edges(fam[1]) == std::set<std::pair<int, int>>{{0, 1}, {1, 2}});
    CHECK(edges(fam[2]) == std::set<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}});
    for (const auto& Lt : fam) {
        CHECK(Lt.rowwise().sum().isZero(0.0));
        CHECK(Lt.cwiseAbs().maxCoeff() <= 2.0);
    }

    const auto eq = filtered_family(P, 3, FilterDirection::as_equation);
    CHECK(eq[2].isZero(0.0));
    CHECK(edges(eq[0]) == std::set<std::pair<int, int>>{{1, 2}, {2, 3}});

    CHECK_THROWS_AS(filtered_family(Eigen::Matrix3d::Identity().eval(), 2), Error);
    CHECK_THROWS_AS(filtered_family(P, 0), Error);
}

TEST_CASE("aggregate weights")
{
    Rng rng(40);
    const Eigen::MatrixXd X = oracle::random_points(rng, 12, 3);
    const auto g = build_knn_graph(X, 3);
    const auto fam = filtered_family(g.L, 6);

    const auto sel = aggregate_pl(fam, {1, 0, 0, 0, 0, 0});
    CHECK(sel.PL == fam[0]);

    const auto coad = aggregate_pl(fam, {2, 3, 0, 0, 2, 1});
    const std::vector<double> expected{0.25, 0.375, 0, 0, 0.25, 0.125};
    CHECK(coad.zeta == expected);

    std::vector<Eigen::MatrixXd> same(5, fam[2]);
    CHECK(aggregate_pl(same, std::vector<double>(5, 0.7)).PL == fam[2]);

    const auto a = aggregate_pl(fam, {0.5, 3, 1, 2, 2, 1});
    const auto b = aggregate_pl(fam, {5, 30, 10, 20, 20, 10});
    CHECK((a.PL - b.PL).cwiseAbs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(aggregate_pl(fam, std::vector<double>(6, 0.0)), Error);
    CHECK_THROWS_AS(aggregate_pl(fam, {1, 1}), Error);
    CHECK_THROWS_AS(aggregate_pl(fam, {1, -1, 0, 0, 0, 0}), Error);
}

TEST_CASE("filtration semantics on random graphs")
{
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 4 + static_cast<int>(rng.below(16));
        const Eigen::MatrixXd X = oracle::random_points(rng, n, 3, 20);
        const int k = 1 + static_cast<int>(rng.below(3));
        const auto g = build_knn_graph(X, k);
        const int p = 1 + static_cast<int>(rng.below(8));
        const auto text = filtered_family(g.L, p);
        for (int t = 0; t + 1 < p; ++t) {
            const auto lo = edges(text[static_cast<std::size_t>(t)]);
            const auto hi = edges(text[static_cast<std::size_t>(t + 1)]);
            CHECK(std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()));
        }
        const auto A = knn_adjacency<double>(pairwise_sq_distances(X), k);
        const Eigen::MatrixXd Lu = Eigen::MatrixXd(A.rowwise().sum().asDiagonal()) - A;
        CHECK(text.back() == Lu);
        CHECK(filtered_family(g.L, p, FilterDirection::as_equation).back().isZero(0.0));

        std::vector<double> zeta(static_cast<std::size_t>(p));
        for (auto& z : zeta)
            z = static_cast<double>(rng.below(11));
        zeta[0] += 1;
        const auto r = aggregate_pl(text, zeta);
        double sum = 0;
        for (double z : r.zeta)
            sum += z;
        CHECK(std::abs(sum - 1.0) < 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.PL);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    }
}
