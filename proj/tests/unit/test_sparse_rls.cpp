#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "mmtc/sparse_rls.hpp"
#include "test_util.hpp"

using namespace mmtc;

namespace {

AdaptiveFilter scalar_filter(double p, double lambda) {
    AdaptiveFilter f(1, lambda, p);
    return f;
}

CVector one(cd v) {
    CVector y(1);
    y << v;
    return y;
}

// Exponentially weighted regularized correlation and cross-correlation,
// accumulated directly from the samples.
struct BatchLs {
    CMatrix R;
    CVector r;
    BatchLs(Index L, double delta) : R(CMatrix::Identity(L, L) / delta), r(CVector::Zero(L)) {}
    void add(const CVector& y, cd d, double lambda) {
        R = lambda * R + y * y.adjoint();
        r = lambda * r + y * std::conj(d);
    }
    CVector solve() const { return R.fullPivLu().solve(r); }
};

}  // namespace

TEST_CASE("gain_vector examples") {
    auto f = scalar_filter(1.0, 1.0);
    CHECK(gain_vector(f, one(1.0))[0].real() == doctest::Approx(0.5));
    auto g = scalar_filter(2.0, 1.0);
    CHECK(gain_vector(g, one(1.0))[0].real() == doctest::Approx(2.0 / 3.0));
    AdaptiveFilter h(3, 0.9, 5.0);
    CHECK(gain_vector(h, CVector::Zero(3)).norm() == 0.0);
}

TEST_CASE("update_inverse examples") {
    auto f = scalar_filter(1.0, 1.0);
    const CVector k = gain_vector(f, one(1.0));
    update_inverse(f, k, one(1.0));
    CHECK(f.P()(0, 0).real() == doctest::Approx(0.5));

    AdaptiveFilter g(3, 1.0, 2.0);
    const CMatrix before = g.P();
    update_inverse(g, gain_vector(g, CVector::Zero(3)), CVector::Zero(3));
    CHECK((g.P() - before).norm() == 0.0);
}

TEST_CASE("P tracks the direct inverse of the weighted correlation") {
    std::mt19937_64 e(42);
    const Index L = 6;
    const double lambda = 0.9, delta = 1.0;
    AdaptiveFilter f(L, lambda, delta);
    AdaptiveFilter g(L, lambda, delta);  // driven through gain_vector/update_inverse
    BatchLs batch(L, delta);
    for (int i = 0; i < 50; ++i) {
        const CVector y = test::random_cvector(L, e);
        rls_step(f, y, cd{0.0, 0.0}, {10.0, 0.0});
        update_inverse(g, gain_vector(g, y), y);
        batch.add(y, 0.0, lambda);
    }
    const CMatrix direct = batch.R.inverse();
    CHECK((f.P() - direct).cwiseAbs().maxCoeff() < 1e-7);
    CHECK((g.P() - direct).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("complex_sign and f_beta") {
    CHECK(std::abs(complex_sign({3.0, 4.0}) - cd{0.6, 0.8}) < 1e-15);
    CHECK(complex_sign({0.0, 0.0}) == cd{0.0, 0.0});
    CHECK(complex_sign({-2.0, 0.0}) == cd{-1.0, 0.0});
    CHECK(f_beta(0.05, 10.0) == doctest::Approx(-5.0));
    CHECK(f_beta(0.2, 10.0) == 0.0);
    CHECK(f_beta(0.1, 10.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("zero_attract examples") {
    const AttractorParams p{10.0, 0.001};
    CHECK(zero_attract(cd{0.05, 0.0}, p).real() == doctest::Approx(0.045));
    CHECK(zero_attract(cd{0.05, 0.0}, p).imag() == 0.0);
    CHECK(zero_attract(cd{0.2, 0.0}, p) == cd{0.2, 0.0});
    CHECK(zero_attract(cd{1e-6, 0.0}, p) == cd{0.0, 0.0});
    CHECK(zero_attract(cd{0.0, 0.0}, p) == cd{0.0, 0.0});
    // phase is preserved
    const cd w{0.03, -0.04};
    const cd z = zero_attract(w, p);
    CHECK(std::abs(std::arg(z) - std::arg(w)) < 1e-12);
    CHECK(std::abs(z) == doctest::Approx(0.05 - 0.001 * 5.0));
    CHECK(zero_attract(w, AttractorParams{10.0, 0.0}) == w);
}

TEST_CASE("zero attraction contracts and is the identity outside the zone") {
    std::mt19937_64 e(7);
    std::uniform_real_distribution<double> mag(0.0, 0.3), ph(-M_PI, M_PI);
    const AttractorParams p{10.0, 0.001};
    for (int i = 0; i < 10000; ++i) {
        const cd w = std::polar(mag(e), ph(e));
        const cd z = zero_attract(w, p);
        CHECK(std::abs(z) <= std::abs(w));
        if (std::abs(w) > 0.1) CHECK(z == w);
    }
}

TEST_CASE("rls_step") {
    SUBCASE("zero error leaves w alone apart from attraction") {
        AdaptiveFilter f(2, 0.95, 10.0);
        f.w << cd{0.5, 0.0}, cd{0.0, 0.5};
        CVector y(2);
        y << cd{1.0, 1.0}, cd{-1.0, 2.0};
        const CVector w0 = f.w;
        const auto r = rls_step(f, y, w0.dot(y), {10.0, 0.001});
        CHECK(std::abs(r.error) < 1e-15);
        CHECK((f.w - w0).norm() < 1e-15);
    }
    SUBCASE("single step from zero follows P y d*") {
        const double delta = 3.0, lambda = 0.9;
        AdaptiveFilter f(3, lambda, delta);
        CVector y(3);
        y << cd{1.0, -0.5}, cd{0.2, 0.1}, cd{-0.3, 0.4};
        const cd d{0.7, -0.7};
        rls_step(f, y, d, {10.0, 0.0});
        const CVector expected = delta * y * std::conj(d) / (lambda + delta * y.squaredNorm());
        CHECK((f.w - expected).norm() < 1e-14);
    }
    SUBCASE("dimension mismatch") {
        AdaptiveFilter f(3, 0.9);
        CHECK_THROWS_AS(rls_step(f, CVector::Zero(2), 1.0, {}), ContractError);
    }
}

TEST_CASE("rls_step equals the batch least-squares solution without attraction") {
    for (double lambda : {0.9, 0.95, 1.0}) {
        CAPTURE(lambda);
        std::mt19937_64 e(100 + static_cast<int>(lambda * 100));
        const Index L = 8;
        const double delta = 100.0;
        AdaptiveFilter f(L, lambda, delta);
        BatchLs batch(L, delta);
        for (int i = 0; i < 100; ++i) {
            const CVector y = test::random_cvector(L, e);
            const cd d = test::random_cvector(1, e)[0];
            rls_step(f, y, d, {10.0, 0.0});
            batch.add(y, d, lambda);
        }
        CHECK((f.w - batch.solve()).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("sparse observations give the same result as a dense recursion") {
    std::mt19937_64 e(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Index L = 20;
    const double lambda = 0.92;
    AdaptiveFilter f(L, lambda, 100.0);
    CVector w = CVector::Zero(L);
    CMatrix P = CMatrix::Identity(L, L) * 100.0;
    for (int i = 0; i < 600; ++i) {
        CVector y = test::random_cvector(L, e);
        for (Index k = 8; k < L; ++k)
            if (u(e) < 0.6) y[k] = 0.0;
        const cd d = test::random_cvector(1, e)[0];
        rls_step(f, y, d, {10.0, 0.0});
        const CVector Py = P * y;
        const double den = lambda + y.dot(Py).real();
        w += Py * std::conj(d - w.dot(y)) / den;
        P = (P - Py * Py.adjoint() / den) / lambda;
        P = (0.5 * (P + P.adjoint())).eval();
    }
    CHECK((f.w - w).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(((f.P() - P).cwiseAbs().maxCoeff() / P.cwiseAbs().maxCoeff()) < 1e-10);
}

TEST_CASE("P stays Hermitian and positive definite") {
    std::mt19937_64 e(9);
    const Index L = 10;
    AdaptiveFilter f(L, 0.98, 100.0);
    for (int i = 0; i < 1000; ++i) {
        rls_step(f, test::random_cvector(L, e), test::random_cvector(1, e)[0], {10.0, 0.001});
        if (i % 100 == 99) {
            const CMatrix P = f.P();
            CHECK((P - P.adjoint()).cwiseAbs().maxCoeff() <= 1e-9 * P.cwiseAbs().maxCoeff());
            Eigen::SelfAdjointEigenSolver<CMatrix> es(P);
            CHECK(es.eigenvalues().minCoeff() > 0.0);
        }
    }
}

TEST_CASE("LSE at the current weights is non-increasing once the data overdetermine w") {
    // lambda = 1, no attraction, noiseless consistent data. Before L samples
    // the residual comes only from the regularized initialization.
    std::mt19937_64 e(31);
    const Index L = 4;
    const CVector w_true = test::random_cvector(L, e);
    AdaptiveFilter f(L, 1.0, 100.0);
    std::vector<CVector> ys;
    std::vector<cd> ds;
    double previous = INFINITY;
    for (int i = 0; i < 60; ++i) {
        const CVector y = test::random_cvector(L, e);
        ys.push_back(y);
        ds.push_back(w_true.dot(y));
        rls_step(f, y, ds.back(), {10.0, 0.0});
        double cost = 0.0;
        for (std::size_t p = 0; p < ys.size(); ++p) cost += std::norm(ds[p] - f.w.dot(ys[p]));
        if (i >= L) {
            CHECK(cost <= previous * (1.0 + 1e-9));
            previous = cost;
        }
    }
    CHECK((f.w - w_true).norm() < 1e-3);
}

TEST_CASE("constructor contracts") {
    CHECK_THROWS_AS(AdaptiveFilter(0, 0.9), ContractError);
    CHECK_THROWS_AS(AdaptiveFilter(3, 0.0), ContractError);
    CHECK_THROWS_AS(AdaptiveFilter(3, 1.5), ContractError);
    CHECK_THROWS_AS(AdaptiveFilter(3, 0.9, 0.0), ContractError);
}
