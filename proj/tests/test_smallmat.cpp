#include "catch2/catch_amalgamated.hpp"

#include <random>

#include "povmprep/smallmat.hpp"

using namespace povmprep;

namespace {

RealMatN random_symmetric3(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RealMatN m(3);
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            const double v = u(rng);
            m(i, j) = v;
            m(j, i) = v;
        }
        m(i, i) += 3.0;  // diagonally dominant, well conditioned
    }
    return m;
}

Mat2 random_hermitian(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Complex b{u(rng), u(rng)};
    return Mat2{Complex(u(rng)), b, std::conj(b), Complex(u(rng))};
}

}  // namespace

TEST_CASE("invert: identity and diagonal") {
    auto id3 = RealMatN::identity(3);
    CHECK(invert(id3).max_abs_diff(id3) < 1e-14);

    RealMatN d(2);
    d(0, 0) = 2.0;
    d(1, 1) = 4.0;
    const RealMatN di = invert(d);
    CHECK(di(0, 0) == Catch::Approx(0.5));
    CHECK(di(1, 1) == Catch::Approx(0.25));
    CHECK(di(0, 1) == 0.0);
}

TEST_CASE("invert: residual oracle on random symmetric matrices") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const RealMatN m = random_symmetric3(rng);
        const RealMatN x = invert(m);
        CHECK((m * x).max_abs_diff(RealMatN::identity(3)) < 1e-10);
    }
}

TEST_CASE("invert: singular matrix raises") {
    RealMatN m(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = 1.0;  // rank 1
    CHECK_THROWS_AS(invert(m), SingularMatrix);
}

TEST_CASE("invert: complex matrices") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexMatN m(3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m(i, j) = Complex{u(rng), u(rng)};
        m(i, i) += 4.0;
    }
    CHECK((m * invert(m)).max_abs_diff(ComplexMatN::identity(3)) < 1e-10);
}

TEST_CASE("eig_hermitian_2x2: fixed spectra") {
    // sigma_3 ordering: |1> first, so diag(-1, 1) has eigenvalues (-1, 1)
    const Eig2 ez = eig_hermitian_2x2(Mat2{-1.0, 0.0, 0.0, 1.0});
    CHECK(ez.values[0] == Catch::Approx(-1.0));
    CHECK(ez.values[1] == Catch::Approx(1.0));

    const Eig2 ex = eig_hermitian_2x2(Mat2{0.0, 1.0, 1.0, 0.0});
    CHECK(ex.values[0] == Catch::Approx(-1.0));
    CHECK(ex.values[1] == Catch::Approx(1.0));
    // eigenvectors (1, -1)/sqrt(2) and (1, 1)/sqrt(2) up to phase
    CHECK(std::abs(inner(ex.vectors[0], Vec2{1.0 / std::sqrt(2.0),
                                             -1.0 / std::sqrt(2.0)})) ==
          Catch::Approx(1.0));
    CHECK(std::abs(inner(ex.vectors[1], Vec2{1.0 / std::sqrt(2.0),
                                             1.0 / std::sqrt(2.0)})) ==
          Catch::Approx(1.0));
}

TEST_CASE("eig_hermitian_2x2: reconstruction and invariants") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        const Mat2 h = random_hermitian(rng);
        const Eig2 e = eig_hermitian_2x2(h);

        Mat2 rec = Mat2::zero();
        for (int i = 0; i < 2; ++i)
            rec = rec + Complex(e.values[i]) *
                            Mat2::outer(e.vectors[i], e.vectors[i]);
        CHECK(max_abs_diff(rec, h) < 1e-10);

        CHECK(e.values[0] + e.values[1] ==
              Catch::Approx(h.trace().real()).margin(1e-10));
        CHECK(e.values[0] * e.values[1] ==
              Catch::Approx(h.det().real()).margin(1e-10));

        CHECK(std::abs(inner(e.vectors[0], e.vectors[1])) < 1e-12);
        CHECK(e.vectors[0].norm() == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("eig_hermitian_2x2: rejects non-Hermitian input") {
    CHECK_THROWS_AS(eig_hermitian_2x2(Mat2{0.0, 1.0, 0.0, 0.0}), NotHermitian);
}

TEST_CASE("psd_inv_sqrt: fixed cases") {
    CHECK(max_abs_diff(psd_inv_sqrt(Mat2::identity()), Mat2::identity()) <
          1e-12);

    const Mat2 quarter{0.25, 0.0, 0.0, 0.25};
    const Mat2 twice{2.0, 0.0, 0.0, 2.0};
    CHECK(max_abs_diff(psd_inv_sqrt(quarter), twice) < 1e-12);

    // rank-1 projector maps to itself (1 on support, 0 on kernel)
    const Vec2 phi{std::sqrt(0.3), Complex(0.0, std::sqrt(0.7))};
    const Mat2 proj = Mat2::outer(phi, phi);
    CHECK(max_abs_diff(psd_inv_sqrt(proj, 1e-12), proj) < 1e-10);
}

TEST_CASE("psd_inv_sqrt: full-rank inverse property") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        Mat2 h = random_hermitian(rng);
        h = h * h.adjoint();  // PSD
        h = h + Mat2{u(rng), 0.0, 0.0, u(rng)};
        const Mat2 s = psd_inv_sqrt(h);
        CHECK(max_abs_diff(s * h * s, Mat2::identity()) < 1e-9);
    }
}

TEST_CASE("psd_inv_sqrt: rejects negative eigenvalues") {
    CHECK_THROWS_AS(psd_inv_sqrt(Mat2{-0.5, 0.0, 0.0, 1.0}),
                    NegativeEigenvalue);
}
