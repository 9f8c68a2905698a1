#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "isofield/bmodes.hpp"
#include "isofield/correlation.hpp"
#include "isofield/detail/coupled_tensors.hpp"

using namespace isofield;
using namespace isofield::bmodes;
using correlation::Rank4Tensor;
using correlation::Separation;
using model::EllipseCoords;
using model::SpectralMeasure;
using specfun::AngularPair;
using specfun::kPi;

TEST_CASE("mode enumeration round trip") {
    for (std::size_t f = 0; f < vector_mode_count(4); ++f) {
        const VectorModeIndex a = vector_mode_at(f);
        CHECK(flat_index(a) == f);
    }
    for (std::size_t f = 0; f < tensor_mode_count(3); ++f) {
        const TensorModeIndex a = tensor_mode_at(f);
        CHECK(flat_index(a) == f);
    }
    CHECK(vector_mode_count(12) == 507);
    CHECK(tensor_mode_count(12) == 1521);
}

TEST_CASE("leading vector block") {
    // Both degrees zero: only the isotropic coupling survives.
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) {
            const double expect = (i == j) ? 1.0 / 3.0 : 0.0;
            CHECK(b_vector(VectorModeIndex(0, 0, i), VectorModeIndex(0, 0, j), 1) ==
                  doctest::Approx(expect).epsilon(1e-14));
            CHECK(b_vector(VectorModeIndex(0, 0, i), VectorModeIndex(0, 0, j), 2) ==
                  doctest::Approx(expect).epsilon(1e-14));
        }
}

TEST_CASE("odd degree differences vanish") {
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) {
            CHECK(b_vector(VectorModeIndex(0, 0, i), VectorModeIndex(3, 1, j), 1) == 0.0);
            CHECK(b_tensor(TensorModeIndex(1, 0, i, 0), TensorModeIndex(2, 1, j, 1), 2) == 0.0);
        }
}

TEST_CASE("third tensor family at zero degrees") {
    // Triangle conditions kill the degree-2 and degree-4 couplings; only the
    // two isotropic blocks survive.
    const auto& ct = isofield::detail::coupled_tensors();
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            for (int l = -1; l <= 1; ++l)
                for (int m = -1; m <= 1; ++m) {
                    const double v1 = 0.5, v2 = 0.0;
                    const double expect = (1.0 + v1 + 4.0 * v2) / 9.0 * (i == j ? 1.0 : 0.0) * (l == m ? 1.0 : 0.0) +
                                          (2.0 - v1 - 4.0 * v2) / 15.0 * ct.g2pair.at(i, j, l, m);
                    CHECK(b_tensor3(TensorModeIndex(0, 0, i, j), TensorModeIndex(0, 0, l, m), v1, v2) ==
                          doctest::Approx(expect).epsilon(1e-13));
                }
}

TEST_CASE("third family is affine in the ellipse coordinates") {
    const TensorModeIndex a(2, 1, 0, 1), b(2, -1, 1, 1);
    const double f00 = b_tensor3(a, b, 0.0, 0.0);
    const double f10 = b_tensor3(a, b, 1.0, 0.0);
    const double f01 = b_tensor3(a, b, 0.0, 1.0);
    const double v1 = 0.3, v2 = 0.1;
    const double expect = f00 + v1 * (f10 - f00) + v2 * (f01 - f00);
    CHECK(b_tensor3(a, b, v1, v2) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("assembled matrices are symmetric and nonnegative") {
    for (const BKind kind : {BKind::vector1, BKind::vector2}) {
        const ModeCovariance cov = assemble(kind, 6);
        CHECK(cov.entries.max_asymmetry() < 1e-12);
        const auto ev = symmetric_eigenvalues(cov.entries);
        CHECK(ev.front() >= -1e-10);
    }
    for (const BKind kind : {BKind::tensor1, BKind::tensor2}) {
        const ModeCovariance cov = assemble(kind, 4);
        CHECK(cov.entries.max_asymmetry() < 1e-12);
        const auto ev = symmetric_eigenvalues(cov.entries);
        CHECK(ev.front() >= -1e-10);
    }
    // Third family on the ellipse boundary.
    for (int k = 0; k < 10; ++k) {
        const double ang = 2.0 * kPi * k / 10.0;
        const EllipseCoords v{0.5 + 0.5 * std::cos(ang), std::sin(ang) / (2.0 * std::sqrt(2.0))};
        const ModeCovariance cov = assemble(BKind::tensor3, 3, v);
        const auto ev = symmetric_eigenvalues(cov.entries);
        CHECK(ev.front() >= -1e-10);
    }
}

TEST_CASE("vector family 1 at lmax 0 is the scaled identity") {
    const ModeCovariance cov = assemble(BKind::vector1, 0);
    REQUIRE(cov.entries.rows() == 3);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(cov.entries(r, c) == doctest::Approx(r == c ? 1.0 / 3.0 : 0.0).epsilon(1e-14));
}

TEST_CASE("factorization basics") {
    DenseMatrix eye(4, 4);
    for (std::size_t k = 0; k < 4; ++k) eye(k, k) = 1.0;
    const DenseMatrix l = semidefinite_cholesky(eye);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) CHECK(l(r, c) == (r == c ? 1.0 : 0.0));

    // Rank-one matrix: first column carries the vector, the rest is zero.
    const double v[3] = {2.0, -1.0, 0.5};
    DenseMatrix rank1(3, 3);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) rank1(r, c) = v[r] * v[c];
    const DenseMatrix lr = semidefinite_cholesky(rank1);
    for (std::size_t r = 0; r < 3; ++r) {
        CHECK(lr(r, 0) == doctest::Approx(v[r]).epsilon(1e-14));
        for (std::size_t c = 1; c < 3; ++c) CHECK(lr(r, c) == 0.0);
    }

    DenseMatrix negative(2, 2);
    negative(0, 0) = 1.0;
    negative(1, 1) = -1.0;
    CHECK_THROWS_AS(semidefinite_cholesky(negative), FactorizationError);
}

TEST_CASE("factor reconstructs the assembled matrix") {
    const ModeCovariance cov = assemble(BKind::vector1, 4);
    const DenseMatrix l = semidefinite_cholesky(cov);
    const std::size_t n = cov.entries.rows();
    double worst = 0.0;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            double s = 0.0;
            for (std::size_t k = 0; k <= std::min(r, c); ++k) s += l(r, k) * l(c, k);
            worst = std::max(worst, std::abs(s - cov.entries(r, c)));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("factors nest across truncation") {
    // Nesting holds for columns with strictly positive pivots; columns at the
    // noise floor may be zeroed in one truncation and floored in the other.
    const DenseMatrix small = semidefinite_cholesky(assemble(BKind::vector2, 3));
    const DenseMatrix big = semidefinite_cholesky(assemble(BKind::vector2, 5));
    const std::size_t n = small.rows();
    std::size_t compared = 0;
    for (std::size_t c = 0; c < n; ++c) {
        if (small(c, c) < 1e-5 || big(c, c) < 1e-5) continue;
        for (std::size_t r = c; r < n; ++r) {
            CHECK(big(r, c) == doctest::Approx(small(r, c)).epsilon(1e-10));
            ++compared;
        }
    }
    CHECK(compared > 100);
}

TEST_CASE("series reconstruction of the vector correlation") {
    model::VectorModel m;
    m.phi1 = SpectralMeasure({{0.8, 0.5}, {1.6, 0.4}});
    m.phi2 = SpectralMeasure({{1.1, 0.6}});
    std::mt19937_64 rng(113);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double rmax = 2.0 / 1.6;
    for (int rep = 0; rep < 5; ++rep) {
        const SpherePoint x{rmax * u01(rng), AngularPair(std::acos(2 * u01(rng) - 1), 2 * kPi * u01(rng))};
        const SpherePoint y{rmax * u01(rng), AngularPair(std::acos(2 * u01(rng) - 1), 2 * kPi * u01(rng))};
        const Mat3 series = series_vector_correlation(m, x, y, 12);

        Vec3 dx = specfun::direction_components(x.dir);
        Vec3 dy = specfun::direction_components(y.dir);
        Vec3 diff;
        for (int k = -1; k <= 1; ++k) diff(k) = x.r * dx(k) - y.r * dy(k);
        const Mat3 closed = correlation::vector_correlation(m, Separation(diff));

        double scale = 0.0, err = 0.0;
        for (int i = -1; i <= 1; ++i)
            for (int j = -1; j <= 1; ++j) {
                scale = std::max(scale, std::abs(closed(i, j)));
                err = std::max(err, std::abs(series(i, j) - closed(i, j)));
            }
        CHECK(err <= 1e-3 * std::max(scale, 1e-6));
    }
}

TEST_CASE("series reconstruction of the tensor correlation") {
    model::TensorModel m;
    m.phi1 = SpectralMeasure({{1.2, 0.5}});
    m.phi2 = SpectralMeasure({{0.9, 0.4}});
    m.phi3 = SpectralMeasure({{1.5, 0.7}});
    m.v = {{0.7, 0.2}};
    std::mt19937_64 rng(127);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double rmax = 2.0 / 1.5;
    for (int rep = 0; rep < 5; ++rep) {
        const SpherePoint x{rmax * u01(rng), AngularPair(std::acos(2 * u01(rng) - 1), 2 * kPi * u01(rng))};
        const SpherePoint y{rmax * u01(rng), AngularPair(std::acos(2 * u01(rng) - 1), 2 * kPi * u01(rng))};
        const Rank4Tensor series = series_tensor_correlation(m, x, y, 12);

        Vec3 dx = specfun::direction_components(x.dir);
        Vec3 dy = specfun::direction_components(y.dir);
        Vec3 diff;
        for (int k = -1; k <= 1; ++k) diff(k) = x.r * dx(k) - y.r * dy(k);
        const Rank4Tensor closed = correlation::tensor_correlation(m, Separation(diff));

        const double scale = std::max(closed.max_abs(), 1e-6);
        CHECK(series.max_abs_diff(closed) <= 1e-3 * scale);
    }
}

TEST_CASE("kind names round trip") {
    for (BKind k : {BKind::vector1, BKind::vector2, BKind::tensor1, BKind::tensor2, BKind::tensor3})
        CHECK(bkind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(bkind_from_string("nope"), std::domain_error);
}
