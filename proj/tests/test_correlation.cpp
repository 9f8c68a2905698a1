#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <random>

#include "isofield/correlation.hpp"
#include "isofield/linalg.hpp"
#include "isofield/specfun.hpp"

using namespace isofield;
using namespace isofield::correlation;
using model::EllipseCoords;
using model::SpectralMeasure;
using model::TensorModel;
using model::TetraTensorModel;
using model::VectorModel;
using specfun::AngularPair;
using specfun::kPi;

namespace {

AngularPair random_dir(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    return AngularPair(std::acos(2 * u01(rng) - 1), 2 * kPi * u01(rng));
}

TensorModel sample_tensor_model(std::mt19937_64& rng, bool with_zero_atom = false) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    TensorModel m;
    auto atoms = [&](double lo, double hi, int n) {
        std::vector<model::SpectralAtom> a;
        double lam = lo;
        for (int k = 0; k < n; ++k) {
            lam += (hi - lo) / n * (0.4 + 0.6 * u01(rng));
            a.push_back({lam, 0.1 + u01(rng)});
        }
        return a;
    };
    m.phi1 = SpectralMeasure(atoms(0.4, 2.2, 2));
    m.phi2 = SpectralMeasure(atoms(0.3, 2.5, 2));
    auto a3 = atoms(0.5, 2.8, 2);
    if (with_zero_atom) a3.insert(a3.begin(), {0.0, 0.3 + u01(rng)});
    m.phi3 = SpectralMeasure(a3);
    for (std::size_t k = 0; k < m.phi3.size(); ++k) {
        const double ang = 2 * kPi * u01(rng);
        const double rad = u01(rng);
        m.v.push_back({0.5 + 0.5 * rad * std::cos(ang), rad * std::sin(ang) / (2.0 * std::sqrt(2.0))});
    }
    m.mean = 2.0 * u01(rng) - 1.0;
    return m;
}

VectorModel sample_vector_model(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    VectorModel m;
    m.phi1 = SpectralMeasure({{0.0, 0.4}, {0.8 + u01(rng), 0.2 + u01(rng)}, {2.0 + u01(rng), 0.3}});
    m.phi2 = SpectralMeasure({{0.0, 0.2}, {1.1 + u01(rng), 0.5 + u01(rng)}});
    return m;
}

// Correlation through the direction-basis route: degree-n tensors at the
// separation direction scaled by the matching radial kernels.
Rank4Tensor tensor_correlation_direction_route(const TensorModel& m, const Separation& xi) {
    const double s2 = std::sqrt(2.0), s5 = std::sqrt(5.0), s7 = std::sqrt(7.0), s35 = std::sqrt(35.0);
    Rank4Tensor out;
    std::array<Rank4Tensor, 5> M;
    for (int n = 1; n <= 5; ++n) M[static_cast<std::size_t>(n - 1)] = M_basis(n, xi.direction);
    std::vector<double> j;
    auto kernels = [&](double lambda) {
        specfun::spherical_bessel_array(4, lambda * xi.rho, j);
        return std::array<double, 3>{j[0], j[2], j[4]};
    };
    for (const auto& atom : m.phi1.atoms()) {
        const auto k = kernels(atom.lambda);
        out.add_scaled(M[1], atom.mass * 2.0 / s5 * k[0]);
        out.add_scaled(M[3], -atom.mass * s2 / s7 * k[1]);
        out.add_scaled(M[4], -atom.mass * 4.0 * s2 / s35 * k[2]);
    }
    for (const auto& atom : m.phi2.atoms()) {
        const auto k = kernels(atom.lambda);
        out.add_scaled(M[1], atom.mass * 4.0 / (3.0 * s5) * k[0]);
        out.add_scaled(M[3], atom.mass * 4.0 * s2 / (3.0 * s7) * k[1]);
        out.add_scaled(M[4], atom.mass * 2.0 * s2 / (3.0 * s35) * k[2]);
    }
    for (std::size_t idx = 0; idx < m.phi3.size(); ++idx) {
        const auto& atom = m.phi3.atoms()[idx];
        const auto k = kernels(atom.lambda);
        const double v1 = m.v[idx].v1, v2 = m.v[idx].v2;
        const double a = v1 + 4.0 * v2;
        out.add_scaled(M[0], atom.mass * (a + 1.0) / 3.0 * k[0]);
        out.add_scaled(M[1], atom.mass * (2.0 - a) / (3.0 * s5) * k[0]);
        out.add_scaled(M[2], -atom.mass * (-4.0 * v1 + 2.0 * v2 + 2.0) / 3.0 * k[1]);
        out.add_scaled(M[3], -atom.mass * s2 * (2.0 - a) / (3.0 * s7) * k[1]);
        out.add_scaled(M[4], atom.mass * s2 * (2.0 - a) / s35 * k[2]);
    }
    return out;
}

}  // namespace

TEST_CASE("isotropic basis tensors") {
    const Separation xi = Separation::cartesian(0.3, -0.2, 0.9);
    const Rank4Tensor l1 = L_basis(1, xi);
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            for (int l = -1; l <= 1; ++l)
                for (int m = -1; m <= 1; ++m)
                    CHECK(l1.at(i, j, l, m) == ((i == j && l == m) ? 1.0 : 0.0));

    // Axis-aligned separation: the quartic tensor has a single nonzero entry.
    const Separation axial = Separation::spherical(2.0, AngularPair(0.0, 0.0));
    const Rank4Tensor l5 = L_basis(5, axial);
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            for (int l = -1; l <= 1; ++l)
                for (int m = -1; m <= 1; ++m)
                    CHECK(l5.at(i, j, l, m) ==
                          ((i == 0 && j == 0 && l == 0 && m == 0) ? 1.0 : 0.0));

    // Brute-force contraction over (i=l, j=m) of the third tensor.
    const Rank4Tensor l3 = L_basis(3, xi);
    CHECK(l3.full_contraction() == doctest::Approx(8.0).epsilon(1e-13));

    CHECK_THROWS_AS(L_basis(3, Separation::cartesian(0, 0, 0)), std::domain_error);
    CHECK_THROWS_AS(L_basis(6, xi), std::domain_error);
    CHECK(L_basis(2, Separation::cartesian(0, 0, 0)).full_contraction() == doctest::Approx(12.0));
}

TEST_CASE("rank-2 direction tensors") {
    std::mt19937_64 rng(61);
    for (int rep = 0; rep < 20; ++rep) {
        const AngularPair dir = random_dir(rng);
        const Vec3 p = specfun::direction_components(dir);
        const Mat3 m1 = M_basis_rank2(1, dir);
        const Mat3 m2 = M_basis_rank2(2, dir);
        for (int i = -1; i <= 1; ++i)
            for (int j = -1; j <= 1; ++j) {
                CHECK(m1(i, j) == doctest::Approx((i == j) ? 1.0 / std::sqrt(3.0) : 0.0).epsilon(1e-14));
                const double expect = std::sqrt(1.5) * p(i) * p(j) -
                                      (i == j ? 1.0 / std::sqrt(6.0) : 0.0);
                CHECK(m2(i, j) == doctest::Approx(expect).epsilon(1e-12));
            }
    }
}

TEST_CASE("direction tensors expand in the isotropic basis") {
    // All five conversion rows at random directions.
    std::mt19937_64 rng(67);
    const double s2 = std::sqrt(2.0), s5 = std::sqrt(5.0), s7 = std::sqrt(7.0);
    const double s14 = std::sqrt(14.0), s70 = std::sqrt(70.0), s35 = std::sqrt(35.0);
    for (int rep = 0; rep < 100; ++rep) {
        const AngularPair dir = random_dir(rng);
        const Separation xi = Separation::spherical(1.0, dir);
        std::array<Rank4Tensor, 5> L;
        for (int q = 1; q <= 5; ++q) L[static_cast<std::size_t>(q - 1)] = L_basis(q, xi);

        Rank4Tensor expect = L[0];
        expect *= (1.0 / 3.0);
        CHECK(M_basis(1, dir).max_abs_diff(expect) < 1e-12);

        expect = Rank4Tensor();
        expect.add_scaled(L[0], -1.0 / (3.0 * s5));
        expect.add_scaled(L[1], 1.0 / (2.0 * s5));
        CHECK(M_basis(2, dir).max_abs_diff(expect) < 1e-12);

        expect = Rank4Tensor();
        expect.add_scaled(L[0], -1.0 / 3.0);
        expect.add_scaled(L[3], 0.5);
        CHECK(M_basis(3, dir).max_abs_diff(expect) < 1e-12);

        expect = Rank4Tensor();
        expect.add_scaled(L[0], 2.0 * s2 / (3.0 * s7));
        expect.add_scaled(L[1], -1.0 / s14);
        expect.add_scaled(L[2], 3.0 / (2.0 * s14));
        expect.add_scaled(L[3], -s2 / s7);
        CHECK(M_basis(4, dir).max_abs_diff(expect) < 1e-12);

        // The second coefficient of this row equals the first; the value is
        // pinned by least-squares projection and the quadrature oracle.
        expect = Rank4Tensor();
        expect.add_scaled(L[0], 1.0 / (2.0 * s70));
        expect.add_scaled(L[1], 1.0 / (2.0 * s70));
        expect.add_scaled(L[2], -s5 / (2.0 * s14));
        expect.add_scaled(L[3], -s5 / (2.0 * s14));
        expect.add_scaled(L[4], s35 / (2.0 * s2));
        CHECK(M_basis(5, dir).max_abs_diff(expect) < 1e-12);
    }
}

TEST_CASE("scalar correlation") {
    SpectralMeasure phi({{kPi, 1.0}});
    CHECK(scalar_correlation(phi, 0.0) == 1.0);
    CHECK(std::abs(scalar_correlation(phi, 1.0)) < 1e-15);  // sin(pi)/pi

    SpectralMeasure two({{0.7, 0.6}, {2.0, 0.4}});
    CHECK(scalar_correlation(two, 0.0) == doctest::Approx(1.0));
    const double rho = 1.3;
    const double expect = 0.6 * std::sin(0.7 * rho) / (0.7 * rho) + 0.4 * std::sin(2.0 * rho) / (2.0 * rho);
    CHECK(scalar_correlation(two, rho) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("vector correlation at zero separation") {
    VectorModel m;
    m.phi1 = SpectralMeasure({{0.0, 0.4}, {1.0, 0.2}});
    m.phi2 = SpectralMeasure({{0.0, 0.2}, {1.5, 0.2}});
    const Mat3 r = vector_correlation(m, Separation::cartesian(0, 0, 0));
    const double third = (m.phi1.total_mass() + m.phi2.total_mass()) / 3.0;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) CHECK(r(i, j) == doctest::Approx(i == j ? third : 0.0));
}

TEST_CASE("vector correlation trace identity") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const VectorModel m = sample_vector_model(rng);
        const Separation xi = Separation::cartesian(u01(rng), u01(rng) - 0.4, u01(rng) - 0.2);
        const Mat3 r = vector_correlation(m, xi);
        double expect = 0.0;
        for (const auto& phi : {m.phi1, m.phi2})
            for (const auto& atom : phi.atoms())
                expect += atom.mass * specfun::spherical_bessel(0, atom.lambda * xi.rho);
        CHECK(r(-1, -1) + r(0, 0) + r(1, 1) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("invariant-coefficient reassembly for the vector field") {
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const VectorModel m = sample_vector_model(rng);
        const Separation xi =
            Separation::cartesian(0.2 + u01(rng), u01(rng) - 0.5, 0.3 * u01(rng));
        const auto [A, B] = robertson_AB(m, xi.rho);
        const Mat3 r = vector_correlation(m, xi);
        for (int i = -1; i <= 1; ++i)
            for (int j = -1; j <= 1; ++j) {
                const double expect = A * xi.xi(i) * xi.xi(j) + B * (i == j ? 1.0 : 0.0);
                CHECK(r(i, j) == doctest::Approx(expect).epsilon(1e-12));
            }
    }
    CHECK_THROWS_AS(robertson_AB(sample_vector_model(rng), 0.0), std::domain_error);
}

TEST_CASE("second-family-only model pins the dyadic coefficient") {
    VectorModel m;
    m.phi2 = SpectralMeasure({{1.2, 0.7}, {2.3, 0.3}});
    const double rho = 0.9;
    const auto [A, B] = robertson_AB(m, rho);
    double expect = 0.0;
    for (const auto& atom : m.phi2.atoms())
        expect -= atom.mass * specfun::spherical_bessel(2, atom.lambda * rho);
    CHECK(A == doctest::Approx(expect / (rho * rho)).epsilon(1e-13));

    VectorModel empty;
    const auto [A0, B0] = robertson_AB(empty, 1.0);
    CHECK(A0 == 0.0);
    CHECK(B0 == 0.0);
}

TEST_CASE("radial coefficient table values") {
    const auto& table = NFunctionTable::standard();
    const std::array<double, 3> j{0.3, 0.5, 0.7};  // placeholder kernel values
    // Row (1,5) is -2 j4.
    CHECK(table.value(1, 5, j, {}) == doctest::Approx(-2.0 * j[2]));
    // Zero separation: j = (1, 0, 0).
    const std::array<double, 3> j0{1.0, 0.0, 0.0};
    CHECK(table.value(1, 1, j0, {}) == doctest::Approx(-2.0 / 15.0));
    CHECK(table.value(1, 2, j0, {}) == doctest::Approx(1.0 / 5.0));
    CHECK(table.value(1, 3, j0, {}) == 0.0);
    CHECK(table.value(1, 4, j0, {}) == 0.0);
    CHECK(table.value(1, 5, j0, {}) == 0.0);
    // Third-row substitutions at the two tetrahedron corners.
    CHECK(table.value(3, 1, j, {1.0, 0.0}) ==
          doctest::Approx((3.0 / 15.0) * j[0] + (-6.0 / 21.0) * j[1] + (1.0 / 70.0) * j[2]));
    CHECK(table.value(3, 5, j, {0.0, 0.0}) == doctest::Approx(j[2]));
}

TEST_CASE("tensor correlation against the direction-basis route") {
    std::mt19937_64 rng(79);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const TensorModel m = sample_tensor_model(rng);
        const Separation xi = Separation::spherical(0.2 + 1.5 * u01(rng), random_dir(rng));
        const Rank4Tensor a = tensor_correlation(m, xi);
        const Rank4Tensor b = tensor_correlation_direction_route(m, xi);
        CHECK(a.max_abs_diff(b) < 1e-13);
        CHECK(a.max_symmetry_violation() < 1e-14);
    }
}

TEST_CASE("tensor correlation at zero separation") {
    std::mt19937_64 rng(83);
    const TensorModel m = sample_tensor_model(rng, true);
    const Rank4Tensor r = tensor_correlation(m, Separation::cartesian(0, 0, 0));
    // Only the first two rows at j0 = 1 contribute.
    const auto& table = NFunctionTable::standard();
    const std::array<double, 3> j0{1.0, 0.0, 0.0};
    Rank4Tensor expect;
    const Separation origin = Separation::cartesian(0, 0, 0);
    std::array<Rank4Tensor, 2> L{L_basis(1, origin), L_basis(2, origin)};
    for (std::size_t k = 0; k < m.phi1.size(); ++k)
        for (int q = 1; q <= 2; ++q)
            expect.add_scaled(L[static_cast<std::size_t>(q - 1)],
                              m.phi1.atoms()[k].mass * table.value(1, q, j0, {}));
    for (std::size_t k = 0; k < m.phi2.size(); ++k)
        for (int q = 1; q <= 2; ++q)
            expect.add_scaled(L[static_cast<std::size_t>(q - 1)],
                              m.phi2.atoms()[k].mass * table.value(2, q, j0, {}));
    for (std::size_t k = 0; k < m.phi3.size(); ++k)
        for (int q = 1; q <= 2; ++q)
            expect.add_scaled(L[static_cast<std::size_t>(q - 1)],
                              m.phi3.atoms()[k].mass * table.value(3, q, j0, m.v[k]));
    CHECK(r.max_abs_diff(expect) < 1e-14);
}

TEST_CASE("full contraction at zero separation carries per-family weights") {
    std::mt19937_64 rng(89);
    for (int rep = 0; rep < 5; ++rep) {
        const TensorModel m = sample_tensor_model(rng);
        const Rank4Tensor r = tensor_correlation(m, Separation::cartesian(0, 0, 0));
        const double expect =
            2.0 * m.phi1.total_mass() + (4.0 / 3.0) * m.phi2.total_mass() + m.phi3.total_mass();
        CHECK(r.full_contraction() == doctest::Approx(expect).epsilon(1e-12));
    }
    // A third-family-only model contracts exactly to its total mass.
    TensorModel pure;
    pure.phi3 = SpectralMeasure({{0.0, 0.5}, {1.0, 0.7}});
    pure.v = {{0.5, 0.0}, {0.9, 0.1}};
    const Rank4Tensor r = tensor_correlation(pure, Separation::cartesian(0, 0, 0));
    CHECK(r.full_contraction() == doctest::Approx(pure.phi3.total_mass()).epsilon(1e-13));
}

TEST_CASE("invariant coefficients reassemble the tensor correlation") {
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const TensorModel m = sample_tensor_model(rng);
        const Separation xi = Separation::spherical(0.3 + u01(rng), random_dir(rng));
        const auto a = lomakin_coefficients(m, xi.rho);
        Rank4Tensor expect;
        auto delta = [](int x, int y) { return x == y ? 1.0 : 0.0; };
        for (int i = -1; i <= 1; ++i)
            for (int j = -1; j <= 1; ++j)
                for (int l = -1; l <= 1; ++l)
                    for (int mm = -1; mm <= 1; ++mm) {
                        const double xi_i = xi.xi(i), xi_j = xi.xi(j), xi_l = xi.xi(l), xi_m = xi.xi(mm);
                        expect.at(i, j, l, mm) =
                            a[0] * delta(i, j) * delta(l, mm) +
                            a[1] * (delta(i, l) * delta(j, mm) + delta(i, mm) * delta(j, l)) +
                            a[2] * (xi_j * xi_l * delta(i, mm) + xi_i * xi_m * delta(j, l) +
                                    xi_i * xi_l * delta(j, mm) + xi_j * xi_m * delta(i, l)) +
                            a[3] * (xi_i * xi_j * delta(l, mm) + xi_l * xi_m * delta(i, j)) +
                            a[4] * xi_i * xi_j * xi_l * xi_m;
                    }
        CHECK(tensor_correlation(m, xi).max_abs_diff(expect) < 1e-12);
    }
    CHECK_THROWS_AS(lomakin_coefficients(sample_tensor_model(rng), 0.0), std::domain_error);
}

TEST_CASE("first-family quartic coefficient") {
    TensorModel m;
    m.phi1 = SpectralMeasure({{1.4, 0.8}});
    const double rho = 1.1;
    const auto a = lomakin_coefficients(m, rho);
    const double expect = -2.0 * specfun::spherical_bessel(4, 1.4 * rho) / std::pow(rho, 4) * 0.8;
    CHECK(a[4] == doctest::Approx(expect).epsilon(1e-13));

    // Limit of the first coefficient at vanishing separation.
    const auto near = lomakin_coefficients(m, 1e-7);
    CHECK(near[0] == doctest::Approx(-2.0 / 15.0 * 0.8).epsilon(1e-9));
}

TEST_CASE("four-measure evaluator") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    // A three-measure model whose ellipse coordinates sit at (1, 0) equals the
    // four-measure model with an empty fourth measure.
    TensorModel m3;
    m3.phi1 = SpectralMeasure({{0.9, 0.5}});
    m3.phi2 = SpectralMeasure({{1.3, 0.4}});
    m3.phi3 = SpectralMeasure({{0.7, 0.6}, {1.8, 0.2}});
    m3.v = {{1.0, 0.0}, {1.0, 0.0}};

    TetraTensorModel m4;
    m4.phi1 = m3.phi1;
    m4.phi2 = m3.phi2;
    m4.phi3 = m3.phi3;

    for (int rep = 0; rep < 10; ++rep) {
        const Separation xi = Separation::spherical(0.2 + 1.4 * u01(rng), random_dir(rng));
        CHECK(tensor_correlation(m3, xi).max_abs_diff(tensor_correlation_u5zero(m4, xi)) < 1e-12);
    }

    // Fourth-measure rows substitute (0, 0) into the third-family kernels.
    TetraTensorModel only4;
    only4.phi4 = SpectralMeasure({{1.2, 1.0}});
    const Separation xi = Separation::spherical(0.8, random_dir(rng));
    TensorModel equiv;
    equiv.phi3 = only4.phi4;
    equiv.v = {{0.0, 0.0}};
    CHECK(tensor_correlation_u5zero(only4, xi).max_abs_diff(tensor_correlation(equiv, xi)) < 1e-14);
}

TEST_CASE("block covariance over random point sets is nonnegative") {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 3; ++rep) {
        const VectorModel vm = sample_vector_model(rng);
        std::vector<Vec3> pts(6);
        for (auto& p : pts) {
            p(-1) = u(rng);
            p(0) = u(rng);
            p(1) = u(rng);
        }
        DenseMatrix big(18, 18);
        for (std::size_t a = 0; a < 6; ++a)
            for (std::size_t b = 0; b < 6; ++b) {
                Vec3 d;
                for (int k = -1; k <= 1; ++k) d(k) = pts[a](k) - pts[b](k);
                const Mat3 r = vector_correlation(vm, Separation(d));
                for (int i = -1; i <= 1; ++i)
                    for (int j = -1; j <= 1; ++j)
                        big(3 * a + static_cast<std::size_t>(i + 1), 3 * b + static_cast<std::size_t>(j + 1)) =
                            r(i, j);
            }
        CHECK(min_eigenvalue(big) >= -1e-8);
    }
    for (int rep = 0; rep < 2; ++rep) {
        const TensorModel tm = sample_tensor_model(rng);
        std::vector<Vec3> pts(4);
        for (auto& p : pts) {
            p(-1) = u(rng);
            p(0) = u(rng);
            p(1) = u(rng);
        }
        // Covariance of the 9 plain components at 4 points.
        DenseMatrix big(36, 36);
        for (std::size_t a = 0; a < 4; ++a)
            for (std::size_t b = 0; b < 4; ++b) {
                Vec3 d;
                for (int k = -1; k <= 1; ++k) d(k) = pts[a](k) - pts[b](k);
                const Rank4Tensor r = tensor_correlation(tm, Separation(d));
                for (int i = -1; i <= 1; ++i)
                    for (int j = -1; j <= 1; ++j)
                        for (int l = -1; l <= 1; ++l)
                            for (int mm = -1; mm <= 1; ++mm) {
                                const std::size_t row = 9 * a + static_cast<std::size_t>(3 * (i + 1) + (j + 1));
                                const std::size_t col = 9 * b + static_cast<std::size_t>(3 * (l + 1) + (mm + 1));
                                big(row, col) = r.at(i, j, l, mm);
                            }
            }
        CHECK(min_eigenvalue(big) >= -1e-8);
    }
}

TEST_CASE("closed-form reduction to the two-kernel display") {
    // The per-measure kernels rewrite through j1(x)/x = (j0 + j2)/3.
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const double lambda = 0.2 + 3.0 * u01(rng);
        const double rho = 0.05 + 2.0 * u01(rng);
        const double x = lambda * rho;
        std::vector<double> j;
        specfun::spherical_bessel_array(2, x, j);
        const double j1_over_x = specfun::spherical_bessel(1, x) / x;
        CHECK(std::abs((j[0] / 3.0 - j[2] / 6.0) - 0.5 * (j[0] - j1_over_x)) < 1e-14);
        CHECK(std::abs((j[0] / 3.0 + j[2] / 3.0) - j1_over_x) < 1e-14);
    }
}

TEST_CASE("separation bookkeeping") {
    const Separation s = Separation::cartesian(0.0, 0.0, 0.0);
    CHECK(s.at_origin);
    const Separation p = Separation::cartesian(1.0, 2.0, 2.0);
    CHECK(p.rho == doctest::Approx(3.0));
    const Separation back = Separation::spherical(p.rho, p.direction);
    for (int k = -1; k <= 1; ++k) CHECK(back.xi(k) == doctest::Approx(p.xi(k)).epsilon(1e-14));
}
