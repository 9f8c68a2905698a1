#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "isofield/specfun.hpp"

using namespace isofield;
using namespace isofield::specfun;

namespace {

// Rotation matrix for zyz(phi, theta, 0) written out by hand in the
// component axes e_{-1} = x, e_0 = z, e_1 = y; independent of Rotation's code.
Mat3 reference_direction_matrix(double theta, double phi) {
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cp = std::cos(phi), sp = std::sin(phi);
    // Conventional Rz(phi) Ry(theta) entries.
    const double r[3][3] = {
        {cp * ct, -sp, cp * st},
        {sp * ct, cp, sp * st},
        {-st, 0.0, ct},
    };
    const int perm[3] = {0, 2, 1};
    Mat3 m;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) m(a - 1, b - 1) = r[perm[a]][perm[b]];
    return m;
}

double quadrature_d_entry(int ell, int m, int n, const Rotation& rot, const SphereQuadrature& quad) {
    // D^ell_{m,n}(R) = integral of S^{-m}(x) S^{-n}(R^{-1} x) over the sphere.
    const Rotation inv = rot.inverse();
    double acc = 0.0;
    for (const auto& node : quad.nodes) {
        const Vec3 x = direction_components(node.dir);
        const Vec3 y = inv.apply(x);
        const AngularPair ydir = direction_from_components(y);
        acc += node.weight * real_spherical_harmonic(HarmonicIndex(ell, -m), node.dir) *
               real_spherical_harmonic(HarmonicIndex(ell, -n), ydir);
    }
    return acc;
}

}  // namespace

TEST_CASE("spherical bessel basics") {
    CHECK(spherical_bessel(0, 0.0) == 1.0);
    CHECK(spherical_bessel(2, 0.0) == 0.0);
    CHECK(spherical_bessel(7, 0.0) == 0.0);

    // j0, j1, j2 closed forms at assorted arguments.
    for (double x : {0.3, 1.1, 2.7, 5.0, 17.0, 40.0}) {
        CHECK(spherical_bessel(0, x) == doctest::Approx(std::sin(x) / x).epsilon(1e-13));
        CHECK(spherical_bessel(1, x) ==
              doctest::Approx(std::sin(x) / (x * x) - std::cos(x) / x).epsilon(1e-12));
        const double j2 = (3.0 / (x * x) - 1.0) * std::sin(x) / x - 3.0 * std::cos(x) / (x * x);
        CHECK(spherical_bessel(2, x) == doctest::Approx(j2).epsilon(1e-11));
    }

    CHECK_THROWS_AS(spherical_bessel(-1, 1.0), std::domain_error);
    CHECK_THROWS_AS(spherical_bessel(1, -0.5), std::domain_error);
}

TEST_CASE("bessel recursion identity j1(x)/x = (j0 + j2)/3") {
    for (double x : {1.7, 0.4, 3.9, 9.2}) {
        const double lhs = spherical_bessel(1, x) / x;
        const double rhs = (spherical_bessel(0, x) + spherical_bessel(2, x)) / 3.0;
        CHECK(std::abs(lhs - rhs) < 1e-14);
    }
}

TEST_CASE("bessel magnitudes and sum rule") {
    std::vector<double> j;
    for (double x : {0.5, 2.0, 8.0, 25.0}) {
        spherical_bessel_array(40, x, j);
        double sum = 0.0;
        for (int l = 0; l <= 40; ++l) {
            CHECK(std::abs(j[static_cast<std::size_t>(l)]) <= 1.0);
            sum += (2.0 * l + 1.0) * j[static_cast<std::size_t>(l)] * j[static_cast<std::size_t>(l)];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));  // sum (2l+1) j_l^2 = 1
    }
}

TEST_CASE("tiny-argument series branch") {
    std::vector<double> j;
    spherical_bessel_array(6, 5e-5, j);
    CHECK(j[0] == doctest::Approx(1.0 - 5e-5 * 5e-5 / 6.0).epsilon(1e-15));
    CHECK(j[1] == doctest::Approx(5e-5 / 3.0).epsilon(1e-12));
    CHECK(j[3] == doctest::Approx(std::pow(5e-5, 3) / 105.0).epsilon(1e-10));
}

TEST_CASE("constant harmonic normalization") {
    const double expect = 1.0 / std::sqrt(4.0 * kPi);
    for (double theta : {0.0, 0.7, kPi / 2, 2.9})
        CHECK(real_spherical_harmonic(HarmonicIndex(0, 0), AngularPair(theta, 1.3)) ==
              doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("harmonic orthonormality by quadrature") {
    const int lmax = 6;
    const auto quad = sphere_quadrature(2 * lmax + 2);
    std::vector<std::vector<double>> values(quad.nodes.size());
    for (std::size_t k = 0; k < quad.nodes.size(); ++k)
        real_spherical_harmonic_all(lmax, quad.nodes[k].dir, values[k]);
    for (int l1 = 0; l1 <= lmax; ++l1)
        for (int m1 = -l1; m1 <= l1; ++m1)
            for (int l2 = l1; l2 <= lmax; ++l2)
                for (int m2 = -l2; m2 <= l2; ++m2) {
                    double acc = 0.0;
                    for (std::size_t k = 0; k < quad.nodes.size(); ++k)
                        acc += quad.nodes[k].weight *
                               values[k][static_cast<std::size_t>(l1 * l1 + l1 + m1)] *
                               values[k][static_cast<std::size_t>(l2 * l2 + l2 + m2)];
                    const double expect = (l1 == l2 && m1 == m2) ? 1.0 : 0.0;
                    CHECK(std::abs(acc - expect) < 1e-12);
                }
}

TEST_CASE("addition theorem") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const AngularPair a(std::acos(2.0 * u01(rng) - 1.0), 2.0 * kPi * u01(rng));
        std::vector<double> sh;
        real_spherical_harmonic_all(8, a, sh);
        for (int l = 0; l <= 8; ++l) {
            double sum = 0.0;
            for (int m = -l; m <= l; ++m) {
                const double v = sh[static_cast<std::size_t>(l * l + l + m)];
                sum += v * v;
            }
            CHECK(std::abs(sum - (2.0 * l + 1.0) / (4.0 * kPi)) < 1e-12);
        }
    }
}

TEST_CASE("pole handling: m != 0 harmonics vanish") {
    for (double theta : {0.0, kPi}) {
        const AngularPair a(theta, 2.2);
        CHECK(a.phi == 0.0);
        for (int l = 1; l <= 5; ++l)
            for (int m = -l; m <= l; ++m) {
                const double v = real_spherical_harmonic(HarmonicIndex(l, m), a);
                if (m != 0) CHECK(v == 0.0);
            }
    }
    CHECK_THROWS_AS(AngularPair(-0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(HarmonicIndex(2, 3), std::domain_error);
}

TEST_CASE("representation of the identity") {
    const Rotation id;
    for (int l = 0; l <= 4; ++l)
        for (int m = -l; m <= l; ++m)
            for (int n = -l; n <= l; ++n)
                CHECK(wigner_d_real(l, m, n, id) == doctest::Approx(m == n ? 1.0 : 0.0).epsilon(1e-14));
}

TEST_CASE("degree-1 block is the rotation matrix") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        const double theta = std::acos(2.0 * u01(rng) - 1.0);
        const double phi = 2.0 * kPi * u01(rng);
        const Mat3 ref = reference_direction_matrix(theta, phi);
        const AngularPair a(theta, phi);
        for (int m = -1; m <= 1; ++m)
            for (int n = -1; n <= 1; ++n)
                CHECK(wigner_d_real(1, m, n, a) == doctest::Approx(ref(m, n)).epsilon(1e-13));
    }
}

TEST_CASE("rows are orthonormal") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        const Rotation rot = Rotation::zyz(2 * kPi * u01(rng), std::acos(2 * u01(rng) - 1), 2 * kPi * u01(rng));
        WignerMatrixSet d(rot, 5);
        for (int l = 0; l <= 5; ++l)
            for (int m = -l; m <= l; ++m)
                for (int mp = -l; mp <= l; ++mp) {
                    double acc = 0.0;
                    for (int n = -l; n <= l; ++n) acc += d.entry(l, m, n) * d.entry(l, mp, n);
                    CHECK(std::abs(acc - (m == mp ? 1.0 : 0.0)) < 1e-12);
                }
    }
}

TEST_CASE("representation property under composition") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const Rotation k1 =
            Rotation::zyz(2 * kPi * u01(rng), std::acos(2 * u01(rng) - 1), 2 * kPi * u01(rng));
        const Rotation k2 =
            Rotation::zyz(2 * kPi * u01(rng), std::acos(2 * u01(rng) - 1), 2 * kPi * u01(rng));
        const Rotation k12 = k1 * k2;
        WignerMatrixSet d1(k1, 4), d2(k2, 4), d12(k12, 4);
        for (int l = 0; l <= 4; ++l)
            for (int m = -l; m <= l; ++m)
                for (int n = -l; n <= l; ++n) {
                    double acc = 0.0;
                    for (int q = -l; q <= l; ++q) acc += d1.entry(l, m, q) * d2.entry(l, q, n);
                    CHECK(std::abs(acc - d12.entry(l, m, n)) < 1e-10);
                }
    }
}

TEST_CASE("harmonics equal scaled matrix entries") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const AngularPair a(std::acos(2 * u01(rng) - 1), 2 * kPi * u01(rng));
        std::vector<double> sh;
        real_spherical_harmonic_all(6, a, sh);
        WignerMatrixSet d(Rotation::to_direction(a), 6);
        for (int l = 0; l <= 6; ++l) {
            const double scale = std::sqrt((2.0 * l + 1.0) / (4.0 * kPi));
            for (int m = -l; m <= l; ++m)
                CHECK(std::abs(sh[static_cast<std::size_t>(l * l + l + m)] - scale * d.entry(l, -m, 0)) <
                      1e-12);
        }
    }
}

TEST_CASE("zonal harmonic against the middle matrix entry") {
    const AngularPair a(kPi / 2, 0.0);
    const double lhs = real_spherical_harmonic(HarmonicIndex(2, 0), a);
    const double rhs = std::sqrt(5.0 / (4.0 * kPi)) * wigner_d_real(2, 0, 0, a);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
    CHECK(lhs == doctest::Approx(std::sqrt(5.0 / (4.0 * kPi)) * (-0.5)).epsilon(1e-13));
}

TEST_CASE("matrix entries match the projection integrals") {
    const auto quad = sphere_quadrature(14);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int rep = 0; rep < 2; ++rep) {
        const Rotation rot =
            Rotation::zyz(2 * kPi * u01(rng), std::acos(2 * u01(rng) - 1), 2 * kPi * u01(rng));
        for (int l = 1; l <= 3; ++l)
            for (int m = -l; m <= l; ++m)
                for (int n = -l; n <= l; ++n)
                    CHECK(std::abs(wigner_d_real(l, m, n, rot) - quadrature_d_entry(l, m, n, rot, quad)) <
                          1e-10);
    }
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    std::vector<double> x, w;
    gauss_legendre(8, x, w);
    for (int p = 0; p <= 15; ++p) {
        double acc = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) acc += w[k] * std::pow(x[k], p);
        const double exact = (p % 2 == 0) ? 2.0 / (p + 1.0) : 0.0;
        CHECK(std::abs(acc - exact) < 1e-14);
    }
}

TEST_CASE("gaunt integral basics") {
    const double expect = 1.0 / std::sqrt(4.0 * kPi);
    CHECK(gaunt_integral(HarmonicIndex(0, 0), HarmonicIndex(0, 0), HarmonicIndex(0, 0)) ==
          doctest::Approx(expect).epsilon(1e-14));
    CHECK(gaunt_integral(HarmonicIndex(1, 0), HarmonicIndex(1, 0), HarmonicIndex(3, 0)) == 0.0);
    CHECK(gaunt_integral(HarmonicIndex(1, 0), HarmonicIndex(1, 0), HarmonicIndex(1, 0)) == 0.0);
}

TEST_CASE("gaunt integral equals direct quadrature") {
    const int lmax = 4;
    const auto quad = sphere_quadrature(3 * lmax + 2);
    std::vector<std::vector<double>> values(quad.nodes.size());
    for (std::size_t k = 0; k < quad.nodes.size(); ++k)
        real_spherical_harmonic_all(lmax, quad.nodes[k].dir, values[k]);
    auto sh = [&values](std::size_t node, int l, int m) {
        return values[node][static_cast<std::size_t>(l * l + l + m)];
    };
    for (int l1 = 0; l1 <= lmax; ++l1)
        for (int l2 = 0; l2 <= lmax; ++l2)
            for (int l3 = 0; l3 <= lmax; ++l3)
                for (int m1 = -l1; m1 <= l1; ++m1)
                    for (int m2 = -l2; m2 <= l2; ++m2)
                        for (int m3 = -l3; m3 <= l3; ++m3) {
                            double acc = 0.0;
                            for (std::size_t k = 0; k < quad.nodes.size(); ++k)
                                acc += quad.nodes[k].weight * sh(k, l1, m1) * sh(k, l2, m2) * sh(k, l3, m3);
                            const double lib = gaunt_integral(HarmonicIndex(l1, m1), HarmonicIndex(l2, m2),
                                                              HarmonicIndex(l3, m3));
                            CHECK(std::abs(acc - lib) < 1e-10);
                        }
}
