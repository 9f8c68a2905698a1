#pragma once

#include <utility>
#include <vector>

#include "isofield/linalg.hpp"

namespace isofield::specfun {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kFourPi = 4.0 * kPi;

/// Direction on the unit sphere, theta in [0,pi], phi normalized to [0,2pi).
/// At the poles phi is canonicalized to 0.
struct AngularPair {
    double theta = 0.0;
    double phi = 0.0;

    AngularPair() = default;
    AngularPair(double theta_, double phi_);
};

/// Degree/order pair of a spherical harmonic, |m| <= ell.
struct HarmonicIndex {
    int ell = 0;
    int m = 0;

    HarmonicIndex() = default;
    HarmonicIndex(int ell_, int m_);
};

/// Spherical Bessel function j_ell(x) for ell >= 0, x >= 0.
///
/// Upward recursion for x > ell, downward (Miller) recursion normalized by
/// j_0 for x <= ell; naive upward recursion is unstable in that regime.
double spherical_bessel(int ell, double x);

/// j_0(x) .. j_lmax(x) in one pass; out is resized to lmax+1.
void spherical_bessel_array(int lmax, double x, std::vector<double>& out);

/// Real orthonormal spherical harmonic S_ell^m.
///
/// Convention: cosine harmonics for m > 0, sine harmonics for m < 0, no
/// Condon-Shortley phase in the real basis; unit L2 norm on the sphere.
double real_spherical_harmonic(const HarmonicIndex& idx, const AngularPair& a);

/// All S_ell^m(a) for ell <= lmax, flattened as out[ell*ell + (m+ell)].
void real_spherical_harmonic_all(int lmax, const AngularPair& a, std::vector<double>& out);

/// Rotation acting on component vectors indexed by -1, 0, 1.
///
/// The index-to-axis mapping is fixed by the degree-1 harmonics: the 0 axis
/// is the polar axis of the spherical coordinates and (-1, +1) carry the
/// cos(phi) and sin(phi) directions.  Cartesian labels (x, y, z) map to the
/// component indices (-1, 0, 1) in that order.
class Rotation {
  public:
    Rotation() : m_(Mat3::identity()) {}
    explicit Rotation(const Mat3& m) : m_(m) {}

    /// Rotation with ZYZ-like Euler angles: spin gamma about the pole, tilt
    /// beta, then spin alpha about the pole.
    static Rotation zyz(double alpha, double beta, double gamma);

    /// Rotation taking the pole to the direction (theta, phi); zyz(phi, theta, 0).
    static Rotation to_direction(const AngularPair& a) { return zyz(a.phi, a.theta, 0.0); }

    static Rotation axis_angle(const Vec3& axis, double angle);

    Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_); }
    Rotation inverse() const { return Rotation(m_.transpose()); }
    Vec3 apply(const Vec3& v) const { return m_ * v; }

    const Mat3& matrix() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

  private:
    Mat3 m_;
};

/// Real orthogonal representation matrices D^ell of a rotation, all degrees
/// up to lmax, computed by the Ivanic-Ruedenberg recursion.  D^1 equals the
/// rotation matrix itself in the (-1, 0, 1) component basis, and
/// S_ell^m(theta, phi) = sqrt((2 ell + 1) / 4 pi) D^ell_{-m,0}(to_direction).
class WignerMatrixSet {
  public:
    WignerMatrixSet(const Rotation& r, int lmax);

    int lmax() const { return lmax_; }
    double entry(int ell, int m, int n) const;

  private:
    int lmax_;
    std::vector<std::vector<double>> blocks_;  // blocks_[ell] is (2ell+1)^2 row-major

    double raw(int ell, int a, int b) const {  // 0-based within block
        return blocks_[static_cast<std::size_t>(ell)]
                      [static_cast<std::size_t>(a * (2 * ell + 1) + b)];
    }
};

/// Unit vector of a direction in the (-1, 0, 1) component basis.
Vec3 direction_components(const AngularPair& a);

/// Inverse of direction_components for a nonzero vector.
AngularPair direction_from_components(const Vec3& v);

/// Single entry D^ell_{m,n} of the real representation of a rotation.
double wigner_d_real(int ell, int m, int n, const Rotation& r);

/// Entry at the two-angle rotation to_direction(a).
double wigner_d_real(int ell, int m, int n, const AngularPair& a);

/// Integral of a triple product of real spherical harmonics over the sphere.
/// Zero whenever the triangle or parity condition fails.
double gaunt_integral(const HarmonicIndex& i1, const HarmonicIndex& i2, const HarmonicIndex& i3);

/// Legendre polynomial P_ell(x).
double legendre_p(int ell, double x);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Product quadrature on the sphere: Gauss-Legendre in cos(theta) times a
/// uniform grid in phi.  Exact for spherical polynomials of degree <= band.
struct SphereQuadrature {
    struct Node {
        AngularPair dir;
        double weight;  // includes the full surface measure
    };
    std::vector<Node> nodes;
};

SphereQuadrature sphere_quadrature(int band);

}  // namespace isofield::specfun
