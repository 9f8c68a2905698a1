#pragma once

#include <array>
#include <utility>

#include "isofield/linalg.hpp"
#include "isofield/model.hpp"
#include "isofield/specfun.hpp"

namespace isofield::correlation {

/// Separation vector between two evaluation points, with spherical data.
/// Components are indexed (-1, 0, 1); Cartesian (x, y, z) input maps to the
/// component indices in that order.
struct Separation {
    Vec3 xi{};
    double rho = 0.0;
    specfun::AngularPair direction{};  // undefined content when at_origin
    bool at_origin = true;

    Separation() = default;
    explicit Separation(const Vec3& v);
    static Separation cartesian(double x, double y, double z);
    static Separation spherical(double rho, const specfun::AngularPair& dir);
};

/// Rank-4 tensor over the (-1,0,1) basis with the pair symmetries of a
/// correlation of symmetric rank-2 tensors.
class Rank4Tensor {
  public:
    double& at(int i, int j, int l, int m) { return c_[flat(i, j, l, m)]; }
    double at(int i, int j, int l, int m) const { return c_[flat(i, j, l, m)]; }

    Rank4Tensor& operator+=(const Rank4Tensor& o);
    Rank4Tensor& operator*=(double s);
    void add_scaled(const Rank4Tensor& o, double s);

    double max_abs() const;
    double max_abs_diff(const Rank4Tensor& o) const;

    /// Largest violation of the i<->j, l<->m and pair-swap symmetries.
    double max_symmetry_violation() const;

    /// Sum over i, j of entries (i, j, i, j).
    double full_contraction() const;

    /// Plain-component Voigt view (index order -1-1, 00, 11, 01, -11, -10).
    Mat6 voigt() const;
    static Rank4Tensor from_voigt(const Mat6& v);

  private:
    static std::size_t flat(int i, int j, int l, int m) {
        return static_cast<std::size_t>(((i + 1) * 3 + (j + 1)) * 9 + (l + 1) * 3 + (m + 1));
    }
    std::array<double, 81> c_{};
};

/// Apply a rank-2 rotation to both slots: (u t u^T).
Mat3 rotate_rank2(const Mat3& u, const Mat3& t);

/// Apply the symmetric-square action of u to a rank-4 tensor.
Rank4Tensor rotate_rank4(const Mat3& u, const Rank4Tensor& t);

/// Isotropic basis tensors L^1..L^5 at a separation.  L^1 and L^2 are
/// constant; L^3..L^5 need a direction, so q >= 3 at the origin is an error.
Rank4Tensor L_basis(int q, const Separation& xi);

/// Rank-4 basis tensors M^1..M^5 at a direction, built from the coupled
/// low-degree tensors and the real representation entries D^{2i}_{t0}.
Rank4Tensor M_basis(int n, const specfun::AngularPair& p);

/// Rank-2 analogues: M^{0,1} = delta/sqrt(3) and
/// M^{2,1}(p) = sqrt(3/2) p p^T - delta/sqrt(6).
Mat3 M_basis_rank2(int n, const specfun::AngularPair& p);

/// Radial coefficient functions N_{nq}(lambda, rho): a j0/j2/j4 combination
/// per (n, q), affine in (v1, v2) on the third row.  Kept as a value object
/// so tests can perturb single entries.
struct NFunctionTable {
    struct Affine {
        double c = 0.0, cv1 = 0.0, cv2 = 0.0;
        double operator()(const model::EllipseCoords& v) const { return c + cv1 * v.v1 + cv2 * v.v2; }
    };
    // coef[n-1][q-1][k] multiplies j_{2k}(lambda rho).
    Affine coef[3][5][3];

    static const NFunctionTable& standard();

    /// N_{nq} given precomputed j = (j0, j2, j4) at lambda * rho.
    double value(int n, int q, const std::array<double, 3>& j, const model::EllipseCoords& v) const;
};

/// Scalar isotropic correlation: sum of mass * sin(lambda rho)/(lambda rho).
double scalar_correlation(const model::SpectralMeasure& phi, double rho);
double scalar_correlation(const model::ScalarModel& m, double rho);

/// Closed-form correlation of the vector field.
Mat3 vector_correlation(const model::VectorModel& m, const Separation& xi);

/// Closed-form correlation of the symmetric tensor field.  A non-standard
/// coefficient table may be injected (used by verification mutation tests).
Rank4Tensor tensor_correlation(const model::TensorModel& m, const Separation& xi,
                               const NFunctionTable& table = NFunctionTable::standard());

/// Four-measure (u5 = 0) evaluator; rows 3 and 4 use the two extreme
/// coordinate pairs (1, 0) and (0, 0).
Rank4Tensor tensor_correlation_u5zero(const model::TetraTensorModel& m, const Separation& xi,
                                      const NFunctionTable& table = NFunctionTable::standard());

/// Invariant coefficient functions a_1..a_5(rho) of the classical rank-4
/// expansion in raw separation products; rho > 0 required.
std::array<double, 5> lomakin_coefficients(const model::TensorModel& m, double rho);

/// Robertson coefficients (A, B) with R_ij = A xi_i xi_j + B delta_ij;
/// rho > 0 required.
std::pair<double, double> robertson_AB(const model::VectorModel& m, double rho);

}  // namespace isofield::correlation
