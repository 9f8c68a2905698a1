#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "isofield/linalg.hpp"

namespace isofield::model {

/// One atom of a finite spectral measure on [0, inf).
struct SpectralAtom {
    double lambda = 0.0;
    double mass = 0.0;

    bool operator==(const SpectralAtom&) const = default;
};

/// Finite measure on the wavenumber half-line, stored as an atom list with
/// strictly increasing lambdas.
class SpectralMeasure {
  public:
    SpectralMeasure() = default;
    explicit SpectralMeasure(std::vector<SpectralAtom> atoms) : atoms_(std::move(atoms)) {}

    const std::vector<SpectralAtom>& atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }
    std::size_t size() const { return atoms_.size(); }

    double total_mass() const;
    double mass_at_zero() const;
    double lambda_max() const;

    bool operator==(const SpectralMeasure&) const = default;

  private:
    std::vector<SpectralAtom> atoms_;
};

/// Coordinates in the elliptic fiber of the tensor convex set,
/// 4 (v1 - 1/2)^2 + 8 v2^2 <= 1.
struct EllipseCoords {
    double v1 = 0.5;
    double v2 = 0.0;

    bool operator==(const EllipseCoords&) const = default;
};

struct ScalarModel {
    SpectralMeasure phi;
    double mean = 0.0;

    bool operator==(const ScalarModel&) const = default;
};

struct VectorModel {
    SpectralMeasure phi1;
    SpectralMeasure phi2;

    bool operator==(const VectorModel&) const = default;
};

/// Tensor-field spectral data: three measures plus an ellipse coordinate pair
/// attached to every atom of phi3 (v is a phi3-equivalence class, so values
/// matter only on the support of phi3).
struct TensorModel {
    SpectralMeasure phi1;
    SpectralMeasure phi2;
    SpectralMeasure phi3;
    std::vector<EllipseCoords> v;  // parallel to phi3.atoms()
    double mean = 0.0;

    bool operator==(const TensorModel&) const = default;
};

/// Four-measure tensor model for the uncorrelated (u5 = 0) case, where the
/// convex set degenerates to a tetrahedron.
struct TetraTensorModel {
    SpectralMeasure phi1;
    SpectralMeasure phi2;
    SpectralMeasure phi3;
    SpectralMeasure phi4;
    double mean = 0.0;

    bool operator==(const TetraTensorModel&) const = default;
};

using AnyModel = std::variant<ScalarModel, VectorModel, TensorModel, TetraTensorModel>;

/// One failed admissibility constraint; validation never throws.
struct Violation {
    std::string constraint;
    std::string detail;
    std::optional<double> lambda;

    std::string to_string() const;
};

std::vector<Violation> validate(const ScalarModel& m);
std::vector<Violation> validate(const VectorModel& m);
std::vector<Violation> validate(const TensorModel& m);
std::vector<Violation> validate(const TetraTensorModel& m);
std::vector<Violation> validate(const AnyModel& m);

/// Barycentric coordinates on the vector-case interval.
struct VectorSimplex {
    double u1 = 0.0;
    double u2 = 0.0;

    bool valid(double tol = 1e-12) const;
};

/// Coordinates of the tensor convex set: u1..u4 on the simplex plus the
/// off-diagonal coordinate u5 with |u5| <= sqrt(u3 u4 / 2).
struct TensorSimplex {
    double u1 = 0.0, u2 = 0.0, u3 = 0.0, u4 = 0.0, u5 = 0.0;

    bool valid(double tol = 1e-12) const;
};

/// Normalized spectral density of a vector model at one wavenumber, as a 3x3
/// matrix in the (-1,0,1) basis evaluated at the reference (polar) direction.
/// Positive semidefinite with unit trace for valid coordinates.
Mat3 f_matrix_vector(double u1, double u2);

/// Normalized tensor spectral density at the reference direction, as a
/// symmetric 6x6 matrix of plain tensor components in Voigt index order
/// (-1-1, 00, 11, 01, -11, -10).  Nonnegative-definite with unit Voigt trace
/// for valid coordinates; satisfies f13 = f11 - 2 f55.
Mat6 f_matrix_tensor(const TensorSimplex& u);

/// Extreme-combination matrix D attached to one ellipse coordinate pair:
/// D11 = D33 = D13 = v1/2, D22 = 1 - v1, D12 = D23 = v2 (Voigt order as above).
Mat6 d_matrix_from_v(const EllipseCoords& v);

/// Voigt slot -> ordered index pair in the (-1,0,1) basis.
struct VoigtPair {
    int i;
    int j;
};
VoigtPair voigt_pair(int a);  // a in 0..5

/// Thrown by the model loader when a file fails validation.
struct ModelValidationError : std::runtime_error {
    std::vector<Violation> violations;

    explicit ModelValidationError(std::vector<Violation> v);
};

/// JSON model file I/O.  The loader validates and refuses invalid files by
/// throwing ModelValidationError carrying the violation list.
AnyModel load_model(const std::string& path);
AnyModel parse_model(const std::string& json_text);
std::string model_to_json(const AnyModel& m);
void save_model(const AnyModel& m, const std::string& path);

const char* kind_name(const AnyModel& m);

}  // namespace isofield::model
