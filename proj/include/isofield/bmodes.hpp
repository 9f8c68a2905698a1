#pragma once

#include <cstdint>
#include <stdexcept>

#include "isofield/correlation.hpp"
#include "isofield/linalg.hpp"
#include "isofield/model.hpp"
#include "isofield/specfun.hpp"

namespace isofield::bmodes {

/// Mode label of the vector-field expansion, ordered lexicographically by
/// (ell, m, i).
struct VectorModeIndex {
    int ell;
    int m;
    int i;  // component, -1..1

    VectorModeIndex(int ell_, int m_, int i_);
};

/// Mode label of the tensor-field expansion, ordered lexicographically by
/// (u, w, i, j).
struct TensorModeIndex {
    int u;
    int w;
    int i;
    int j;

    TensorModeIndex(int u_, int w_, int i_, int j_);
};

std::size_t vector_mode_count(int lmax);  // 3 (lmax+1)^2
std::size_t tensor_mode_count(int lmax);  // 9 (lmax+1)^2

std::size_t flat_index(const VectorModeIndex& a);
std::size_t flat_index(const TensorModeIndex& a);
VectorModeIndex vector_mode_at(std::size_t flat);
TensorModeIndex tensor_mode_at(std::size_t flat);

/// Mode-covariance entries.  The nominal i^(ell-ell') phase is real because
/// every coupling factor vanishes unless ell - ell' is even.
double b_vector(const VectorModeIndex& a, const VectorModeIndex& b, int family);
double b_tensor(const TensorModeIndex& a, const TensorModeIndex& b, int family);
double b_tensor3(const TensorModeIndex& a, const TensorModeIndex& b, double v1, double v2);

enum class BKind { vector1, vector2, tensor1, tensor2, tensor3 };

const char* to_string(BKind k);
BKind bkind_from_string(const std::string& s);

/// Finite principal block of one mode-covariance family, in lexicographic
/// mode order, together with the data identifying it.
struct ModeCovariance {
    BKind kind = BKind::vector1;
    int lmax = 0;
    model::EllipseCoords v{};  // used by tensor3 only
    DenseMatrix entries;
};

/// Assemble the dense symmetric mode covariance for degrees <= lmax.
/// Throws std::logic_error if the result is not symmetric to roundoff.
ModeCovariance assemble(BKind kind, int lmax, const model::EllipseCoords& v = {});

struct FactorizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// No-pivot Cholesky factor of a nonnegative-definite matrix.  Pivots below
/// the negativity threshold raise FactorizationError; pivots that vanish to
/// roundoff produce zero columns so the fixed mode order is preserved.
DenseMatrix semidefinite_cholesky(const DenseMatrix& a, double neg_tol = 1e-8);
DenseMatrix semidefinite_cholesky(const ModeCovariance& c, double neg_tol = 1e-8);

/// Evaluation point in spherical coordinates.
struct SpherePoint {
    double r = 0.0;
    specfun::AngularPair dir{};
};

/// Two-point correlation reconstructed from the truncated bilinear mode
/// series; converges to the closed forms as lmax grows.
Mat3 series_vector_correlation(const model::VectorModel& m, const SpherePoint& x,
                               const SpherePoint& y, int lmax);
correlation::Rank4Tensor series_tensor_correlation(const model::TensorModel& m, const SpherePoint& x,
                                                   const SpherePoint& y, int lmax);

}  // namespace isofield::bmodes
