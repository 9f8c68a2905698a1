#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "isofield/correlation.hpp"
#include "isofield/model.hpp"

namespace isofield::verify {

/// Result of one independent check against a stated tolerance.
struct OracleReport {
    std::string name;
    double max_abs_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::vector<double> errors;  // per evaluation
    int band_low = 0;
    int band_high = 0;
    std::string detail;

    std::string to_json() const;
};

/// Correlation evaluated through the spectral-density route: the normalized
/// density is integrated against a truncated plane-wave kernel by product
/// quadrature on the sphere.  The imaginary residual (odd-degree leakage)
/// is written to *imag_residual when given; it must stay below 1e-10 for a
/// parity-clean basis.
Mat3 quadrature_correlation(const model::VectorModel& m, const correlation::Separation& xi,
                            int band = 32, double* imag_residual = nullptr);
correlation::Rank4Tensor quadrature_correlation(const model::TensorModel& m,
                                                const correlation::Separation& xi, int band = 32,
                                                double* imag_residual = nullptr);

/// Closed form versus the quadrature route at random separations, with the
/// two-band self-consistency check folded in.
OracleReport oracle_report(const model::VectorModel& m, int n_separations, std::uint64_t seed,
                           double tolerance = 1e-6);
OracleReport oracle_report(const model::TensorModel& m, int n_separations, std::uint64_t seed,
                           double tolerance = 1e-6);

/// Unbiased sample covariance of two paired samples with a delete-one
/// jackknife standard error.  Needs at least two realizations.
struct McEstimate {
    double estimate = 0.0;
    double stderr_jackknife = 0.0;
};

McEstimate mc_covariance(std::span<const double> a, std::span<const double> b);

/// Sample mean with jackknife standard error.
McEstimate mc_mean(std::span<const double> a);

/// Rotation-equivariance check: max over random rotations k and separations
/// of | R(k xi) - U(k) applied to R(xi) | for the supplied evaluator.
OracleReport isotropy_report(const std::function<Mat3(const correlation::Separation&)>& evaluator,
                             int n_rotations, int n_separations, std::uint64_t seed,
                             double tolerance = 1e-10, double rho_max = 2.0);
OracleReport isotropy_report(
    const std::function<correlation::Rank4Tensor(const correlation::Separation&)>& evaluator,
    int n_rotations, int n_separations, std::uint64_t seed, double tolerance = 1e-10,
    double rho_max = 2.0);

/// Largest violation of symmetry / nonnegativity / unit normalization of the
/// assembled spectral density over random directions.
double density_check(const model::VectorModel& m, int n_directions, std::uint64_t seed);
double density_check(const model::TensorModel& m, int n_directions, std::uint64_t seed);

/// Deterministic pseudo-random rotations and separations for test harnesses.
specfun::Rotation random_rotation(std::uint64_t& state);
correlation::Separation random_separation(std::uint64_t& state, double rho_min, double rho_max);
double uniform(std::uint64_t& state, double lo, double hi);

}  // namespace isofield::verify
