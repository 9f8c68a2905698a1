#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isofield/bmodes.hpp"
#include "isofield/model.hpp"

namespace isofield::simulate {

/// Evaluation grid in space-domain spherical coordinates.
struct GridPoint {
    double r = 0.0;
    double theta = 0.0;
    double phi = 0.0;
};

struct GridSpec {
    std::vector<GridPoint> points;

    static GridSpec load_csv(const std::string& path);
};

/// One synthesized field: per grid point a scalar, a 3-vector, or a
/// symmetric tensor in Voigt component order.  Reproducible from
/// (model, grid, seed, lmax).
struct FieldRealization {
    int components = 1;  // 1, 3 or 6
    std::vector<double> values;  // points x components, row-major
    std::uint64_t seed = 0;
    int lmax = 0;

    double at(std::size_t point, int comp) const {
        return values[point * static_cast<std::size_t>(components) + static_cast<std::size_t>(comp)];
    }
};

/// Piecewise-linear density tabulated on strictly increasing wavenumbers.
struct TabulatedDensity {
    std::vector<double> lambda;
    std::vector<double> density;
};

/// Quadrature atoms approximating a tabulated density; Gauss-Legendre nodes
/// per tabulation segment, so the total mass matches the piecewise-linear
/// integral exactly.  Negative density is a domain error.
model::SpectralMeasure discretize(const TabulatedDensity& density, int n_atoms);

/// An already-atomic measure passes through unchanged.
model::SpectralMeasure discretize(const model::SpectralMeasure& measure, int n_atoms);

/// Standard normal draw determined entirely by the key tuple; the stream is
/// independent of scheduling and thread count.
double normal_draw(std::uint64_t seed, std::uint64_t realization, std::uint64_t family,
                   std::uint64_t atom, std::uint64_t mode);

/// One-shot synthesis of a single realization per field kind.
FieldRealization sample_scalar(const model::ScalarModel& m, const GridSpec& grid, std::uint64_t seed,
                               int lmax);
FieldRealization sample_vector(const model::VectorModel& m, const GridSpec& grid, std::uint64_t seed,
                               int lmax);
FieldRealization sample_tensor(const model::TensorModel& m, const GridSpec& grid, std::uint64_t seed,
                               int lmax);
FieldRealization sample_tensor_u5zero(const model::TetraTensorModel& m, const GridSpec& grid,
                                      std::uint64_t seed, int lmax);

/// Precomputed synthesis machinery for one (model, grid, lmax).
class Sampler {
  public:
    Sampler(const model::AnyModel& m, const GridSpec& grid, int lmax);

    /// Field for one realization index under one seed.
    FieldRealization realize(std::uint64_t seed, std::uint64_t realization_index = 0) const;

    /// Batch of realizations with indices 0..n-1, optionally in parallel;
    /// output is identical for every thread count.
    struct Ensemble ensemble(std::uint64_t seed, std::size_t n_realizations, int threads = 1) const;

    int components() const { return components_; }
    std::size_t n_points() const { return grid_.points.size(); }

    /// Tail diagnostic: sum over truncated degrees of
    /// (2l+1) max_atoms j_l(lambda r_max)^2.
    double truncation_tail_bound() const;

  private:
    struct FactorAtom {
        int family;            // RNG stream id
        double lambda;
        double mass;
        const DenseMatrix* factor;  // nullptr = independent modes (scalar case)
        std::size_t factor_index;   // into factors_ storage
    };

    void add_factor(int family, const model::SpectralMeasure& phi, bmodes::BKind kind,
                    const std::vector<model::EllipseCoords>* v);

    model::AnyModel model_;
    GridSpec grid_;
    int lmax_;
    int components_;
    double mean_ = 0.0;
    std::size_t n_modes_;

    std::vector<DenseMatrix> factors_;
    std::vector<FactorAtom> atoms_;
    std::vector<std::vector<double>> sh_;       // per point: harmonic values
    std::vector<std::vector<double>> bessel_;   // per atom: per point: j_l(lambda r)
};

/// Ensemble values laid out (realization, point, component).
struct Ensemble {
    int components = 1;
    std::size_t n_points = 0;
    std::size_t n_realizations = 0;
    std::vector<double> values;

    double at(std::size_t real, std::size_t point, int comp) const {
        return values[(real * n_points + point) * static_cast<std::size_t>(components) +
                      static_cast<std::size_t>(comp)];
    }
};

Ensemble simulate_ensemble(const model::AnyModel& m, const GridSpec& grid, std::uint64_t seed,
                           int lmax, std::size_t n_realizations, int threads = 1);

}  // namespace isofield::simulate
