#include "isofield/simulate.hpp"

#include <algorithm>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "isofield/specfun.hpp"

namespace isofield::simulate {

using specfun::AngularPair;

GridSpec GridSpec::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open grid file: " + path);
    GridSpec grid;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string r, th, ph;
        if (!std::getline(ls, r, ',') || !std::getline(ls, th, ',') || !std::getline(ls, ph, ','))
            continue;
        try {
            grid.points.push_back({std::stod(r), std::stod(th), std::stod(ph)});
        } catch (const std::exception&) {
            // header row
        }
    }
    if (grid.points.empty()) throw std::runtime_error("grid file has no points: " + path);
    return grid;
}

model::SpectralMeasure discretize(const model::SpectralMeasure& measure, int) { return measure; }

model::SpectralMeasure discretize(const TabulatedDensity& density, int n_atoms) {
    const std::size_t n = density.lambda.size();
    if (n < 2 || density.density.size() != n)
        throw std::domain_error("discretize: need at least two tabulation nodes");
    if (n_atoms < 1) throw std::domain_error("discretize: need at least one atom");
    for (std::size_t k = 0; k < n; ++k) {
        if (density.density[k] < 0.0) throw std::domain_error("discretize: negative density");
        if (k > 0 && density.lambda[k] <= density.lambda[k - 1])
            throw std::domain_error("discretize: lambdas not strictly increasing");
    }

    const double total_len = density.lambda.back() - density.lambda.front();
    std::vector<model::SpectralAtom> atoms;
    std::vector<double> gl_x, gl_w;
    for (std::size_t seg = 0; seg + 1 < n; ++seg) {
        const double a = density.lambda[seg], b = density.lambda[seg + 1];
        const double da = density.density[seg], db = density.density[seg + 1];
        // At least two nodes per segment: keeps mass and the first few
        // moments of the piecewise-linear density exact.
        const int order =
            std::max(2, static_cast<int>(std::lround(n_atoms * (b - a) / total_len)));
        specfun::gauss_legendre(order, gl_x, gl_w);
        for (int k = 0; k < order; ++k) {
            const double t = 0.5 * (gl_x[static_cast<std::size_t>(k)] + 1.0);
            const double lam = a + t * (b - a);
            const double dens = da + t * (db - da);
            const double mass = 0.5 * (b - a) * gl_w[static_cast<std::size_t>(k)] * dens;
            if (mass > 0.0) atoms.push_back({lam, mass});
        }
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const model::SpectralAtom& x, const model::SpectralAtom& y) { return x.lambda < y.lambda; });
    return model::SpectralMeasure(std::move(atoms));
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double to_unit_open(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double normal_draw(std::uint64_t seed, std::uint64_t realization, std::uint64_t family,
                   std::uint64_t atom, std::uint64_t mode) {
    std::uint64_t k = seed;
    k = splitmix64(k ^ (0x9E3779B97F4A7C15ull * (realization + 1)));
    k = splitmix64(k ^ (0xC2B2AE3D27D4EB4Full * (family + 1)));
    k = splitmix64(k ^ (0x165667B19E3779F9ull * (atom + 1)));
    k = splitmix64(k ^ (0x27D4EB2F165667C5ull * (mode + 1)));
    const double u1 = to_unit_open(splitmix64(k));
    const double u2 = to_unit_open(splitmix64(k + 0x632BE59BD9B4E019ull));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * specfun::kPi * u2);
}

void Sampler::add_factor(int family, const model::SpectralMeasure& phi, bmodes::BKind kind,
                         const std::vector<model::EllipseCoords>* v) {
    const bool per_atom_factor = (kind == bmodes::BKind::tensor3);
    std::size_t shared_index = 0;
    if (!per_atom_factor && !phi.empty()) {
        factors_.push_back(bmodes::semidefinite_cholesky(bmodes::assemble(kind, lmax_)));
        shared_index = factors_.size() - 1;
    }
    for (std::size_t k = 0; k < phi.size(); ++k) {
        const auto& atom = phi.atoms()[k];
        std::size_t idx = shared_index;
        if (per_atom_factor) {
            factors_.push_back(bmodes::semidefinite_cholesky(
                bmodes::assemble(kind, lmax_, v ? (*v)[k] : model::EllipseCoords{})));
            idx = factors_.size() - 1;
        }
        atoms_.push_back({family, atom.lambda, atom.mass, nullptr, idx});
    }
}

Sampler::Sampler(const model::AnyModel& m, const GridSpec& grid, int lmax)
    : model_(m), grid_(grid), lmax_(lmax) {
    if (lmax < 0) throw std::domain_error("Sampler: lmax must be >= 0");
    const auto violations = model::validate(m);
    if (!violations.empty())
        throw std::domain_error("Sampler: invalid model: " + violations.front().to_string());

    const std::size_t nsh = static_cast<std::size_t>((lmax + 1) * (lmax + 1));
    if (const auto* s = std::get_if<model::ScalarModel>(&m)) {
        components_ = 1;
        mean_ = s->mean;
        n_modes_ = nsh;
        for (const auto& atom : s->phi.atoms()) atoms_.push_back({1, atom.lambda, atom.mass, nullptr, SIZE_MAX});
    } else if (const auto* vm = std::get_if<model::VectorModel>(&m)) {
        components_ = 3;
        n_modes_ = 3 * nsh;
        add_factor(1, vm->phi1, bmodes::BKind::vector1, nullptr);
        add_factor(2, vm->phi2, bmodes::BKind::vector2, nullptr);
    } else if (const auto* tm = std::get_if<model::TensorModel>(&m)) {
        components_ = 6;
        mean_ = tm->mean;
        n_modes_ = 9 * nsh;
        add_factor(1, tm->phi1, bmodes::BKind::tensor1, nullptr);
        add_factor(2, tm->phi2, bmodes::BKind::tensor2, nullptr);
        add_factor(3, tm->phi3, bmodes::BKind::tensor3, &tm->v);
    } else {
        const auto* qm = std::get_if<model::TetraTensorModel>(&m);
        components_ = 6;
        mean_ = qm->mean;
        n_modes_ = 9 * nsh;
        add_factor(1, qm->phi1, bmodes::BKind::tensor1, nullptr);
        add_factor(2, qm->phi2, bmodes::BKind::tensor2, nullptr);
        const std::vector<model::EllipseCoords> v3(qm->phi3.size(), model::EllipseCoords{1.0, 0.0});
        const std::vector<model::EllipseCoords> v4(qm->phi4.size(), model::EllipseCoords{0.0, 0.0});
        add_factor(3, qm->phi3, bmodes::BKind::tensor3, &v3);
        add_factor(4, qm->phi4, bmodes::BKind::tensor3, &v4);
    }
    for (auto& fa : atoms_)
        if (fa.factor_index != SIZE_MAX) fa.factor = &factors_[fa.factor_index];

    sh_.resize(grid_.points.size());
    for (std::size_t p = 0; p < grid_.points.size(); ++p)
        specfun::real_spherical_harmonic_all(lmax_, AngularPair(grid_.points[p].theta, grid_.points[p].phi),
                                             sh_[p]);
    bessel_.resize(atoms_.size());
    for (std::size_t a = 0; a < atoms_.size(); ++a) {
        bessel_[a].resize(grid_.points.size() * static_cast<std::size_t>(lmax_ + 1));
        std::vector<double> j;
        for (std::size_t p = 0; p < grid_.points.size(); ++p) {
            specfun::spherical_bessel_array(lmax_, atoms_[a].lambda * grid_.points[p].r, j);
            for (int l = 0; l <= lmax_; ++l)
                bessel_[a][p * static_cast<std::size_t>(lmax_ + 1) + static_cast<std::size_t>(l)] =
                    j[static_cast<std::size_t>(l)];
        }
    }
}

FieldRealization Sampler::realize(std::uint64_t seed, std::uint64_t realization_index) const {
    FieldRealization out;
    out.components = components_;
    out.seed = seed;
    out.lmax = lmax_;
    out.values.assign(grid_.points.size() * static_cast<std::size_t>(components_), 0.0);

    const std::size_t nsh = static_cast<std::size_t>((lmax_ + 1) * (lmax_ + 1));
    const int per_sh = (components_ == 1) ? 1 : (components_ == 3 ? 3 : 9);
    const double two_sqrt_pi = 2.0 * std::sqrt(specfun::kPi);

    std::vector<double> zeta(n_modes_), corr(n_modes_);
    for (std::size_t a = 0; a < atoms_.size(); ++a) {
        const auto& fa = atoms_[a];
        for (std::size_t b = 0; b < n_modes_; ++b)
            zeta[b] = normal_draw(seed, realization_index, static_cast<std::uint64_t>(fa.family), a, b);

        const double amp = std::sqrt(fa.mass);
        if (fa.factor == nullptr) {
            for (std::size_t b = 0; b < n_modes_; ++b) corr[b] = amp * zeta[b];
        } else {
            const DenseMatrix& L = *fa.factor;
            for (std::size_t r = 0; r < n_modes_; ++r) {
                double s = 0.0;
                for (std::size_t c = 0; c <= r; ++c) s += L(r, c) * zeta[c];
                corr[r] = amp * s;
            }
        }

        for (std::size_t p = 0; p < grid_.points.size(); ++p) {
            const double* jrow = &bessel_[a][p * static_cast<std::size_t>(lmax_ + 1)];
            const double* shrow = sh_[p].data();
            double acc[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
            std::size_t k = 0;
            for (int l = 0; l <= lmax_; ++l) {
                const double jl = jrow[l];
                for (int mm = -l; mm <= l; ++mm, ++k) {
                    const double geom = jl * shrow[k];
                    if (geom == 0.0) continue;
                    const double* z = &corr[k * static_cast<std::size_t>(per_sh)];
                    for (int c = 0; c < per_sh; ++c) acc[c] += geom * z[c];
                }
            }
            (void)nsh;
            double* dst = &out.values[p * static_cast<std::size_t>(components_)];
            if (components_ == 1) {
                dst[0] += two_sqrt_pi * acc[0];
            } else if (components_ == 3) {
                for (int c = 0; c < 3; ++c) dst[c] += two_sqrt_pi * acc[c];
            } else {
                // 9 component pairs folded to the Voigt order.
                for (int voigt = 0; voigt < 6; ++voigt) {
                    const auto pair = model::voigt_pair(voigt);
                    dst[voigt] += two_sqrt_pi * acc[3 * (pair.i + 1) + (pair.j + 1)];
                }
            }
        }
    }

    if (components_ == 1) {
        for (double& v : out.values) v += mean_;
    } else if (components_ == 6 && mean_ != 0.0) {
        for (std::size_t p = 0; p < grid_.points.size(); ++p)
            for (int voigt = 0; voigt < 3; ++voigt)
                out.values[p * 6 + static_cast<std::size_t>(voigt)] += mean_;
    }
    return out;
}

double Sampler::truncation_tail_bound() const {
    double rmax = 0.0;
    for (const auto& p : grid_.points) rmax = std::max(rmax, p.r);
    double bound = 0.0;
    std::vector<double> j;
    const int extra = 60;
    for (const auto& fa : atoms_) {
        specfun::spherical_bessel_array(lmax_ + extra, fa.lambda * rmax, j);
        double s = 0.0;
        for (int l = lmax_ + 1; l <= lmax_ + extra; ++l)
            s += (2.0 * l + 1.0) * j[static_cast<std::size_t>(l)] * j[static_cast<std::size_t>(l)];
        bound = std::max(bound, s);
    }
    return bound;
}

FieldRealization sample_scalar(const model::ScalarModel& m, const GridSpec& grid, std::uint64_t seed,
                               int lmax) {
    return Sampler(model::AnyModel(m), grid, lmax).realize(seed);
}

FieldRealization sample_vector(const model::VectorModel& m, const GridSpec& grid, std::uint64_t seed,
                               int lmax) {
    return Sampler(model::AnyModel(m), grid, lmax).realize(seed);
}

FieldRealization sample_tensor(const model::TensorModel& m, const GridSpec& grid, std::uint64_t seed,
                               int lmax) {
    return Sampler(model::AnyModel(m), grid, lmax).realize(seed);
}

FieldRealization sample_tensor_u5zero(const model::TetraTensorModel& m, const GridSpec& grid,
                                      std::uint64_t seed, int lmax) {
    return Sampler(model::AnyModel(m), grid, lmax).realize(seed);
}

Ensemble Sampler::ensemble(std::uint64_t seed, std::size_t n_realizations, int threads) const {
    Ensemble e;
    e.components = components();
    e.n_points = n_points();
    e.n_realizations = n_realizations;
    e.values.assign(n_realizations * e.n_points * static_cast<std::size_t>(e.components), 0.0);

    const std::size_t stride = e.n_points * static_cast<std::size_t>(e.components);
    auto worker = [&](std::size_t first, std::size_t step) {
        for (std::size_t r = first; r < n_realizations; r += step) {
            const FieldRealization f = realize(seed, r);
            std::copy(f.values.begin(), f.values.end(), e.values.begin() + static_cast<std::ptrdiff_t>(r * stride));
        }
    };

    const int t = std::max(1, threads);
    if (t == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(t));
        for (int k = 0; k < t; ++k) pool.emplace_back(worker, static_cast<std::size_t>(k), static_cast<std::size_t>(t));
        for (auto& th : pool) th.join();
    }
    return e;
}

Ensemble simulate_ensemble(const model::AnyModel& m, const GridSpec& grid, std::uint64_t seed,
                           int lmax, std::size_t n_realizations, int threads) {
    return Sampler(m, grid, lmax).ensemble(seed, n_realizations, threads);
}

}  // namespace isofield::simulate
