#include "isofield/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "isofield/specfun.hpp"

namespace isofield::verify {

using correlation::Rank4Tensor;
using correlation::Separation;
using specfun::AngularPair;

std::string OracleReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"name\":\"" << name << "\",\"max_abs_error\":" << max_abs_error
       << ",\"tolerance\":" << tolerance << ",\"pass\":" << (pass ? "true" : "false")
       << ",\"band_low\":" << band_low << ",\"band_high\":" << band_high << ",\"n\":" << errors.size();
    if (!detail.empty()) os << ",\"detail\":\"" << detail << "\"";
    os << "}";
    return os.str();
}

namespace {

// Per-wavenumber share of each measure in the radial part of the density.
struct DensityAtom {
    double lambda;
    double mu_mass;  // total radial mass at this wavenumber
    double u1 = 0.0, u2 = 0.0, u34 = 0.0;
    model::EllipseCoords v{};
};

std::vector<DensityAtom> radial_decomposition(const model::VectorModel& m) {
    std::map<double, DensityAtom> acc;
    for (const auto& a : m.phi1.atoms()) {
        auto& d = acc.try_emplace(a.lambda, DensityAtom{a.lambda, 0.0}).first->second;
        d.mu_mass += a.mass;
        d.u1 += a.mass;
    }
    for (const auto& a : m.phi2.atoms()) {
        auto& d = acc.try_emplace(a.lambda, DensityAtom{a.lambda, 0.0}).first->second;
        d.mu_mass += a.mass;
        d.u2 += a.mass;
    }
    std::vector<DensityAtom> out;
    for (auto& [lam, d] : acc) {
        d.u1 /= d.mu_mass;
        d.u2 /= d.mu_mass;
        out.push_back(d);
    }
    return out;
}

std::vector<DensityAtom> radial_decomposition(const model::TensorModel& m) {
    std::map<double, DensityAtom> acc;
    auto add = [&acc](const model::SpectralAtom& a, int which) -> DensityAtom& {
        auto& d = acc.try_emplace(a.lambda, DensityAtom{a.lambda, 0.0}).first->second;
        d.mu_mass += a.mass;
        (which == 1 ? d.u1 : which == 2 ? d.u2 : d.u34) += a.mass;
        return d;
    };
    for (const auto& a : m.phi1.atoms()) add(a, 1);
    for (const auto& a : m.phi2.atoms()) add(a, 2);
    for (std::size_t k = 0; k < m.phi3.size(); ++k) add(m.phi3.atoms()[k], 3).v = m.v[k];
    std::vector<DensityAtom> out;
    for (auto& [lam, d] : acc) {
        d.u1 /= d.mu_mass;
        d.u2 /= d.mu_mass;
        d.u34 /= d.mu_mass;
        out.push_back(d);
    }
    return out;
}

Mat3 vector_density(const DensityAtom& d, const AngularPair& dir) {
    const Vec3 n = specfun::direction_components(dir);
    Mat3 f;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) {
            const double d_ij = (i == j) ? 1.0 : 0.0;
            f(i, j) = 0.5 * d.u1 * (d_ij - n(i) * n(j)) + d.u2 * n(i) * n(j);
        }
    return f;
}

// Normalized tensor density at one direction, rebuilt from the M basis with
// the per-measure coefficient brackets.
Rank4Tensor tensor_density(const DensityAtom& d, const AngularPair& dir) {
    const double s5 = std::sqrt(5.0), s7 = std::sqrt(7.0), s35 = std::sqrt(35.0), s2 = std::sqrt(2.0);
    Rank4Tensor f;
    std::array<Rank4Tensor, 5> M;
    for (int n = 1; n <= 5; ++n) M[static_cast<std::size_t>(n - 1)] = correlation::M_basis(n, dir);

    if (d.u1 != 0.0) {
        f.add_scaled(M[1], d.u1 * 2.0 / s5);
        f.add_scaled(M[3], d.u1 * s2 / s7);
        f.add_scaled(M[4], -d.u1 * 4.0 * s2 / s35);
    }
    if (d.u2 != 0.0) {
        f.add_scaled(M[1], d.u2 * 4.0 / (3.0 * s5));
        f.add_scaled(M[3], -d.u2 * 4.0 * s2 / (3.0 * s7));
        f.add_scaled(M[4], d.u2 * 2.0 * s2 / (3.0 * s35));
    }
    if (d.u34 != 0.0) {
        const double a = d.v.v1 + 4.0 * d.v.v2;
        f.add_scaled(M[0], d.u34 * (a + 1.0) / 3.0);
        f.add_scaled(M[1], d.u34 * (2.0 - a) / (3.0 * s5));
        f.add_scaled(M[2], d.u34 * (-4.0 * d.v.v1 + 2.0 * d.v.v2 + 2.0) / 3.0);
        f.add_scaled(M[3], d.u34 * s2 * (2.0 - a) / (3.0 * s7));
        f.add_scaled(M[4], d.u34 * s2 * (2.0 - a) / s35);
    }
    return f;
}

// Real/imaginary parts of the truncated plane-wave kernel
// sum_l i^l (2l+1) j_l(lambda rho) P_l(cos gamma).
void plane_wave_kernel(double lambda_rho, double cos_gamma, int lmax_pw, double& re, double& im) {
    std::vector<double> j;
    specfun::spherical_bessel_array(lmax_pw, lambda_rho, j);
    re = 0.0;
    im = 0.0;
    double pm1 = 1.0, p = cos_gamma;
    for (int l = 0; l <= lmax_pw; ++l) {
        double pl;
        if (l == 0)
            pl = 1.0;
        else if (l == 1)
            pl = cos_gamma;
        else {
            pl = ((2.0 * l - 1.0) * cos_gamma * p - (l - 1.0) * pm1) / l;
            pm1 = p;
            p = pl;
        }
        const double term = (2.0 * l + 1.0) * j[static_cast<std::size_t>(l)] * pl;
        switch (l % 4) {
            case 0: re += term; break;
            case 1: im += term; break;
            case 2: re -= term; break;
            case 3: im -= term; break;
        }
    }
}

Vec3 unit_vector(const AngularPair& dir) { return specfun::direction_components(dir); }

}  // namespace

Mat3 quadrature_correlation(const model::VectorModel& m, const Separation& xi, int band,
                            double* imag_residual) {
    const auto violations = model::validate(m);
    if (!violations.empty())
        throw std::domain_error("quadrature_correlation: invalid model: " + violations.front().to_string());
    const auto atoms = radial_decomposition(m);
    const auto quad = specfun::sphere_quadrature(band);
    const int lmax_pw = std::max(4, band - 4);
    const Vec3 xhat = xi.at_origin ? Vec3{} : unit_vector(xi.direction);

    Mat3 re{};
    Mat3 im{};
    for (const auto& atom : atoms) {
        for (const auto& node : quad.nodes) {
            const Vec3 p = unit_vector(node.dir);
            const double cg = xi.at_origin ? 0.0 : p.dot(xhat);
            double kre, kim;
            plane_wave_kernel(atom.lambda * xi.rho, cg, lmax_pw, kre, kim);
            const Mat3 f = vector_density(atom, node.dir);
            const double wre = atom.mu_mass * node.weight * kre / specfun::kFourPi;
            const double wim = atom.mu_mass * node.weight * kim / specfun::kFourPi;
            for (int i = -1; i <= 1; ++i)
                for (int j = -1; j <= 1; ++j) {
                    re(i, j) += wre * f(i, j);
                    im(i, j) += wim * f(i, j);
                }
        }
    }
    double max_im = 0.0;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) max_im = std::max(max_im, std::abs(im(i, j)));
    if (imag_residual) *imag_residual = max_im;
    else if (max_im > 1e-10)
        throw std::runtime_error("quadrature_correlation: imaginary residual above threshold");
    return re;
}

Rank4Tensor quadrature_correlation(const model::TensorModel& m, const Separation& xi, int band,
                                   double* imag_residual) {
    const auto violations = model::validate(m);
    if (!violations.empty())
        throw std::domain_error("quadrature_correlation: invalid model: " + violations.front().to_string());
    const auto atoms = radial_decomposition(m);
    const auto quad = specfun::sphere_quadrature(band);
    const int lmax_pw = std::max(8, band - 4);
    const Vec3 xhat = xi.at_origin ? Vec3{} : unit_vector(xi.direction);

    Rank4Tensor re, im;
    for (const auto& atom : atoms) {
        for (const auto& node : quad.nodes) {
            const Vec3 p = unit_vector(node.dir);
            const double cg = xi.at_origin ? 0.0 : p.dot(xhat);
            double kre, kim;
            plane_wave_kernel(atom.lambda * xi.rho, cg, lmax_pw, kre, kim);
            const Rank4Tensor f = tensor_density(atom, node.dir);
            re.add_scaled(f, atom.mu_mass * node.weight * kre / specfun::kFourPi);
            im.add_scaled(f, atom.mu_mass * node.weight * kim / specfun::kFourPi);
        }
    }
    const double max_im = im.max_abs();
    if (imag_residual) *imag_residual = max_im;
    else if (max_im > 1e-10)
        throw std::runtime_error("quadrature_correlation: imaginary residual above threshold");
    return re;
}

namespace {

template <class Eval, class Quad, class Diff>
OracleReport oracle_report_impl(int n_separations, std::uint64_t seed, double tolerance, Eval eval,
                                Quad quad, Diff diff, const char* name) {
    OracleReport rep;
    rep.name = name;
    rep.tolerance = tolerance;
    rep.band_low = 24;
    rep.band_high = 32;

    std::uint64_t state = seed;
    double self_err = 0.0;
    for (int k = 0; k < n_separations; ++k) {
        const Separation xi = random_separation(state, 0.0, 2.0);
        const auto closed = eval(xi);
        double resid_low = 0.0, resid_high = 0.0;
        const auto low = quad(xi, rep.band_low, &resid_low);
        const auto high = quad(xi, rep.band_high, &resid_high);
        self_err = std::max(self_err, diff(low, high));
        if (std::max(resid_low, resid_high) > 1e-10) {
            rep.detail = "imaginary residual above 1e-10";
            rep.pass = false;
            rep.max_abs_error = std::max(resid_low, resid_high);
            return rep;
        }
        const double err = diff(closed, high);
        rep.errors.push_back(err);
        rep.max_abs_error = std::max(rep.max_abs_error, err);
    }
    if (self_err > 1e-8) {
        rep.detail = "quadrature bands disagree";
        rep.pass = false;
        rep.max_abs_error = std::max(rep.max_abs_error, self_err);
        return rep;
    }
    rep.pass = rep.max_abs_error <= tolerance;
    return rep;
}

double mat3_diff(const Mat3& a, const Mat3& b) {
    double m = 0.0;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

}  // namespace

OracleReport oracle_report(const model::VectorModel& m, int n_separations, std::uint64_t seed,
                           double tolerance) {
    return oracle_report_impl(
        n_separations, seed, tolerance,
        [&m](const Separation& xi) { return correlation::vector_correlation(m, xi); },
        [&m](const Separation& xi, int band, double* resid) {
            return quadrature_correlation(m, xi, band, resid);
        },
        mat3_diff, "vector closed form vs quadrature");
}

OracleReport oracle_report(const model::TensorModel& m, int n_separations, std::uint64_t seed,
                           double tolerance) {
    return oracle_report_impl(
        n_separations, seed, tolerance,
        [&m](const Separation& xi) { return correlation::tensor_correlation(m, xi); },
        [&m](const Separation& xi, int band, double* resid) {
            return quadrature_correlation(m, xi, band, resid);
        },
        [](const Rank4Tensor& a, const Rank4Tensor& b) { return a.max_abs_diff(b); },
        "tensor closed form vs quadrature");
}

McEstimate mc_covariance(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (n != b.size() || n < 2) throw std::domain_error("mc_covariance: need paired samples, n >= 2");
    double sa = 0.0, sb = 0.0, sab = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sa += a[k];
        sb += b[k];
        sab += a[k] * b[k];
    }
    const double nn = static_cast<double>(n);
    const double est = (sab - sa * sb / nn) / (nn - 1.0);

    // Delete-one jackknife in O(n) from the accumulated sums.
    std::vector<double> loo(n);
    double mean_loo = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double np = nn - 1.0;
        const double sa_k = sa - a[k];
        const double sb_k = sb - b[k];
        const double sab_k = sab - a[k] * b[k];
        const double c = (np > 1.0) ? (sab_k - sa_k * sb_k / np) / (np - 1.0) : 0.0;
        loo[k] = c;
        mean_loo += c;
    }
    mean_loo /= nn;
    double var = 0.0;
    for (double c : loo) var += (c - mean_loo) * (c - mean_loo);
    var *= (nn - 1.0) / nn;
    return {est, std::sqrt(var)};
}

McEstimate mc_mean(std::span<const double> a) {
    const std::size_t n = a.size();
    if (n < 2) throw std::domain_error("mc_mean: need n >= 2");
    double s = 0.0, s2 = 0.0;
    for (double x : a) {
        s += x;
        s2 += x * x;
    }
    const double nn = static_cast<double>(n);
    const double mean = s / nn;
    const double var = (s2 - nn * mean * mean) / (nn - 1.0);
    return {mean, std::sqrt(std::max(var, 0.0) / nn)};
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t x = state;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

double uniform(std::uint64_t& state, double lo, double hi) {
    const double u = (static_cast<double>(splitmix64(state) >> 11) + 0.5) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

specfun::Rotation random_rotation(std::uint64_t& state) {
    const double alpha = uniform(state, 0.0, 2.0 * specfun::kPi);
    const double beta = std::acos(uniform(state, -1.0, 1.0));
    const double gamma = uniform(state, 0.0, 2.0 * specfun::kPi);
    return specfun::Rotation::zyz(alpha, beta, gamma);
}

Separation random_separation(std::uint64_t& state, double rho_min, double rho_max) {
    const double rho = uniform(state, rho_min, rho_max);
    const double ct = uniform(state, -1.0, 1.0);
    const double phi = uniform(state, 0.0, 2.0 * specfun::kPi);
    return Separation::spherical(rho, AngularPair(std::acos(ct), phi));
}

OracleReport isotropy_report(const std::function<Mat3(const Separation&)>& evaluator,
                             int n_rotations, int n_separations, std::uint64_t seed,
                             double tolerance, double rho_max) {
    OracleReport rep;
    rep.name = "vector isotropy";
    rep.tolerance = tolerance;
    std::uint64_t state = seed;
    std::vector<Separation> seps;
    for (int s = 0; s < n_separations; ++s) seps.push_back(random_separation(state, 0.1, rho_max));
    for (int k = 0; k < n_rotations; ++k) {
        const specfun::Rotation rot = random_rotation(state);
        for (const auto& xi : seps) {
            const Separation rotated(rot.apply(xi.xi));
            const Mat3 lhs = evaluator(rotated);
            const Mat3 rhs = correlation::rotate_rank2(rot.matrix(), evaluator(xi));
            const double err = mat3_diff(lhs, rhs);
            rep.errors.push_back(err);
            rep.max_abs_error = std::max(rep.max_abs_error, err);
        }
    }
    rep.pass = rep.max_abs_error <= tolerance;
    return rep;
}

OracleReport isotropy_report(const std::function<Rank4Tensor(const Separation&)>& evaluator,
                             int n_rotations, int n_separations, std::uint64_t seed,
                             double tolerance, double rho_max) {
    OracleReport rep;
    rep.name = "tensor isotropy";
    rep.tolerance = tolerance;
    std::uint64_t state = seed;
    std::vector<Separation> seps;
    for (int s = 0; s < n_separations; ++s) seps.push_back(random_separation(state, 0.1, rho_max));
    for (int k = 0; k < n_rotations; ++k) {
        const specfun::Rotation rot = random_rotation(state);
        for (const auto& xi : seps) {
            const Separation rotated(rot.apply(xi.xi));
            const Rank4Tensor lhs = evaluator(rotated);
            const Rank4Tensor rhs = correlation::rotate_rank4(rot.matrix(), evaluator(xi));
            const double err = lhs.max_abs_diff(rhs);
            rep.errors.push_back(err);
            rep.max_abs_error = std::max(rep.max_abs_error, err);
        }
    }
    rep.pass = rep.max_abs_error <= tolerance;
    return rep;
}

double density_check(const model::VectorModel& m, int n_directions, std::uint64_t seed) {
    const auto atoms = radial_decomposition(m);
    std::uint64_t state = seed;
    double worst = 0.0;
    for (int k = 0; k < n_directions; ++k) {
        const AngularPair dir(std::acos(uniform(state, -1.0, 1.0)), uniform(state, 0.0, 2.0 * specfun::kPi));
        for (const auto& atom : atoms) {
            const Mat3 f = vector_density(atom, dir);
            DenseMatrix d(3, 3);
            double tr = 0.0, asym = 0.0;
            for (int i = -1; i <= 1; ++i)
                for (int j = -1; j <= 1; ++j) {
                    d(static_cast<std::size_t>(i + 1), static_cast<std::size_t>(j + 1)) = f(i, j);
                    asym = std::max(asym, std::abs(f(i, j) - f(j, i)));
                }
            for (int i = -1; i <= 1; ++i) tr += f(i, i);
            worst = std::max({worst, asym, std::abs(tr - 1.0), std::max(0.0, -min_eigenvalue(d))});
        }
    }
    return worst;
}

double density_check(const model::TensorModel& m, int n_directions, std::uint64_t seed) {
    const auto atoms = radial_decomposition(m);
    std::uint64_t state = seed;
    double worst = 0.0;
    // The plain Voigt trace is normalized at the reference orientation only
    // (it is not a rotation invariant); definiteness and symmetry hold at
    // every direction.
    for (const auto& atom : atoms) {
        const Mat6 ref = tensor_density(atom, AngularPair(0.0, 0.0)).voigt();
        worst = std::max(worst, std::abs(ref.trace() - 1.0));
    }
    for (int k = 0; k < n_directions; ++k) {
        const AngularPair dir(std::acos(uniform(state, -1.0, 1.0)), uniform(state, 0.0, 2.0 * specfun::kPi));
        for (const auto& atom : atoms) {
            const Rank4Tensor f = tensor_density(atom, dir);
            worst = std::max(worst, f.max_symmetry_violation());
            worst = std::max(worst, std::max(0.0, -min_eigenvalue(f.voigt())));
        }
    }
    return worst;
}

}  // namespace isofield::verify
