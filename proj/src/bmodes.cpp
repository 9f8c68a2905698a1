#include "isofield/bmodes.hpp"

#include <cmath>
#include <vector>

#include "isofield/coupling.hpp"
#include "isofield/detail/coupled_tensors.hpp"

namespace isofield::bmodes {

using coupling::CouplingTable;
using detail::coupled_tensors;

VectorModeIndex::VectorModeIndex(int ell_, int m_, int i_) : ell(ell_), m(m_), i(i_) {
    if (ell < 0 || std::abs(m) > ell || i < -1 || i > 1)
        throw std::domain_error("VectorModeIndex: invalid label");
}

TensorModeIndex::TensorModeIndex(int u_, int w_, int i_, int j_) : u(u_), w(w_), i(i_), j(j_) {
    if (u < 0 || std::abs(w) > u || i < -1 || i > 1 || j < -1 || j > 1)
        throw std::domain_error("TensorModeIndex: invalid label");
}

std::size_t vector_mode_count(int lmax) {
    return 3u * static_cast<std::size_t>(lmax + 1) * static_cast<std::size_t>(lmax + 1);
}

std::size_t tensor_mode_count(int lmax) {
    return 9u * static_cast<std::size_t>(lmax + 1) * static_cast<std::size_t>(lmax + 1);
}

std::size_t flat_index(const VectorModeIndex& a) {
    return static_cast<std::size_t>(3 * (a.ell * a.ell + a.ell + a.m) + (a.i + 1));
}

std::size_t flat_index(const TensorModeIndex& a) {
    return static_cast<std::size_t>(9 * (a.u * a.u + a.u + a.w) + 3 * (a.i + 1) + (a.j + 1));
}

namespace {

int degree_of_harmonic(int sh) {
    int ell = static_cast<int>(std::sqrt(static_cast<double>(sh)));
    while ((ell + 1) * (ell + 1) <= sh) ++ell;
    while (ell * ell > sh) --ell;
    return ell;
}

}  // namespace

VectorModeIndex vector_mode_at(std::size_t flat) {
    const int i = static_cast<int>(flat % 3) - 1;
    const int sh = static_cast<int>(flat / 3);
    const int ell = degree_of_harmonic(sh);
    return VectorModeIndex(ell, sh - ell * ell - ell, i);
}

TensorModeIndex tensor_mode_at(std::size_t flat) {
    const int j = static_cast<int>(flat % 3) - 1;
    const int i = static_cast<int>((flat / 3) % 3) - 1;
    const int sh = static_cast<int>(flat / 9);
    const int u = degree_of_harmonic(sh);
    return TensorModeIndex(u, sh - u * u - u, i, j);
}

namespace {

// Real value of i^(ell - ell') for even differences.
double even_phase(int dl) {
    const int h = dl / 2;
    return (h % 2 == 0) ? 1.0 : -1.0;
}

// Coupling-matrix accessors for a fixed (ell_small; ell, ell') pair.
struct PairCouplings {
    const DenseMatrix* g0 = nullptr;  // rows 1
    const DenseMatrix* g2 = nullptr;  // rows 5
    const DenseMatrix* g4 = nullptr;  // rows 9
    int n2 = 0;                       // 2 ell' + 1
    double g0_00 = 0.0;
    double g2_00 = 0.0;
    double g4_00 = 0.0;

    PairCouplings(int l, int lp) : n2(2 * lp + 1) {
        auto& table = CouplingTable::instance();
        g0 = table.matrix(0, l, lp);
        g2 = table.matrix(2, l, lp);
        g4 = table.matrix(4, l, lp);
        const std::size_t col00 = static_cast<std::size_t>(l * n2 + lp);
        if (g0) g0_00 = (*g0)(0, col00);
        if (g2) g2_00 = (*g2)(2, col00);
        if (g4) g4_00 = (*g4)(4, col00);
    }

    double at(const DenseMatrix* m, int rows_off, int t, int w, int wp, int l, int lp) const {
        return (*m)(static_cast<std::size_t>(t + rows_off),
                    static_cast<std::size_t>((w + l) * n2 + (wp + lp)));
    }
};

double b_vector_impl(const PairCouplings& pc, int l, int m, int i, int lp, int mp, int j,
                     int family) {
    if ((l + lp) % 2 != 0) return 0.0;
    const auto& ct = coupled_tensors();
    const double pref = even_phase(l - lp) * std::sqrt((2.0 * l + 1.0) * (2.0 * lp + 1.0));
    double val = 0.0;
    if (pc.g0 && i == j) val += (1.0 / 3.0) * pc.at(pc.g0, 0, 0, m, mp, l, lp) * pc.g0_00;
    if (pc.g2 && pc.g2_00 != 0.0) {
        double s = 0.0;
        for (int n = -2; n <= 2; ++n) {
            const double gij = ct.g2[n + 2][i + 1][j + 1];
            if (gij == 0.0) continue;
            s += gij * pc.at(pc.g2, 2, n, -m, -mp, l, lp);
        }
        const double c2 = (family == 1) ? -1.0 / (5.0 * std::sqrt(6.0))
                                        : std::sqrt(2.0) / (5.0 * std::sqrt(3.0));
        val += c2 * pc.g2_00 * s;
    }
    return pref * val;
}

struct TensorFamilyCoef {
    double dd = 0.0;    // delta_ij delta_lm with g0 pair
    double gpair = 0.0; // sum_n g2(n,ij) g2(n,lm) with g0 pair
    double t21 = 0.0;   // sqrt(6) T21 combination against g2 couplings
    double t22 = 0.0;   // T22 combination against g2 couplings
    double t41 = 0.0;   // T41 combination against g4 couplings
};

TensorFamilyCoef tensor_family_coef(int family, double v1, double v2) {
    TensorFamilyCoef c;
    const double s2 = std::sqrt(2.0), s6 = std::sqrt(6.0), s7 = std::sqrt(7.0), s35 = std::sqrt(35.0);
    switch (family) {
        case 1:
            c.gpair = 2.0 / 5.0;
            c.t22 = s2 / (5.0 * s7);
            c.t41 = -4.0 * s2 / (9.0 * s35);
            break;
        case 2:
            c.gpair = 4.0 / 15.0;
            c.t22 = -4.0 * s2 / (15.0 * s7);
            c.t41 = 2.0 * s2 / (27.0 * s35);
            break;
        case 3: {
            const double a = v1 + 4.0 * v2;
            c.dd = (a + 1.0) / 9.0;
            c.gpair = (2.0 - a) / 15.0;
            c.t21 = (-4.0 * v1 + 2.0 * v2 + 2.0) / (15.0 * s6) * s6;  // folded T21 normalization
            c.t22 = s2 * (2.0 - a) / (15.0 * s7);
            c.t41 = s2 * (2.0 - a) / (9.0 * s35);
            break;
        }
        default:
            throw std::domain_error("b_tensor: family must be 1, 2 or 3");
    }
    return c;
}

double b_tensor_impl(const PairCouplings& pc, int u, int w, int i, int j, int up, int wp, int l,
                     int m, const TensorFamilyCoef& cf) {
    if ((u + up) % 2 != 0) return 0.0;
    const auto& ct = coupled_tensors();
    const double pref = even_phase(u - up) * std::sqrt((2.0 * u + 1.0) * (2.0 * up + 1.0));
    double val = 0.0;
    if (pc.g0) {
        const double g0pair = pc.at(pc.g0, 0, 0, w, wp, u, up) * pc.g0_00;
        if (g0pair != 0.0) {
            if (cf.dd != 0.0 && i == j && l == m) val += cf.dd * g0pair;
            val += cf.gpair * ct.g2pair.at(i, j, l, m) * g0pair;
        }
    }
    if (pc.g2 && pc.g2_00 != 0.0) {
        double s = 0.0;
        for (int t = -2; t <= 2; ++t) {
            const double gw = pc.at(pc.g2, 2, t, -w, -wp, u, up);
            if (gw == 0.0) continue;
            double inner = cf.t22 * ct.t22[static_cast<std::size_t>(t + 2)].at(i, j, l, m);
            if (cf.t21 != 0.0) inner += cf.t21 * ct.t21[static_cast<std::size_t>(t + 2)].at(i, j, l, m);
            s += gw * inner;
        }
        val += pc.g2_00 * s;
    }
    if (pc.g4 && pc.g4_00 != 0.0 && cf.t41 != 0.0) {
        double s = 0.0;
        for (int t = -4; t <= 4; ++t) {
            const double gw = pc.at(pc.g4, 4, t, -w, -wp, u, up);
            if (gw == 0.0) continue;
            s += gw * ct.t41[static_cast<std::size_t>(t + 4)].at(i, j, l, m);
        }
        val += cf.t41 * pc.g4_00 * s;
    }
    return pref * val;
}

}  // namespace

double b_vector(const VectorModeIndex& a, const VectorModeIndex& b, int family) {
    if (family != 1 && family != 2) throw std::domain_error("b_vector: family must be 1 or 2");
    PairCouplings pc(a.ell, b.ell);
    return b_vector_impl(pc, a.ell, a.m, a.i, b.ell, b.m, b.i, family);
}

double b_tensor(const TensorModeIndex& a, const TensorModeIndex& b, int family) {
    if (family != 1 && family != 2) throw std::domain_error("b_tensor: family must be 1 or 2");
    PairCouplings pc(a.u, b.u);
    return b_tensor_impl(pc, a.u, a.w, a.i, a.j, b.u, b.w, b.i, b.j, tensor_family_coef(family, 0, 0));
}

double b_tensor3(const TensorModeIndex& a, const TensorModeIndex& b, double v1, double v2) {
    PairCouplings pc(a.u, b.u);
    return b_tensor_impl(pc, a.u, a.w, a.i, a.j, b.u, b.w, b.i, b.j, tensor_family_coef(3, v1, v2));
}

const char* to_string(BKind k) {
    switch (k) {
        case BKind::vector1: return "vector1";
        case BKind::vector2: return "vector2";
        case BKind::tensor1: return "tensor1";
        case BKind::tensor2: return "tensor2";
        case BKind::tensor3: return "tensor3";
    }
    return "?";
}

BKind bkind_from_string(const std::string& s) {
    if (s == "vector1") return BKind::vector1;
    if (s == "vector2") return BKind::vector2;
    if (s == "tensor1") return BKind::tensor1;
    if (s == "tensor2") return BKind::tensor2;
    if (s == "tensor3") return BKind::tensor3;
    throw std::domain_error("unknown mode-covariance kind: " + s);
}

ModeCovariance assemble(BKind kind, int lmax, const model::EllipseCoords& v) {
    if (lmax < 0) throw std::domain_error("assemble: lmax must be >= 0");
    CouplingTable::instance().prefill_mode_families(lmax + 2);

    ModeCovariance out;
    out.kind = kind;
    out.lmax = lmax;
    out.v = v;

    const bool vector_kind = (kind == BKind::vector1 || kind == BKind::vector2);
    const std::size_t n = vector_kind ? vector_mode_count(lmax) : tensor_mode_count(lmax);
    out.entries = DenseMatrix(n, n);

    const int family = (kind == BKind::vector1 || kind == BKind::tensor1) ? 1
                       : (kind == BKind::vector2 || kind == BKind::tensor2) ? 2
                                                                            : 3;
    const TensorFamilyCoef cf =
        vector_kind ? TensorFamilyCoef{} : tensor_family_coef(family, v.v1, v.v2);

    for (int l = 0; l <= lmax; ++l) {
        for (int lp = l % 2; lp <= lmax; lp += 2) {  // odd differences vanish
            PairCouplings pc(l, lp);
            if (vector_kind) {
                for (int m = -l; m <= l; ++m)
                    for (int mp = -lp; mp <= lp; ++mp)
                        for (int i = -1; i <= 1; ++i)
                            for (int j = -1; j <= 1; ++j) {
                                const double val = b_vector_impl(pc, l, m, i, lp, mp, j, family);
                                out.entries(flat_index(VectorModeIndex(l, m, i)),
                                            flat_index(VectorModeIndex(lp, mp, j))) = val;
                            }
            } else {
                for (int w = -l; w <= l; ++w)
                    for (int wp = -lp; wp <= lp; ++wp)
                        for (int i = -1; i <= 1; ++i)
                            for (int j = -1; j <= 1; ++j)
                                for (int li = -1; li <= 1; ++li)
                                    for (int mi = -1; mi <= 1; ++mi) {
                                        const double val =
                                            b_tensor_impl(pc, l, w, i, j, lp, wp, li, mi, cf);
                                        out.entries(flat_index(TensorModeIndex(l, w, i, j)),
                                                    flat_index(TensorModeIndex(lp, wp, li, mi))) = val;
                                    }
            }
        }
    }

    const double asym = out.entries.max_asymmetry();
    if (asym > 1e-12 * std::max(1.0, out.entries.max_abs()))
        throw std::logic_error("assemble: mode covariance not symmetric; coefficient bug");
    // Exact symmetrization so the factorization sees one consistent matrix.
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r + 1; c < n; ++c) {
            const double s = 0.5 * (out.entries(r, c) + out.entries(c, r));
            out.entries(r, c) = s;
            out.entries(c, r) = s;
        }
    return out;
}

namespace {

// One fixed-order factorization pass in extended precision.  Exact null
// directions give zero columns.  With ridge > 0 every retained pivot is
// inflated, which keeps the whole pivot stream positive on matrices whose
// spectrum runs continuously into the noise floor; the reconstruction then
// holds up to the ridge.  Returns false in strict mode when a pivot enters
// the numerically unsafe zone.
bool cholesky_pass(const DenseMatrix& a, double scale, double neg_tol, long double ridge,
                   std::vector<long double>& L) {
    const std::size_t n = a.rows();
    const long double null_floor = 1e-14L * scale;
    const long double danger = 1e-11L * scale;
    L.assign(n * n, 0.0L);
    for (std::size_t k = 0; k < n; ++k) {
        long double d = a(k, k);
        for (std::size_t j = 0; j < k; ++j) d -= L[k * n + j] * L[k * n + j];
        if (d < -static_cast<long double>(neg_tol) * scale)
            throw FactorizationError("semidefinite_cholesky: negative pivot beyond tolerance");
        if (ridge == 0.0L && d > null_floor && d < danger) return false;  // unsafe strict pivot
        if (ridge == 0.0L && d < -1e-13L * scale) return false;           // drift building up
        if (d <= null_floor) continue;                                    // zero column
        const long double lkk = std::sqrt(d + ridge);
        L[k * n + k] = lkk;
        for (std::size_t i = k + 1; i < n; ++i) {
            long double s = a(i, k);
            for (std::size_t j = 0; j < k; ++j) s -= L[i * n + j] * L[k * n + j];
            L[i * n + k] = s / lkk;
        }
    }
    return true;
}

}  // namespace

DenseMatrix semidefinite_cholesky(const DenseMatrix& a, double neg_tol) {
    if (a.rows() != a.cols()) throw std::domain_error("semidefinite_cholesky: matrix not square");
    const std::size_t n = a.rows();
    double scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) scale = std::max(scale, std::abs(a(k, k)));
    if (scale == 0.0) scale = 1.0;

    std::vector<long double> L;
    if (!cholesky_pass(a, scale, neg_tol, 0.0L, L))
        cholesky_pass(a, scale, neg_tol, 1e-12L * scale, L);

    DenseMatrix out(n, n);
    for (std::size_t k = 0; k < n * n; ++k) out.data()[k] = static_cast<double>(L[k]);
    return out;
}

DenseMatrix semidefinite_cholesky(const ModeCovariance& c, double neg_tol) {
    return semidefinite_cholesky(c.entries, neg_tol);
}

namespace {

// j_ell(lambda r) S_ell^m(dir) for all modes of one point, harmonic-major.
std::vector<double> radial_harmonic_profile(const SpherePoint& p, double lambda, int lmax) {
    std::vector<double> sh, j;
    specfun::real_spherical_harmonic_all(lmax, p.dir, sh);
    specfun::spherical_bessel_array(lmax, lambda * p.r, j);
    std::vector<double> out(sh.size());
    for (int l = 0; l <= lmax; ++l)
        for (int m = -l; m <= l; ++m) {
            const std::size_t k = static_cast<std::size_t>(l * l + l + m);
            out[k] = j[static_cast<std::size_t>(l)] * sh[k];
        }
    return out;
}

}  // namespace

Mat3 series_vector_correlation(const model::VectorModel& m, const SpherePoint& x,
                               const SpherePoint& y, int lmax) {
    Mat3 out;
    for (int family = 1; family <= 2; ++family) {
        const ModeCovariance cov =
            assemble(family == 1 ? BKind::vector1 : BKind::vector2, lmax);
        const auto& phi = (family == 1) ? m.phi1 : m.phi2;
        for (const auto& atom : phi.atoms()) {
            const auto px = radial_harmonic_profile(x, atom.lambda, lmax);
            const auto py = radial_harmonic_profile(y, atom.lambda, lmax);
            const std::size_t nsh = px.size();
            for (std::size_t ax = 0; ax < nsh; ++ax)
                for (std::size_t ay = 0; ay < nsh; ++ay) {
                    const double geom = px[ax] * py[ay];
                    if (geom == 0.0) continue;
                    for (int i = -1; i <= 1; ++i)
                        for (int j = -1; j <= 1; ++j)
                            out(i, j) += atom.mass * geom *
                                         cov.entries(3 * ax + static_cast<std::size_t>(i + 1),
                                                     3 * ay + static_cast<std::size_t>(j + 1));
                }
        }
    }
    Mat3 scaled = out;
    scaled *= specfun::kFourPi;
    return scaled;
}

correlation::Rank4Tensor series_tensor_correlation(const model::TensorModel& m, const SpherePoint& x,
                                                   const SpherePoint& y, int lmax) {
    correlation::Rank4Tensor out;
    auto accumulate = [&](const ModeCovariance& cov, double lambda, double mass) {
        const auto px = radial_harmonic_profile(x, lambda, lmax);
        const auto py = radial_harmonic_profile(y, lambda, lmax);
        const std::size_t nsh = px.size();
        for (std::size_t ax = 0; ax < nsh; ++ax)
            for (std::size_t ay = 0; ay < nsh; ++ay) {
                const double geom = px[ax] * py[ay];
                if (geom == 0.0) continue;
                for (int i = -1; i <= 1; ++i)
                    for (int j = -1; j <= 1; ++j)
                        for (int l = -1; l <= 1; ++l)
                            for (int mm = -1; mm <= 1; ++mm)
                                out.at(i, j, l, mm) +=
                                    mass * geom *
                                    cov.entries(9 * ax + static_cast<std::size_t>(3 * (i + 1) + (j + 1)),
                                                9 * ay + static_cast<std::size_t>(3 * (l + 1) + (mm + 1)));
            }
    };

    for (int family = 1; family <= 2; ++family) {
        const ModeCovariance cov = assemble(family == 1 ? BKind::tensor1 : BKind::tensor2, lmax);
        const auto& phi = (family == 1) ? m.phi1 : m.phi2;
        for (const auto& atom : phi.atoms()) accumulate(cov, atom.lambda, atom.mass);
    }
    for (std::size_t k = 0; k < m.phi3.size(); ++k) {
        const ModeCovariance cov = assemble(BKind::tensor3, lmax, m.v[k]);
        accumulate(cov, m.phi3.atoms()[k].lambda, m.phi3.atoms()[k].mass);
    }
    out *= specfun::kFourPi;
    return out;
}

}  // namespace isofield::bmodes
