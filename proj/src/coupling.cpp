#include "isofield/coupling.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace isofield::coupling {

namespace {

using ldcomplex = std::complex<long double>;

// Factorials as long doubles; enough headroom for degrees well past the
// supported range.
const long double* factorial_table() {
    static long double table[321] = {0};
    static bool init = false;
    if (!init) {
        table[0] = 1.0L;
        for (int i = 1; i <= 320; ++i) table[i] = table[i - 1] * static_cast<long double>(i);
        init = true;
    }
    return table;
}

long double fact(int n) { return factorial_table()[n]; }

bool triangle_ok(int l, int l1, int l2) { return l >= std::abs(l1 - l2) && l <= l1 + l2; }

// Complex Clebsch-Gordan coefficient <l1 m1 l2 m2 | L M> in the
// Condon-Shortley convention (Racah's closed form).
long double clebsch_gordan(int l1, int m1, int l2, int m2, int L, int M) {
    if (M != m1 + m2) return 0.0L;
    if (!triangle_ok(L, l1, l2)) return 0.0L;
    if (std::abs(m1) > l1 || std::abs(m2) > l2 || std::abs(M) > L) return 0.0L;

    const long double pref =
        std::sqrt(static_cast<long double>(2 * L + 1) * fact(l1 + l2 - L) * fact(l1 - l2 + L) *
                  fact(-l1 + l2 + L) / fact(l1 + l2 + L + 1)) *
        std::sqrt(fact(l1 + m1) * fact(l1 - m1) * fact(l2 + m2) * fact(l2 - m2) * fact(L + M) *
                  fact(L - M));

    long double sum = 0.0L;
    const int kmin = std::max({0, l2 - L - m1, l1 - L + m2});
    const int kmax = std::min({l1 + l2 - L, l1 - m1, l2 + m2});
    for (int k = kmin; k <= kmax; ++k) {
        const long double denom = fact(k) * fact(l1 + l2 - L - k) * fact(l1 - m1 - k) *
                                  fact(l2 + m2 - k) * fact(L - l1 - m2 + k) * fact(L - l2 + m1 + k);
        sum += ((k % 2 == 0) ? 1.0L : -1.0L) / denom;
    }
    return pref * sum;
}

// Rows of the unitary map from complex (Condon-Shortley) to real harmonics:
// S^m = sum_mu u(m, mu) Y^mu, with at most two nonzero entries per row.
struct URow {
    int mu[2];
    ldcomplex coef[2];
    int count;
};

URow u_row(int m) {
    const long double inv_sqrt2 = 0.70710678118654752440L;
    URow r{};
    if (m == 0) {
        r.mu[0] = 0;
        r.coef[0] = ldcomplex(1.0L, 0.0L);
        r.count = 1;
    } else if (m > 0) {
        const long double sign = (m % 2 == 0) ? 1.0L : -1.0L;
        r.mu[0] = m;
        r.coef[0] = ldcomplex(sign * inv_sqrt2, 0.0L);
        r.mu[1] = -m;
        r.coef[1] = ldcomplex(inv_sqrt2, 0.0L);
        r.count = 2;
    } else {
        const int am = -m;
        const long double sign = (am % 2 == 0) ? 1.0L : -1.0L;
        r.mu[0] = am;
        r.coef[0] = ldcomplex(0.0L, -sign * inv_sqrt2);
        r.mu[1] = -am;
        r.coef[1] = ldcomplex(0.0L, inv_sqrt2);
        r.count = 2;
    }
    return r;
}

// Dense build of one coupling matrix.  The complex coupling tensor is mapped
// into the real basis; for even ell+ell1+ell2 the result is purely real, for
// odd sums purely imaginary up to a global unit phase that is stripped.  The
// remaining global sign per triple is fixed by the convention documented in
// the header.
std::unique_ptr<DenseMatrix> build_matrix(int l, int l1, int l2) {
    const int n1 = 2 * l1 + 1, n2 = 2 * l2 + 1, nl = 2 * l + 1;
    auto out = std::make_unique<DenseMatrix>(static_cast<std::size_t>(nl),
                                             static_cast<std::size_t>(n1 * n2));

    // Complex coefficients <l1 mu1 l2 mu2 | l mu>, mu = mu1 + mu2.
    std::vector<long double> cg(static_cast<std::size_t>(n1 * n2), 0.0L);
    for (int mu1 = -l1; mu1 <= l1; ++mu1)
        for (int mu2 = -l2; mu2 <= l2; ++mu2)
            if (std::abs(mu1 + mu2) <= l)
                cg[static_cast<std::size_t>((mu1 + l1) * n2 + (mu2 + l2))] =
                    clebsch_gordan(l1, mu1, l2, mu2, l, mu1 + mu2);

    const bool even = ((l + l1 + l2) % 2 == 0);
    long double max_residual = 0.0L;
    for (int m = -l; m <= l; ++m) {
        // Component indices are negated relative to the plain real harmonic
        // order; this matches the basis in which the degree-1 representation
        // is the rotation matrix itself.
        const URow ur = u_row(-m);
        for (int m1 = -l1; m1 <= l1; ++m1) {
            const URow ur1 = u_row(-m1);
            for (int m2 = -l2; m2 <= l2; ++m2) {
                const URow ur2 = u_row(-m2);
                ldcomplex acc(0.0L, 0.0L);
                for (int a = 0; a < ur.count; ++a)
                    for (int b = 0; b < ur1.count; ++b)
                        for (int c = 0; c < ur2.count; ++c) {
                            if (ur.mu[a] != ur1.mu[b] + ur2.mu[c]) continue;
                            const long double v =
                                cg[static_cast<std::size_t>((ur1.mu[b] + l1) * n2 + (ur2.mu[c] + l2))];
                            acc += std::conj(ur.coef[a]) * ur1.coef[b] * ur2.coef[c] * v;
                        }
                const long double wanted = even ? acc.real() : acc.imag();
                const long double residual = even ? acc.imag() : acc.real();
                max_residual = std::max(max_residual, std::abs(residual));
                (*out)(static_cast<std::size_t>(m + l),
                       static_cast<std::size_t>((m1 + l1) * n2 + (m2 + l2))) =
                    static_cast<double>(wanted);
            }
        }
    }
    if (max_residual > 1e-10L)
        throw std::logic_error("coupling: real/imaginary split failed; basis convention bug");

    // Global sign per triple.
    double pivot = 0.0;
    if (even) {
        pivot = (*out)(static_cast<std::size_t>(l), static_cast<std::size_t>(l1 * n2 + l2));
    } else {
        for (double v : out->data()) {
            if (std::abs(v) > 1e-12) {
                pivot = v;
                break;
            }
        }
    }
    if (pivot < 0.0)
        for (double& v : out->data()) v = -v;
    return out;
}

}  // namespace

CouplingKey::CouplingKey(int ell_, int m_, int ell1_, int m1_, int ell2_, int m2_)
    : ell(ell_), m(m_), ell1(ell1_), m1(m1_), ell2(ell2_), m2(m2_) {
    if (ell < 0 || ell1 < 0 || ell2 < 0 || std::abs(m) > ell || std::abs(m1) > ell1 ||
        std::abs(m2) > ell2)
        throw std::domain_error("CouplingKey: invalid index set");
}

CouplingTable& CouplingTable::instance() {
    static CouplingTable table;
    return table;
}

const DenseMatrix* CouplingTable::matrix(int ell, int ell1, int ell2) {
    if (!triangle_ok(ell, ell1, ell2)) return nullptr;
    return get_or_build(ell, ell1, ell2);
}

const DenseMatrix* CouplingTable::get_or_build(int ell, int ell1, int ell2) {
    const std::int64_t key = (static_cast<std::int64_t>(ell) * 1000 + ell1) * 1000 + ell2;
    {
        std::shared_lock lock(mutex_);
        auto it = map_.find(key);
        if (it != map_.end()) return it->second.get();
    }
    auto built = build_matrix(ell, ell1, ell2);
    std::unique_lock lock(mutex_);
    auto [it, inserted] = map_.emplace(key, std::move(built));
    return it->second.get();
}

void CouplingTable::prefill(int lmax) {
    for (int l1 = 0; l1 <= lmax; ++l1)
        for (int l2 = 0; l2 <= lmax; ++l2)
            for (int l = std::abs(l1 - l2); l <= std::min(lmax, l1 + l2); ++l) get_or_build(l, l1, l2);
}

void CouplingTable::prefill_mode_families(int lmax) {
    for (int l : {0, 2, 4})
        for (int l1 = 0; l1 <= lmax; ++l1)
            for (int l2 = 0; l2 <= lmax; ++l2)
                if (triangle_ok(l, l1, l2)) get_or_build(l, l1, l2);
    get_or_build(0, 1, 1);
    get_or_build(2, 1, 1);
    get_or_build(2, 2, 2);
    get_or_build(4, 2, 2);
}

double gg(const CouplingKey& key) {
    const DenseMatrix* m = CouplingTable::instance().matrix(key.ell, key.ell1, key.ell2);
    if (m == nullptr) return 0.0;
    const int n2 = 2 * key.ell2 + 1;
    return (*m)(static_cast<std::size_t>(key.m + key.ell),
                static_cast<std::size_t>((key.m1 + key.ell1) * n2 + (key.m2 + key.ell2)));
}

DenseMatrix gg_matrix(int ell, int ell1, int ell2) {
    if (ell < 0 || ell1 < 0 || ell2 < 0) throw std::domain_error("gg_matrix: negative degree");
    const DenseMatrix* m = CouplingTable::instance().matrix(ell, ell1, ell2);
    if (m == nullptr) return DenseMatrix();
    return *m;
}

double wigner_product_expand(int ell1, int m1, int n1, int ell2, int m2, int n2,
                             const specfun::Rotation& k) {
    if (std::abs(m1) > ell1 || std::abs(n1) > ell1 || std::abs(m2) > ell2 || std::abs(n2) > ell2)
        throw std::domain_error("wigner_product_expand: index out of range");
    specfun::WignerMatrixSet d(k, ell1 + ell2);
    double total = 0.0;
    for (int l = std::abs(ell1 - ell2); l <= ell1 + ell2; ++l) {
        const DenseMatrix* g = CouplingTable::instance().matrix(l, ell1, ell2);
        const int w2 = 2 * ell2 + 1;
        const std::size_t col_m = static_cast<std::size_t>((m1 + ell1) * w2 + (m2 + ell2));
        const std::size_t col_n = static_cast<std::size_t>((n1 + ell1) * w2 + (n2 + ell2));
        for (int q1 = -l; q1 <= l; ++q1) {
            const double gm = (*g)(static_cast<std::size_t>(q1 + l), col_m);
            if (gm == 0.0) continue;
            for (int q2 = -l; q2 <= l; ++q2) {
                const double gn = (*g)(static_cast<std::size_t>(q2 + l), col_n);
                if (gn == 0.0) continue;
                total += gm * d.entry(l, q1, q2) * gn;
            }
        }
    }
    return total;
}

double wigner_product_expand(int ell1, int m1, int n1, int ell2, int m2, int n2,
                             const specfun::AngularPair& a) {
    return wigner_product_expand(ell1, m1, n1, ell2, m2, n2, specfun::Rotation::to_direction(a));
}

}  // namespace isofield::coupling
