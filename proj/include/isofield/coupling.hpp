#pragma once

#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <unordered_map>

#include "isofield/linalg.hpp"
#include "isofield/specfun.hpp"

namespace isofield::coupling {

/// Index set of one real coupling coefficient g^{m[m1,m2]}_{ell[ell1,ell2]}.
struct CouplingKey {
    int ell, m, ell1, m1, ell2, m2;

    CouplingKey(int ell_, int m_, int ell1_, int m1_, int ell2_, int m2_);
};

/// Real coupling coefficient (Godunov-Gordienko): the coefficient of the
/// degree-ell basis tensor in the product of the degree-ell1 and degree-ell2
/// real basis tensors.  Zero outside the triangle condition
/// |ell1 - ell2| <= ell <= ell1 + ell2.
///
/// Sign convention: g^{0[0,0]}_{ell[ell1,ell2]} > 0 whenever it is nonzero
/// (even ell + ell1 + ell2); for odd sums, where that entry vanishes
/// identically, the first nonzero entry in lexicographic (m, m1, m2) order is
/// made positive.
double gg(const CouplingKey& key);

/// All coefficients for one (ell, ell1, ell2) triple as a dense matrix;
/// rows indexed by m, columns by (m1, m2) with m2 fastest.  Rows are
/// orthonormal.  Empty matrix if the triangle condition fails.
DenseMatrix gg_matrix(int ell, int ell1, int ell2);

/// Process-wide cache of coupling matrices.  Filled lazily under a lock;
/// reads of already-built matrices take a shared lock only.
class CouplingTable {
  public:
    static CouplingTable& instance();

    /// Matrix for one triple; owned by the table, stable address.
    /// Returns nullptr when the triangle condition fails.
    const DenseMatrix* matrix(int ell, int ell1, int ell2);

    /// Build every triangle-admissible triple with all degrees <= lmax.
    void prefill(int lmax);

    /// Build the triples consumed by mode-covariance assembly:
    /// ell in {0, 2, 4} against all ell1, ell2 <= lmax, plus the fixed
    /// low-degree tensors.
    void prefill_mode_families(int lmax);

  private:
    CouplingTable() = default;

    const DenseMatrix* get_or_build(int ell, int ell1, int ell2);

    std::shared_mutex mutex_;
    std::unordered_map<std::int64_t, std::unique_ptr<const DenseMatrix>> map_;
};

/// Product of two real representation entries expanded through coupling
/// coefficients: sum over ell, q1, q2 of
/// g^{q1[m1,m2]} D^ell_{q1 q2}(k) g^{q2[n1,n2]}.  Equals
/// D^{ell1}_{m1 n1}(k) * D^{ell2}_{m2 n2}(k).
double wigner_product_expand(int ell1, int m1, int n1, int ell2, int m2, int n2,
                             const specfun::Rotation& k);
double wigner_product_expand(int ell1, int m1, int n1, int ell2, int m2, int n2,
                             const specfun::AngularPair& a);

}  // namespace isofield::coupling
