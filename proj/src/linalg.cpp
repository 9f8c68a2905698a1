#include "isofield/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace isofield {

double Vec3::norm() const { return std::sqrt(dot(*this)); }

Mat3 Mat3::identity() {
    Mat3 m;
    m(-1, -1) = m(0, 0) = m(1, 1) = 1.0;
    return m;
}

Mat3 Mat3::transpose() const {
    Mat3 t;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) t(i, j) = (*this)(j, i);
    return t;
}

Mat3 Mat3::operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) {
            double s = 0.0;
            for (int k = -1; k <= 1; ++k) s += (*this)(i, k) * o(k, j);
            r(i, j) = s;
        }
    return r;
}

Vec3 Mat3::operator*(const Vec3& v) const {
    Vec3 r;
    for (int i = -1; i <= 1; ++i) {
        double s = 0.0;
        for (int k = -1; k <= 1; ++k) s += (*this)(i, k) * v(k);
        r(i) = s;
    }
    return r;
}

Mat3& Mat3::operator+=(const Mat3& o) {
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += o.c[k];
    return *this;
}

Mat3& Mat3::operator*=(double s) {
    for (double& x : c) x *= s;
    return *this;
}

Mat6& Mat6::operator+=(const Mat6& o) {
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += o.c[k];
    return *this;
}

Mat6& Mat6::operator*=(double s) {
    for (double& x : c) x *= s;
    return *this;
}

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

double DenseMatrix::max_asymmetry() const {
    double m = 0.0;
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = r + 1; c < cols_; ++c)
            m = std::max(m, std::abs((*this)(r, c) - (*this)(c, r)));
    return m;
}

std::vector<double> symmetric_eigenvalues(DenseMatrix a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("symmetric_eigenvalues: matrix not square");
    const std::size_t n = a.rows();
    if (n == 0) return {};

    // Cyclic Jacobi sweeps until off-diagonal mass is negligible.
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-300) break;
        double diag = 0.0;
        for (std::size_t p = 0; p < n; ++p) diag += a(p, p) * a(p, p);
        if (off <= 1e-30 * std::max(diag, 1e-300)) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }

    std::vector<double> ev(n);
    for (std::size_t k = 0; k < n; ++k) ev[k] = a(k, k);
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::vector<double> symmetric_eigenvalues(const Mat6& a) {
    DenseMatrix m(6, 6);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) m(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = a(r, c);
    return symmetric_eigenvalues(std::move(m));
}

double min_eigenvalue(const DenseMatrix& a) { return symmetric_eigenvalues(a).front(); }

double min_eigenvalue(const Mat6& a) { return symmetric_eigenvalues(a).front(); }

}  // namespace isofield
