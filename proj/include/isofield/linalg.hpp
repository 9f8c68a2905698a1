#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace isofield {

/// 3-vector with components indexed by -1, 0, 1.
struct Vec3 {
    std::array<double, 3> c{};

    double& operator()(int i) { return c[static_cast<std::size_t>(i + 1)]; }
    double operator()(int i) const { return c[static_cast<std::size_t>(i + 1)]; }

    double dot(const Vec3& o) const { return c[0] * o.c[0] + c[1] * o.c[1] + c[2] * o.c[2]; }
    double norm() const;
};

/// 3x3 matrix with both indices in -1, 0, 1.
struct Mat3 {
    std::array<double, 9> c{};

    double& operator()(int i, int j) { return c[static_cast<std::size_t>(3 * (i + 1) + (j + 1))]; }
    double operator()(int i, int j) const {
        return c[static_cast<std::size_t>(3 * (i + 1) + (j + 1))];
    }

    static Mat3 identity();
    Mat3 transpose() const;
    Mat3 operator*(const Mat3& o) const;
    Vec3 operator*(const Vec3& v) const;
    Mat3& operator+=(const Mat3& o);
    Mat3& operator*=(double s);
};

/// Symmetric 6x6 matrix in Voigt index order, stored densely (0-based).
struct Mat6 {
    std::array<double, 36> c{};

    double& operator()(int a, int b) { return c[static_cast<std::size_t>(6 * a + b)]; }
    double operator()(int a, int b) const { return c[static_cast<std::size_t>(6 * a + b)]; }

    double trace() const { return c[0] + c[7] + c[14] + c[21] + c[28] + c[35]; }
    Mat6& operator+=(const Mat6& o);
    Mat6& operator*=(double s);
};

/// Dense row-major matrix used for mode covariances and their factors.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    double max_abs() const;
    double max_asymmetry() const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> symmetric_eigenvalues(DenseMatrix a);

std::vector<double> symmetric_eigenvalues(const Mat6& a);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const DenseMatrix& a);
double min_eigenvalue(const Mat6& a);

}  // namespace isofield
