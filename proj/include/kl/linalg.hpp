#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace kl {

using Vector = std::vector<double>;

/// Dense row-major matrix. Sizes in this project stay in the low hundreds.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> diag);
    static Matrix from_rows(const std::vector<Vector>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    Vector column(std::size_t j) const;

    Matrix transpose() const;
    /// Returns (A + A^T)/2.
    Matrix symmetrized() const;
    /// Principal submatrix on the given index list (same list for rows and columns).
    Matrix principal(std::span<const std::size_t> idx) const;
    Matrix select_columns(std::span<const std::size_t> idx) const;

    double max_abs() const noexcept;

    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend Matrix operator+(const Matrix& a, const Matrix& b);
    friend Matrix operator-(const Matrix& a, const Matrix& b);
    friend Matrix operator*(double s, const Matrix& a);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Vector operator*(const Matrix& a, std::span<const double> x);
/// A^T x without forming the transpose.
Vector transpose_times(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
Vector add(std::span<const double> a, std::span<const double> b);
Vector sub(std::span<const double> a, std::span<const double> b);
Vector scaled(double s, std::span<const double> a);
/// y += s * x
void axpy(double s, std::span<const double> x, std::span<double> y);
/// Returns a / ||a||; throws on the zero vector.
Vector normalized(std::span<const double> a);
double quad_form(const Matrix& a, std::span<const double> x);

}  // namespace kl
