#pragma once

#include <cstddef>
#include <vector>

namespace tsart::linalg {

// Dense row-major n x k design matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

Matrix zeros(std::size_t rows, std::size_t cols);

// Least squares via Householder QR. Throws on a rank-deficient design.
std::vector<double> lstsq(const Matrix& x, const std::vector<double>& y);

struct OlsFit {
    std::vector<double> beta;
    std::vector<double> std_errors;  // per-coefficient, using s^2 = sse/(n-k)
    double sse = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;
};

OlsFit ols(const Matrix& x, const std::vector<double>& y);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation,
// accurate to about 1e-10 on a, b in (0, 1e4), x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

// Upper tail P(F > f) for an F(d1, d2) variate.
double f_survival(double f, double d1, double d2);

}  // namespace tsart::linalg
