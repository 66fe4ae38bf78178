#include "tsart/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace tsart::linalg {

namespace {

// In-place Householder QR: returns R in the upper triangle of a and the
// transformed right-hand side in y.
void householder_qr(Matrix& a, std::vector<double>& y) {
    const std::size_t n = a.rows;
    const std::size_t k = a.cols;
    for (std::size_t j = 0; j < k; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < n; ++i) norm += a.at(i, j) * a.at(i, j);
        norm = std::sqrt(norm);
        if (norm == 0.0) throw std::invalid_argument("singular design matrix");
        if (a.at(j, j) > 0.0) norm = -norm;
        std::vector<double> v(n - j);
        v[0] = a.at(j, j) - norm;
        for (std::size_t i = j + 1; i < n; ++i) v[i - j] = a.at(i, j);
        double vnorm2 = 0.0;
        for (double t : v) vnorm2 += t * t;
        if (vnorm2 == 0.0) throw std::invalid_argument("singular design matrix");
        a.at(j, j) = norm;
        for (std::size_t i = j + 1; i < n; ++i) a.at(i, j) = 0.0;
        for (std::size_t col = j + 1; col < k; ++col) {
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += v[i - j] * a.at(i, col);
            const double scale = 2.0 * dot / vnorm2;
            for (std::size_t i = j; i < n; ++i) a.at(i, col) -= scale * v[i - j];
        }
        double dot = 0.0;
        for (std::size_t i = j; i < n; ++i) dot += v[i - j] * y[i];
        const double scale = 2.0 * dot / vnorm2;
        for (std::size_t i = j; i < n; ++i) y[i] -= scale * v[i - j];
    }
}

std::vector<double> back_substitute(const Matrix& r, const std::vector<double>& y) {
    const std::size_t k = r.cols;
    std::vector<double> beta(k, 0.0);
    for (std::size_t jj = k; jj-- > 0;) {
        double s = y[jj];
        for (std::size_t m = jj + 1; m < k; ++m) s -= r.at(jj, m) * beta[m];
        const double diag = r.at(jj, jj);
        if (diag == 0.0 || !std::isfinite(diag)) {
            throw std::invalid_argument("singular design matrix");
        }
        beta[jj] = s / diag;
    }
    return beta;
}

// Continued fraction for the incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-14;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

Matrix zeros(std::size_t rows, std::size_t cols) {
    return Matrix{rows, cols, std::vector<double>(rows * cols, 0.0)};
}

std::vector<double> lstsq(const Matrix& x, const std::vector<double>& y) {
    if (x.rows != y.size()) throw std::invalid_argument("row count mismatch");
    if (x.rows < x.cols) throw std::invalid_argument("underdetermined system");
    Matrix a = x;
    std::vector<double> rhs = y;
    householder_qr(a, rhs);
    return back_substitute(a, rhs);
}

OlsFit ols(const Matrix& x, const std::vector<double>& y) {
    OlsFit fit;
    fit.n = x.rows;
    fit.k = x.cols;
    fit.beta = lstsq(x, y);

    double sse = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        double pred = 0.0;
        for (std::size_t j = 0; j < x.cols; ++j) pred += x.at(i, j) * fit.beta[j];
        const double r = y[i] - pred;
        sse += r * r;
    }
    fit.sse = sse;

    if (x.rows <= x.cols) throw std::invalid_argument("no residual degrees of freedom");
    const double s2 = sse / static_cast<double>(x.rows - x.cols);

    // var(beta_j) = s^2 * [(X'X)^{-1}]_{jj}; recover it from R of the QR
    // factorization: (X'X)^{-1} = R^{-1} R^{-T}, so the diagonal entries are
    // the squared row norms of R^{-1}.
    Matrix a = x;
    std::vector<double> rhs = y;
    householder_qr(a, rhs);
    const std::size_t k = x.cols;
    Matrix rinv = zeros(k, k);
    for (std::size_t col = 0; col < k; ++col) {
        std::vector<double> e(k, 0.0);
        e[col] = 1.0;
        for (std::size_t jj = k; jj-- > 0;) {
            double s = e[jj];
            for (std::size_t m = jj + 1; m < k; ++m) s -= a.at(jj, m) * rinv.at(m, col);
            rinv.at(jj, col) = s / a.at(jj, jj);
        }
    }
    fit.std_errors.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double row_norm2 = 0.0;
        for (std::size_t m = j; m < k; ++m) row_norm2 += rinv.at(j, m) * rinv.at(j, m);
        fit.std_errors[j] = std::sqrt(s2 * row_norm2);
    }
    return fit;
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("beta parameters must be positive");
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("beta argument must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_survival(double f, double d1, double d2) {
    if (d1 <= 0.0 || d2 <= 0.0) throw std::invalid_argument("degrees of freedom must be positive");
    if (f <= 0.0) return 1.0;
    return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

}  // namespace tsart::linalg
