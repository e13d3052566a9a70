#include "poslab/tridiagonal.hpp"

#include <cmath>
#include <string>

#include "poslab/errors.hpp"

namespace poslab {

std::vector<double> Tridiagonal::multiply(std::span<const double> x) const {
    const std::size_t n = size();
    if (x.size() != n) throw InvalidArgument("tridiagonal multiply: size mismatch");
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) v += lower[i - 1] * x[i - 1];
        if (i + 1 < n) v += upper[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

TridiagonalLU::TridiagonalLU(const Tridiagonal& a) {
    const std::size_t n = a.size();
    if (n == 0 || a.lower.size() + 1 != n || a.upper.size() + 1 != n) {
        throw InvalidArgument("malformed tridiagonal matrix");
    }
    pivot_.resize(n);
    lower_.resize(n - 1);
    upper_ = a.upper;
    double scale = 0.0;
    for (double d : a.diag) scale = std::max(scale, std::abs(d));
    pivot_[0] = a.diag[0];
    for (std::size_t i = 1; i <= n; ++i) {
        if (!(std::abs(pivot_[i - 1]) > 1e-300) || std::abs(pivot_[i - 1]) < 1e-15 * scale) {
            throw NumericalError("singular tridiagonal system (pivot " + std::to_string(i - 1) + ")");
        }
        if (i == n) break;
        lower_[i - 1] = a.lower[i - 1] / pivot_[i - 1];
        pivot_[i] = a.diag[i] - lower_[i - 1] * upper_[i - 1];
    }
}

std::vector<double> TridiagonalLU::solve(std::span<const double> rhs) const {
    const std::size_t n = size();
    if (rhs.size() != n) throw InvalidArgument("tridiagonal solve: size mismatch");
    std::vector<double> x(rhs.begin(), rhs.end());
    for (std::size_t i = 1; i < n; ++i) x[i] -= lower_[i - 1] * x[i - 1];
    x[n - 1] /= pivot_[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (x[i] - upper_[i] * x[i + 1]) / pivot_[i];
    return x;
}

}  // namespace poslab
