#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace poslab {

/// Tridiagonal matrix in three-band storage; lower[i] couples rows i+1 and i,
/// upper[i] couples rows i and i+1.
struct Tridiagonal {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    [[nodiscard]] std::size_t size() const { return diag.size(); }
    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;
};

/// LU factorization without pivoting (Thomas algorithm). Intended for the
/// M-matrices and positive definite systems built by the library; a vanishing
/// pivot raises NumericalError.
class TridiagonalLU {
public:
    explicit TridiagonalLU(const Tridiagonal& a);

    [[nodiscard]] std::size_t size() const { return pivot_.size(); }
    [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const;

private:
    std::vector<double> lower_;   // multipliers
    std::vector<double> pivot_;
    std::vector<double> upper_;
};

}  // namespace poslab
