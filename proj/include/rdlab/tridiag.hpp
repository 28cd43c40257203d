#pragma once

#include <span>
#include <vector>

namespace rdlab {

// Tridiagonal solver with a cached Thomas factorization; optional cyclic
// corner entries handled by a rank-one (Sherman-Morrison) correction.
// Intended for diagonally dominant implicit-diffusion matrices, so no
// pivoting is performed.
class TridiagFactor {
  public:
    void init(std::span<const double> lower, std::span<const double> diag,
              std::span<const double> upper);
    // corner_ur = A[0][n-1], corner_ll = A[n-1][0]
    void init_cyclic(std::span<const double> lower, std::span<const double> diag,
                     std::span<const double> upper, double corner_ur, double corner_ll);
    void solve(std::span<double> rhs) const; // in place

  private:
    void factor(std::span<const double> lower, std::span<const double> diag,
                std::span<const double> upper);

    int n_ = 0;
    bool cyclic_ = false;
    std::vector<double> w_;    // forward elimination multipliers
    std::vector<double> invb_; // reciprocal pivots
    std::vector<double> c_;    // upper diagonal copy
    std::vector<double> z_;    // A'^{-1} u for the rank-one correction
    double v_last_ = 0.0;      // v = (1, 0, ..., 0, v_last)
    double denom_ = 1.0;       // 1 + v.z
};

} // namespace rdlab
