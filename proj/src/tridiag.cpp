#include "rdlab/tridiag.hpp"
#include "rdlab/errors.hpp"

#include <cmath>

namespace rdlab {

void TridiagFactor::factor(std::span<const double> lower, std::span<const double> diag,
                           std::span<const double> upper) {
    n_ = static_cast<int>(diag.size());
    if (n_ < 3)
        throw ConfigError("tridiagonal system needs at least 3 rows");
    w_.assign(static_cast<size_t>(n_), 0.0);
    invb_.assign(static_cast<size_t>(n_), 0.0);
    c_.assign(upper.begin(), upper.end());

    double bp = diag[0];
    invb_[0] = 1.0 / bp;
    for (int i = 1; i < n_; ++i) {
        const double w = lower[static_cast<size_t>(i)] * invb_[static_cast<size_t>(i - 1)];
        w_[static_cast<size_t>(i)] = w;
        bp = diag[static_cast<size_t>(i)] - w * c_[static_cast<size_t>(i - 1)];
        if (bp == 0.0 || !std::isfinite(bp))
            throw ConfigError("tridiagonal factorization broke down");
        invb_[static_cast<size_t>(i)] = 1.0 / bp;
    }
}

void TridiagFactor::init(std::span<const double> lower, std::span<const double> diag,
                         std::span<const double> upper) {
    cyclic_ = false;
    factor(lower, diag, upper);
}

void TridiagFactor::init_cyclic(std::span<const double> lower, std::span<const double> diag,
                                std::span<const double> upper, double corner_ur,
                                double corner_ll) {
    cyclic_ = true;
    const int n = static_cast<int>(diag.size());
    // A = A' + u v^T with u = (gamma, 0, ..., 0, corner_ll),
    // v = (1, 0, ..., 0, corner_ur/gamma); gamma = -diag[0] keeps A' well conditioned
    const double gamma = -diag[0];
    std::vector<double> d2(diag.begin(), diag.end());
    d2[0] -= gamma;
    d2[static_cast<size_t>(n - 1)] -= corner_ur * corner_ll / gamma;
    factor(lower, d2, upper);

    z_.assign(static_cast<size_t>(n), 0.0);
    z_[0] = gamma;
    z_[static_cast<size_t>(n - 1)] = corner_ll;
    for (int i = 1; i < n; ++i)
        z_[static_cast<size_t>(i)] -= w_[static_cast<size_t>(i)] * z_[static_cast<size_t>(i - 1)];
    z_[static_cast<size_t>(n - 1)] *= invb_[static_cast<size_t>(n - 1)];
    for (int i = n - 2; i >= 0; --i)
        z_[static_cast<size_t>(i)] = (z_[static_cast<size_t>(i)] -
                                      c_[static_cast<size_t>(i)] * z_[static_cast<size_t>(i + 1)]) *
                                     invb_[static_cast<size_t>(i)];
    v_last_ = corner_ur / gamma;
    denom_ = 1.0 + z_[0] + v_last_ * z_[static_cast<size_t>(n - 1)];
    if (denom_ == 0.0 || !std::isfinite(denom_))
        throw ConfigError("cyclic tridiagonal correction is singular");
}

void TridiagFactor::solve(std::span<double> rhs) const {
    const int n = n_;
    for (int i = 1; i < n; ++i)
        rhs[static_cast<size_t>(i)] -= w_[static_cast<size_t>(i)] * rhs[static_cast<size_t>(i - 1)];
    rhs[static_cast<size_t>(n - 1)] *= invb_[static_cast<size_t>(n - 1)];
    for (int i = n - 2; i >= 0; --i)
        rhs[static_cast<size_t>(i)] = (rhs[static_cast<size_t>(i)] -
                                       c_[static_cast<size_t>(i)] * rhs[static_cast<size_t>(i + 1)]) *
                                      invb_[static_cast<size_t>(i)];
    if (cyclic_) {
        const double vy = rhs[0] + v_last_ * rhs[static_cast<size_t>(n - 1)];
        const double s = vy / denom_;
        for (int i = 0; i < n; ++i)
            rhs[static_cast<size_t>(i)] -= s * z_[static_cast<size_t>(i)];
    }
}

} // namespace rdlab
