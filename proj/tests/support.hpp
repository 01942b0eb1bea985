#pragma once
// Shared helpers for the test programs.

#include "clab/clab.hpp"

#include <Eigen/Eigenvalues>

namespace clab::testing {

inline double rel_diff(const Mat& a, const Mat& b)
{
    return (a - b).norm() / std::max(1.0, b.norm());
}

// Random n x n matrix whose singular values are separated by at least `gap`
// (relative to the largest).
inline Mat gapped_matrix(Rng& rng, Index n, double gap = 0.05)
{
    const Mat u = haar_unitary(rng, n);
    const Mat v = haar_unitary(rng, n);
    Eigen::VectorXd s(n);
    const double g = std::min(gap, 0.5 / static_cast<double>(n));
    double level = 1.0;
    for (Index i = 0; i < n; ++i) {
        s(i) = level;
        level -= g + (1.0 - g * static_cast<double>(n)) / static_cast<double>(n) * uniform01(rng);
    }
    return u * s.cast<cplx>().asDiagonal() * v.adjoint();
}

//
// Singular values from the Hermitian dilation [[0, f], [f^H, 0]], whose
// eigenvalues are the ±s_i. Independent of any SVD routine.
//
inline std::vector<double> dilation_singular_values(const Mat& f)
{
    const Index m = f.rows(), n = f.cols();
    Mat d = Mat::Zero(m + n, m + n);
    d.topRightCorner(m, n) = f;
    d.bottomLeftCorner(n, m) = f.adjoint();
    Eigen::SelfAdjointEigenSolver<Mat> es(d, Eigen::EigenvaluesOnly);
    std::vector<double> out;
    const auto& ev = es.eigenvalues();
    for (Index i = ev.size() - 1; i >= 0 && static_cast<Index>(out.size()) < std::min(m, n); --i)
        out.push_back(std::max(0.0, ev(i)));
    return out;
}

inline double oracle_schatten(const Mat& f, PIndex p)
{
    const auto s = dilation_singular_values(f);
    if (p.is_inf())
        return s.empty() ? 0.0 : s.front();
    // eigenvalues at rounding level of the dilation count as zero
    const double floor = s.empty() ? 0.0
                                   : static_cast<double>(f.rows() + f.cols()) *
                                         std::numeric_limits<double>::epsilon() * s.front();
    long double acc = 0.0L;
    for (double v : s)
        if (v > floor)
            acc += std::pow(static_cast<long double>(v), static_cast<long double>(p.value()));
    return static_cast<double>(std::pow(acc, 1.0L / static_cast<long double>(p.value())));
}

} // namespace clab::testing
