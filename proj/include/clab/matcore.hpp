#pragma once
//
// Dense complex matrix kernel: Schatten quasinorms, Schmidt and polar
// decompositions, matrix functions of the modulus and the factorizations
// consumed by the centralizer constructions.
//

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace clab {

using cplx = std::complex<double>;
using Mat  = Eigen::MatrixXcd;
using Vec  = Eigen::VectorXcd;
using Index = Eigen::Index;

// Bad arguments: shape mismatch, non-finite entries, invalid indices.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical breakdown (SVD non-convergence and the like).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

//
// Summability index p in (0, inf]. Infinity selects the operator norm.
//
class PIndex {
public:
    constexpr PIndex() = default;

    explicit PIndex(double v) : value_(v)
    {
        if (!(v > 0.0) || std::isnan(v))
            throw InputError("summability index must be positive, got " + std::to_string(v));
    }

    static PIndex infinity() { return PIndex(std::numeric_limits<double>::infinity()); }

    // The index r with 1/r = 1/a + 1/b.
    static PIndex harmonic_sum(PIndex a, PIndex b)
    {
        const double inv = a.inverse() + b.inverse();
        if (inv == 0.0)
            return infinity();
        return PIndex(1.0 / inv);
    }

    double value() const { return value_; }
    bool is_inf() const { return std::isinf(value_); }
    double inverse() const { return is_inf() ? 0.0 : 1.0 / value_; }

    friend bool operator==(PIndex a, PIndex b) { return a.value_ == b.value_; }

private:
    double value_ = 2.0;
};

struct Tolerances {
    double reconstruction  = 1e-10; // relative
    double slack           = 1e-8;  // absolute, for inequality checks
    double zero_threshold  = 1e-12; // relative to the largest singular value
};

enum class SvdBackend { jacobi, divide_conquer };

struct SchmidtOptions {
    double     zero_threshold = 1e-12;
    SvdBackend backend        = SvdBackend::divide_conquer;
};

inline void require_finite(const Mat& f, const char* what = "matrix")
{
    if (!f.allFinite())
        throw InputError(std::string(what) + " has non-finite entries");
}

inline void require_square(const Mat& f, const char* what = "matrix")
{
    if (f.rows() != f.cols())
        throw InputError(std::string(what) + " must be square, got " + std::to_string(f.rows()) + "x" +
                         std::to_string(f.cols()));
}

// Modulus of concavity of S^r: 2^{1/r-1} for r < 1, 1 otherwise.
inline double concavity_modulus(PIndex r)
{
    if (r.is_inf() || r.value() >= 1.0)
        return 1.0;
    return std::pow(2.0, 1.0 / r.value() - 1.0);
}

//
// l^p quasinorm of a nonnegative list. Terms are summed in decreasing order
// so the result does not depend on the order of the input.
//
inline double lp_of_moduli(std::vector<double> t, PIndex p)
{
    if (t.empty())
        return 0.0;
    std::sort(t.begin(), t.end(), std::greater<>());
    const double top = t.front();
    if (top == 0.0)
        return 0.0;
    if (p.is_inf())
        return top;
    const double pv = p.value();
    double acc = 0.0;
    for (double v : t)
        acc += std::pow(v / top, pv);
    return top * std::pow(acc, 1.0 / pv);
}

namespace detail {

template <typename Svd>
void check_svd(const Svd& svd)
{
    if (svd.info() != Eigen::Success)
        throw NumericError("SVD did not converge");
}

struct RawSvd {
    Eigen::VectorXd s;
    Mat             U, V;
};

inline RawSvd raw_svd(const Mat& f, SvdBackend backend, bool vectors)
{
    const int opts = vectors ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0;
    RawSvd out;
    if (backend == SvdBackend::jacobi) {
        Eigen::JacobiSVD<Mat> svd(f, opts);
        check_svd(svd);
        out.s = svd.singularValues();
        if (vectors) { out.U = svd.matrixU(); out.V = svd.matrixV(); }
    } else {
        Eigen::BDCSVD<Mat> svd(f, opts);
        check_svd(svd);
        out.s = svd.singularValues();
        if (vectors) { out.U = svd.matrixU(); out.V = svd.matrixV(); }
    }
    return out;
}

} // namespace detail

// Singular values, nonincreasing, with multiplicity (nothing dropped).
inline Eigen::VectorXd singular_values(const Mat& f, SvdBackend backend = SvdBackend::divide_conquer)
{
    require_finite(f);
    if (f.size() == 0)
        return {};
    return detail::raw_svd(f, backend, false).s;
}

// Singular values below max(m, n) ε s_1 are rounding noise and are dropped;
// for p < 1 they would otherwise shift the quasinorm by about sqrt(ε).
inline double schatten_norm(const Mat& f, PIndex p)
{
    const auto s = singular_values(f);
    std::vector<double> kept;
    if (s.size() > 0) {
        const double floor = static_cast<double>(std::max(f.rows(), f.cols())) *
                             std::numeric_limits<double>::epsilon() * s(0);
        for (Index i = 0; i < s.size(); ++i)
            if (s(i) > floor)
                kept.push_back(s(i));
    }
    return lp_of_moduli(std::move(kept), p);
}

inline double operator_norm(const Mat& f) { return schatten_norm(f, PIndex::infinity()); }

//
// x ⊗ y is the operator h -> <h|x> y, i.e. the matrix y x^H.
//
inline Mat rank_one(const Vec& x, const Vec& y)
{
    return y * x.adjoint();
}

//
// Prescribed Schmidt expansion f = sum_n s_n x_n ⊗ y_n, so f x_n = s_n y_n.
// Each pair (x_n, y_n) is rotated by the unit scalar that makes the first
// nonvanishing coordinate of x_n real positive. With this choice the
// expansion of λf (λ = σ|λ|) has values |λ| s_n, the same x_n and the
// y_n multiplied by σ.
//
struct SchmidtForm {
    std::vector<double> s;
    std::vector<Vec>    x; // initial frame
    std::vector<Vec>    y; // final frame
    Index rows = 0;
    Index cols = 0;

    std::size_t rank() const { return s.size(); }

    Mat reconstruct() const
    {
        Mat out = Mat::Zero(rows, cols);
        for (std::size_t n = 0; n < s.size(); ++n)
            out += s[n] * y[n] * x[n].adjoint();
        return out;
    }

    // Smallest relative gap (s_n - s_{n+1}) / s_1 between retained values,
    // including the gap to the discarded zero block. +inf for rank <= 1 when
    // the matrix is full rank.
    double min_relative_gap() const
    {
        if (s.empty())
            return std::numeric_limits<double>::infinity();
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n + 1 < s.size(); ++n)
            gap = std::min(gap, (s[n] - s[n + 1]) / s[0]);
        return gap;
    }

    // True when the frames are not determined by f (repeated singular values).
    bool frame_ambiguous(double rel_gap = 1e-6) const { return min_relative_gap() <= rel_gap; }
};

inline SchmidtForm schmidt(const Mat& f, const SchmidtOptions& opts = {})
{
    require_finite(f);
    SchmidtForm out;
    out.rows = f.rows();
    out.cols = f.cols();
    if (f.size() == 0)
        return out;

    const auto svd = detail::raw_svd(f, opts.backend, true);
    const double top = svd.s.size() ? svd.s(0) : 0.0;
    if (top == 0.0)
        return out;

    const double cut = opts.zero_threshold * top;
    for (Index n = 0; n < svd.s.size(); ++n) {
        if (svd.s(n) <= cut)
            break;
        Vec x = svd.V.col(n);
        Vec y = svd.U.col(n);
        // first coordinate that is not negligible
        const double xmax = x.cwiseAbs().maxCoeff();
        for (Index k = 0; k < x.size(); ++k) {
            if (std::abs(x(k)) > 1e-8 * xmax) {
                const cplx phase = std::conj(x(k)) / std::abs(x(k));
                x *= phase;
                y *= phase;
                x(k) = std::abs(x(k));
                break;
            }
        }
        out.s.push_back(svd.s(n));
        out.x.push_back(std::move(x));
        out.y.push_back(std::move(y));
    }
    return out;
}

struct PolarForm {
    Mat phase;   // partial isometry, zero on ker(modulus)
    Mat modulus; // (f^H f)^{1/2}
};

inline PolarForm polar(const Mat& f, const SchmidtOptions& opts = {})
{
    const auto sf = schmidt(f, opts);
    PolarForm out{Mat::Zero(f.rows(), f.cols()), Mat::Zero(f.cols(), f.cols())};
    for (std::size_t n = 0; n < sf.rank(); ++n) {
        out.phase += sf.y[n] * sf.x[n].adjoint();
        out.modulus += sf.s[n] * sf.x[n] * sf.x[n].adjoint();
    }
    return out;
}

//
// |f|^alpha on the support of |f|. alpha = 0 yields the support projection
// of |f| (initial projection of f); alpha must otherwise be positive.
//
inline Mat support_power(const SchmidtForm& sf, double alpha)
{
    if (!(alpha >= 0.0))
        throw InputError("support_power: exponent must be nonnegative");
    Mat out = Mat::Zero(sf.cols, sf.cols);
    for (std::size_t n = 0; n < sf.rank(); ++n)
        out += std::pow(sf.s[n], alpha) * sf.x[n] * sf.x[n].adjoint();
    return out;
}

inline Mat modulus_power(const Mat& f, double alpha, const SchmidtOptions& opts = {})
{
    if (!(alpha > 0.0))
        throw InputError("modulus_power: exponent must be positive");
    return support_power(schmidt(f, opts), alpha);
}

// Sum of the partial-isometry frames, i.e. the phase u of f = u|f|.
inline Mat phase_of(const SchmidtForm& sf)
{
    Mat out = Mat::Zero(sf.rows, sf.cols);
    for (std::size_t n = 0; n < sf.rank(); ++n)
        out += sf.y[n] * sf.x[n].adjoint();
    return out;
}

//
// Sharp Hölder factorization h = f g with ||f||_p ||g||_s = ||h||_q where
// 1/q = 1/p + 1/s:  f = u |h|^{q/p},  g = |h|^{q/s}.
//
struct HolderFactors {
    Mat    f;
    Mat    g;
    PIndex q;
};

inline HolderFactors holder_factor(const Mat& h, PIndex p, PIndex s, const SchmidtOptions& opts = {})
{
    require_square(h, "holder_factor");
    const PIndex q = PIndex::harmonic_sum(p, s);
    if (q.is_inf())
        throw InputError("holder_factor: 1/p + 1/s must be positive");
    const auto sf = schmidt(h, opts);
    if (sf.rank() == 0)
        return {Mat::Zero(h.rows(), h.cols()), Mat::Zero(h.rows(), h.cols()), q};
    const double a = q.value() * p.inverse();
    const double b = q.value() * s.inverse();
    return {phase_of(sf) * support_power(sf, a), support_power(sf, b), q};
}

//
// Joint root of two operators: h = (f^H f + g^H g)^{1/2}, f = a h, g = b h
// with a, b contractions whose initial projections equal the support of h.
// Computed from the SVD of the stacked operator [f; g] = W Σ V^H, for which
// h = V Σ V^H and [a; b] = W V^H (Moore-Penrose inverse on the range of h).
//
struct JointRoot {
    Mat h;
    Mat a;
    Mat b;
    double norm_bound = 0.0; // Δ_{p/2}^{1/2} (||f||_p + ||g||_p)
};

inline JointRoot joint_root(const Mat& f, const Mat& g, PIndex p, const SchmidtOptions& opts = {})
{
    if (f.rows() != g.rows() || f.cols() != g.cols())
        throw InputError("joint_root: shape mismatch");
    require_finite(f);
    require_finite(g);

    const Index m = f.rows();
    const Index n = f.cols();
    Mat stacked(2 * m, n);
    stacked << f, g;

    JointRoot out{Mat::Zero(n, n), Mat::Zero(m, n), Mat::Zero(m, n), 0.0};
    const double half = p.is_inf() ? std::numeric_limits<double>::infinity() : p.value() / 2.0;
    out.norm_bound = std::sqrt(concavity_modulus(PIndex(half))) * (schatten_norm(f, p) + schatten_norm(g, p));
    if (stacked.size() == 0)
        return out;

    const auto svd = detail::raw_svd(stacked, opts.backend, true);
    if (svd.s(0) == 0.0)
        return out;
    const double cut = opts.zero_threshold * svd.s(0);
    Index r = 0;
    while (r < svd.s.size() && svd.s(r) > cut)
        ++r;
    const Mat V = svd.V.leftCols(r);
    const Mat W = svd.U.leftCols(r);
    out.h = V * svd.s.head(r).asDiagonal() * V.adjoint();
    const Mat ab = W * V.adjoint();
    out.a = ab.topRows(m);
    out.b = ab.bottomRows(m);
    return out;
}

inline cplx trace(const Mat& f)
{
    require_square(f, "trace");
    return f.trace();
}

} // namespace clab
