#pragma once
//
// Centralizer constructions on matrices, kept as closed descriptions so that
// experiments can serialize and replay them.
//
// Conventions: x ⊗ y is the matrix y x^H. Right-module morphisms are
// f -> L f, left-module morphisms are f -> f g.
//

#include "clab/matcore.hpp"
#include "clab/seqcore.hpp"

#include <memory>
#include <optional>
#include <variant>

namespace clab {

// ---------------------------------------------------------------------------
// Homogeneous maps on C^n
// ---------------------------------------------------------------------------

class QuasilinearMap;
using QMapPtr = std::shared_ptr<const QuasilinearMap>;

namespace qmap {

// Kalton-Peck map at p = 2 in the canonical basis.
struct KPOnH {
    LipschitzFn phi;
};

struct Linear {
    Mat L;
};

// y -> M ||y|| sgn(y_k) e_k, k the first coordinate of largest modulus.
// Homogeneous, nonlinear and bounded by M.
struct Bounded {
    double radius = 1.0;
};

struct Scaled {
    cplx    c;
    QMapPtr inner;
};

struct Sum {
    std::vector<QMapPtr> terms;
};

} // namespace qmap

class QuasilinearMap {
public:
    using Node = std::variant<qmap::KPOnH, qmap::Linear, qmap::Bounded, qmap::Scaled, qmap::Sum>;

    QuasilinearMap(Node n) : node_(std::move(n)) {}

    const Node& node() const { return node_; }

    Vec operator()(const Vec& y) const
    {
        return std::visit([&](const auto& n) { return apply(n, y); }, node_);
    }

private:
    static Vec apply(const qmap::KPOnH& n, const Vec& y) { return kp_phi(y, n.phi, PIndex(2.0)); }

    static Vec apply(const qmap::Linear& n, const Vec& y)
    {
        if (n.L.cols() != y.size())
            throw InputError("linear map: dimension mismatch");
        return n.L * y;
    }

    static Vec apply(const qmap::Bounded& n, const Vec& y)
    {
        Vec out = Vec::Zero(y.size());
        if (y.size() == 0)
            return out;
        Index k = 0;
        double best = -1.0;
        for (Index i = 0; i < y.size(); ++i) {
            if (std::abs(y(i)) > best) {
                best = std::abs(y(i));
                k = i;
            }
        }
        if (best == 0.0)
            return out;
        out(k) = n.radius * y.norm() * (y(k) / best);
        return out;
    }

    static Vec apply(const qmap::Scaled& n, const Vec& y) { return n.c * (*n.inner)(y); }

    static Vec apply(const qmap::Sum& n, const Vec& y)
    {
        Vec out = Vec::Zero(y.size());
        for (const auto& t : n.terms)
            out += (*t)(y);
        return out;
    }

    Node node_;
};

inline QMapPtr make_qmap(QuasilinearMap::Node n) { return std::make_shared<const QuasilinearMap>(std::move(n)); }

// ---------------------------------------------------------------------------
// Centralizer spec types
// ---------------------------------------------------------------------------

class CentralizerSpec;
using SpecPtr = std::shared_ptr<const CentralizerSpec>;

namespace spec {

struct Zero {
    PIndex p{2.0};
    PIndex q{2.0};
};

// f -> sum_n s_n ϕ(-log(s_n/||f||_p), log n) x_n ⊗ y_n
// Measured into S^q when q is set, into S^p otherwise.
struct KPBicentralizer {
    LipschitzFn           phi;
    PIndex                p{2.0};
    SchmidtOptions        schmidt{};
    std::optional<PIndex> q{};
};

// u -> sum_k s_k x_k ⊗ φ(y_k)
struct LiftedQuasilinear {
    QMapPtr        phi;
    PIndex         p{1.0};
    PIndex         q{2.0};
    SchmidtOptions schmidt{};
};

// h -> Ψ(u |h|^{p1/p2}) |h|^{p1/s}, 1/p1 = 1/p2 + 1/s, p2 the domain of Ψ
struct Lowered {
    SpecPtr inner;
    PIndex  s{2.0};
};

// f -> Φ(f e)
struct Localized {
    SpecPtr inner;
    Mat     e;
};

// f -> f g (morphism of left modules)
struct RightMultiplication {
    Mat    g;
    PIndex p{2.0};
    PIndex q{2.0};
};

// f -> L f (morphism of right modules)
struct LeftMultiplication {
    Mat    L;
    PIndex p{2.0};
    PIndex q{2.0};
};

// f -> Φ(f^H)^H, exchanges left and right structures
struct Adjoint {
    SpecPtr inner;
};

struct Scaled {
    cplx    c;
    SpecPtr inner;
};

struct Sum {
    std::vector<SpecPtr> terms;
};

} // namespace spec

class CentralizerSpec {
public:
    using Node = std::variant<spec::Zero, spec::KPBicentralizer, spec::LiftedQuasilinear, spec::Lowered,
                              spec::Localized, spec::RightMultiplication, spec::LeftMultiplication, spec::Adjoint,
                              spec::Scaled, spec::Sum>;

    CentralizerSpec(Node n) : node_(std::move(n)) {}

    const Node& node() const { return node_; }

    template <typename T>
    const T* as() const { return std::get_if<T>(&node_); }

private:
    Node node_;
};

inline SpecPtr make_spec(CentralizerSpec::Node n) { return std::make_shared<const CentralizerSpec>(std::move(n)); }

inline SpecPtr operator+(const SpecPtr& a, const SpecPtr& b) { return make_spec(spec::Sum{{a, b}}); }
inline SpecPtr operator*(cplx c, const SpecPtr& a) { return make_spec(spec::Scaled{c, a}); }

// Index of the quasinormed space the spec is defined on.
inline PIndex domain_index(const CentralizerSpec& sp);
// Index of the space where the centralizer estimates are measured.
inline PIndex target_index(const CentralizerSpec& sp);

namespace detail {

struct IndexVisitor {
    bool domain;

    PIndex operator()(const spec::Zero& n) const { return domain ? n.p : n.q; }
    PIndex operator()(const spec::KPBicentralizer& n) const { return domain ? n.p : n.q.value_or(n.p); }
    PIndex operator()(const spec::LiftedQuasilinear& n) const { return domain ? n.p : n.q; }
    PIndex operator()(const spec::Lowered& n) const
    {
        return PIndex::harmonic_sum(domain ? domain_index(*n.inner) : target_index(*n.inner), n.s);
    }
    PIndex operator()(const spec::Localized& n) const { return domain ? domain_index(*n.inner) : target_index(*n.inner); }
    PIndex operator()(const spec::RightMultiplication& n) const { return domain ? n.p : n.q; }
    PIndex operator()(const spec::LeftMultiplication& n) const { return domain ? n.p : n.q; }
    PIndex operator()(const spec::Adjoint& n) const { return domain ? domain_index(*n.inner) : target_index(*n.inner); }
    PIndex operator()(const spec::Scaled& n) const { return domain ? domain_index(*n.inner) : target_index(*n.inner); }
    PIndex operator()(const spec::Sum& n) const
    {
        if (n.terms.empty())
            return PIndex(2.0);
        return domain ? domain_index(*n.terms.front()) : target_index(*n.terms.front());
    }
};

} // namespace detail

inline PIndex domain_index(const CentralizerSpec& sp) { return std::visit(detail::IndexVisitor{true}, sp.node()); }
inline PIndex target_index(const CentralizerSpec& sp) { return std::visit(detail::IndexVisitor{false}, sp.node()); }

// The lift u -> sum s_k x_k ⊗ φ(y_k) is only known to be a centralizer
// for 0 < p < 2 and q > p.
inline bool lift_within_guarantee(PIndex p, PIndex q)
{
    return !p.is_inf() && p.value() < 2.0 && (q.is_inf() || q.value() > p.value());
}

// ---------------------------------------------------------------------------
// Constructions
// ---------------------------------------------------------------------------

inline Mat kp_bicentralizer(const Mat& f, const LipschitzFn& fn, PIndex p, const SchmidtOptions& opts = {})
{
    if (p.is_inf())
        throw InputError("kp_bicentralizer: p must be finite");
    const auto sf = schmidt(f, opts);
    Mat out = Mat::Zero(f.rows(), f.cols());
    if (sf.rank() == 0)
        return out;
    const double norm = lp_of_moduli(sf.s, p);
    for (std::size_t n = 0; n < sf.rank(); ++n) {
        const cplx w = fn(-std::log(sf.s[n] / norm), std::log(static_cast<double>(n + 1)));
        out += (sf.s[n] * w) * sf.y[n] * sf.x[n].adjoint();
    }
    return out;
}

inline Mat lift_quasilinear(const QuasilinearMap& phi, const Mat& u, const SchmidtOptions& opts = {})
{
    const auto sf = schmidt(u, opts);
    Mat out = Mat::Zero(u.rows(), u.cols());
    for (std::size_t k = 0; k < sf.rank(); ++k)
        out += sf.s[k] * phi(sf.y[k]) * sf.x[k].adjoint();
    return out;
}

inline Mat evaluate(const CentralizerSpec& sp, const Mat& f);

inline Mat lower_s(const CentralizerSpec& inner, PIndex s, const Mat& h, const SchmidtOptions& opts = {})
{
    require_square(h, "lower_s");
    const PIndex p2 = domain_index(inner);
    const PIndex p1 = PIndex::harmonic_sum(p2, s);
    if (p1.is_inf())
        throw InputError("lower_s: p2 and s cannot both be infinite");
    const auto sf = schmidt(h, opts);
    if (sf.rank() == 0)
        return Mat::Zero(h.rows(), h.cols());
    const Mat arg = phase_of(sf) * support_power(sf, p1.value() * p2.inverse());
    return evaluate(inner, arg) * support_power(sf, p1.value() * s.inverse());
}

inline Mat evaluate(const CentralizerSpec& sp, const Mat& f)
{
    require_finite(f, "centralizer input");
    return std::visit(
        [&](const auto& n) -> Mat {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, spec::Zero>) {
                return Mat::Zero(f.rows(), f.cols());
            } else if constexpr (std::is_same_v<T, spec::KPBicentralizer>) {
                return kp_bicentralizer(f, n.phi, n.p, n.schmidt);
            } else if constexpr (std::is_same_v<T, spec::LiftedQuasilinear>) {
                return lift_quasilinear(*n.phi, f, n.schmidt);
            } else if constexpr (std::is_same_v<T, spec::Lowered>) {
                return lower_s(*n.inner, n.s, f);
            } else if constexpr (std::is_same_v<T, spec::Localized>) {
                return evaluate(*n.inner, f * n.e);
            } else if constexpr (std::is_same_v<T, spec::RightMultiplication>) {
                return f * n.g;
            } else if constexpr (std::is_same_v<T, spec::LeftMultiplication>) {
                return n.L * f;
            } else if constexpr (std::is_same_v<T, spec::Adjoint>) {
                return evaluate(*n.inner, f.adjoint()).adjoint();
            } else if constexpr (std::is_same_v<T, spec::Scaled>) {
                return n.c * evaluate(*n.inner, f);
            } else {
                Mat out = Mat::Zero(f.rows(), f.cols());
                for (const auto& t : n.terms)
                    out += evaluate(*t, f);
                return out;
            }
        },
        sp.node());
}

// Whether the value at f depends on a choice of Schmidt frames.
inline bool frame_ambiguous(const CentralizerSpec& sp, const Mat& f, double rel_gap = 1e-6)
{
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, spec::KPBicentralizer> || std::is_same_v<T, spec::LiftedQuasilinear>) {
                return schmidt(f).frame_ambiguous(rel_gap);
            } else if constexpr (std::is_same_v<T, spec::Lowered>) {
                return schmidt(f).frame_ambiguous(rel_gap);
            } else if constexpr (std::is_same_v<T, spec::Localized>) {
                return frame_ambiguous(*n.inner, f * n.e, rel_gap);
            } else if constexpr (std::is_same_v<T, spec::Adjoint>) {
                return frame_ambiguous(*n.inner, f.adjoint(), rel_gap);
            } else if constexpr (std::is_same_v<T, spec::Scaled>) {
                return frame_ambiguous(*n.inner, f, rel_gap);
            } else if constexpr (std::is_same_v<T, spec::Sum>) {
                for (const auto& t : n.terms)
                    if (frame_ambiguous(*t, f, rel_gap))
                        return true;
                return false;
            } else {
                return false;
            }
        },
        sp.node());
}

struct Evaluation {
    Mat  value;
    bool frame_ambiguous = false;
};

inline Evaluation evaluate_flagged(const CentralizerSpec& sp, const Mat& f)
{
    return {evaluate(sp, f), frame_ambiguous(sp, f)};
}

//
// Spatial part: Φ(η ⊗ y) = η ⊗ φ_η(y). The value read off is Φ(η⊗y) η; the
// residual is the part of Φ(η⊗y) not supported on η.
//
struct SpatialPart {
    Vec    value;
    Vec    eta;
    double residual = 0.0;
    bool   warning  = false;
};

inline SpatialPart spatial_part(const CentralizerSpec& sp, const Vec& eta, const Vec& y, double tol = 1e-10)
{
    const double en = eta.norm();
    if (std::abs(en - 1.0) > 1e-12)
        throw InputError("spatial_part: eta must be normalized");
    const Mat image = evaluate(sp, rank_one(eta, y));
    SpatialPart out;
    out.eta = eta;
    out.value = image * eta;
    const Mat rest = image - out.value * eta.adjoint();
    out.residual = rest.norm();
    out.warning = out.residual > tol * std::max(1.0, image.norm());
    return out;
}

inline SpatialPart spatial_part(const CentralizerSpec& sp, const Vec& y)
{
    Vec eta = Vec::Zero(y.size());
    eta(0) = 1.0;
    return spatial_part(sp, eta, y);
}

// tr(u |f|^{1/2} Φ(|f|^{1/2})), u the phase of f.
inline cplx trace_functional(const CentralizerSpec& sp, const Mat& f)
{
    require_square(f, "trace_functional");
    const auto sf = schmidt(f);
    if (sf.rank() == 0)
        return cplx(0.0);
    const Mat root = support_power(sf, 0.5);
    return trace(phase_of(sf) * root * evaluate(sp, root));
}

inline bool is_projection(const Mat& e, double tol = 1e-10)
{
    if (e.rows() != e.cols())
        return false;
    const double scale = std::max(1.0, e.norm());
    return (e - e.adjoint()).norm() <= tol * scale && (e * e - e).norm() <= tol * scale;
}

inline Mat localize(const CentralizerSpec& sp, const Mat& e, const Mat& f)
{
    if (!is_projection(e))
        throw InputError("localize: e is not an orthogonal projection");
    return evaluate(sp, f * e);
}

// ||Φ(f e) - f Φ(e)||_q, the defect behind the triviality of Φ_e.
inline double localization_defect(const CentralizerSpec& sp, const Mat& e, const Mat& f, PIndex q)
{
    return schatten_norm(localize(sp, e, f) - f * evaluate(sp, e), q);
}

inline Index projection_rank(const Mat& e) { return static_cast<Index>(std::llround(e.trace().real())); }

// ||Φ(f) - sum_n s_n Φ(x_n ⊗ y_n)||_q for the prescribed expansion of f.
inline double expansion_defect(const CentralizerSpec& sp, const Mat& f, PIndex q)
{
    const auto sf = schmidt(f);
    Mat acc = evaluate(sp, f);
    for (std::size_t n = 0; n < sf.rank(); ++n)
        acc -= sf.s[n] * evaluate(sp, rank_one(sf.x[n], sf.y[n]));
    return schatten_norm(acc, q);
}

//
// Constant controlling the rank-one expansion defect for p < min(1, q):
// (sum_{k<=terms} (2/k)^{r/p})^{1/p} Q with r = min(1, q).
//
struct ExpansionConstant {
    double value      = 0.0;
    double series     = 0.0; // truncated sum
    double tail_bound = 0.0; // bound on the omitted tail of the sum
    std::size_t terms = 0;
};

inline ExpansionConstant expansion_constant(PIndex p, PIndex q, double quasilinear_constant,
                                            std::size_t terms = 10000)
{
    const double r = q.is_inf() ? 1.0 : std::min(1.0, q.value());
    if (p.is_inf() || !(p.value() < r))
        throw InputError("expansion_constant: needs p < min(1, q)");
    const double a = r / p.value();
    ExpansionConstant out;
    out.terms = terms;
    for (std::size_t k = terms; k >= 1; --k)
        out.series += std::pow(2.0 / static_cast<double>(k), a);
    // sum_{k>K} (2/k)^a <= 2^a K^{1-a} / (a-1)
    out.tail_bound = std::pow(2.0, a) * std::pow(static_cast<double>(terms), 1.0 - a) / (a - 1.0);
    out.value = std::pow(out.series, 1.0 / p.value()) * quasilinear_constant;
    return out;
}

//
// A linear functional on n x n matrices with ell(x ⊗ y) continuous in x is
// f -> tr(L f); L is recovered from the values on the matrix units.
//
template <typename Functional>
Mat trace_representation(Functional&& ell, Index n)
{
    Mat L(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            L(i, j) = ell(rank_one(Vec::Unit(n, i), Vec::Unit(n, j)));
    return L;
}

} // namespace clab
