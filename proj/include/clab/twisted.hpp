#pragma once
//
// Twisted sums Y ⊕_Φ X with the quasinorm ||(g, f)||_Φ = ||g - Φf||_Y + ||f||_X,
// both for matrix centralizers and for homogeneous maps on C^n.
//

#include "clab/metrology.hpp"

namespace clab {

template <typename T>
struct TwistedPair {
    T g; // Y slot
    T f; // X slot

    friend TwistedPair operator+(const TwistedPair& a, const TwistedPair& b)
    {
        if (a.g.size() != b.g.size() || a.f.size() != b.f.size())
            throw InputError("twisted pair: dimension mismatch");
        return {a.g + b.g, a.f + b.f};
    }
    friend TwistedPair operator*(cplx c, const TwistedPair& a) { return {c * a.g, c * a.f}; }
    friend TwistedPair operator*(double c, const TwistedPair& a) { return {c * a.g, c * a.f}; }
};

using TwistedMat = TwistedPair<Mat>;
using TwistedVec = TwistedPair<Vec>;

inline double twisted_quasinorm(const TwistedMat& v, const CentralizerSpec& sp, PIndex pY, PIndex pX)
{
    if (v.g.rows() != v.f.rows() || v.g.cols() != v.f.cols())
        throw InputError("twisted_quasinorm: slots differ in shape");
    return schatten_norm(v.g - evaluate(sp, v.f), pY) + schatten_norm(v.f, pX);
}

inline double twisted_quasinorm(const TwistedVec& v, const QuasilinearMap& phi, PIndex pY, PIndex pX)
{
    if (v.g.size() != v.f.size())
        throw InputError("twisted_quasinorm: slots differ in length");
    return lp_norm(v.g - phi(v.f), pY) + lp_norm(v.f, pX);
}

// The Kalton-Peck map at p = 2, whose twisted sum is Z2.
inline QMapPtr z2_map(const LipschitzFn& fn = phi::kalton_peck()) { return make_qmap(qmap::KPOnH{fn}); }

// ---------------------------------------------------------------------------
// Concavity probe
// ---------------------------------------------------------------------------

//
// Pairs (u, v) for the ratio ||u+v|| / (||u|| + ||v||). Odd indices take v a
// positive multiple of u, for which the ratio is 1 by homogeneity. Indices
// 2 mod 4 draw u and v with X slots of disjoint support (slots 1 and 2), the
// two-point configuration on which an l^p quasinorm with p < 1 is least
// convex. The remaining indices draw independent points (slot 0).
//
namespace detail {

enum class Slot { free, first_half, second_half };

template <typename Pair, typename Draw>
std::pair<Pair, Pair> probe_pair(Rng& rng, std::uint64_t index, Draw&& draw)
{
    if (index % 2 == 1) {
        Pair u = draw(rng, index, Slot::free);
        const double t = std::exp2(4.0 * uniform01(rng) - 2.0);
        return {u, t * u};
    }
    if (index % 4 == 2) {
        Pair u = draw(rng, index, Slot::first_half);
        Pair v = draw(rng, index, Slot::second_half);
        return {u, v};
    }
    Pair u = draw(rng, index, Slot::free);
    Pair v = draw(rng, index, Slot::free);
    return {u, v};
}

// Coordinates of one half of {0, ..., n-1}, or all of them for Slot::free.
inline std::pair<Index, Index> slot_range(Index n, Slot slot)
{
    if (slot == Slot::free || n < 2)
        return {0, n};
    return slot == Slot::first_half ? std::pair<Index, Index>{0, n / 2} : std::pair<Index, Index>{n / 2, n};
}

// Unit vector of l^p(n) supported on the slot's coordinates.
inline Vec slot_vector(Rng& rng, Index n, PIndex p, Slot slot)
{
    const auto [lo, hi] = slot_range(n, slot);
    Vec v = Vec::Zero(n);
    v.segment(lo, hi - lo) = gaussian_vector(rng, hi - lo);
    return v / lp_norm(v, p);
}

//
// Unit matrix of S^p whose Schmidt vectors lie in the slot's half of a frame
// shared by both slots of the same index.
//
inline Mat slot_matrix(const Sampler& s, Rng& rng, std::uint64_t index, Slot slot)
{
    if (slot == Slot::free || s.n < 2)
        return s.unit(rng, index);
    auto frame = stream_rng(splitmix64(s.seed ^ 0x5bd1e9955bd1e995ULL), index);
    const Mat U = haar_unitary(frame, s.n);
    const Mat V = haar_unitary(frame, s.n);
    const auto [lo, hi] = slot_range(s.n, slot);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(s.n);
    for (Index i = lo; i < hi; ++i)
        d(i) = uniform01(rng) + 1e-3;
    const Mat f = U * d.cast<cplx>().asDiagonal() * V.adjoint();
    return f / schatten_norm(f, s.p);
}

template <typename Pair, typename Draw, typename Norm>
EstimateReport modulus_probe(const Sampler& sampler, std::size_t N, Draw&& draw, Norm&& norm,
                             std::vector<Mat> (*to_witness)(const Pair&, const Pair&), unsigned threads)
{
    if (N < 2)
        throw InputError("quasinorm_modulus_probe: need at least two samples");
    const auto values = parallel_map<double>(N, threads, [&](std::size_t i) {
        auto rng = sampler.rng(i);
        const auto [u, v] = probe_pair<Pair>(rng, i, draw);
        const double r = guarded_ratio(norm(u + v), norm(u) + norm(v));
        if (!std::isfinite(r))
            throw SampleFailure("non-finite concavity ratio at sample " + std::to_string(i), i, to_witness(u, v));
        return r;
    });
    EstimateReport rep;
    rep.kind = Kind::modulus;
    rep.samples = N;
    rep.seed = sampler.seed;
    rep.n = sampler.n;
    rep.tag = to_string(sampler.tag);
    for (std::size_t i = 0; i < N; ++i) {
        if (i == 0 || values[i] > rep.value) {
            rep.value = values[i];
            rep.witness_index = i;
        }
    }
    auto rng = sampler.rng(rep.witness_index);
    const auto [u, v] = probe_pair<Pair>(rng, rep.witness_index, draw);
    rep.witness = to_witness(u, v);
    return rep;
}

inline std::vector<Mat> mat_witness(const TwistedMat& u, const TwistedMat& v) { return {u.g, u.f, v.g, v.f}; }

inline std::vector<Mat> vec_witness(const TwistedVec& u, const TwistedVec& v)
{
    return {Mat(u.g), Mat(u.f), Mat(v.g), Mat(v.f)};
}

} // namespace detail

// Points (Φf + t w, f): f on the X sphere, w on the Y sphere, t in [0, 1).
inline EstimateReport quasinorm_modulus_probe(const CentralizerSpec& sp, PIndex pY, PIndex pX, const Sampler& sampler,
                                              std::size_t N, EstimateOptions opts = {})
{
    const Sampler xs{sampler.seed, sampler.n, pX, sampler.tag};
    const Sampler ys{sampler.seed, sampler.n, pY, sampler.tag};
    auto draw = [&](Rng& rng, std::uint64_t index, detail::Slot slot) {
        const Mat f = detail::slot_matrix(xs, rng, index, slot);
        const Mat w = ys.unit(rng, index);
        return TwistedMat{evaluate(sp, f) + uniform01(rng) * w, f};
    };
    auto norm = [&](const TwistedMat& v) { return twisted_quasinorm(v, sp, pY, pX); };
    return detail::modulus_probe<TwistedMat>(sampler, N, draw, norm, &detail::mat_witness, opts.threads);
}

inline EstimateReport quasinorm_modulus_probe(const QuasilinearMap& phi, PIndex pY, PIndex pX, const Sampler& sampler,
                                              std::size_t N, EstimateOptions opts = {})
{
    auto draw = [&](Rng& rng, std::uint64_t, detail::Slot slot) {
        const Vec f = detail::slot_vector(rng, sampler.n, pX, slot);
        Vec w = gaussian_vector(rng, sampler.n);
        w /= lp_norm(w, pY);
        return TwistedVec{phi(f) + uniform01(rng) * w, f};
    };
    auto norm = [&](const TwistedVec& v) { return twisted_quasinorm(v, phi, pY, pX); };
    return detail::modulus_probe<TwistedVec>(sampler, N, draw, norm, &detail::vec_witness, opts.threads);
}

// ---------------------------------------------------------------------------
// Gaussian averages into Z2
// ---------------------------------------------------------------------------

//
// Columns of the lifting û = sum_k s_k x_k ⊗ (φ(y_k), y_k) of u into the
// twisted sum of φ, evaluated on the canonical basis.
//
inline std::vector<TwistedVec> lifted_columns(const Mat& u, const QuasilinearMap& phi, const SchmidtOptions& opts = {})
{
    const auto sf = schmidt(u, opts);
    std::vector<TwistedVec> cols;
    for (Index j = 0; j < u.cols(); ++j) {
        TwistedVec c{Vec::Zero(u.rows()), Vec::Zero(u.rows())};
        for (std::size_t k = 0; k < sf.rank(); ++k) {
            const cplx w = sf.s[k] * std::conj(sf.x[k](j));
            c.g += w * phi(sf.y[k]);
            c.f += w * sf.y[k];
        }
        cols.push_back(std::move(c));
    }
    return cols;
}

// ---------------------------------------------------------------------------
// Splitting evidence
// ---------------------------------------------------------------------------

struct SplittingRow {
    Index         dim = 0;
    double        residual = 0.0;
    std::uint64_t seed = 0;
    std::string   spec_hash;
};

//
// For each dimension fits a morphism m and reports
// max_i (||(m f_i, f_i)||_Φ - ||f_i||_X) / ||f_i||_X.
//
inline std::vector<SplittingRow> splitting_distance(const SpecFactory& make, const std::vector<Index>& dims,
                                                    const SweepParams& params, const std::string& spec_hash = {})
{
    require_ascending(dims);
    std::vector<SplittingRow> rows;
    for (Index n : dims) {
        const SpecPtr sp = make(n);
        const PIndex pX = domain_index(*sp);
        const PIndex pY = target_index(*sp);
        const Sampler sampler{params.seed, n, pX, params.tag};
        const auto samples = draw_samples(sampler, params.count(n));
        const auto fit = fit_morphism(*sp, params.side, samples, pX, pY);
        double worst = 0.0;
        for (const auto& f : samples) {
            const double nf = schatten_norm(f, pX);
            const TwistedMat v{apply_morphism(params.side, fit.L, f), f};
            worst = std::max(worst, guarded_ratio(twisted_quasinorm(v, *sp, pY, pX) - nf, nf));
        }
        rows.push_back({n, worst, params.seed, spec_hash});
    }
    return rows;
}

inline std::string to_csv(const std::vector<SplittingRow>& rows, const std::string& config_hash = {})
{
    std::string out;
    if (!config_hash.empty())
        out += "# config " + config_hash + "\n";
    out += "dim,residual,seed,spec-hash\n";
    for (const auto& r : rows)
        out += std::to_string(r.dim) + "," + format_double(r.residual) + "," + std::to_string(r.seed) + "," +
               r.spec_hash + "\n";
    return out;
}

} // namespace clab
