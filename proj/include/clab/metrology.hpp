#pragma once
//
// Seeded measurement of centralizer constants, distances to module
// morphisms and Gaussian averages. All sups are estimated by the max over a
// sample stream and are therefore lower bounds.
//

#include "clab/centralizers.hpp"
#include "clab/sampling.hpp"

#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace clab {

enum class Kind { Q, L, R, B, distance, gamma, rank_one, modulus, residual };

inline std::string to_string(Kind k)
{
    switch (k) {
        case Kind::Q: return "Q";
        case Kind::L: return "L";
        case Kind::R: return "R";
        case Kind::B: return "B";
        case Kind::distance: return "distance";
        case Kind::gamma: return "gamma";
        case Kind::rank_one: return "rank_one";
        case Kind::modulus: return "modulus";
        case Kind::residual: return "residual";
    }
    return "?";
}

inline Kind kind_from_string(const std::string& s)
{
    for (auto k : {Kind::Q, Kind::L, Kind::R, Kind::B, Kind::distance, Kind::gamma, Kind::rank_one, Kind::modulus,
                   Kind::residual})
        if (to_string(k) == s)
            return k;
    throw InputError("unknown estimate kind '" + s + "'");
}

inline constexpr const char* kSupNote = "max over samples; a lower bound for the true supremum";

struct EstimateReport {
    Kind                kind = Kind::Q;
    double              value = 0.0;
    std::size_t         samples = 0;
    std::uint64_t       seed = 0;
    Index               n = 0;
    std::string         tag;
    std::size_t         witness_index = 0;
    std::vector<Mat>    witness;
    std::string         note = kSupNote;
    double              standard_error = 0.0;
    bool                warning = false;
    std::string         warning_text;
};

// Thrown when a sample produces a non-finite ratio; carries the inputs for replay.
class SampleFailure : public NumericError {
public:
    SampleFailure(const std::string& what, std::size_t index, std::vector<Mat> inputs)
        : NumericError(what), index_(index), inputs_(std::move(inputs))
    {
    }

    std::size_t index() const { return index_; }
    const std::vector<Mat>& inputs() const { return inputs_; }

private:
    std::size_t      index_;
    std::vector<Mat> inputs_;
};

//
// Evaluates fn(i) for i in [0, count) on up to `threads` workers. Work is
// split into contiguous index blocks, so the output does not depend on the
// number of workers. The exception of the lowest failing index is rethrown.
//
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, unsigned threads, Fn&& fn)
{
    std::vector<T> out(count);
    std::vector<std::exception_ptr> errors(count);
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        work(0, count);
    } else {
        std::vector<std::thread> pool;
        const std::size_t block = (count + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t lo = std::min(count, w * block);
            const std::size_t hi = std::min(count, lo + block);
            pool.emplace_back(work, lo, hi);
        }
        for (auto& t : pool)
            t.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

// ---------------------------------------------------------------------------
// Defining ratios
// ---------------------------------------------------------------------------

// Inputs of sample `index` for the given kind, drawn from its own stream.
inline std::vector<Mat> draw_inputs(Kind kind, const Sampler& sampler, std::uint64_t index)
{
    auto rng = sampler.rng(index);
    switch (kind) {
        case Kind::Q: {
            Mat f = sampler.unit(rng, index);
            Mat g = sampler.unit(rng, index);
            const double t = std::exp2(8.0 * uniform01(rng) - 4.0);
            return {f, t * g};
        }
        case Kind::L: {
            Mat a = unit_ball_operator(rng, sampler.n);
            Mat f = sampler.unit(rng, index);
            return {a, f};
        }
        case Kind::R: {
            Mat f = sampler.unit(rng, index);
            Mat a = unit_ball_operator(rng, sampler.n);
            return {f, a};
        }
        case Kind::B: {
            Mat a = unit_ball_operator(rng, sampler.n);
            Mat f = sampler.unit(rng, index);
            Mat b = unit_ball_operator(rng, sampler.n);
            return {a, f, b};
        }
        case Kind::rank_one: {
            Vec x = unit_vector(rng, sampler.n);
            Vec y = unit_vector(rng, sampler.n);
            return {rank_one(x, y)};
        }
        case Kind::distance:
        case Kind::residual:
            return {sampler.unit(rng, index)};
        default:
            throw InputError("draw_inputs: kind " + to_string(kind) + " has no sampled ratio");
    }
}

inline double guarded_ratio(double num, double den)
{
    if (den <= 0.0)
        return 0.0;
    return num / den;
}

// The ratio whose supremum defines the constant of the given kind.
inline Mat finite_output(Mat m)
{
    if (!m.allFinite())
        throw NumericError("spec produced non-finite entries");
    return m;
}

inline double defining_ratio(const CentralizerSpec& sp, Kind kind, const std::vector<Mat>& in)
{
    const PIndex p = domain_index(sp);
    const PIndex q = target_index(sp);
    auto phi = [&](const Mat& m) { return finite_output(evaluate(sp, m)); };
    switch (kind) {
        case Kind::Q: {
            const Mat& f = in.at(0);
            const Mat& g = in.at(1);
            const double num = schatten_norm(phi(f + g) - phi(f) - phi(g), q);
            return guarded_ratio(num, schatten_norm(f, p) + schatten_norm(g, p));
        }
        case Kind::L: {
            const Mat& a = in.at(0);
            const Mat& f = in.at(1);
            const double num = schatten_norm(phi(a * f) - a * phi(f), q);
            return guarded_ratio(num, operator_norm(a) * schatten_norm(f, p));
        }
        case Kind::R: {
            const Mat& f = in.at(0);
            const Mat& a = in.at(1);
            const double num = schatten_norm(phi(f * a) - phi(f) * a, q);
            return guarded_ratio(num, operator_norm(a) * schatten_norm(f, p));
        }
        case Kind::B: {
            const Mat& a = in.at(0);
            const Mat& f = in.at(1);
            const Mat& b = in.at(2);
            const double num = schatten_norm(phi(a * f * b) - a * phi(f) * b, q);
            return guarded_ratio(num, operator_norm(a) * schatten_norm(f, p) * operator_norm(b));
        }
        case Kind::rank_one: {
            // inputs are x ⊗ y with unit x, y, so the denominator is 1
            return schatten_norm(phi(in.at(0)), q) / in.at(0).norm();
        }
        default:
            throw InputError("defining_ratio: kind " + to_string(kind) + " is not a centralizer constant");
    }
}

struct EstimateOptions {
    unsigned threads = 1;
};

namespace detail {

template <typename Ratio>
EstimateReport max_ratio(Kind kind, const Sampler& sampler, std::size_t N, Ratio&& ratio, unsigned threads)
{
    if (N < 1)
        throw InputError("estimate: need at least one sample");
    const auto values = parallel_map<double>(N, threads, [&](std::size_t i) {
        const auto in = draw_inputs(kind == Kind::distance || kind == Kind::residual ? Kind::distance : kind, sampler, i);
        double r = 0.0;
        try {
            r = ratio(in);
        } catch (const SampleFailure&) {
            throw;
        } catch (const NumericError& e) {
            throw SampleFailure(std::string(e.what()) + " at sample " + std::to_string(i), i, in);
        }
        if (!std::isfinite(r))
            throw SampleFailure("non-finite " + to_string(kind) + " ratio at sample " + std::to_string(i), i, in);
        return r;
    });
    EstimateReport rep;
    rep.kind = kind;
    rep.samples = N;
    rep.seed = sampler.seed;
    rep.n = sampler.n;
    rep.tag = to_string(sampler.tag);
    for (std::size_t i = 0; i < N; ++i) {
        if (values[i] > rep.value || i == 0) {
            rep.value = values[i];
            rep.witness_index = i;
        }
    }
    rep.witness = draw_inputs(kind == Kind::distance || kind == Kind::residual ? Kind::distance : kind, sampler,
                              rep.witness_index);
    return rep;
}

} // namespace detail

inline EstimateReport estimate_constant(const CentralizerSpec& sp, Kind kind, const Sampler& sampler, std::size_t N,
                                        EstimateOptions opts = {})
{
    return detail::max_ratio(
        kind, sampler, N, [&](const std::vector<Mat>& in) { return defining_ratio(sp, kind, in); }, opts.threads);
}

// ||a(f) - b(f)||_q / ||f||_p with p, q taken from a.
inline double distance_ratio(const CentralizerSpec& a, const CentralizerSpec& b, const Mat& f)
{
    const double num = schatten_norm(finite_output(evaluate(a, f)) - finite_output(evaluate(b, f)), target_index(a));
    return guarded_ratio(num, schatten_norm(f, domain_index(a)));
}

inline EstimateReport distance_estimate(const CentralizerSpec& a, const CentralizerSpec& b, const Sampler& sampler,
                                        std::size_t N, EstimateOptions opts = {})
{
    return detail::max_ratio(
        Kind::distance, sampler, N, [&](const std::vector<Mat>& in) { return distance_ratio(a, b, in.at(0)); },
        opts.threads);
}

// Recomputes the ratio of a recorded witness.
inline double replay_ratio(const CentralizerSpec& sp, Kind kind, const std::vector<Mat>& witness)
{
    return defining_ratio(sp, kind, witness);
}

// Bound on Q obtained from a left or right centralizer constant.
inline double quasilinearity_bound(PIndex p, PIndex q, double centralizer_constant)
{
    const double dq = concavity_modulus(q);
    const double half = p.is_inf() ? std::numeric_limits<double>::infinity() : p.value() / 2.0;
    return 4.0 * dq * dq * std::sqrt(concavity_modulus(PIndex(half))) * centralizer_constant;
}

// ---------------------------------------------------------------------------
// Distance to module morphisms
// ---------------------------------------------------------------------------

// right: morphisms of right modules, f -> L f.  left: morphisms of left modules, f -> f L.
enum class Side { left, right };

inline std::string to_string(Side s) { return s == Side::left ? "left" : "right"; }

inline Side side_from_string(const std::string& s)
{
    if (s == "left")
        return Side::left;
    if (s == "right")
        return Side::right;
    throw InputError("side must be 'left' or 'right', got '" + s + "'");
}

struct MorphismFit {
    Mat         L;
    Side        side = Side::right;
    double      residual = 0.0;      // max_i ||Φ(f_i) - m(f_i)||_q / ||f_i||_p
    std::size_t worst_index = 0;
    bool        rank_deficient = false;
    Index       rank = 0;
};

inline Mat apply_morphism(Side side, const Mat& L, const Mat& f) { return side == Side::right ? Mat(L * f) : Mat(f * L); }

//
// Least squares in the Frobenius metric over all samples at once; the
// residual is then measured in the (p, q) geometry of the spec.
//
inline MorphismFit fit_morphism(const CentralizerSpec& sp, Side side, const std::vector<Mat>& samples, PIndex p,
                                PIndex q)
{
    if (samples.empty())
        throw InputError("fit_morphism: no samples");
    const Index rows = samples.front().rows();
    const Index cols = samples.front().cols();
    for (const auto& f : samples)
        if (f.rows() != rows || f.cols() != cols)
            throw InputError("fit_morphism: samples differ in shape");

    std::vector<Mat> images;
    images.reserve(samples.size());
    for (const auto& f : samples)
        images.push_back(evaluate(sp, f));

    const auto N = static_cast<Index>(samples.size());
    MorphismFit out;
    out.side = side;
    if (side == Side::right) {
        // L F = Y with F = [f_1 ... f_N]; solved as F^H L^H = Y^H.
        Mat F(rows, cols * N), Y(rows, cols * N);
        for (Index i = 0; i < N; ++i) {
            F.middleCols(i * cols, cols) = samples[static_cast<std::size_t>(i)];
            Y.middleCols(i * cols, cols) = images[static_cast<std::size_t>(i)];
        }
        const Mat Fh = F.adjoint();
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(Fh);
        out.L = cod.solve(Mat(Y.adjoint())).adjoint();
        out.rank = cod.rank();
        out.rank_deficient = cod.rank() < rows;
    } else {
        // F G = Y with F the samples stacked vertically.
        Mat F(rows * N, cols), Y(rows * N, cols);
        for (Index i = 0; i < N; ++i) {
            F.middleRows(i * rows, rows) = samples[static_cast<std::size_t>(i)];
            Y.middleRows(i * rows, rows) = images[static_cast<std::size_t>(i)];
        }
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(F);
        out.L = cod.solve(Y);
        out.rank = cod.rank();
        out.rank_deficient = cod.rank() < cols;
    }

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double r = guarded_ratio(schatten_norm(images[i] - apply_morphism(side, out.L, samples[i]), q),
                                       schatten_norm(samples[i], p));
        if (!std::isfinite(r))
            throw SampleFailure("non-finite fit residual at sample " + std::to_string(i), i, {samples[i]});
        if (r > out.residual || i == 0) {
            out.residual = r;
            out.worst_index = i;
        }
    }
    return out;
}

// The side on which a spec is naturally a morphism or centralizer.
inline Side natural_side(const CentralizerSpec& sp)
{
    return std::visit(
        [&](const auto& n) -> Side {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, spec::RightMultiplication> || std::is_same_v<T, spec::Localized>) {
                return Side::left;
            } else if constexpr (std::is_same_v<T, spec::Adjoint>) {
                return natural_side(*n.inner) == Side::left ? Side::right : Side::left;
            } else if constexpr (std::is_same_v<T, spec::Scaled>) {
                return natural_side(*n.inner);
            } else if constexpr (std::is_same_v<T, spec::Sum>) {
                for (const auto& t : n.terms)
                    if (!t->template as<spec::Zero>())
                        return natural_side(*t);
                return Side::right;
            } else {
                return Side::right;
            }
        },
        sp.node());
}

inline std::vector<Mat> draw_samples(const Sampler& sampler, std::size_t N)
{
    std::vector<Mat> out;
    out.reserve(N);
    for (std::size_t i = 0; i < N; ++i)
        out.push_back(sampler.unit(i));
    return out;
}

// ---------------------------------------------------------------------------
// Gaussian averages
// ---------------------------------------------------------------------------

//
// Monte Carlo estimate of (E ||sum_k g_k v_k||^2)^{1/2} for independent
// standard complex Gaussians g_k, v_k the images of an orthonormal basis.
// The standard error is propagated from the second moment by the delta method.
//
template <typename Column, typename Norm>
EstimateReport gamma_summing_mc(const std::vector<Column>& columns, Norm&& norm, std::size_t N, std::uint64_t seed,
                                EstimateOptions opts = {})
{
    if (N < 1)
        throw InputError("gamma_summing_mc: need at least one sample");
    EstimateReport rep;
    rep.kind = Kind::gamma;
    rep.samples = N;
    rep.seed = seed;
    rep.n = static_cast<Index>(columns.size());
    rep.tag = "gaussian";
    rep.note = "Monte Carlo mean; standard_error from the delta method";
    if (N < 100) {
        rep.warning = true;
        rep.warning_text = "fewer than 100 Gaussian samples";
    }
    if (columns.empty())
        return rep;

    const auto sq = parallel_map<double>(N, opts.threads, [&](std::size_t i) {
        auto rng = stream_rng(seed, i);
        Column acc = complex_gaussian(rng) * columns.front();
        for (std::size_t k = 1; k < columns.size(); ++k)
            acc = acc + complex_gaussian(rng) * columns[k];
        const double v = norm(acc);
        if (!std::isfinite(v))
            throw NumericError("gamma_summing_mc: non-finite norm at sample " + std::to_string(i));
        return v * v;
    });
    double mean = 0.0;
    for (double v : sq)
        mean += v;
    mean /= static_cast<double>(N);
    double var = 0.0;
    for (double v : sq)
        var += (v - mean) * (v - mean);
    var = N > 1 ? var / static_cast<double>(N - 1) : 0.0;
    rep.value = std::sqrt(mean);
    rep.standard_error = rep.value > 0.0 ? std::sqrt(var / static_cast<double>(N)) / (2.0 * rep.value) : 0.0;
    return rep;
}

// Columns of a matrix as vectors, for gamma_summing_mc into a Hilbert target.
inline std::vector<Vec> columns_of(const Mat& v)
{
    std::vector<Vec> out;
    for (Index k = 0; k < v.cols(); ++k)
        out.push_back(v.col(k));
    return out;
}

// ---------------------------------------------------------------------------
// Dimension sweeps
// ---------------------------------------------------------------------------

struct ProfileRow {
    Index         dim = 0;
    std::string   kind;
    double        value = 0.0;
    std::size_t   samples = 0;
    std::uint64_t seed = 0;
};

struct Profile {
    std::vector<ProfileRow> rows;
};

inline std::string format_double(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string to_csv(const Profile& prof, const std::string& config_hash = {})
{
    std::string out;
    if (!config_hash.empty())
        out += "# config " + config_hash + "\n";
    out += "dim,kind,value,samples,seed\n";
    for (const auto& r : prof.rows)
        out += std::to_string(r.dim) + "," + r.kind + "," + format_double(r.value) + "," + std::to_string(r.samples) +
               "," + std::to_string(r.seed) + "\n";
    return out;
}

inline void require_ascending(const std::vector<Index>& dims)
{
    if (dims.empty())
        throw InputError("dims must be nonempty");
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (dims[i] < 1)
            throw InputError("dims must be positive");
        if (i > 0 && dims[i] <= dims[i - 1])
            throw InputError("dims must be strictly ascending");
    }
}

// ||kp_phi(1_{[n]} / n^{1/p})||_p for each n; equals log(n)/p for ϕ(s,t) = s.
inline Profile kp_growth_profile(const std::vector<Index>& dims, PIndex p, const LipschitzFn& fn = phi::kalton_peck())
{
    require_ascending(dims);
    Profile prof;
    for (Index n : dims)
        prof.rows.push_back({n, "kp_norm", lp_norm(kp_phi(normalized_indicator(n, p), fn, p), p), 1, 0});
    return prof;
}

using SpecFactory = std::function<SpecPtr(Index)>;

struct SweepParams {
    std::uint64_t seed = 0;
    Distribution  tag = Distribution::haar_spectral;
    std::size_t   samples = 100;
    std::size_t   samples_per_dim = 0; // if set, at least this many samples per unit of dimension
    unsigned      threads = 1;
    Side          side = Side::right;

    // A morphism fit in dimension n has n^2 unknowns; rank-one samples pin down
    // only n equations each, so sweeps scale the sample count with n.
    std::size_t count(Index n) const { return std::max(samples, samples_per_dim * static_cast<std::size_t>(n)); }
};

// One row per dimension: a centralizer constant, or the morphism fit residual.
inline Profile growth_profile(Kind kind, const SpecFactory& make, const std::vector<Index>& dims,
                              const SweepParams& params)
{
    require_ascending(dims);
    Profile prof;
    for (Index n : dims) {
        const SpecPtr sp = make(n);
        const Sampler sampler{params.seed, n, domain_index(*sp), params.tag};
        const std::size_t N = params.count(n);
        double value = 0.0;
        if (kind == Kind::residual) {
            value = fit_morphism(*sp, params.side, draw_samples(sampler, N), domain_index(*sp), target_index(*sp))
                        .residual;
        } else {
            value = estimate_constant(*sp, kind, sampler, N, {params.threads}).value;
        }
        prof.rows.push_back({n, to_string(kind), value, N, params.seed});
    }
    return prof;
}

} // namespace clab
