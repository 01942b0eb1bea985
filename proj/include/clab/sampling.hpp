#pragma once
//
// Seeded random matrices. Every sample index owns an independent generator
// derived from (seed, index), so streams can be split across threads and
// any single sample can be regenerated on its own.
//

#include "clab/matcore.hpp"

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

namespace clab {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline Rng stream_rng(std::uint64_t seed, std::uint64_t index)
{
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

// Standard complex Gaussian, E|g|^2 = 1.
inline cplx complex_gaussian(Rng& rng)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    const double re = nd(rng);
    const double im = nd(rng);
    const double c = 1.0 / std::numbers::sqrt2;
    return {re * c, im * c};
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline Vec gaussian_vector(Rng& rng, Index n)
{
    Vec v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = complex_gaussian(rng);
    return v;
}

inline Vec unit_vector(Rng& rng, Index n)
{
    Vec v = gaussian_vector(rng, n);
    while (v.norm() == 0.0)
        v = gaussian_vector(rng, n);
    return v / v.norm();
}

inline Mat ginibre(Rng& rng, Index rows, Index cols)
{
    Mat m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            m(i, j) = complex_gaussian(rng);
    return m;
}

// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R removed.
inline Mat haar_unitary(Rng& rng, Index n)
{
    const Mat z = ginibre(rng, n, n);
    Eigen::HouseholderQR<Mat> qr(z);
    Mat q = qr.householderQ() * Mat::Identity(n, n);
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j) {
        const double m = std::abs(r(j, j));
        if (m > 0.0)
            q.col(j) *= r(j, j) / m;
    }
    return q;
}

// Haar unitary times a positive contraction with uniform spectrum on [0, 1].
inline Mat unit_ball_operator(Rng& rng, Index n)
{
    const Mat u = haar_unitary(rng, n);
    const Mat w = haar_unitary(rng, n);
    Eigen::VectorXd t(n);
    for (Index i = 0; i < n; ++i)
        t(i) = uniform01(rng);
    return u * w * t.cast<cplx>().asDiagonal() * w.adjoint();
}

enum class Distribution {
    haar_spectral, // U diag(σ) V with σ uniform on (0, 1]
    ginibre,
    rank_one,      // x ⊗ y, Gaussian directions
    sparse,        // x ⊗ y with y flat on a random support of random size
    mixed,         // cycles through the four above by sample index
};

inline std::string to_string(Distribution d)
{
    switch (d) {
        case Distribution::haar_spectral: return "haar_spectral";
        case Distribution::ginibre: return "ginibre";
        case Distribution::rank_one: return "rank_one";
        case Distribution::sparse: return "sparse";
        case Distribution::mixed: return "mixed";
    }
    return "?";
}

inline Distribution distribution_from_string(const std::string& s)
{
    for (auto d : {Distribution::haar_spectral, Distribution::ginibre, Distribution::rank_one, Distribution::sparse,
                   Distribution::mixed})
        if (to_string(d) == s)
            return d;
    throw InputError("unknown sampler distribution '" + s + "'");
}

inline Mat raw_sample(Rng& rng, Index n, Distribution d, std::uint64_t index)
{
    if (d == Distribution::mixed) {
        static constexpr Distribution cycle[] = {Distribution::ginibre, Distribution::haar_spectral,
                                                 Distribution::rank_one, Distribution::sparse};
        d = cycle[index % 4];
    }
    switch (d) {
        case Distribution::haar_spectral: {
            const Mat u = haar_unitary(rng, n);
            const Mat v = haar_unitary(rng, n);
            Eigen::VectorXd s(n);
            for (Index i = 0; i < n; ++i)
                s(i) = 1.0 - uniform01(rng);
            return u * s.cast<cplx>().asDiagonal() * v.adjoint();
        }
        case Distribution::ginibre:
            return ginibre(rng, n, n);
        case Distribution::rank_one:
            return rank_one(unit_vector(rng, n), unit_vector(rng, n));
        case Distribution::sparse: {
            const Vec x = unit_vector(rng, n);
            const Index k = 1 + static_cast<Index>(std::uniform_int_distribution<std::uint64_t>(
                                    0, static_cast<std::uint64_t>(n - 1))(rng));
            std::vector<Index> idx(static_cast<std::size_t>(n));
            std::iota(idx.begin(), idx.end(), Index(0));
            std::shuffle(idx.begin(), idx.end(), rng);
            Vec y = Vec::Zero(n);
            for (Index i = 0; i < k; ++i)
                y(idx[static_cast<std::size_t>(i)]) = std::polar(1.0, 2.0 * std::numbers::pi * uniform01(rng));
            return rank_one(x, y / y.norm());
        }
        case Distribution::mixed:
            break;
    }
    throw InputError("raw_sample: bad distribution");
}

//
// Sample source for operators on C^n normalized in S^p.
//
struct Sampler {
    std::uint64_t seed = 0;
    Index         n    = 4;
    PIndex        p{2.0};
    Distribution  tag  = Distribution::haar_spectral;

    Rng rng(std::uint64_t index) const { return stream_rng(seed, index); }

    // Unit-sphere element of S^p drawn from an existing per-sample generator.
    Mat unit(Rng& r, std::uint64_t index) const
    {
        for (int attempt = 0; attempt < 64; ++attempt) {
            Mat f = raw_sample(r, n, tag, index);
            const double nf = schatten_norm(f, p);
            if (nf > 1e-12)
                return f / nf;
        }
        throw NumericError("sampler: could not draw a sample with nonzero norm");
    }

    Mat unit(std::uint64_t index) const
    {
        auto r = rng(index);
        return unit(r, index);
    }
};

} // namespace clab
