#pragma once
//
// Commutative building blocks: finitely supported sequences, rank
// sequences and the Kalton-Peck maps x -> x·ϕ(log(||x||_p/|x|), log r_x).
//

#include "clab/matcore.hpp"

#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <string>

namespace clab {

using Seq = Vec;

//
// A two-variable function ϕ: R+^2 -> C with a Lipschitz constant. The name
// and parameters identify it for serialization.
//
struct LipschitzFn {
    std::string                                 name;
    std::vector<double>                         params;
    std::function<cplx(double, double)>         fn;
    double                                      lipschitz = 1.0;
    bool                                        vanishes_at_origin = true;
    double                                      sup_modulus = std::numeric_limits<double>::infinity();

    cplx operator()(double s, double t) const { return fn(s, t); }
    bool bounded() const { return std::isfinite(sup_modulus); }
};

namespace phi {

// ϕ(s,t) = s: the Kalton-Peck map, nontrivial.
inline LipschitzFn kalton_peck()
{
    return {"kalton_peck", {}, [](double s, double) { return cplx(s, 0.0); }, 1.0, true,
            std::numeric_limits<double>::infinity()};
}

// ϕ(s,t) = t: depends on the rank only.
inline LipschitzFn rank_log()
{
    return {"rank_log", {}, [](double, double t) { return cplx(t, 0.0); }, 1.0, true,
            std::numeric_limits<double>::infinity()};
}

// ϕ(s,t) = min(s, c): bounded, hence a trivial centralizer.
inline LipschitzFn clamped(double c = 1.0)
{
    if (!(c > 0.0))
        throw InputError("clamped: level must be positive");
    return {"clamped", {c}, [c](double s, double) { return cplx(std::min(s, c), 0.0); }, 1.0, true, c};
}

// ϕ(s,t) = a·s + b·t
inline LipschitzFn linear(double a, double b)
{
    return {"linear", {a, b}, [a, b](double s, double t) { return cplx(a * s + b * t, 0.0); },
            std::hypot(a, b), true,
            (a == 0.0 && b == 0.0) ? 0.0 : std::numeric_limits<double>::infinity()};
}

inline LipschitzFn zero() { return {"zero", {}, [](double, double) { return cplx(0.0); }, 0.0, true, 0.0}; }

using Factory = std::function<LipschitzFn(const std::vector<double>&)>;

inline std::map<std::string, Factory>& registry()
{
    static std::map<std::string, Factory> table = {
        {"kalton_peck", [](const std::vector<double>&) { return kalton_peck(); }},
        {"rank_log", [](const std::vector<double>&) { return rank_log(); }},
        {"clamped", [](const std::vector<double>& p) { return clamped(p.empty() ? 1.0 : p[0]); }},
        {"linear",
         [](const std::vector<double>& p) {
             if (p.size() != 2)
                 throw InputError("linear phi needs two parameters");
             return linear(p[0], p[1]);
         }},
        {"zero", [](const std::vector<double>&) { return zero(); }},
    };
    return table;
}

// Not synchronized; register before starting any parallel evaluation.
inline void register_phi(const std::string& name, Factory f) { registry()[name] = std::move(f); }

inline LipschitzFn make(const std::string& name, const std::vector<double>& params = {})
{
    const auto& table = registry();
    const auto it = table.find(name);
    if (it == table.end())
        throw InputError("unknown phi '" + name + "'");
    return it->second(params);
}

} // namespace phi

inline double lp_norm(const Seq& x, PIndex p)
{
    std::vector<double> m(static_cast<std::size_t>(x.size()));
    for (Index k = 0; k < x.size(); ++k)
        m[static_cast<std::size_t>(k)] = std::abs(x(k));
    return lp_of_moduli(std::move(m), p);
}

//
// r_x(n) = #{k : |x(k)| > |x(n)| or (|x(k)| = |x(n)| and k <= n)}, 1-based.
//
inline std::vector<std::size_t> rank_sequence(const Seq& x)
{
    const auto n = static_cast<std::size_t>(x.size());
    std::vector<double> mod(n);
    for (std::size_t k = 0; k < n; ++k)
        mod[k] = std::abs(x(static_cast<Index>(k)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mod[a] > mod[b]; });
    std::vector<std::size_t> rank(n);
    for (std::size_t pos = 0; pos < n; ++pos)
        rank[order[pos]] = pos + 1;
    return rank;
}

//
// Kalton-Peck map on l^p:  x_n ϕ(log(||x||_p / |x_n|), log r_x(n)),
// with the coordinates where x_n = 0 sent to 0.
//
inline Seq kp_phi(const Seq& x, const LipschitzFn& fn, PIndex p)
{
    if (p.is_inf())
        throw InputError("kp_phi: p must be finite");
    if (!x.allFinite())
        throw InputError("kp_phi: non-finite entries");
    Seq out = Seq::Zero(x.size());
    const double norm = lp_norm(x, p);
    if (norm == 0.0)
        return out;
    const auto rank = rank_sequence(x);
    for (Index k = 0; k < x.size(); ++k) {
        const double m = std::abs(x(k));
        if (m == 0.0)
            continue;
        const double s = std::log(norm / m);
        const double t = std::log(static_cast<double>(rank[static_cast<std::size_t>(k)]));
        out(k) = x(k) * fn(s, t);
    }
    return out;
}

// Normalized indicator 1_{[n]} / n^{1/p}.
inline Seq normalized_indicator(Index n, PIndex p)
{
    return Seq::Constant(n, cplx(std::pow(static_cast<double>(n), -p.inverse()), 0.0));
}

} // namespace clab
