#pragma once
//
// JSON forms of matrices, indices, specs and reports.
//
// Matrices: {"rows": r, "cols": c, "re": [...], "im": [...]} in row-major order,
// or a generator {"generator": "identity" | "ginibre" | "diagonal" | "projection", ...}
// resolved against a dimension n. Specs are tagged unions keyed by "type".
//

#include "clab/twisted.hpp"

#include <json.hpp>

#include <cstdio>
#include <string>

namespace clab {

using json = nlohmann::json;

// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Hash of the canonical (sorted-key, compact) dump.
inline std::string json_hash(const json& j) { return fnv1a_hex(j.dump()); }

// ---------------------------------------------------------------------------
// Scalars and matrices
// ---------------------------------------------------------------------------

inline json to_json(PIndex p)
{
    if (p.is_inf())
        return "inf";
    return p.value();
}

inline PIndex pindex_from_json(const json& j)
{
    if (j.is_string()) {
        if (j.get<std::string>() == "inf")
            return PIndex::infinity();
        throw InputError("index must be a positive number or \"inf\"");
    }
    if (!j.is_number())
        throw InputError("index must be a positive number or \"inf\"");
    return PIndex(j.get<double>());
}

inline json to_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline cplx cplx_from_json(const json& j)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw InputError("complex number must be a number or [re, im]");
}

inline json to_json(const Mat& m)
{
    json re = json::array(), im = json::array();
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

inline Mat mat_from_json(const json& j, Index n = 0)
{
    if (!j.is_object())
        throw InputError("matrix must be a JSON object");
    if (j.contains("generator")) {
        if (n < 1)
            throw InputError("matrix generator needs a dimension");
        const auto gen = j.at("generator").get<std::string>();
        const double scale = j.value("scale", 1.0);
        if (gen == "identity")
            return scale * Mat::Identity(n, n);
        if (gen == "ginibre") {
            if (!j.contains("seed"))
                throw InputError("ginibre generator needs a seed");
            auto rng = stream_rng(j.at("seed").get<std::uint64_t>(), static_cast<std::uint64_t>(n));
            return (scale / std::sqrt(static_cast<double>(n))) * ginibre(rng, n, n);
        }
        if (gen == "diagonal") {
            const auto& vals = j.at("values");
            if (!vals.is_array() || vals.empty())
                throw InputError("diagonal generator needs a nonempty values array");
            Mat m = Mat::Zero(n, n);
            for (Index i = 0; i < n; ++i)
                m(i, i) = scale * cplx_from_json(vals[static_cast<std::size_t>(i) % vals.size()]);
            return m;
        }
        if (gen == "projection") {
            const auto k = j.at("rank").get<Index>();
            if (k < 0 || k > n)
                throw InputError("projection rank out of range");
            Mat m = Mat::Zero(n, n);
            for (Index i = 0; i < k; ++i)
                m(i, i) = 1.0;
            return m;
        }
        throw InputError("unknown matrix generator '" + gen + "'");
    }
    const auto rows = j.at("rows").get<Index>();
    const auto cols = j.at("cols").get<Index>();
    const auto& re = j.at("re");
    const json im = j.contains("im") ? j.at("im") : json::array();
    if (rows < 0 || cols < 0 || re.size() != static_cast<std::size_t>(rows * cols) ||
        (!im.empty() && im.size() != re.size()))
        throw InputError("matrix entries do not match its shape");
    Mat m(rows, cols);
    std::size_t k = 0;
    for (Index i = 0; i < rows; ++i)
        for (Index c = 0; c < cols; ++c, ++k)
            m(i, c) = cplx(re[k].get<double>(), im.empty() ? 0.0 : im[k].get<double>());
    if (n > 0 && (rows != n || cols != n))
        throw InputError("explicit matrix has shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " but the experiment dimension is " + std::to_string(n));
    return m;
}

// ---------------------------------------------------------------------------
// ϕ functions, homogeneous maps and specs
// ---------------------------------------------------------------------------

inline json to_json(const LipschitzFn& fn)
{
    if (fn.params.empty())
        return fn.name;
    return {{"name", fn.name}, {"params", fn.params}};
}

inline LipschitzFn phi_from_json(const json& j)
{
    if (j.is_string())
        return phi::make(j.get<std::string>());
    if (j.is_object())
        return phi::make(j.at("name").get<std::string>(), j.value("params", std::vector<double>{}));
    throw InputError("phi must be a name or {\"name\", \"params\"}");
}

inline json to_json(const SchmidtOptions& o)
{
    return {{"zero_threshold", o.zero_threshold},
            {"backend", o.backend == SvdBackend::jacobi ? "jacobi" : "divide_conquer"}};
}

inline SchmidtOptions schmidt_from_json(const json& j)
{
    SchmidtOptions o;
    if (!j.is_object())
        return o;
    o.zero_threshold = j.value("zero_threshold", o.zero_threshold);
    const auto b = j.value("backend", std::string("divide_conquer"));
    if (b == "jacobi")
        o.backend = SvdBackend::jacobi;
    else if (b == "divide_conquer")
        o.backend = SvdBackend::divide_conquer;
    else
        throw InputError("unknown SVD backend '" + b + "'");
    return o;
}

inline json to_json(const QuasilinearMap& m)
{
    return std::visit(
        [](const auto& n) -> json {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, qmap::KPOnH>) {
                return {{"type", "kp_on_h"}, {"phi", to_json(n.phi)}};
            } else if constexpr (std::is_same_v<T, qmap::Linear>) {
                return {{"type", "linear"}, {"L", to_json(n.L)}};
            } else if constexpr (std::is_same_v<T, qmap::Bounded>) {
                return {{"type", "bounded"}, {"radius", n.radius}};
            } else if constexpr (std::is_same_v<T, qmap::Scaled>) {
                return {{"type", "scaled"}, {"c", to_json(n.c)}, {"inner", to_json(*n.inner)}};
            } else {
                json terms = json::array();
                for (const auto& t : n.terms)
                    terms.push_back(to_json(*t));
                return {{"type", "sum"}, {"terms", terms}};
            }
        },
        m.node());
}

inline QMapPtr qmap_from_json(const json& j, Index n)
{
    const auto type = j.at("type").get<std::string>();
    if (type == "kp_on_h")
        return make_qmap(qmap::KPOnH{phi_from_json(j.value("phi", json("kalton_peck")))});
    if (type == "linear")
        return make_qmap(qmap::Linear{mat_from_json(j.at("L"), n)});
    if (type == "bounded")
        return make_qmap(qmap::Bounded{j.value("radius", 1.0)});
    if (type == "scaled")
        return make_qmap(qmap::Scaled{cplx_from_json(j.at("c")), qmap_from_json(j.at("inner"), n)});
    if (type == "sum") {
        qmap::Sum s;
        for (const auto& t : j.at("terms"))
            s.terms.push_back(qmap_from_json(t, n));
        return make_qmap(std::move(s));
    }
    throw InputError("unknown map type '" + type + "'");
}

inline json to_json(const CentralizerSpec& sp)
{
    return std::visit(
        [](const auto& n) -> json {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, spec::Zero>) {
                return {{"type", "zero"}, {"p", to_json(n.p)}, {"q", to_json(n.q)}};
            } else if constexpr (std::is_same_v<T, spec::KPBicentralizer>) {
                json j = {{"type", "kp_bicentralizer"}, {"phi", to_json(n.phi)}, {"p", to_json(n.p)},
                          {"schmidt", to_json(n.schmidt)}};
                if (n.q)
                    j["q"] = to_json(*n.q);
                return j;
            } else if constexpr (std::is_same_v<T, spec::LiftedQuasilinear>) {
                return {{"type", "lift_quasilinear"}, {"map", to_json(*n.phi)}, {"p", to_json(n.p)},
                        {"q", to_json(n.q)}, {"schmidt", to_json(n.schmidt)}};
            } else if constexpr (std::is_same_v<T, spec::Lowered>) {
                return {{"type", "lower_s"}, {"inner", to_json(*n.inner)}, {"s", to_json(n.s)}};
            } else if constexpr (std::is_same_v<T, spec::Localized>) {
                return {{"type", "localize"}, {"inner", to_json(*n.inner)}, {"e", to_json(n.e)}};
            } else if constexpr (std::is_same_v<T, spec::RightMultiplication>) {
                return {{"type", "right_multiplication"}, {"g", to_json(n.g)}, {"p", to_json(n.p)}, {"q", to_json(n.q)}};
            } else if constexpr (std::is_same_v<T, spec::LeftMultiplication>) {
                return {{"type", "left_multiplication"}, {"L", to_json(n.L)}, {"p", to_json(n.p)}, {"q", to_json(n.q)}};
            } else if constexpr (std::is_same_v<T, spec::Adjoint>) {
                return {{"type", "adjoint"}, {"inner", to_json(*n.inner)}};
            } else if constexpr (std::is_same_v<T, spec::Scaled>) {
                return {{"type", "scaled"}, {"c", to_json(n.c)}, {"inner", to_json(*n.inner)}};
            } else {
                json terms = json::array();
                for (const auto& t : n.terms)
                    terms.push_back(to_json(*t));
                return {{"type", "sum"}, {"terms", terms}};
            }
        },
        sp.node());
}

inline PIndex index_field(const json& j, const char* key, double fallback)
{
    return j.contains(key) ? pindex_from_json(j.at(key)) : PIndex(fallback);
}

// Builds a spec at dimension n; n is only needed when matrices are generated.
inline SpecPtr spec_from_json(const json& j, Index n = 0)
{
    if (!j.is_object() || !j.contains("type"))
        throw InputError("spec must be an object with a \"type\" field");
    const auto type = j.at("type").get<std::string>();
    const SchmidtOptions so = j.contains("schmidt") ? schmidt_from_json(j.at("schmidt")) : SchmidtOptions{};
    if (type == "zero")
        return make_spec(spec::Zero{index_field(j, "p", 2.0), index_field(j, "q", 2.0)});
    if (type == "kp_bicentralizer") {
        std::optional<PIndex> q;
        if (j.contains("q"))
            q = pindex_from_json(j.at("q"));
        return make_spec(
            spec::KPBicentralizer{phi_from_json(j.value("phi", json("kalton_peck"))), index_field(j, "p", 2.0), so, q});
    }
    if (type == "lift_quasilinear") {
        const json m = j.value("map", json{{"type", "kp_on_h"}});
        return make_spec(
            spec::LiftedQuasilinear{qmap_from_json(m, n), index_field(j, "p", 1.0), index_field(j, "q", 2.0), so});
    }
    if (type == "lower_s")
        return make_spec(spec::Lowered{spec_from_json(j.at("inner"), n), index_field(j, "s", 2.0)});
    if (type == "localize") {
        Mat e = mat_from_json(j.at("e"), n);
        if (!is_projection(e))
            throw InputError("localize: e is not an orthogonal projection");
        return make_spec(spec::Localized{spec_from_json(j.at("inner"), n), std::move(e)});
    }
    if (type == "right_multiplication")
        return make_spec(
            spec::RightMultiplication{mat_from_json(j.at("g"), n), index_field(j, "p", 2.0), index_field(j, "q", 2.0)});
    if (type == "left_multiplication")
        return make_spec(
            spec::LeftMultiplication{mat_from_json(j.at("L"), n), index_field(j, "p", 2.0), index_field(j, "q", 2.0)});
    if (type == "adjoint")
        return make_spec(spec::Adjoint{spec_from_json(j.at("inner"), n)});
    if (type == "scaled")
        return make_spec(spec::Scaled{cplx_from_json(j.at("c")), spec_from_json(j.at("inner"), n)});
    if (type == "sum") {
        spec::Sum s;
        for (const auto& t : j.at("terms"))
            s.terms.push_back(spec_from_json(t, n));
        if (s.terms.empty())
            throw InputError("sum spec needs at least one term");
        return make_spec(std::move(s));
    }
    throw InputError("unknown spec type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json to_json(const EstimateReport& r)
{
    json w = json::array();
    for (const auto& m : r.witness)
        w.push_back(to_json(m));
    json out = {{"kind", to_string(r.kind)},
                {"value", r.value},
                {"samples", r.samples},
                {"seed", r.seed},
                {"n", r.n},
                {"tag", r.tag},
                {"witness_index", r.witness_index},
                {"witness", w},
                {"note", r.note}};
    if (r.kind == Kind::gamma)
        out["standard_error"] = r.standard_error;
    if (r.warning)
        out["warning"] = r.warning_text;
    return out;
}

inline json to_json(const MorphismFit& f)
{
    return {{"side", to_string(f.side)},   {"residual", f.residual}, {"worst_index", f.worst_index},
            {"rank", f.rank},              {"rank_deficient", f.rank_deficient}, {"L", to_json(f.L)}};
}

} // namespace clab
