#pragma once
//
// Experiment runner behind the command line tool. A config is a JSON object;
// running it writes CSV/JSON artifacts and a manifest into an output
// directory. Identical configs produce identical bytes.
//

#include "clab/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace clab {

inline constexpr const char* kVersion = "0.3.1";

inline const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names = {"constants", "growth",  "kp_growth", "gamma",
                                                   "fit",       "splitting", "modulus", "distance", "expansion"};
    return names;
}

// Exit codes of the command line tool.
enum ExitCode : int { exit_ok = 0, exit_failed_check = 1, exit_invalid_config = 2, exit_numeric_failure = 3 };

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

inline json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

// Replaces spec references given as file paths by the referenced documents.
inline json resolve_config(json cfg, const std::filesystem::path& base_dir)
{
    for (const char* key : {"spec", "spec_b"}) {
        if (cfg.contains(key) && cfg[key].is_string()) {
            std::filesystem::path p = cfg[key].get<std::string>();
            if (p.is_relative())
                p = base_dir / p;
            cfg[key] = read_json_file(p);
        }
    }
    return cfg;
}

inline bool needs_spec(const std::string& experiment)
{
    return experiment != "kp_growth" && experiment != "gamma";
}

inline std::vector<Index> config_dims(const json& cfg)
{
    if (!cfg.contains("dims") || !cfg["dims"].is_array())
        throw InputError("config needs a \"dims\" array");
    std::vector<Index> dims;
    for (const auto& d : cfg["dims"]) {
        if (!d.is_number_integer())
            throw InputError("dims must be integers");
        dims.push_back(d.get<Index>());
    }
    require_ascending(dims);
    return dims;
}

inline bool is_count(const json& j) { return j.is_number_integer() && j.get<long long>() >= 0; }

// Throws InputError describing the first problem found.
inline void validate_config(const json& cfg)
{
    if (!cfg.is_object())
        throw InputError("config must be a JSON object");
    if (!cfg.contains("experiment") || !cfg["experiment"].is_string())
        throw InputError("config needs an \"experiment\" name");
    const auto exp = cfg["experiment"].get<std::string>();
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), exp) == names.end())
        throw InputError("unknown experiment '" + exp + "'");
    if (!cfg.contains("seed") || !is_count(cfg["seed"]))
        throw InputError("config needs a nonnegative integer \"seed\"");
    const auto dims = config_dims(cfg);
    for (const char* key : {"p", "q", "s"})
        if (cfg.contains(key))
            pindex_from_json(cfg[key]);
    if (cfg.contains("samples") && (!is_count(cfg["samples"]) || cfg["samples"].get<std::size_t>() < 1))
        throw InputError("\"samples\" must be a positive integer");
    if (cfg.contains("samples_per_dim") && !is_count(cfg["samples_per_dim"]))
        throw InputError("\"samples_per_dim\" must be a nonnegative integer");
    if (cfg.contains("sampler"))
        distribution_from_string(cfg["sampler"].get<std::string>());
    if (cfg.contains("kinds")) {
        if (!cfg["kinds"].is_array() || cfg["kinds"].empty())
            throw InputError("\"kinds\" must be a nonempty array");
        for (const auto& k : cfg["kinds"])
            kind_from_string(k.get<std::string>());
    }
    if (cfg.contains("side") && cfg["side"].get<std::string>() != "auto")
        side_from_string(cfg["side"].get<std::string>());
    if (cfg.contains("tolerances")) {
        if (!cfg["tolerances"].is_object())
            throw InputError("\"tolerances\" must be an object");
        for (const auto& [k, v] : cfg["tolerances"].items())
            if (!v.is_number() || !(v.get<double>() > 0.0))
                throw InputError("tolerance '" + k + "' must be a positive number");
    }
    if (needs_spec(exp)) {
        if (!cfg.contains("spec"))
            throw InputError("experiment '" + exp + "' needs a \"spec\"");
        spec_from_json(cfg["spec"], dims.front());
    }
    if (exp == "distance") {
        if (!cfg.contains("spec_b"))
            throw InputError("experiment 'distance' needs a \"spec_b\"");
        spec_from_json(cfg["spec_b"], dims.front());
    }
    if (exp == "gamma") {
        if (!cfg.contains("operator"))
            throw InputError("experiment 'gamma' needs an \"operator\" matrix or generator");
        const auto target = cfg.value("target", std::string("hilbert"));
        if (target != "hilbert" && target != "z2")
            throw InputError("gamma target must be 'hilbert' or 'z2'");
    }
}

// Applies command line overrides to a config document.
struct Overrides {
    std::optional<std::uint64_t>      seed;
    std::optional<std::size_t>        samples;
    std::optional<std::vector<Index>> dims;
    std::optional<std::string>        sampler;
    std::optional<std::string>        output;
    std::optional<unsigned>           threads;
};

inline json apply_overrides(json cfg, const Overrides& o)
{
    if (o.seed)
        cfg["seed"] = *o.seed;
    if (o.samples)
        cfg["samples"] = *o.samples;
    if (o.dims)
        cfg["dims"] = *o.dims;
    if (o.sampler)
        cfg["sampler"] = *o.sampler;
    if (o.output)
        cfg["output"] = *o.output;
    if (o.threads)
        cfg["threads"] = *o.threads;
    return cfg;
}

// The part of the config that determines the artifacts. Output location and
// thread count do not change the results, so they are left out of the hash.
inline json hashed_part(const json& cfg)
{
    json h = cfg;
    h.erase("output");
    h.erase("threads");
    return h;
}

inline std::string default_output_dir()
{
    if (const char* env = std::getenv("CLAB_OUTPUT_DIR"); env && *env)
        return env;
    return "clab-out";
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

struct RunResult {
    int                      status = exit_ok;
    std::string              message;
    std::filesystem::path    output_dir;
    std::vector<std::string> files;
};

namespace detail {

class ArtifactWriter {
public:
    ArtifactWriter(std::filesystem::path dir, std::string config_hash)
        : dir_(std::move(dir)), config_hash_(std::move(config_hash))
    {
        std::filesystem::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& content)
    {
        std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write '" + (dir_ / name).string() + "'");
        out << content;
        files_.push_back({name, fnv1a_hex(content)});
    }

    void write_json(const std::string& name, json doc)
    {
        doc["config_hash"] = config_hash_;
        write(name, doc.dump(2) + "\n");
    }

    const std::string& config_hash() const { return config_hash_; }
    const std::filesystem::path& dir() const { return dir_; }
    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

private:
    std::filesystem::path                            dir_;
    std::string                                      config_hash_;
    std::vector<std::pair<std::string, std::string>> files_;
};

struct Context {
    json               cfg;
    std::string        experiment;
    std::vector<Index> dims;
    std::uint64_t      seed = 0;
    Distribution       tag = Distribution::haar_spectral;
    std::size_t        samples = 200;
    std::size_t        samples_per_dim = 0;
    unsigned           threads = 1;
    std::string        spec_hash;
    json               notes = json::object();

    SpecPtr spec(Index n, const char* key = "spec") const { return spec_from_json(cfg.at(key), n); }

    std::vector<Kind> kinds(std::vector<Kind> fallback) const
    {
        if (!cfg.contains("kinds"))
            return fallback;
        std::vector<Kind> out;
        for (const auto& k : cfg["kinds"])
            out.push_back(kind_from_string(k.get<std::string>()));
        return out;
    }

    Side side(const CentralizerSpec& sp) const
    {
        const auto s = cfg.value("side", std::string("auto"));
        return s == "auto" ? natural_side(sp) : side_from_string(s);
    }

    SweepParams sweep(Side side) const { return {seed, tag, samples, samples_per_dim, threads, side}; }

    PIndex index(const char* key, PIndex fallback) const
    {
        return cfg.contains(key) ? pindex_from_json(cfg.at(key)) : fallback;
    }
};

inline json report_entry(const EstimateReport& r, const CentralizerSpec* sp)
{
    json j = to_json(r);
    if (sp)
        j["spec"] = to_json(*sp);
    return j;
}

inline void run_constants(const Context& cx, ArtifactWriter& w, const std::vector<Kind>& kinds)
{
    Profile prof;
    json reports = json::array();
    for (Index n : cx.dims) {
        const SpecPtr sp = cx.spec(n);
        const Sampler sampler{cx.seed, n, domain_index(*sp), cx.tag};
        const std::size_t N = cx.sweep(Side::right).count(n);
        for (Kind k : kinds) {
            if (k == Kind::residual) {
                const auto fit = fit_morphism(*sp, cx.side(*sp), draw_samples(sampler, N), domain_index(*sp),
                                              target_index(*sp));
                prof.rows.push_back({n, "residual", fit.residual, N, cx.seed});
                json j = to_json(fit);
                j["n"] = n;
                j["kind"] = "residual";
                j.erase("L");
                reports.push_back(j);
                continue;
            }
            const auto rep = estimate_constant(*sp, k, sampler, N, {cx.threads});
            prof.rows.push_back({n, to_string(k), rep.value, N, cx.seed});
            reports.push_back(report_entry(rep, sp.get()));
        }
    }
    w.write(cx.experiment + ".csv", to_csv(prof, w.config_hash()));
    w.write_json("reports.json", {{"reports", reports}, {"spec_hash", cx.spec_hash}});
}

inline void run_kp_growth(const Context& cx, ArtifactWriter& w)
{
    const PIndex p = cx.index("p", PIndex(1.0));
    const LipschitzFn fn = cx.cfg.contains("phi") ? phi_from_json(cx.cfg["phi"]) : phi::kalton_peck();
    w.write("kp_growth.csv", to_csv(kp_growth_profile(cx.dims, p, fn), w.config_hash()));
}

inline void run_gamma(const Context& cx, ArtifactWriter& w)
{
    const auto target = cx.cfg.value("target", std::string("hilbert"));
    Profile prof;
    json reports = json::array();
    for (Index n : cx.dims) {
        const Mat v = mat_from_json(cx.cfg["operator"], n);
        EstimateReport rep;
        if (target == "hilbert") {
            rep = gamma_summing_mc(columns_of(v), [](const Vec& x) { return x.norm(); }, cx.samples, cx.seed,
                                   {cx.threads});
        } else {
            const QMapPtr phi = cx.cfg.contains("map") ? qmap_from_json(cx.cfg["map"], n) : z2_map();
            const auto cols = lifted_columns(v, *phi);
            rep = gamma_summing_mc(
                cols, [&](const TwistedVec& x) { return twisted_quasinorm(x, *phi, PIndex(2.0), PIndex(2.0)); },
                cx.samples, cx.seed, {cx.threads});
        }
        prof.rows.push_back({n, "gamma", rep.value, cx.samples, cx.seed});
        json j = to_json(rep);
        j["target"] = target;
        reports.push_back(j);
    }
    w.write("gamma.csv", to_csv(prof, w.config_hash()));
    w.write_json("reports.json", {{"reports", reports}});
}

inline void run_fit(const Context& cx, ArtifactWriter& w)
{
    Profile prof;
    json fits = json::array();
    for (Index n : cx.dims) {
        const SpecPtr sp = cx.spec(n);
        const Sampler sampler{cx.seed, n, domain_index(*sp), cx.tag};
        const std::size_t N = cx.sweep(Side::right).count(n);
        const auto fit =
            fit_morphism(*sp, cx.side(*sp), draw_samples(sampler, N), domain_index(*sp), target_index(*sp));
        prof.rows.push_back({n, "residual", fit.residual, N, cx.seed});
        json j = to_json(fit);
        j["n"] = n;
        j["samples"] = N;
        fits.push_back(j);
    }
    w.write("fit.csv", to_csv(prof, w.config_hash()));
    w.write_json("fits.json", {{"fits", fits}, {"spec_hash", cx.spec_hash}});
}

inline void run_splitting(const Context& cx, ArtifactWriter& w)
{
    const SpecPtr probe = cx.spec(cx.dims.front());
    const auto rows = splitting_distance([&](Index n) { return cx.spec(n); }, cx.dims, cx.sweep(cx.side(*probe)),
                                         cx.spec_hash);
    w.write("splitting.csv", to_csv(rows, w.config_hash()));
}

inline void run_modulus(const Context& cx, ArtifactWriter& w)
{
    Profile prof;
    json reports = json::array();
    for (Index n : cx.dims) {
        const SpecPtr sp = cx.spec(n);
        const PIndex pX = cx.index("p", domain_index(*sp));
        const PIndex pY = cx.index("q", target_index(*sp));
        const Sampler sampler{cx.seed, n, pX, cx.tag};
        const auto rep = quasinorm_modulus_probe(*sp, pY, pX, sampler, std::max<std::size_t>(cx.samples, 2),
                                                 {cx.threads});
        prof.rows.push_back({n, "modulus", rep.value, rep.samples, cx.seed});
        json j = report_entry(rep, sp.get());
        j["pY"] = to_json(pY);
        j["pX"] = to_json(pX);
        reports.push_back(j);
    }
    w.write("modulus.csv", to_csv(prof, w.config_hash()));
    w.write_json("reports.json", {{"reports", reports}, {"spec_hash", cx.spec_hash}});
}

inline void run_distance(const Context& cx, ArtifactWriter& w)
{
    Profile prof;
    json reports = json::array();
    for (Index n : cx.dims) {
        const SpecPtr a = cx.spec(n);
        const SpecPtr b = cx.spec(n, "spec_b");
        const Sampler sampler{cx.seed, n, domain_index(*a), cx.tag};
        const std::size_t N = cx.sweep(Side::right).count(n);
        const auto rep = distance_estimate(*a, *b, sampler, N, {cx.threads});
        prof.rows.push_back({n, "distance", rep.value, N, cx.seed});
        json j = report_entry(rep, a.get());
        j["spec_b"] = to_json(*b);
        reports.push_back(j);
    }
    w.write("distance.csv", to_csv(prof, w.config_hash()));
    w.write_json("reports.json", {{"reports", reports}, {"spec_hash", cx.spec_hash}});
}

// Rank-one expansion defect against the constant built from the measured Q.
inline void run_expansion(Context& cx, ArtifactWriter& w)
{
    const std::size_t terms = cx.cfg.value("series_terms", std::size_t{10000});
    Profile prof;
    json reports = json::array();
    for (Index n : cx.dims) {
        const SpecPtr sp = cx.spec(n);
        const PIndex p = domain_index(*sp);
        const PIndex q = target_index(*sp);
        const Sampler sampler{cx.seed, n, p, cx.tag};
        const std::size_t N = cx.sweep(Side::right).count(n);
        const auto qrep = estimate_constant(*sp, Kind::Q, sampler, N, {cx.threads});
        const auto M1 = expansion_constant(p, q, qrep.value, terms);
        const auto defects = parallel_map<double>(N, cx.threads, [&](std::size_t i) {
            const Mat f = sampler.unit(i);
            return guarded_ratio(expansion_defect(*sp, f, q), schatten_norm(f, p));
        });
        const double worst = *std::max_element(defects.begin(), defects.end());
        prof.rows.push_back({n, "Q", qrep.value, N, cx.seed});
        prof.rows.push_back({n, "M1", M1.value, N, cx.seed});
        prof.rows.push_back({n, "expansion_defect", worst, N, cx.seed});
        reports.push_back(report_entry(qrep, sp.get()));
        cx.notes["M1_series_terms"] = terms;
        cx.notes["M1_series_tail_bound"] = M1.tail_bound;
        cx.notes["M1_truncation"] = "series summed over k <= series_terms; the omitted tail is at most "
                                    "M1_series_tail_bound";
    }
    w.write("expansion.csv", to_csv(prof, w.config_hash()));
    w.write_json("reports.json", {{"reports", reports}, {"spec_hash", cx.spec_hash}});
}

} // namespace detail

inline json failure_report(const SampleFailure& e, const json& cfg)
{
    json inputs = json::array();
    for (const auto& m : e.inputs())
        inputs.push_back(to_json(m));
    json j = {{"error", e.what()}, {"kind", "numeric_failure"}, {"sample_index", e.index()}, {"inputs", inputs}};
    if (cfg.contains("spec"))
        j["spec"] = cfg["spec"];
    return j;
}

//
// Runs a resolved config. Invalid configs throw InputError before anything
// is written; numeric failures leave failure.json in the output directory.
//
inline RunResult run_experiment(const json& cfg_in, const std::string& output_override = {})
{
    validate_config(cfg_in);
    detail::Context cx;
    cx.cfg = cfg_in;
    cx.experiment = cfg_in["experiment"].get<std::string>();
    cx.dims = config_dims(cfg_in);
    cx.seed = cfg_in["seed"].get<std::uint64_t>();
    cx.tag = distribution_from_string(cfg_in.value("sampler", std::string("haar_spectral")));
    cx.samples = cfg_in.value("samples", std::size_t{200});
    cx.samples_per_dim = cfg_in.value("samples_per_dim", std::size_t{0});
    cx.threads = std::max(1u, cfg_in.value("threads", 1u));
    if (cfg_in.contains("spec"))
        cx.spec_hash = json_hash(cfg_in["spec"]);

    const std::string config_hash = json_hash(hashed_part(cfg_in));
    RunResult res;
    res.output_dir = !output_override.empty() ? output_override
                     : cfg_in.contains("output") ? cfg_in["output"].get<std::string>()
                                                 : default_output_dir();
    detail::ArtifactWriter w(res.output_dir, config_hash);

    try {
        const auto& e = cx.experiment;
        if (e == "constants")
            detail::run_constants(cx, w, cx.kinds({Kind::Q, Kind::L, Kind::R, Kind::B}));
        else if (e == "growth")
            detail::run_constants(cx, w, cx.kinds({Kind::residual}));
        else if (e == "kp_growth")
            detail::run_kp_growth(cx, w);
        else if (e == "gamma")
            detail::run_gamma(cx, w);
        else if (e == "fit")
            detail::run_fit(cx, w);
        else if (e == "splitting")
            detail::run_splitting(cx, w);
        else if (e == "modulus")
            detail::run_modulus(cx, w);
        else if (e == "distance")
            detail::run_distance(cx, w);
        else
            detail::run_expansion(cx, w);
    } catch (const SampleFailure& f) {
        w.write_json("failure.json", failure_report(f, cfg_in));
        res.status = exit_numeric_failure;
        res.message = f.what();
    } catch (const NumericError& f) {
        w.write_json("failure.json", {{"error", f.what()}, {"kind", "numeric_failure"}});
        res.status = exit_numeric_failure;
        res.message = f.what();
    }

    json files = json::array();
    for (const auto& [name, hash] : w.files())
        files.push_back({{"name", name}, {"fnv1a", hash}});
    json manifest = {{"experiment", cx.experiment},
                     {"version", kVersion},
                     {"spec_hash", cx.spec_hash},
                     {"seed", cx.seed},
                     {"config", hashed_part(cfg_in)},
                     {"files", files},
                     {"notes", cx.notes},
                     {"status", res.status}};
    w.write_json("manifest.json", manifest);
    for (const auto& f : w.files())
        res.files.push_back(f.first);
    return res;
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

struct ReplayLine {
    std::string kind;
    double      recorded = 0.0;
    double      replayed = 0.0;
    bool        ok = false;
};

inline ReplayLine replay_report(const json& r, double tol = 1e-12)
{
    ReplayLine line;
    line.kind = r.at("kind").get<std::string>();
    line.recorded = r.at("value").get<double>();
    const Kind kind = kind_from_string(line.kind);
    std::vector<Mat> wit;
    for (const auto& m : r.at("witness"))
        wit.push_back(mat_from_json(m));
    if (!r.contains("spec"))
        throw InputError("report has no spec to replay against");
    const SpecPtr sp = spec_from_json(r.at("spec"));
    if (kind == Kind::distance) {
        const SpecPtr b = spec_from_json(r.at("spec_b"));
        line.replayed = distance_ratio(*sp, *b, wit.at(0));
    } else if (kind == Kind::modulus) {
        const PIndex pY = pindex_from_json(r.at("pY"));
        const PIndex pX = pindex_from_json(r.at("pX"));
        const TwistedMat u{wit.at(0), wit.at(1)}, v{wit.at(2), wit.at(3)};
        auto norm = [&](const TwistedMat& t) { return twisted_quasinorm(t, *sp, pY, pX); };
        line.replayed = guarded_ratio(norm(u + v), norm(u) + norm(v));
    } else {
        line.replayed = replay_ratio(*sp, kind, wit);
    }
    line.ok = std::abs(line.replayed - line.recorded) <= tol * std::max(1.0, std::abs(line.recorded));
    return line;
}

// Accepts a single report or a document with a "reports" array.
inline std::vector<ReplayLine> replay_document(const json& doc, double tol = 1e-12)
{
    std::vector<ReplayLine> out;
    if (doc.contains("reports")) {
        for (const auto& r : doc["reports"])
            if (r.contains("witness"))
                out.push_back(replay_report(r, tol));
    } else {
        out.push_back(replay_report(doc, tol));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Built-ins
// ---------------------------------------------------------------------------

inline std::string list_builtins()
{
    struct Entry {
        const char* group;
        const char* name;
        const char* what;
    };
    static const Entry entries[] = {
        {"phi", "kalton_peck", "ϕ(s,t) = s; unbounded, gives the nontrivial Kalton-Peck maps"},
        {"phi", "rank_log", "ϕ(s,t) = t; depends on the rank of each coordinate only"},
        {"phi", "clamped", "ϕ(s,t) = min(s, c); bounded by c, gives trivial centralizers"},
        {"phi", "linear", "ϕ(s,t) = a·s + b·t"},
        {"phi", "zero", "ϕ = 0"},
        {"map", "kp_on_h", "Kalton-Peck map on C^n at p = 2; its twisted sum is Z2"},
        {"map", "linear", "y -> L y"},
        {"map", "bounded", "y -> M ||y|| sgn(y_k) e_k with k the largest coordinate; homogeneous, bounded"},
        {"map", "scaled / sum", "scalar multiples and sums of maps"},
        {"spec", "zero", "the zero centralizer S^p -> S^q"},
        {"spec", "kp_bicentralizer", "f -> sum s_n ϕ(-log(s_n/||f||_p), log n) x_n ⊗ y_n on S^p"},
        {"spec", "lift_quasilinear", "u -> sum s_k x_k ⊗ φ(y_k); right centralizer S^p -> S^q for p < 2, q > p"},
        {"spec", "lower_s", "h -> Ψ(u |h|^{p1/p2}) |h|^{p1/s} with 1/p1 = 1/p2 + 1/s, u the phase of h"},
        {"spec", "localize", "f -> Φ(f e) for an orthogonal projection e"},
        {"spec", "right_multiplication", "f -> f g, a morphism of left modules"},
        {"spec", "left_multiplication", "f -> L f, a morphism of right modules"},
        {"spec", "adjoint", "f -> Φ(f^H)^H, swaps the left and right structures"},
        {"spec", "scaled / sum", "linear combinations of specs"},
        {"op", "schatten_norm", "l^p quasinorm of the singular values"},
        {"op", "holder_factor", "sharp factorization h = f g with ||f||_p ||g||_s = ||h||_q"},
        {"op", "joint_root", "h = (f^H f + g^H g)^{1/2} with f = a h, g = b h, a and b contractions"},
        {"op", "spatial_part", "φ_η(y) read off from Φ(η ⊗ y)"},
        {"op", "trace_functional", "f -> tr(u |f|^{1/2} Φ(|f|^{1/2})), u the phase of f"},
        {"op", "estimate_constant", "max over samples of the Q, L, R or B defining ratio"},
        {"op", "fit_morphism", "least-squares one-sided multiplication and its worst residual"},
        {"op", "distance_estimate", "max over samples of ||a(f) - b(f)||_q / ||f||_p"},
        {"op", "gamma_summing_mc", "Monte Carlo (E||sum g_k v(e_k)||^2)^{1/2} with standard error"},
        {"op", "twisted_quasinorm", "||(g, f)||_Φ = ||g - Φf||_Y + ||f||_X"},
        {"op", "quasinorm_modulus_probe", "max over samples of ||u+v||_Φ / (||u||_Φ + ||v||_Φ)"},
        {"op", "splitting_distance", "morphism fit residual per dimension in the twisted quasinorm"},
        {"experiment", "constants", "Q, L, R, B estimates per dimension with replayable witnesses"},
        {"experiment", "growth", "one constant or the fit residual per dimension"},
        {"experiment", "kp_growth", "||kp_phi(1_[n] / n^{1/p})||_p per dimension"},
        {"experiment", "gamma", "gamma_summing_mc of an operator into C^n or into Z2"},
        {"experiment", "fit", "fit_morphism per dimension"},
        {"experiment", "splitting", "splitting_distance per dimension"},
        {"experiment", "modulus", "quasinorm_modulus_probe per dimension"},
        {"experiment", "distance", "distance_estimate between two specs per dimension"},
        {"experiment", "expansion", "rank-one expansion defect against the constant built from measured Q"},
    };
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-11s %-24s %s\n", "group", "name", "computes");
    out << line;
    for (const auto& e : entries) {
        std::snprintf(line, sizeof line, "%-11s %-24s ", e.group, e.name);
        out << line << e.what << "\n";
    }
    return out.str();
}

} // namespace clab
