// Command line front end: run, list, replay, validate.

#include "clab/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int report_error(const std::string& kind, const std::string& what)
{
    std::cerr << clab::json{{"error", what}, {"kind", kind}}.dump() << "\n";
    return kind == "invalid_config" ? clab::exit_invalid_config : clab::exit_numeric_failure;
}

clab::json load_config(const std::string& path, const clab::Overrides& ov)
{
    const std::filesystem::path p(path);
    auto cfg = clab::resolve_config(clab::read_json_file(p), p.parent_path());
    return clab::apply_overrides(std::move(cfg), ov);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical lab for nonlinear centralizers between Schatten classes"};
    app.require_subcommand(1);

    std::string config_path;
    clab::Overrides ov;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::vector<long> dims;
    std::string sampler, output;
    unsigned threads = 0;

    auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
    run->add_option("config", config_path, "Config file")->required();
    auto* o_seed = run->add_option("--seed", seed, "Override the sampler seed");
    auto* o_samples = run->add_option("--samples", samples, "Override the sample count");
    auto* o_dims = run->add_option("--dims", dims, "Override the dimension list")->delimiter(',');
    auto* o_sampler = run->add_option("--sampler", sampler, "Override the sampler distribution");
    auto* o_output = run->add_option("--output", output, "Override the output directory");
    auto* o_threads = run->add_option("--threads", threads, "Worker threads");

    auto* validate = app.add_subcommand("validate", "Check a config without running it");
    validate->add_option("config", config_path, "Config file")->required();

    std::string replay_path;
    double tol = 1e-12;
    auto* replay = app.add_subcommand("replay", "Re-evaluate recorded witnesses");
    replay->add_option("reports", replay_path, "reports.json or a single report")->required();
    replay->add_option("--tol", tol, "Relative agreement required");

    auto* list = app.add_subcommand("list", "List built-in functions, maps, specs and experiments");

    CLI11_PARSE(app, argc, argv);

    if (*o_seed)
        ov.seed = seed;
    if (*o_samples)
        ov.samples = samples;
    if (*o_dims)
        ov.dims = std::vector<clab::Index>(dims.begin(), dims.end());
    if (*o_sampler)
        ov.sampler = sampler;
    if (*o_output)
        ov.output = output;
    if (*o_threads)
        ov.threads = threads;

    if (list->parsed()) {
        std::cout << clab::list_builtins();
        return clab::exit_ok;
    }

    if (replay->parsed()) {
        try {
            const auto lines = clab::replay_document(clab::read_json_file(replay_path), tol);
            bool ok = true;
            for (const auto& l : lines) {
                std::cout << l.kind << " recorded " << clab::format_double(l.recorded) << " replayed "
                          << clab::format_double(l.replayed) << (l.ok ? " ok" : " MISMATCH") << "\n";
                ok = ok && l.ok;
            }
            return ok ? clab::exit_ok : clab::exit_failed_check;
        } catch (const std::exception& e) {
            return report_error("invalid_config", e.what());
        }
    }

    clab::json cfg;
    try {
        cfg = load_config(config_path, ov);
        clab::validate_config(cfg);
    } catch (const std::exception& e) {
        return report_error("invalid_config", e.what());
    }

    if (validate->parsed()) {
        std::cout << clab::json{{"ok", true}, {"config_hash", clab::json_hash(clab::hashed_part(cfg))}}.dump() << "\n";
        return clab::exit_ok;
    }

    try {
        const auto res = clab::run_experiment(cfg);
        for (const auto& f : res.files)
            std::cout << (res.output_dir / f).string() << "\n";
        if (res.status != clab::exit_ok)
            std::cerr << clab::json{{"error", res.message}, {"kind", "numeric_failure"},
                                    {"report", (res.output_dir / "failure.json").string()}}
                             .dump()
                      << "\n";
        return res.status;
    } catch (const clab::InputError& e) {
        return report_error("invalid_config", e.what());
    } catch (const std::exception& e) {
        return report_error("numeric_failure", e.what());
    }
}
