#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace clab;
using namespace clab::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SpecPtr kp_spec(double p, LipschitzFn fn = phi::kalton_peck())
{
    return make_spec(spec::KPBicentralizer{std::move(fn), PIndex(p)});
}

} // namespace

TEST_CASE("sampler streams are reproducible", "[metrology]")
{
    const Sampler s{5, 6, PIndex(0.5), Distribution::mixed};
    for (std::uint64_t i = 0; i < 8; ++i) {
        const Mat a = s.unit(i), b = s.unit(i);
        CHECK(a == b);
        CHECK_THAT(schatten_norm(a, PIndex(0.5)), WithinRel(1.0, 1e-12));
    }
    CHECK(s.unit(0) != s.unit(1));
    const Sampler other{6, 6, PIndex(0.5), Distribution::mixed};
    CHECK(s.unit(0) != other.unit(0));
    CHECK(distribution_from_string("sparse") == Distribution::sparse);
    CHECK_THROWS_AS(distribution_from_string("uniform"), InputError);
}

TEST_CASE("haar unitaries and unit-ball operators", "[metrology]")
{
    auto rng = stream_rng(401, 0);
    for (int t = 0; t < 10; ++t) {
        const Mat u = haar_unitary(rng, 7);
        CHECK(rel_diff(Mat(u.adjoint() * u), Mat::Identity(7, 7)) < 1e-12);
        CHECK(operator_norm(unit_ball_operator(rng, 7)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("exact morphisms have zero centralizer defect", "[metrology]")
{
    auto rng = stream_rng(402, 0);
    const Sampler s{9, 6, PIndex(2.0), Distribution::haar_spectral};
    const auto rm = make_spec(spec::RightMultiplication{ginibre(rng, 6, 6), PIndex(2.0), PIndex(2.0)});
    CHECK(estimate_constant(*rm, Kind::L, s, 200).value < 1e-12);
    const auto lm = make_spec(spec::LeftMultiplication{ginibre(rng, 6, 6), PIndex(2.0), PIndex(2.0)});
    CHECK(estimate_constant(*lm, Kind::R, s, 200).value < 1e-12);
    const auto lin = make_spec(
        spec::LiftedQuasilinear{make_qmap(qmap::Linear{ginibre(rng, 6, 6)}), PIndex(1.0), PIndex(2.0)});
    CHECK(estimate_constant(*lin, Kind::Q, Sampler{9, 6, PIndex(1.0)}, 200).value < 1e-12);
}

TEST_CASE("estimates are deterministic, monotone and replayable", "[metrology]")
{
    const auto sp = kp_spec(2.0);
    const Sampler s{2024, 8, PIndex(2.0), Distribution::haar_spectral};
    const auto a = estimate_constant(*sp, Kind::L, s, 400);
    const auto b = estimate_constant(*sp, Kind::L, s, 400);
    CHECK(a.value == b.value);
    CHECK(a.witness_index == b.witness_index);
    CHECK(std::isfinite(a.value));
    CHECK(a.value > 0.0);

    const auto threaded = estimate_constant(*sp, Kind::L, s, 400, {3});
    CHECK(threaded.value == a.value);
    CHECK(threaded.witness_index == a.witness_index);

    const auto shorter = estimate_constant(*sp, Kind::L, s, 100);
    CHECK(shorter.value <= a.value);

    for (Kind k : {Kind::Q, Kind::L, Kind::R, Kind::B}) {
        const auto r = estimate_constant(*sp, k, s, 100);
        CHECK(std::abs(replay_ratio(*sp, k, r.witness) - r.value) <= 1e-12 * std::max(1.0, r.value));
    }
    CHECK(std::string(a.note).find("lower bound") != std::string::npos);
}

TEST_CASE("kp centralizer constants are stable in the dimension", "[metrology]")
{
    const auto sp = kp_spec(1.0);
    for (Kind k : {Kind::L, Kind::R}) {
        const double c4 = estimate_constant(*sp, k, Sampler{77, 4, PIndex(1.0)}, 300).value;
        const double c16 = estimate_constant(*sp, k, Sampler{77, 16, PIndex(1.0)}, 300).value;
        CHECK(std::isfinite(c4));
        CHECK(std::isfinite(c16));
        CHECK(c16 <= 2.0 * c4);
    }
}

TEST_CASE("quasilinearity from the centralizer estimate", "[metrology]")
{
    for (double p : {0.5, 1.0, 2.0}) {
        const auto sp = kp_spec(p);
        const Sampler s{88, 6, PIndex(p)};
        const double Q = estimate_constant(*sp, Kind::Q, s, 300).value;
        const double L = estimate_constant(*sp, Kind::L, s, 300).value;
        CHECK(Q <= quasilinearity_bound(PIndex(p), PIndex(p), L) + 1e-6);
    }
    CHECK_THAT(quasilinearity_bound(PIndex(0.5), PIndex(0.5), 1.0), WithinRel(4.0 * 4.0 * std::sqrt(8.0), 1e-15));
}

TEST_CASE("rank-one bound of the lifted map", "[metrology]")
{
    const auto phi = make_qmap(qmap::KPOnH{phi::kalton_peck()});
    const auto lift = make_spec(spec::LiftedQuasilinear{phi, PIndex(1.0), PIndex(2.0)});
    const Sampler s{12, 8, PIndex(1.0)};
    const auto r = estimate_constant(*lift, Kind::rank_one, s, 200);
    // ||x ⊗ φ(y)||_2 = ||φ(y)||, and ||φ(y)|| <= ||y|| log(sqrt(n)) + ... is finite
    CHECK(r.value > 0.0);
    CHECK(r.value < std::log(8.0));
    CHECK(estimate_constant(*kp_spec(1.0), Kind::rank_one, s, 50).value < 1e-12);
}

TEST_CASE("distance estimates", "[metrology]")
{
    auto rng = stream_rng(403, 0);
    const Index n = 6;
    const auto a = kp_spec(1.0);
    const Sampler s{21, n, PIndex(1.0), Distribution::rank_one};
    CHECK(distance_estimate(*a, *a, s, 100).value == 0.0);

    // Φ vs Φ + R_g on rank-one samples x ⊗ y: the distance is ||g^H x||
    const Mat g = ginibre(rng, n, n);
    const auto b = a + make_spec(spec::RightMultiplication{g, PIndex(1.0), PIndex(1.0)});
    const auto d = distance_estimate(*a, *b, s, 200);
    double closed = 0.0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto sf = schmidt(s.unit(i));
        closed = std::max(closed, (g.adjoint() * sf.x[0]).norm());
    }
    CHECK_THAT(d.value, WithinRel(closed, 1e-10));
    CHECK(d.value <= operator_norm(g) * (1.0 + 1e-12));

    // two SVD backends, gapped samples: strongly equivalent, here equal up to rounding
    auto jac = make_spec(spec::KPBicentralizer{phi::kalton_peck(), PIndex(1.0), {1e-12, SvdBackend::jacobi}});
    const auto dj = distance_estimate(*a, *jac, Sampler{22, 24, PIndex(1.0)}, 50);
    CHECK(dj.value < 1e-8);
}

TEST_CASE("morphism fits", "[metrology]")
{
    auto rng = stream_rng(404, 0);
    const Index n = 6;
    const Mat L = ginibre(rng, n, n);
    const Sampler s{31, n, PIndex(2.0), Distribution::ginibre};
    const auto samples = draw_samples(s, 30);

    const auto lm = make_spec(spec::LeftMultiplication{L, PIndex(2.0), PIndex(2.0)});
    const auto fit = fit_morphism(*lm, Side::right, samples, PIndex(2.0), PIndex(2.0));
    CHECK(rel_diff(fit.L, L) < 1e-10);
    CHECK(fit.residual <= 1e-10);
    CHECK_FALSE(fit.rank_deficient);

    const auto rm = make_spec(spec::RightMultiplication{L, PIndex(2.0), PIndex(2.0)});
    const auto fr = fit_morphism(*rm, Side::left, samples, PIndex(2.0), PIndex(2.0));
    CHECK(rel_diff(fr.L, L) < 1e-10);
    CHECK(fr.residual <= 1e-10);
    CHECK(natural_side(*rm) == Side::left);
    CHECK(natural_side(*lm) == Side::right);
    CHECK(natural_side(*make_spec(spec::Adjoint{rm})) == Side::right);

    // one rank-one sample cannot determine L: minimum-norm solution, flagged
    const auto one = fit_morphism(*lm, Side::right, {rank_one(unit_vector(rng, n), unit_vector(rng, n))},
                                  PIndex(2.0), PIndex(2.0));
    CHECK(one.rank_deficient);
    CHECK(one.residual < 1e-10);

    CHECK_THROWS_AS(fit_morphism(*lm, Side::right, {}, PIndex(2.0), PIndex(2.0)), InputError);
    CHECK_THROWS_AS(fit_morphism(*lm, Side::right, {Mat::Zero(2, 2), Mat::Zero(3, 3)}, PIndex(2.0), PIndex(2.0)),
                    InputError);
}

TEST_CASE("trivial plus bounded fits within the bound", "[metrology]")
{
    auto rng = stream_rng(405, 0);
    const Index n = 8;
    const Mat L = ginibre(rng, n, n);
    const double c = 0.75;
    const auto bounded = kp_spec(2.0, phi::clamped(c));
    const auto sp = make_spec(spec::LeftMultiplication{L, PIndex(2.0), PIndex(2.0)}) + bounded;
    const Sampler s{41, n, PIndex(2.0), Distribution::mixed};
    const auto samples = draw_samples(s, 8 * n);
    double sup_b = 0.0;
    for (const auto& f : samples)
        sup_b = std::max(sup_b, schatten_norm(evaluate(*bounded, f), PIndex(2.0)) / schatten_norm(f, PIndex(2.0)));
    CHECK(sup_b <= c + 1e-12);
    const auto fit = fit_morphism(*sp, Side::right, samples, PIndex(2.0), PIndex(2.0));
    CHECK(fit.residual <= sup_b + 1e-6);
}

TEST_CASE("gamma summing Monte Carlo", "[metrology]")
{
    const auto rep = gamma_summing_mc(columns_of(Mat::Identity(2, 2)), [](const Vec& v) { return v.norm(); },
                                      100000, 17);
    CHECK(std::abs(rep.value - std::sqrt(2.0)) <= 3.0 * rep.standard_error);
    CHECK(rep.standard_error > 0.0);
    CHECK_FALSE(rep.warning);

    const auto zero = gamma_summing_mc(columns_of(Mat::Zero(3, 3)), [](const Vec& v) { return v.norm(); }, 500, 1);
    CHECK(zero.value == 0.0);

    const auto few = gamma_summing_mc(columns_of(Mat::Identity(2, 2)), [](const Vec& v) { return v.norm(); }, 50, 1);
    CHECK(few.warning);

    const auto again = gamma_summing_mc(columns_of(Mat::Identity(2, 2)), [](const Vec& v) { return v.norm(); },
                                        100000, 17, {4});
    CHECK(again.value == rep.value);
    CHECK_THROWS_AS(gamma_summing_mc(columns_of(Mat::Identity(2, 2)), [](const Vec& v) { return v.norm(); }, 0, 1),
                    InputError);
}

TEST_CASE("parallel map reports the lowest failing index", "[metrology]")
{
    try {
        parallel_map<int>(10, 3, [](std::size_t i) -> int {
            if (i == 4 || i == 8)
                throw std::runtime_error(std::to_string(i));
            return static_cast<int>(i);
        });
        FAIL("no exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "4");
    }
    const auto v = parallel_map<int>(7, 4, [](std::size_t i) { return static_cast<int>(i * i); });
    CHECK(v == std::vector<int>{0, 1, 4, 9, 16, 25, 36});
}

TEST_CASE("non-finite ratios carry the failing sample", "[metrology]")
{
    phi::register_phi("poison", [](const std::vector<double>&) {
        return LipschitzFn{"poison", {}, [](double, double) { return cplx(std::nan("")); }, 1.0, true, 0.0};
    });
    const auto sp = kp_spec(1.0, phi::make("poison"));
    const Sampler s{3, 4, PIndex(1.0)};
    try {
        estimate_constant(*sp, Kind::L, s, 10);
        FAIL("no exception");
    } catch (const SampleFailure& e) {
        CHECK(e.index() == 0);
        CHECK(e.inputs().size() == 2);
    }
}

TEST_CASE("profiles", "[metrology]")
{
    const auto prof = kp_growth_profile({2, 8, 1024}, PIndex(0.5));
    REQUIRE(prof.rows.size() == 3);
    for (const auto& r : prof.rows)
        CHECK_THAT(r.value, WithinAbs(std::log(static_cast<double>(r.dim)) / 0.5, 1e-10));

    const std::string csv = to_csv(prof);
    CHECK(csv.rfind("dim,kind,value,samples,seed\n", 0) == 0);
    CHECK(to_csv(prof, "abc").rfind("# config abc\ndim,kind", 0) == 0);

    const SweepParams params{5, Distribution::ginibre, 20, 0, 1, Side::left};
    const auto trivial = growth_profile(
        Kind::residual,
        [](Index n) {
            auto r = stream_rng(406, static_cast<std::uint64_t>(n));
            return make_spec(spec::RightMultiplication{ginibre(r, n, n), PIndex(2.0), PIndex(2.0)});
        },
        {4, 8, 16}, params);
    REQUIRE(trivial.rows.size() == 3);
    for (const auto& r : trivial.rows) {
        CHECK(r.kind == "residual");
        CHECK(r.value <= 1e-8);
    }
    CHECK_THROWS_AS(kp_growth_profile({8, 4}, PIndex(1.0)), InputError);
    CHECK_THROWS_AS(kp_growth_profile({}, PIndex(1.0)), InputError);
    CHECK(format_double(0.1) == "0.10000000000000001");
}
