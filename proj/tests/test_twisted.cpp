#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace clab;
using namespace clab::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("twisted quasinorm slots", "[twisted]")
{
    auto rng = stream_rng(501, 0);
    const Index n = 5;
    const Mat g = ginibre(rng, n, n), f = ginibre(rng, n, n);
    const auto zero = make_spec(spec::Zero{PIndex(2.0), PIndex(1.0)});
    CHECK_THAT(twisted_quasinorm({g, f}, *zero, PIndex(2.0), PIndex(1.0)),
               WithinRel(schatten_norm(g, PIndex(2.0)) + schatten_norm(f, PIndex(1.0)), 1e-14));

    const auto kp = make_spec(spec::KPBicentralizer{phi::kalton_peck(), PIndex(1.0)});
    CHECK_THAT(twisted_quasinorm({evaluate(*kp, f), f}, *kp, PIndex(1.0), PIndex(1.0)),
               WithinRel(schatten_norm(f, PIndex(1.0)), 1e-14));

    // the inclusion g -> (g, 0) is isometric
    CHECK_THAT(twisted_quasinorm({g, Mat::Zero(n, n)}, *kp, PIndex(1.0), PIndex(1.0)),
               WithinRel(schatten_norm(g, PIndex(1.0)), 1e-14));

    CHECK(twisted_quasinorm({Mat::Zero(n, n), Mat::Zero(n, n)}, *kp, PIndex(1.0), PIndex(1.0)) == 0.0);
    CHECK_THROWS_AS(twisted_quasinorm({Mat::Zero(2, 2), Mat::Zero(3, 3)}, *kp, PIndex(1.0), PIndex(1.0)), InputError);
}

TEST_CASE("Z2 vectors on the graph of the map", "[twisted]")
{
    auto rng = stream_rng(502, 0);
    const auto phi = z2_map();
    for (Index n : {1, 4, 32}) {
        const Vec y = gaussian_vector(rng, n);
        CHECK_THAT(twisted_quasinorm(TwistedVec{(*phi)(y), y}, *phi, PIndex(2.0), PIndex(2.0)),
                   WithinRel(y.norm(), 1e-14));
    }
    CHECK_THROWS_AS(twisted_quasinorm(TwistedVec{Vec::Zero(2), Vec::Zero(3)}, *phi, PIndex(2.0), PIndex(2.0)),
                    InputError);
}

TEST_CASE("twisted quasinorm is homogeneous", "[twisted]")
{
    auto rng = stream_rng(503, 0);
    const auto kp = make_spec(spec::KPBicentralizer{phi::kalton_peck(), PIndex(2.0)});
    for (int t = 0; t < 10; ++t) {
        const TwistedMat v{ginibre(rng, 4, 4), gapped_matrix(rng, 4)};
        const cplx lambda = std::polar(0.2 + 3.0 * uniform01(rng), 6.0 * uniform01(rng));
        CHECK_THAT(twisted_quasinorm(lambda * v, *kp, PIndex(2.0), PIndex(2.0)),
                   WithinRel(std::abs(lambda) * twisted_quasinorm(v, *kp, PIndex(2.0), PIndex(2.0)), 1e-12));
    }
}

TEST_CASE("concavity probe", "[twisted]")
{
    const auto zero = make_spec(spec::Zero{PIndex(2.0), PIndex(2.0)});
    const auto norm_case = quasinorm_modulus_probe(*zero, PIndex(2.0), PIndex(2.0), Sampler{1, 5, PIndex(2.0)}, 300);
    CHECK(norm_case.value <= 1.0 + 1e-10);
    CHECK(norm_case.value >= 1.0 - 1e-12);

    // X = S^{1/2}: the triangle inequality fails, but within Δ = 2
    const auto zero_half = make_spec(spec::Zero{PIndex(0.5), PIndex(2.0)});
    const auto half = quasinorm_modulus_probe(*zero_half, PIndex(2.0), PIndex(0.5), Sampler{2, 5, PIndex(0.5)}, 300);
    CHECK(half.value > 1.0 + 1e-3);
    CHECK(half.value <= 2.0 + 1e-12);

    CHECK_THROWS_AS(quasinorm_modulus_probe(*zero, PIndex(2.0), PIndex(2.0), Sampler{1, 5, PIndex(2.0)}, 1),
                    InputError);
}

TEST_CASE("Z2 concavity is bounded and stable in n", "[twisted]")
{
    const auto phi = z2_map();
    std::vector<double> values;
    for (Index n : {4, 16, 64}) {
        const auto rep = quasinorm_modulus_probe(*phi, PIndex(2.0), PIndex(2.0), Sampler{3, n, PIndex(2.0)}, 400);
        CHECK(rep.value >= 1.0 - 1e-12);
        values.push_back(rep.value);
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    CHECK(*hi < 3.0);
    CHECK(*hi / *lo < 1.5);
}

TEST_CASE("concavity probe is deterministic and replayable", "[twisted]")
{
    const auto kp = make_spec(spec::KPBicentralizer{phi::kalton_peck(), PIndex(1.0)});
    const Sampler s{4, 6, PIndex(1.0)};
    const auto a = quasinorm_modulus_probe(*kp, PIndex(1.0), PIndex(1.0), s, 200);
    const auto b = quasinorm_modulus_probe(*kp, PIndex(1.0), PIndex(1.0), s, 200, {3});
    CHECK(a.value == b.value);
    REQUIRE(a.witness.size() == 4);
    const TwistedMat u{a.witness[0], a.witness[1]}, v{a.witness[2], a.witness[3]};
    auto nrm = [&](const TwistedMat& t) { return twisted_quasinorm(t, *kp, PIndex(1.0), PIndex(1.0)); };
    CHECK(std::abs(nrm(u + v) / (nrm(u) + nrm(v)) - a.value) < 1e-12);
}

TEST_CASE("lifted columns into Z2", "[twisted]")
{
    auto rng = stream_rng(505, 0);
    const auto phi = z2_map();
    const Mat u = gapped_matrix(rng, 5);
    const auto cols = lifted_columns(u, *phi);
    REQUIRE(cols.size() == 5);
    const auto lift = make_spec(spec::LiftedQuasilinear{phi, PIndex(1.0), PIndex(2.0)});
    const Mat lifted = evaluate(*lift, u);
    for (Index j = 0; j < 5; ++j) {
        CHECK((cols[static_cast<std::size_t>(j)].f - u.col(j)).norm() < 1e-12);
        CHECK((cols[static_cast<std::size_t>(j)].g - lifted.col(j)).norm() < 1e-12);
    }
    // rank one u = x ⊗ y: every column is a multiple of (φ(y), y), of norm |x_j| ||y||
    const Vec x = unit_vector(rng, 4), y = unit_vector(rng, 4);
    const auto rc = lifted_columns(rank_one(x, y), *phi);
    for (Index j = 0; j < 4; ++j)
        CHECK_THAT(twisted_quasinorm(rc[static_cast<std::size_t>(j)], *phi, PIndex(2.0), PIndex(2.0)),
                   WithinAbs(std::abs(x(j)), 1e-12));
}

TEST_CASE("splitting evidence", "[twisted]")
{
    const SweepParams trivial_params{6, Distribution::ginibre, 20, 0, 1, Side::left};
    const auto trivial = splitting_distance(
        [](Index n) {
            auto r = stream_rng(506, static_cast<std::uint64_t>(n));
            return make_spec(spec::RightMultiplication{ginibre(r, n, n), PIndex(2.0), PIndex(2.0)});
        },
        {4, 8, 16}, trivial_params, "h");
    for (const auto& r : trivial)
        CHECK(r.residual <= 1e-8);
    CHECK(to_csv(trivial, "c").rfind("# config c\ndim,residual,seed,spec-hash\n4,", 0) == 0);

    const SweepParams lift_params{7, Distribution::sparse, 64, 16, 1, Side::right};
    const auto lift = splitting_distance(
        [](Index) {
            return make_spec(spec::LiftedQuasilinear{z2_map(), PIndex(1.0), PIndex(2.0)});
        },
        {8, 16, 32, 64}, lift_params);
    for (std::size_t i = 1; i < lift.size(); ++i)
        CHECK(lift[i].residual > lift[i - 1].residual);

    const SweepParams kp_params{8, Distribution::mixed, 64, 8, 1, Side::right};
    const double c = 1.0;
    const auto bounded = splitting_distance(
        [&](Index) { return make_spec(spec::KPBicentralizer{phi::clamped(c), PIndex(1.0)}); }, {8, 16, 32},
        kp_params);
    for (const auto& r : bounded)
        CHECK(r.residual <= c + 1e-6);
}
