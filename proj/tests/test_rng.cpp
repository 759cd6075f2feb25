#include <cmath>
#include <random>

#include <doctest.h>

#include "classlab/codec.hpp"
#include "classlab/errors.hpp"
#include "classlab/rng.hpp"
#include "oracles.hpp"

using namespace classlab;

TEST_CASE("derive_seed matches reference FNV-1a values")
{
    // Frozen from tests/oracle/reference.py.
    CHECK(derive_seed("", "").value == 12638176205439359886ull);
    CHECK(derive_seed("lab2024", "u42").value == 13963820857529546906ull);
    CHECK(derive_seed("lab2024", "u43").value == 13963821957041175117ull);
    CHECK(derive_seed("golden", "1").value == 2068585725583226928ull);

    CHECK(derive_seed("lab2024", "u42") == derive_seed("lab2024", "u42"));
    CHECK(derive_seed("ab", "c") != derive_seed("a", "bc"));
}

TEST_CASE("SplitMix64 reproduces the published reference sequence")
{
    SplitMix64 engine(Seed{1234567});
    CHECK(engine() == 6457827717110365317ull);
    CHECK(engine() == 3203168211198807973ull);
    CHECK(engine() == 9817491932198370423ull);
    CHECK(engine() == 4593380528125082431ull);
    CHECK(engine() == 16408922859458223821ull);
}

TEST_CASE("indexed words equal literal iteration")
{
    std::mt19937_64 seeds(7);
    for (int trial = 0; trial < 50; ++trial)
    {
        std::uint64_t seed = seeds();
        for (std::uint64_t i : {0ull, 1ull, 2ull, 17ull, 999ull})
        {
            CHECK(SplitMix64::word_at(Seed{seed}, i) == oracle::splitmix_iterated(seed, i));
        }
    }
}

TEST_CASE("uniform_stream")
{
    auto head = uniform_stream(Seed{0}, 3);
    CHECK(head[0] == 0.8833108082136426);
    CHECK(head[1] == 0.43152799704850997);
    CHECK(head[2] == 0.026433771592597743);

    auto long_stream = uniform_stream(Seed{99}, 100);
    auto short_stream = uniform_stream(Seed{99}, 5);
    CHECK(std::equal(short_stream.begin(), short_stream.end(), long_stream.begin()));

    CHECK_THROWS_AS(uniform_stream(Seed{1}, 0), ValidationError);

    auto many = uniform_stream(Seed{0xfeed}, 1'000'000);
    CHECK(std::all_of(many.begin(), many.end(), [](double u) { return u >= 0 && u < 1; }));
    CHECK(to_unit_interval(~0ull) < 1.0);
    CHECK(to_unit_interval(0) == 0.0);
}

TEST_CASE("distribution specs reject inadmissible parameters")
{
    CHECK_THROWS_AS(DistributionSpec::exponential(0), ValidationError);
    CHECK_THROWS_AS(DistributionSpec::exponential(-1), ValidationError);
    CHECK_THROWS_AS(DistributionSpec::exponential(NAN), ValidationError);
    CHECK_THROWS_AS(DistributionSpec::normal(0, 0), ValidationError);
    CHECK_THROWS_AS(DistributionSpec::normal(INFINITY, 1), ValidationError);
    CHECK_THROWS_AS(DistributionSpec::lognormal(0, -1), ValidationError);
    CHECK_THROWS_AS(DistributionSpec::lognormal(0, 40), ValidationError);  // moments overflow
    CHECK_THROWS_AS(DistributionSpec::uniform(1, 1), ValidationError);
    CHECK_THROWS_AS(DistributionSpec::uniform(2, 1), ValidationError);

    std::vector<DistributionSpec::NamedParam> missing{{"mu", 1}};
    CHECK_THROWS_AS(DistributionSpec::from_named(Family::normal, missing), ValidationError);
    CHECK_THROWS_AS(family_from_string("gamma"), ValidationError);
}

TEST_CASE("theoretical moments")
{
    auto e = DistributionSpec::exponential(50);
    CHECK(e.theoretical_mean() == 50);
    CHECK(e.theoretical_sd() == 50);
    auto u = DistributionSpec::uniform(0, 12);
    CHECK(u.theoretical_mean() == 6);
    CHECK(u.theoretical_sd() == doctest::Approx(std::sqrt(12.0)));
    auto ln = DistributionSpec::lognormal(0, 1);
    CHECK(ln.theoretical_mean() == doctest::Approx(std::exp(0.5)));
    CHECK(ln.theoretical_sd() == doctest::Approx(std::sqrt((std::exp(1.0) - 1) * std::exp(1.0))));
    auto nm = DistributionSpec::normal(3, 2);
    CHECK(nm.theoretical_mean() == 3);
    CHECK(nm.theoretical_sd() == 2);
}

TEST_CASE("inverse_cdf")
{
    auto e = DistributionSpec::exponential(50);
    CHECK(inverse_cdf(e, 0.0) == 0.0);
    CHECK(inverse_cdf(e, 1 - std::exp(-1.0)) == doctest::Approx(50).epsilon(1e-12));
    CHECK(inverse_cdf(e, 0.5) == doctest::Approx(34.657359027997266).epsilon(1e-14));

    CHECK(inverse_cdf(DistributionSpec::uniform(2, 6), 0.25) == 3.0);

    CHECK_THROWS_AS(inverse_cdf(e, 1.0), ValidationError);
    CHECK_THROWS_AS(inverse_cdf(e, -0.1), ValidationError);
    CHECK_THROWS_AS(inverse_cdf(e, NAN), ValidationError);
}

TEST_CASE("inverse_normal follows Acklam's accuracy bound")
{
    // Reference quantiles of the standard normal.
    CHECK(inverse_normal(0.5) == 0.0);
    CHECK(inverse_normal(0.975) == doctest::Approx(1.959963984540054).epsilon(1.2e-9));
    CHECK(inverse_normal(0.025) == doctest::Approx(-1.959963984540054).epsilon(1.2e-9));
    CHECK(inverse_normal(0.01) == doctest::Approx(-2.326347874040841).epsilon(1.2e-9));
    CHECK(inverse_normal(0.999) == doctest::Approx(3.090232306167814).epsilon(1.2e-9));
    CHECK(std::isfinite(inverse_normal(0.0)));
    CHECK(inverse_normal(0.0) < -8);

    auto ln = DistributionSpec::lognormal(1, 0.5);
    CHECK(inverse_cdf(ln, 0.0) > 0);
}

TEST_CASE("sample_prefix golden vector")
{
    auto d = sample_prefix(DistributionSpec::exponential(50), derive_seed("golden", "1"), 3);
    REQUIRE(d.values.size() == 3);
    CHECK(d.n == 3);
    CHECK(d.values[0] == 40.52795483186464);
    CHECK(d.values[1] == 31.935808655981557);
    CHECK(d.values[2] == 13.41562205272891);
    CHECK_THROWS_AS(sample_prefix(DistributionSpec::exponential(50), Seed{1}, 0),
                    ValidationError);
}

TEST_CASE("prefix, determinism and support hold for every family")
{
    std::vector<DistributionSpec> specs{
        DistributionSpec::exponential(50), DistributionSpec::normal(-2, 3),
        DistributionSpec::lognormal(1, 0.8), DistributionSpec::uniform(-1, 1)};
    std::mt19937_64 seeds(2024);
    for (auto const& spec : specs)
    {
        for (int trial = 0; trial < 1000; ++trial)
        {
            Seed seed{seeds()};
            auto small = sample_prefix(spec, seed, 5);
            auto large = sample_prefix(spec, seed, 100);
            REQUIRE(std::equal(small.values.begin(), small.values.end(), large.values.begin()));
            REQUIRE(std::all_of(large.values.begin(), large.values.end(),
                                [&](double x) { return spec.in_support(x); }));
        }
        auto a = sample_prefix(spec, Seed{5}, 30);
        auto b = sample_prefix(spec, Seed{5}, 30);
        CHECK(a == b);
    }
}

TEST_CASE("sample means land within 3 sigma/sqrt(n) of the theoretical mean")
{
    // Each check fails with probability about 0.27% for a random seed; the
    // seeds are pinned.
    constexpr std::size_t n = 100'000;
    for (auto const& spec :
         {DistributionSpec::exponential(50), DistributionSpec::normal(10, 2.5),
          DistributionSpec::lognormal(3, 0.75), DistributionSpec::uniform(-1, 4)})
    {
        auto d = sample_prefix(spec, derive_seed("sanity", std::string(to_string(spec.family()))), n);
        double m = oracle::plain_mean(d.values);
        CAPTURE(to_string(spec.family()));
        CHECK(std::abs(m - spec.theoretical_mean())
              < 3 * spec.theoretical_sd() / std::sqrt(double(n)));
        CHECK(oracle::plain_sd(d.values) == doctest::Approx(spec.theoretical_sd()).epsilon(0.05));
    }
}

TEST_CASE("conformance vectors reproduce bit-exactly")
{
    auto text = oracle::read_file(CLASSLAB_TEST_DATA_DIR "/conformance.json");
    auto vectors = parse_conformance(text);
    REQUIRE(vectors.size() >= 6);
    for (auto const& v : vectors)
    {
        auto d = sample_prefix(v.spec, v.seed, v.n);
        CAPTURE(v.seed.value);
        CHECK(d.values == v.values);
    }
    // Re-serialising keeps every double intact.
    auto again = parse_conformance(dump_conformance(vectors));
    for (std::size_t i = 0; i < vectors.size(); ++i)
    {
        CHECK(again[i].values == vectors[i].values);
        CHECK(again[i].seed == vectors[i].seed);
        CHECK(again[i].spec == vectors[i].spec);
    }
}
