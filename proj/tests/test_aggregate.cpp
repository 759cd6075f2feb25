#include <cmath>

#include <doctest.h>

#include "classlab/aggregate.hpp"
#include "classlab/errors.hpp"
#include "classlab/simulate.hpp"
#include "oracles.hpp"

using namespace classlab;

namespace {

EstimateSubmission row(std::string student, std::size_t n, double mean, double error,
                       double median)
{
    return {std::move(student), n, EstimateReport{n, mean, error, median},
            parse_timestamp("2024-05-01T12:00:00.000Z")};
}

struct SimulatedClass
{
    Store store;
    SessionManager sessions{store};
    std::string id;

    explicit SimulatedClass(std::size_t students)
    {
        SessionConfig config;
        config.session_key = "aggregate-class";
        id = sessions.create_session(config);
        simulate_class(sessions, id, {students, 1, 0.0});
    }
};

}  // namespace

TEST_CASE("shared_range pads the pooled span")
{
    std::vector<double> v{10, 20, 30};
    auto [lo, hi] = shared_range(v);
    CHECK(lo == doctest::Approx(9));
    CHECK(hi == doctest::Approx(31));

    std::vector<double> flat{4, 4};
    auto [flo, fhi] = shared_range(flat);
    CHECK(flo == doctest::Approx(3.5));
    CHECK(fhi == doctest::Approx(4.5));

    std::vector<double> big{200, 200};
    auto [blo, bhi] = shared_range(big);
    CHECK(blo == doctest::Approx(190));
    CHECK(bhi == doctest::Approx(210));

    auto [elo, ehi] = shared_range(std::vector<double>{});
    CHECK(elo == 0);
    CHECK(ehi == 1);
}

TEST_CASE("summaries share one axis across sample sizes")
{
    std::vector<EstimateSubmission> rows{
        row("a", 5, 10, 3, 9),  row("b", 5, 70, 4, 60),  row("a", 30, 45, 1, 41),
        row("b", 30, 52, 1, 50), row("a", 100, 49, 0.5, 48), row("c", 100, 51, 0.5, 47)};
    for (auto estimator : {Estimator::mean, Estimator::median})
    {
        auto s5 = summarize(rows, estimator, 5);
        auto s30 = summarize(rows, estimator, 30);
        auto s100 = summarize(rows, estimator, 100);
        CHECK(s5.histogram.bin_edges == s30.histogram.bin_edges);
        CHECK(s30.histogram.bin_edges == s100.histogram.bin_edges);
        CHECK(s5.histogram.bin_edges.size() == default_bin_count + 1);
    }
    auto s = summarize(rows, Estimator::mean, 5);
    CHECK(s.histogram.bin_edges.front() == doctest::Approx(10 - 3));
    CHECK(s.histogram.bin_edges.back() == doctest::Approx(70 + 3));
    CHECK(s.student_ids == std::vector<std::string>{"a", "b"});
    CHECK(s.estimates == std::vector<double>{10, 70});
    CHECK(s.submission_count == 2);
    CHECK(*s.empirical_se == doctest::Approx(sample_sd(std::vector<double>{10, 70})));

    auto m = summarize(rows, Estimator::median, 100);
    CHECK(m.estimates == std::vector<double>{48, 47});
}

TEST_CASE("identical datasets give zero spread and no error ratio")
{
    std::vector<EstimateSubmission> rows{row("a", 5, 42, 3, 40), row("a-copy", 5, 42, 3, 40)};
    auto s = summarize(rows, Estimator::mean, 5);
    CHECK(*s.empirical_se == 0);
    auto c = compare_errors(rows, 5);
    CHECK(*c.sd_of_reported_means == 0);
    CHECK(*c.mean_of_reported_errors == 3);
    CHECK_FALSE(c.ratio.has_value());
}

TEST_CASE("thin data leaves undefined quantities absent")
{
    std::vector<EstimateSubmission> rows{row("a", 5, 42, 3, 40)};
    auto s = summarize(rows, Estimator::median, 5);
    CHECK(s.submission_count == 1);
    CHECK_FALSE(s.empirical_se.has_value());
    auto none = summarize(rows, Estimator::median, 30);
    CHECK(none.submission_count == 0);
    CHECK(none.histogram.n_values == 0);
    auto c = compare_errors(rows, 5);
    CHECK(c.mean_of_reported_errors == 3);
    CHECK_FALSE(c.sd_of_reported_means.has_value());
    CHECK_FALSE(c.ratio.has_value());
}

TEST_CASE("error_comparison ratio")
{
    std::vector<EstimateSubmission> rows{row("a", 5, 1, 1, 0), row("b", 5, 3, 2, 0)};
    auto c = compare_errors(rows, 5);
    CHECK(*c.ratio == doctest::Approx(1.5 / std::sqrt(2.0)));
}

TEST_CASE("simulated class: concentration, scaling and error comparison")
{
    SimulatedClass cls(2000);
    auto const& s = cls.sessions;

    for (auto estimator : {Estimator::mean, Estimator::median})
    {
        auto se5 = *class_summary(s, cls.id, estimator, 5).empirical_se;
        auto se30 = *class_summary(s, cls.id, estimator, 30).empirical_se;
        auto se100 = *class_summary(s, cls.id, estimator, 100).empirical_se;
        CAPTURE(to_string(estimator));
        CHECK(se5 > se30);
        CHECK(se30 > se100);
        if (estimator == Estimator::mean)
        {
            CHECK(se100 == doctest::Approx(5.0).epsilon(0.05));
            CHECK(se5 / se100 == doctest::Approx(std::sqrt(20.0)).epsilon(0.10));
        }
        else
        {
            double ref = oracle::monte_carlo_se(true, 50, 100, 2000, 123);
            CHECK(se100 == doctest::Approx(ref).epsilon(0.10));
        }
    }

    auto c100 = error_comparison(s, cls.id, 100);
    CHECK(c100.submission_count == 2000);
    CHECK(*c100.ratio >= 0.9);
    CHECK(*c100.ratio <= 1.1);
    auto c5 = error_comparison(s, cls.id, 5);
    CHECK(*c5.ratio >= 0.6);
    CHECK(*c5.ratio <= 1.4);

    CHECK_THROWS_AS(class_summary(s, cls.id, Estimator::mean, 7), ValidationError);
    CHECK_THROWS_AS(class_summary(s, cls.id, Estimator::mean, 5, 0), ValidationError);
    CHECK_THROWS_AS(error_comparison(s, cls.id, 7), ValidationError);
    CHECK_THROWS_AS(class_summary(s, "nope", Estimator::mean, 5), NotFoundError);
}

TEST_CASE("CSV export")
{
    SUBCASE("empty session is header only")
    {
        CHECK(to_csv({}) == "student_id,n,mean,mean_error,median,submitted_at\n");
    }
    SUBCASE("one submission")
    {
        std::vector rows{row("ana", 5, 49.1475, 11.82242, 38.13)};
        auto csv = to_csv(rows);
        CHECK(csv
              == "student_id,n,mean,mean_error,median,submitted_at\n"
                 "ana,5,49.147500000000001,11.822419999999999,38.130000000000003,"
                 "2024-05-01T12:00:00.000Z\n");
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    }
    SUBCASE("rows are sorted and awkward ids quoted")
    {
        std::vector rows{row("zed", 5, 1, 0, 1), row("a,b", 30, 2, 0, 2),
                         row("say \"hi\"", 5, 3, 0, 3), row("a,b", 5, 4, 0, 4),
                         row("line\nbreak", 5, 5, 0, 5)};
        auto csv = to_csv(rows);
        CHECK(csv.find("\"a,b\",5,4,") < csv.find("\"a,b\",30,2,"));
        CHECK(csv.find("\"say \"\"hi\"\"\",5,3") != std::string::npos);
        CHECK(csv.find("\"line\nbreak\",5,5") != std::string::npos);

        auto parsed = parse_csv(csv);
        REQUIRE(parsed.size() == 5);
        CHECK(parsed[0].student_id == "a,b");
        CHECK(to_csv(parsed) == csv);
    }
    SUBCASE("round trip of a simulated class is byte-identical")
    {
        SimulatedClass cls(80);
        auto csv = export_csv(cls.sessions, cls.id);
        auto parsed = parse_csv(csv);
        CHECK(parsed.size() == 240);
        CHECK(to_csv(parsed) == csv);
        CHECK(parsed == cls.sessions.accepted_submissions(cls.id));
    }
    SUBCASE("malformed documents")
    {
        CHECK_THROWS_AS(parse_csv(""), ValidationError);
        CHECK_THROWS_AS(parse_csv("a,b\n"), ValidationError);
        std::string header(csv_header);
        CHECK_THROWS_AS(parse_csv(header + "\nana,5,1,2\n"), ValidationError);
        CHECK_THROWS_AS(parse_csv(header + "\nana,5,x,0,1,2024-05-01T12:00:00.000Z\n"),
                        ValidationError);
        CHECK_THROWS_AS(parse_csv(header + "\nana,-5,1,0,1,2024-05-01T12:00:00.000Z\n"),
                        ValidationError);
        CHECK_THROWS_AS(parse_csv(header + "\n\"ana,5,1,0,1,2024-05-01T12:00:00.000Z\n"),
                        ValidationError);
        CHECK_THROWS_AS(parse_csv(header + "\nana,5,1,0,1,yesterday\n"), ValidationError);
    }
}
