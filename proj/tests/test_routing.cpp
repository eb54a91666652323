#include "ffr/errors.hpp"
#include "ffr/routing/latency_trace.hpp"
#include "ffr/routing/paths.hpp"
#include "ffr/routing/statistics.hpp"
#include "ffr/routing/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace ffr;
using namespace ffr::routing;

namespace
{

std::filesystem::path
temp_file(std::string const& name, std::string const& body)
{
    auto const p = std::filesystem::temp_directory_path() / ("ffr_test_" + name);
    std::ofstream(p) << body;
    return p;
}

LatencyTrace
trace_of(std::vector<std::pair<double, double>> const& pts)
{
    std::vector<LatencySample> s;
    for (auto [t, l] : pts)
    {
        s.push_back({t, l});
    }
    return LatencyTrace(std::move(s));
}

std::size_t
line_of(std::string const& text)
{
    try
    {
        parse_trace(text);
    }
    catch (IngestionError const& e)
    {
        return e.line();
    }
    return 0;
}

// Order-statistic definition: the ceil(q n)-th smallest value (first for q = 0).
double
order_statistic(std::vector<double> v, double q)
{
    std::sort(v.begin(), v.end());
    auto const n = static_cast<double>(v.size());
    auto k = static_cast<std::size_t>(std::ceil(q * n - 1e-12));
    return v[k == 0 ? 0 : k - 1];
}

} // namespace

TEST_CASE("ingest a two-row trace")
{
    auto const p = temp_file("two.csv", "timestamp_s,latency_s\n0.0,0.12\n0.5,0.09\n");
    auto const tr = ingest_trace(p);
    CHECK(tr.size() == 2);
    CHECK(tr.samples()[1].latency_s == 0.09);
    CHECK(tr.granularity_s() == doctest::Approx(0.5));
    std::filesystem::remove(p);
}

TEST_CASE("ingestion errors carry the offending line")
{
    CHECK(line_of("timestamp_s,latency_s\n0.0,0.1\n1.0,0.1\n0.5,0.1\n") == 4);
    CHECK(line_of("timestamp_s,latency_s\n0.0,-0.1\n") == 2);
    CHECK(line_of("timestamp_s,latency_s\n0.0,abc\n") == 2);
    CHECK(line_of("timestamp_s,latency_s\n0.0,0.1,3\n") == 2);
    CHECK(line_of("") == 1);
    CHECK(line_of("time,lat\n0,0.1\n") == 1);
    CHECK(line_of("timestamp_s,latency_s\n") != 0);
    CHECK(line_of("timestamp_s,latency_s\n0.0,inf\n") == 2);

    auto const p = temp_file("bad.csv", "timestamp_s,latency_s\n1.0,0.1\n1.0,0.2\n");
    try
    {
        ingest_trace(p);
        FAIL("expected an ingestion error");
    }
    catch (IngestionError const& e)
    {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        CHECK(std::string(e.what()).find(p.filename().string()) != std::string::npos);
    }
    std::filesystem::remove(p);
    CHECK_THROWS_AS(ingest_trace("/nonexistent/trace.csv"), IngestionError);
}

TEST_CASE("trace round trip and tolerant parsing")
{
    auto const tr = parse_trace("\xEF\xBB\xBFtimestamp_s,latency_s\r\n0, 0.25\r\n\r\n0.5,0.125\r\n");
    CHECK(tr.size() == 2);
    std::ostringstream os;
    write_trace(os, tr);
    auto const back = parse_trace(os.str());
    CHECK(back.samples()[0].latency_s == 0.25);
    CHECK(back.samples()[1].timestamp_s == 0.5);
}

TEST_CASE("week-long trace ingests quickly")
{
    std::string text = "timestamp_s,latency_s\n";
    std::size_t const rows = 1'209'600;
    text.reserve(rows * 20);
    for (std::size_t i = 0; i < rows; ++i)
    {
        text += std::to_string(0.5 * static_cast<double>(i));
        text += ",0.153\n";
    }
    auto const start = std::chrono::steady_clock::now();
    auto const tr = parse_trace(text);
    double const s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(tr.size() == rows);
    MESSAGE("parsed " << rows << " rows in " << s << " s");
    CHECK(s < 2.0);
}

TEST_CASE("step-hold latency")
{
    auto const tr = trace_of({{0.0, 0.1}, {1.0, 0.2}});
    CHECK_FALSE(tr.held_latency(-0.1).has_value());
    CHECK(*tr.held_latency(0.0) == 0.1);
    CHECK(*tr.held_latency(0.99) == 0.1);
    CHECK(*tr.held_latency(1.0) == 0.2);
    CHECK(*tr.held_latency(50.0) == 0.2);
    CHECK_THROWS_AS(trace_of({{1.0, 0.1}, {1.0, 0.1}}), DomainError);
    CHECK_THROWS_AS(trace_of({{1.0, -0.1}}), DomainError);
}

TEST_CASE("lowest-latency selection")
{
    PathSet ps{"d", {{"A", LatencyTrace::constant(0.12)}, {"B", LatencyTrace::constant(0.09)}}};
    auto const c = select_lowest_latency(ps, 0.0);
    CHECK(c.path_id == "B");
    CHECK(c.latency_s == 0.09);

    PathSet tie{"d", {{"B", LatencyTrace::constant(0.1)}, {"A", LatencyTrace::constant(0.1)}}};
    CHECK(select_lowest_latency(tie, 0.0).path_id == "A");

    PathSet late{"d", {{"A", LatencyTrace::constant(0.1, 5.0)}}};
    CHECK_THROWS_AS(select_lowest_latency(late, 1.0), NotReadyError);

    PathSet dup{"d", {{"A", LatencyTrace::constant(0.1)}, {"A", LatencyTrace::constant(0.2)}}};
    CHECK_THROWS_AS(select_lowest_latency(dup, 1.0), DomainError);
    PathSet none{"d", {}};
    CHECK_THROWS_AS(none.validate(), DomainError);
}

TEST_CASE("failover after degradation")
{
    PathSet ps{"d",
               {{"A", LatencyTrace::constant(0.12)}, {"B", trace_of({{0.0, 0.09}, {100.0, 0.4}})}}};
    auto const sched = reselect_on_update(ps, 1.0, 200.0);
    REQUIRE(sched.size() == 2);
    CHECK(sched[0].path_id == "B");
    CHECK(sched[1].path_id == "A");
    CHECK(sched[1].timestamp_s == 100.0);
}

TEST_CASE("re-selection schedules")
{
    PathSet stat{"d", {{"A", LatencyTrace::constant(0.12)}, {"B", LatencyTrace::constant(0.2)}}};
    CHECK(reselect_on_update(stat, 0.5, 100.0).size() == 1);

    PathSet spike{"d",
                  {{"A", trace_of({{0.0, 0.1}, {10.0, 0.5}, {12.0, 0.1}})}, {"B", LatencyTrace::constant(0.2)}}};
    auto const s = reselect_on_update(spike, 1.0, 30.0);
    REQUIRE(s.size() == 3);
    CHECK(s[0].path_id == "A");
    CHECK(s[1].path_id == "B");
    CHECK(s[2].path_id == "A");

    CHECK_THROWS_AS(reselect_on_update(stat, 0.0, 10.0), DomainError);
}

TEST_CASE("seeded jittery traces: scheduled latency is the minimum at every probe")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> lat(0.05, 0.5);
    PathSet ps{"d", {}};
    for (int p = 0; p < 4; ++p)
    {
        std::vector<LatencySample> s;
        for (int i = 0; i < 200; ++i)
        {
            s.push_back({0.5 * i + 0.1 * p, lat(rng)});
        }
        ps.paths.push_back({"p" + std::to_string(p), LatencyTrace(std::move(s))});
    }
    double const probe = 0.5;
    auto const sched = reselect_on_update(ps, probe, 99.0);
    REQUIRE(!sched.empty());
    for (int k = 0; k <= 198; ++k)
    {
        double const at = k * probe;
        auto it = std::upper_bound(sched.begin(), sched.end(), at,
                                   [](double t, ScheduleEntry const& e) { return t < e.timestamp_s; });
        REQUIRE(it != sched.begin());
        double const held = std::prev(it)->latency_s;
        int selected = 0;
        for (auto const& p : ps.paths)
        {
            auto const l = p.trace.held_latency(at);
            if (l)
            {
                CHECK(held <= *l);
                selected += p.path_id == std::prev(it)->path_id;
            }
        }
        CHECK(selected == 1);
    }
}

TEST_CASE("empirical CDF and percentiles")
{
    std::vector<double> const v{0.004, 0.001, 0.003, 0.002};
    auto const cdf = empirical_cdf(v);
    CHECK(cdf.values == std::vector<double>{0.001, 0.002, 0.003, 0.004});
    CHECK(cdf.cum_prob.back() == 1.0);
    CHECK(percentile(cdf, 0.5) == 0.002);
    CHECK(percentile(cdf, 0.0) == 0.001);
    CHECK(percentile(cdf, 1.0) == 0.004);
    CHECK(cdf.tau_max() == 0.004);

    auto const flat = empirical_cdf(std::vector<double>(10, 0.2));
    for (double q : {0.0, 0.3, 0.99, 1.0})
    {
        CHECK(percentile(flat, q) == 0.2);
    }
    CHECK_THROWS_AS(empirical_cdf(std::vector<double>{}), DomainError);
    CHECK_THROWS_AS(percentile(cdf, 1.5), DomainError);
}

TEST_CASE("percentiles equal brute-force order statistics")
{
    std::mt19937_64 rng(8);
    for (std::size_t n : {1u, 2u, 7u, 100u, 1000u})
    {
        std::vector<double> v(n);
        std::uniform_int_distribution<int> coarse(0, 20);
        for (auto& x : v)
        {
            x = 0.01 * coarse(rng);
        }
        auto const cdf = empirical_cdf(v);
        for (int i = 0; i <= 1000; ++i)
        {
            double const q = i / 1000.0;
            CHECK(percentile(cdf, q) == order_statistic(v, q));
        }
    }
}

TEST_CASE("histogram")
{
    std::vector<double> const v{0.101, 0.15, 0.199, 0.2, 0.35};
    auto const bins = histogram(v, 0.1);
    REQUIRE(bins.size() == 3);
    CHECK(bins[0].lo_s == doctest::Approx(0.1));
    CHECK(bins[0].count == 3);
    CHECK(bins[1].count == 1);
    CHECK(bins[2].count == 1);
    std::size_t total = 0;
    for (auto const& b : histogram(empirical_cdf(v), 0.05))
    {
        total += b.count;
    }
    CHECK(total == v.size());
    CHECK_THROWS_AS(histogram(v, 0.0), DomainError);

    std::ostringstream os;
    write_histogram_csv(os, bins);
    CHECK(os.str().rfind("bin_lo_s,bin_hi_s,count\n", 0) == 0);
    std::ostringstream oc;
    write_cdf_csv(oc, empirical_cdf(std::vector<double>{0.1, 0.1, 0.2}));
    CHECK(oc.str() == "latency_s,cum_prob\n0.10000000000000001,0.66666666666666663\n0.20000000000000001,1\n");
}

TEST_CASE("inverse-CDF sampling")
{
    auto const pool = synth_latencies(LatencyProfile::scion(), 20000, 3);
    auto const cdf = empirical_cdf(pool);
    auto const s = sample_latencies(cdf, 100000, 42);
    auto const again = sample_latencies(cdf, 100000, 42);
    CHECK(s == again);
    for (double x : s)
    {
        REQUIRE(x >= 0.0);
        REQUIRE(x <= cdf.tau_max());
    }
    double const p50 = percentile(empirical_cdf(s), 0.5);
    CHECK(std::abs(p50 - percentile(cdf, 0.5)) <= 0.02 * percentile(cdf, 0.5));

    auto const single = sample_latencies(empirical_cdf(std::vector<double>{0.3}), 50, 1);
    CHECK(std::all_of(single.begin(), single.end(), [](double x) { return x == 0.3; }));
    CHECK_THROWS_AS(sample_latencies(cdf, 0, 1), DomainError);
}

TEST_CASE("synthetic profiles hit their calibration targets")
{
    auto const scion = empirical_cdf(synth_latencies(LatencyProfile::scion(), 100000, 1));
    auto const bgp = empirical_cdf(synth_latencies(LatencyProfile::bgp(), 100000, 1));
    double const p99_s = percentile(scion, 0.99);
    double const p99_b = percentile(bgp, 0.99);
    CHECK(p99_s >= 0.400);
    CHECK(p99_s <= 0.420);
    CHECK(p99_b >= 0.470);
    CHECK(p99_b <= 0.490);

    auto share = [](EmpiricalCdf const& c, double lo, double hi) {
        auto const n = std::count_if(c.values.begin(), c.values.end(), [&](double x) { return x >= lo && x < hi; });
        return static_cast<double>(n) / static_cast<double>(c.size());
    };
    CHECK(share(scion, 0.1, 0.2) > 0.5);
    CHECK(share(bgp, 0.3, 0.5) > share(scion, 0.3, 0.5));
}

TEST_CASE("synthetic traces")
{
    auto const tr = synth_trace(LatencyProfile::bgp(), 100.0, 0.5, 9);
    CHECK(tr.size() == 200);
    CHECK(tr.granularity_s() == 0.5);
    for (auto const& s : tr.samples())
    {
        REQUIRE(std::isfinite(s.latency_s));
        REQUIRE(s.latency_s >= 0.0);
    }
    auto const again = synth_trace(LatencyProfile::bgp(), 100.0, 0.5, 9);
    CHECK(again.latencies() == tr.latencies());
    CHECK_THROWS_AS(synth_trace(LatencyProfile::bgp(), 0.5, 0.5, 9), DomainError);
    CHECK_THROWS_AS(LatencyProfile::by_name("ipv4"), DomainError);
}
