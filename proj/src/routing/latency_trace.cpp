#include "ffr/routing/latency_trace.hpp"

#include "ffr/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

namespace ffr::routing
{

LatencyTrace::LatencyTrace(std::vector<LatencySample> samples, std::optional<double> granularity_s)
    : samples_(std::move(samples))
{
    for (std::size_t i = 0; i < samples_.size(); ++i)
    {
        auto const& s = samples_[i];
        if (!std::isfinite(s.timestamp_s) || !std::isfinite(s.latency_s) || s.latency_s < 0.0)
        {
            throw DomainError(fmt::format("LatencyTrace: invalid sample at index {}", i));
        }
        if (i > 0 && !(s.timestamp_s > samples_[i - 1].timestamp_s))
        {
            throw DomainError(fmt::format("LatencyTrace: timestamps not strictly increasing at index {}", i));
        }
    }
    if (granularity_s)
    {
        granularity_s_ = *granularity_s;
    }
    else if (samples_.size() > 1)
    {
        std::vector<double> gaps;
        gaps.reserve(samples_.size() - 1);
        for (std::size_t i = 1; i < samples_.size(); ++i)
        {
            gaps.push_back(samples_[i].timestamp_s - samples_[i - 1].timestamp_s);
        }
        auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
        std::nth_element(gaps.begin(), mid, gaps.end());
        granularity_s_ = *mid;
    }
}

LatencyTrace
LatencyTrace::constant(double latency_s, double timestamp_s)
{
    return LatencyTrace({{timestamp_s, latency_s}});
}

std::optional<double>
LatencyTrace::held_latency(double at) const
{
    auto it = std::upper_bound(samples_.begin(), samples_.end(), at, [](double t, LatencySample const& s) {
        return t < s.timestamp_s;
    });
    if (it == samples_.begin())
    {
        return std::nullopt;
    }
    return std::prev(it)->latency_s;
}

std::vector<double>
LatencyTrace::latencies() const
{
    std::vector<double> out;
    out.reserve(samples_.size());
    for (auto const& s : samples_)
    {
        out.push_back(s.latency_s);
    }
    return out;
}

namespace
{

std::string_view
trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\xEF'
                          || s.front() == '\xBB' || s.front() == '\xBF'))
    {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    {
        s.remove_suffix(1);
    }
    return s;
}

double
parse_number(std::string_view field, std::size_t line, char const* name)
{
    field = trim(field);
    double value = 0.0;
    auto const* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end || field.empty())
    {
        throw IngestionError(fmt::format("cannot parse {} '{}'", name, field), line);
    }
    return value;
}

} // namespace

LatencyTrace
parse_trace(std::string_view text)
{
    std::vector<LatencySample> samples;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos < text.size())
    {
        std::size_t const nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        std::string_view const line = trim(raw);
        if (line.empty())
        {
            continue;
        }
        if (!header_seen)
        {
            if (line != "timestamp_s,latency_s")
            {
                throw IngestionError("expected header 'timestamp_s,latency_s'", line_no);
            }
            header_seen = true;
            continue;
        }
        std::size_t const comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
        {
            throw IngestionError("expected two comma-separated fields", line_no);
        }
        double const ts = parse_number(line.substr(0, comma), line_no, "timestamp");
        double const lat = parse_number(line.substr(comma + 1), line_no, "latency");
        if (!std::isfinite(ts) || !std::isfinite(lat))
        {
            throw IngestionError("non-finite value", line_no);
        }
        if (lat < 0.0)
        {
            throw IngestionError("negative latency", line_no);
        }
        if (!samples.empty() && !(ts > samples.back().timestamp_s))
        {
            throw IngestionError("timestamps must be strictly increasing", line_no);
        }
        samples.push_back({ts, lat});
    }
    if (!header_seen)
    {
        throw IngestionError("empty trace file", 1);
    }
    if (samples.empty())
    {
        throw IngestionError("trace has a header but no samples", line_no);
    }
    return LatencyTrace(std::move(samples));
}

LatencyTrace
ingest_trace(std::filesystem::path const& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
    {
        throw IngestionError("cannot open trace file " + file.string(), 0);
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try
    {
        return parse_trace(text);
    }
    catch (IngestionError const& e)
    {
        throw e.with_context(file.string());
    }
}

void
write_trace(std::ostream& os, LatencyTrace const& trace)
{
    os << "timestamp_s,latency_s\n";
    for (auto const& s : trace.samples())
    {
        os << fmt::format("{:.17g},{:.17g}\n", s.timestamp_s, s.latency_s);
    }
}

} // namespace ffr::routing
