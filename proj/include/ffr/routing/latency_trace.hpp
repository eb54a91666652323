#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ffr::routing
{

struct LatencySample
{
    double timestamp_s;
    double latency_s;
};

/// Time-ordered latency measurements of one path. Timestamps strictly
/// increase and latencies are non-negative.
class LatencyTrace
{
public:
    LatencyTrace() = default;

    /// Throws DomainError on unordered timestamps or invalid latencies. When
    /// no granularity is given it is the median sampling interval.
    explicit LatencyTrace(std::vector<LatencySample> samples, std::optional<double> granularity_s = std::nullopt);

    static LatencyTrace constant(double latency_s, double timestamp_s = 0.0);

    std::span<LatencySample const> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    double granularity_s() const { return granularity_s_; }

    /// Latency of the last sample at or before `at` (step hold).
    std::optional<double> held_latency(double at) const;

    std::vector<double> latencies() const;

private:
    std::vector<LatencySample> samples_;
    double granularity_s_ = 0.0;
};

/// Parses `timestamp_s,latency_s` CSV text with a mandatory header.
/// Throws IngestionError naming the offending line.
LatencyTrace parse_trace(std::string_view text);

LatencyTrace ingest_trace(std::filesystem::path const& file);

void write_trace(std::ostream& os, LatencyTrace const& trace);

} // namespace ffr::routing
