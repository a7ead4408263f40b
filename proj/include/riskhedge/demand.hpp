#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace riskhedge {

// Piecewise-linear average daily demand f(t); times in hours, ascending from
// 0 to the horizon. The per-segment slopes are the drifts used to calibrate
// thresholds and to generate paths.
struct DemandPattern {
    std::vector<double> times;
    std::vector<double> levels;

    double horizon() const { return times.back(); }
    std::size_t segment_count() const { return times.size() - 1; }
    std::size_t segment_index(double t) const;
    double segment_drift(std::size_t seg) const;
    double level_at(double t) const;
    double drift_at(double t) const { return segment_drift(segment_index(t)); }
    double min_level() const;
    double max_level() const;
    double avg_level() const;  // time average over the horizon
};

// CSV with header "t,value". Throws on malformed rows or non-increasing times.
DemandPattern load_pattern(std::istream& in);

DemandPattern flat_pattern(double level, double horizon_hours);

struct SimConfig {
    double dt_seconds = 2.0;
    double gamma_seconds = 300.0;  // baseline slot length
    double horizon_hours = 24.0;
    int n_paths = 10000;
    std::uint64_t seed = 1;
    double sigma = 0.4;  // volatility used for path generation
    double x0 = 0.0;     // initial imbalance X(0) = P(0) - D(0)

    int steps() const;
    int steps_per_slot() const;
    int slots() const;
    double dt_hours() const { return horizon_hours / steps(); }
    double gamma_hours() const { return horizon_hours / slots(); }
    void validate() const;
};

struct SamplePath {
    double dt = 0.0;  // hours
    std::vector<double> values;
    std::uint64_t path_index = 0;
};

// Euler-Maruyama step of dD = b(t) dt + sigma dW with D(0) = f(0); the
// normal increments come from the counter-based stream (seed, path, step).
SamplePath generate_path(const DemandPattern& pattern, const SimConfig& cfg,
                         std::uint64_t path_index);

std::vector<SamplePath> generate_paths(const DemandPattern& pattern, const SimConfig& cfg);

// Per-step drift b(t_k) and segment index, shared by every path of a run.
struct SegmentSchedule {
    std::vector<std::uint32_t> segment;  // size = steps
    std::vector<double> drift;           // size = steps

    static SegmentSchedule build(const DemandPattern& pattern, const SimConfig& cfg);
};

// Buffer-reusing variant for hot loops; `values` is resized to steps + 1.
void generate_path_values(const SegmentSchedule& sched, const SimConfig& cfg, double d0,
                          std::uint64_t path_index, std::vector<double>& values);

void write_paths_csv(const std::vector<SamplePath>& paths, std::ostream& out);

}  // namespace riskhedge
