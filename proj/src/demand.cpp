#include "riskhedge/demand.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "riskhedge/rng.hpp"

namespace riskhedge {

std::size_t DemandPattern::segment_index(double t) const {
    if (t <= times.front()) return 0;
    if (t >= times.back()) return segment_count() - 1;
    std::size_t lo = 0, hi = segment_count() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        if (times[mid] <= t)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

double DemandPattern::segment_drift(std::size_t seg) const {
    return (levels[seg + 1] - levels[seg]) / (times[seg + 1] - times[seg]);
}

double DemandPattern::level_at(double t) const {
    if (t <= times.front()) return levels.front();
    if (t >= times.back()) return levels.back();
    const std::size_t seg = segment_index(t);
    return levels[seg] + segment_drift(seg) * (t - times[seg]);
}

double DemandPattern::min_level() const {
    double m = levels.front();
    for (double v : levels) m = std::min(m, v);
    return m;
}

double DemandPattern::max_level() const {
    double m = levels.front();
    for (double v : levels) m = std::max(m, v);
    return m;
}

double DemandPattern::avg_level() const {
    double area = 0.0;
    for (std::size_t s = 0; s < segment_count(); ++s)
        area += 0.5 * (levels[s] + levels[s + 1]) * (times[s + 1] - times[s]);
    return area / horizon();
}

DemandPattern load_pattern(std::istream& in) {
    DemandPattern out;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty pattern stream");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,value") throw std::invalid_argument("pattern header must be \"t,value\"");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("pattern line " + std::to_string(lineno) + ": missing comma");
        std::size_t used = 0;
        double t, v;
        try {
            t = std::stod(line.substr(0, comma), &used);
            if (used != comma) throw std::invalid_argument("");
            const std::string rest = line.substr(comma + 1);
            v = std::stod(rest, &used);
            if (used != rest.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::invalid_argument("pattern line " + std::to_string(lineno) + ": malformed row");
        }
        if (!std::isfinite(t) || !std::isfinite(v))
            throw std::invalid_argument("pattern line " + std::to_string(lineno) + ": non-finite");
        if (!out.times.empty() && t <= out.times.back())
            throw std::invalid_argument("pattern line " + std::to_string(lineno) +
                                        ": times must be strictly increasing");
        out.times.push_back(t);
        out.levels.push_back(v);
    }
    if (out.times.size() < 2) throw std::invalid_argument("pattern needs at least two rows");
    if (out.times.front() != 0.0) throw std::invalid_argument("pattern must start at t=0");
    return out;
}

DemandPattern flat_pattern(double level, double horizon_hours) {
    DemandPattern out;
    out.times = {0.0, horizon_hours};
    out.levels = {level, level};
    return out;
}

int SimConfig::steps() const {
    return static_cast<int>(std::llround(horizon_hours * 3600.0 / dt_seconds));
}

int SimConfig::steps_per_slot() const {
    return static_cast<int>(std::llround(gamma_seconds / dt_seconds));
}

int SimConfig::slots() const {
    return static_cast<int>(std::llround(horizon_hours * 3600.0 / gamma_seconds));
}

void SimConfig::validate() const {
    if (!(dt_seconds > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(gamma_seconds > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (!(horizon_hours > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (n_paths < 1) throw std::invalid_argument("n_paths must be at least 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    const double k_slot = gamma_seconds / dt_seconds;
    if (std::abs(k_slot - std::llround(k_slot)) > 1e-9 * k_slot)
        throw std::invalid_argument("gamma must be an integer multiple of dt");
    const double n_slot = horizon_hours * 3600.0 / gamma_seconds;
    if (std::abs(n_slot - std::llround(n_slot)) > 1e-9 * n_slot)
        throw std::invalid_argument("horizon must be an integer multiple of gamma");
}

SegmentSchedule SegmentSchedule::build(const DemandPattern& pattern, const SimConfig& cfg) {
    const int k = cfg.steps();
    const double dt = cfg.dt_hours();
    SegmentSchedule out;
    out.segment.resize(k);
    out.drift.resize(k);
    std::size_t seg = 0;
    for (int i = 0; i < k; ++i) {
        const double t = i * dt;
        while (seg + 1 < pattern.segment_count() && t >= pattern.times[seg + 1]) ++seg;
        out.segment[i] = static_cast<std::uint32_t>(seg);
        out.drift[i] = pattern.segment_drift(seg);
    }
    return out;
}

void generate_path_values(const SegmentSchedule& sched, const SimConfig& cfg, double d0,
                          std::uint64_t path_index, std::vector<double>& values) {
    const int k = static_cast<int>(sched.drift.size());
    const double dt = cfg.dt_hours();
    const double sq = cfg.sigma * std::sqrt(dt);
    values.resize(k + 1);
    values[0] = d0;
    for (int i = 0; i < k; ++i) {
        const double z = normal_draw(cfg.seed, path_index, static_cast<std::uint64_t>(i));
        values[i + 1] = values[i] + sched.drift[i] * dt + sq * z;
    }
}

SamplePath generate_path(const DemandPattern& pattern, const SimConfig& cfg,
                         std::uint64_t path_index) {
    cfg.validate();
    const SegmentSchedule sched = SegmentSchedule::build(pattern, cfg);
    SamplePath out;
    out.dt = cfg.dt_hours();
    out.path_index = path_index;
    generate_path_values(sched, cfg, pattern.levels.front(), path_index, out.values);
    return out;
}

std::vector<SamplePath> generate_paths(const DemandPattern& pattern, const SimConfig& cfg) {
    std::vector<SamplePath> out;
    out.reserve(cfg.n_paths);
    for (int i = 0; i < cfg.n_paths; ++i)
        out.push_back(generate_path(pattern, cfg, static_cast<std::uint64_t>(i)));
    return out;
}

void write_paths_csv(const std::vector<SamplePath>& paths, std::ostream& out) {
    out << "path_id,t,D\n";
    for (const auto& path : paths) {
        for (std::size_t i = 0; i < path.values.size(); ++i)
            out << path.path_index << ',' << i * path.dt << ',' << path.values[i] << '\n';
    }
}

}  // namespace riskhedge
