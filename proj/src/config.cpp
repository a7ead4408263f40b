#include "riskhedge/config.hpp"

#include <algorithm>
#include <istream>
#include <set>
#include <stdexcept>

namespace riskhedge {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

const std::set<std::string> kModelKeys = {"b",   "sigma", "alpha", "theta_l", "theta_u", "R_p",
                                          "C_p", "R_s",   "C_s",   "I_p",     "D_p",     "x0"};
const std::set<std::string> kSimKeys = {"dt", "gamma", "horizon", "n_paths", "seed"};
const std::set<std::string> kMultiShared = {"b",   "sigma", "alpha", "R_s",
                                            "C_s", "x0",    "D0"};
const std::set<std::string> kMultiPerResource = {"R_p", "C_p", "I_p", "D_p", "theta_l", "theta_u"};

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
    KeyValueConfig out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": empty key or value");
        if (out.entries_.count(key))
            throw std::invalid_argument("config: duplicate key " + key);
        out.entries_[key] = value;
    }
    return out;
}

double KeyValueConfig::number(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw std::invalid_argument("config: missing key " + key);
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(it->second, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key);
    }
    if (used != it->second.size()) throw std::invalid_argument("config: bad number for " + key);
    return v;
}

double KeyValueConfig::number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

long KeyValueConfig::integer_or(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key);
    const long l = static_cast<long>(v);
    if (static_cast<double>(l) != v) throw std::invalid_argument("config: expected integer " + key);
    return l;
}

void check_single_resource_keys(const KeyValueConfig& cfg) {
    for (const auto& [key, value] : cfg.entries()) {
        if (!kModelKeys.count(key) && !kSimKeys.count(key))
            throw std::invalid_argument("config: unknown key " + key);
    }
}

ModelParams model_from_config(const KeyValueConfig& cfg) {
    ModelParams p;
    p.b = cfg.number_or("b", 0.0);
    p.sigma = cfg.number("sigma");
    p.alpha = cfg.number("alpha");
    p.theta_l = cfg.number("theta_l");
    p.theta_u = cfg.number("theta_u");
    p.reward_primary = cfg.number("R_p");
    p.cost_primary = cfg.number("C_p");
    p.reward_secondary = cfg.number("R_s");
    p.cost_secondary = cfg.number("C_s");
    p.inc_cost = cfg.number_or("I_p", 0.0);
    p.dec_cost = cfg.number_or("D_p", 0.0);
    validate(p);
    return p;
}

SimConfig sim_from_config(const KeyValueConfig& cfg) {
    SimConfig s;
    s.dt_seconds = cfg.number_or("dt", s.dt_seconds);
    s.gamma_seconds = cfg.number_or("gamma", s.gamma_seconds);
    s.horizon_hours = cfg.number_or("horizon", s.horizon_hours);
    s.n_paths = static_cast<int>(cfg.integer_or("n_paths", s.n_paths));
    s.seed = static_cast<std::uint64_t>(cfg.integer_or("seed", 1));
    s.sigma = cfg.number_or("sigma", s.sigma);
    s.x0 = cfg.number_or("x0", 0.0);
    s.validate();
    return s;
}

namespace {

bool split_suffix(const std::string& key, std::string& stem, std::size_t& index) {
    const auto us = key.find_last_of('_');
    if (us == std::string::npos || us + 1 >= key.size()) return false;
    const std::string digits = key.substr(us + 1);
    if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
        return false;
    stem = key.substr(0, us);
    index = static_cast<std::size_t>(std::stoul(digits));
    return index >= 1;
}

}  // namespace

void check_multi_resource_keys(const KeyValueConfig& cfg) {
    for (const auto& [key, value] : cfg.entries()) {
        std::string stem;
        std::size_t idx;
        if (kMultiShared.count(key) || kSimKeys.count(key)) continue;
        if (split_suffix(key, stem, idx) && kMultiPerResource.count(stem)) continue;
        throw std::invalid_argument("config: unknown key " + key);
    }
}

MultiParams multi_from_config(const KeyValueConfig& cfg) {
    check_multi_resource_keys(cfg);
    std::size_t count = 0;
    for (const auto& [key, value] : cfg.entries()) {
        std::string stem;
        std::size_t idx;
        if (split_suffix(key, stem, idx) && kMultiPerResource.count(stem))
            count = std::max(count, idx);
    }
    if (count == 0) throw std::invalid_argument("config: no per-resource keys (R_p_1 ...)");

    MultiParams mp;
    mp.b = cfg.number_or("b", 0.0);
    mp.sigma = cfg.number("sigma");
    mp.alpha = cfg.number("alpha");
    mp.reward_secondary = cfg.number("R_s");
    mp.cost_secondary = cfg.number("C_s");
    for (std::size_t i = 1; i <= count; ++i) {
        const std::string suffix = "_" + std::to_string(i);
        mp.reward_primary.push_back(cfg.number("R_p" + suffix));
        mp.cost_primary.push_back(cfg.number("C_p" + suffix));
        mp.inc_cost.push_back(cfg.number_or("I_p" + suffix, 0.0));
        mp.dec_cost.push_back(cfg.number_or("D_p" + suffix, 0.0));
        mp.theta_l.push_back(cfg.number("theta_l" + suffix));
        mp.theta_u.push_back(cfg.number("theta_u" + suffix));
    }
    validate(mp);
    return mp;
}

}  // namespace riskhedge
