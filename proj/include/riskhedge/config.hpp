#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "riskhedge/contract.hpp"
#include "riskhedge/demand.hpp"
#include "riskhedge/model.hpp"

namespace riskhedge {

// key = value text configuration; '#' starts a comment. Unknown keys are an
// error, listed by name.
class KeyValueConfig {
  public:
    static KeyValueConfig parse(std::istream& in);

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    long integer_or(const std::string& key, long fallback) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

  private:
    std::map<std::string, std::string> entries_;
};

// Single-resource model keys: b, sigma, alpha, theta_l, theta_u, R_p, C_p,
// R_s, C_s, I_p, D_p, x0; simulation keys: dt, gamma (seconds), horizon
// (hours), n_paths, seed.
ModelParams model_from_config(const KeyValueConfig& cfg);
SimConfig sim_from_config(const KeyValueConfig& cfg);
void check_single_resource_keys(const KeyValueConfig& cfg);

// Multi-resource keys: per-resource suffix _1.._P on R_p, C_p, I_p, D_p,
// theta_l, theta_u; shared b, sigma, alpha, R_s, C_s, plus x0 and D0.
MultiParams multi_from_config(const KeyValueConfig& cfg);
void check_multi_resource_keys(const KeyValueConfig& cfg);

}  // namespace riskhedge
