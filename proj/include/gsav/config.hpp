#pragma once

#include "gsav/collision.hpp"
#include "gsav/losses.hpp"

#include <map>
#include <string>

namespace gsav {

/// Sectioned key = value configuration. '#' starts a comment; keys are
/// addressed as "section.key". Unknown keys are preserved on round trip.
class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);
    std::string to_text() const;
    void save(const std::string& path) const;

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    void set(const std::string& key, double value);
    void set(const std::string& key, const std::string& value);

    LossWeights loss_weights() const;
    CollisionConfig collision_config() const;

    double stitch_tolerance() const { return get_double("adjacency.stitch_tolerance", 1e-3); }

private:
    std::map<std::string, std::string> values_;
};

/// Optimization settings for desk-scale layer fitting.
struct FitConfig {
    double step_size = 0.5;
    int budget = 300;
    double tolerance = 1e-10;  // relative total-loss change
    LossWeights weights;

    void validate() const;
    static FitConfig from_config(const Config& config);
};

}  // namespace gsav
