#include "gsav/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gsav {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        cfg.values_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string Config::to_text() const {
    std::ostringstream os;
    std::string section;
    for (const auto& [key, value] : values_) {
        const auto dot = key.rfind('.');
        const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
        const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
        if (sec != section) {
            os << "[" << sec << "]\n";
            section = sec;
        }
        os << name << " = " << value << "\n";
    }
    return os.str();
}

void Config::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << to_text();
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("config key '" + key + "' is not a number: " + it->second);
    }
}

int Config::get_int(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const int v = std::stoi(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("config key '" + key + "' is not an integer: " + it->second);
    }
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

void Config::set(const std::string& key, double value) {
    std::ostringstream os;
    os.precision(17);
    os << value;
    values_[key] = os.str();
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

LossWeights Config::loss_weights() const {
    LossWeights w;
    w.l1 = get_double("losses.lambda_l1", w.l1);
    w.ssim = get_double("losses.lambda_ssim", w.ssim);
    w.normal = get_double("losses.lambda_normal", w.normal);
    w.stitch = get_double("losses.lambda_stitch", w.stitch);
    w.off = get_double("losses.lambda_off", w.off);
    w.tv = get_double("losses.lambda_tv", w.tv);
    w.edge = get_double("losses.lambda_edge", w.edge);
    w.label = get_double("losses.lambda_label", w.label);
    w.tv_label = get_double("losses.lambda_tv_label", w.tv_label);
    w.stitch_label = get_double("losses.lambda_stitch_label", w.stitch_label);
    w.coll = get_double("losses.lambda_coll", w.coll);
    w.layer = get_double("losses.lambda_layer", w.layer);
    w.cd = get_double("losses.lambda_cd", w.cd);
    w.validate();
    return w;
}

CollisionConfig Config::collision_config() const {
    CollisionConfig c;
    c.epsilon = get_double("collision.epsilon", c.epsilon);
    c.delta = get_double("collision.delta", c.delta);
    c.alpha = get_double("collision.alpha", c.alpha);
    c.iterations = get_int("collision.iterations", c.iterations);
    c.validate();
    return c;
}

void FitConfig::validate() const {
    if (!(step_size > 0)) throw std::invalid_argument("fit config: step size must be > 0");
    if (budget < 1) throw std::invalid_argument("fit config: budget must be >= 1");
    weights.validate();
}

FitConfig FitConfig::from_config(const Config& config) {
    FitConfig f;
    f.step_size = config.get_double("fit.step_size", f.step_size);
    f.budget = config.get_int("fit.budget", f.budget);
    f.tolerance = config.get_double("fit.tolerance", f.tolerance);
    f.weights = config.loss_weights();
    f.validate();
    return f;
}

}  // namespace gsav
