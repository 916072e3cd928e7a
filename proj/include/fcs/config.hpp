#pragma once

// Flat `key = value` config files with [section] headers. Parse errors carry
// the offending line number.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcs/channel.hpp"
#include "fcs/protocol.hpp"
#include "fcs/statemodel.hpp"

namespace fcs {

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& message)
        : std::runtime_error("config line " + std::to_string(line) + ": " + message),
          line_(line) {}
    explicit ConfigError(const std::string& message)
        : std::runtime_error(message), line_(0) {}
    int line() const { return line_; }

private:
    int line_;
};

class Config {
public:
    static Config parse_string(const std::string& text) {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        std::string section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string s = trim(line);
            if (s.empty() || s[0] == '#') continue;
            if (s.front() == '[') {
                if (s.back() != ']' || s.size() < 3)
                    throw ConfigError(line_no, "malformed section header");
                section = trim(s.substr(1, s.size() - 2));
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError(line_no, "expected key = value");
            std::string key = trim(s.substr(0, eq));
            std::string value = trim(s.substr(eq + 1));
            if (key.empty())
                throw ConfigError(line_no, "empty key");
            cfg.values_[section][key] = {value, line_no};
        }
        return cfg;
    }

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_string(buf.str());
    }

    bool has(const std::string& section, const std::string& key) const {
        auto sec = values_.find(section);
        return sec != values_.end() && sec->second.count(key) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key) const {
        auto sec = values_.find(section);
        if (sec == values_.end() || !sec->second.count(key))
            throw ConfigError("missing key [" + section + "] " + key);
        return sec->second.at(key).text;
    }

    double get_double(const std::string& section, const std::string& key) const {
        const Entry& e = entry(section, key);
        try {
            std::size_t pos = 0;
            double v = std::stod(e.text, &pos);
            if (pos != e.text.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(e.line, "expected a number for " + key);
        }
    }

    std::int64_t get_int64(const std::string& section, const std::string& key) const {
        const Entry& e = entry(section, key);
        try {
            // accept scientific notation for round counts (1e14)
            double v = get_double(section, key);
            auto iv = static_cast<std::int64_t>(v);
            if (static_cast<double>(iv) != v)
                throw std::invalid_argument("");
            return iv;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError(e.line, "expected an integer for " + key);
        }
    }

    double get_double_or(const std::string& section, const std::string& key, double fallback) const {
        return has(section, key) ? get_double(section, key) : fallback;
    }

    std::int64_t get_int64_or(const std::string& section, const std::string& key,
                              std::int64_t fallback) const {
        return has(section, key) ? get_int64(section, key) : fallback;
    }

    // Comma- or space-separated list of numbers.
    std::vector<double> get_list(const std::string& section, const std::string& key) const {
        const Entry& e = entry(section, key);
        std::string text = e.text;
        for (char& c : text)
            if (c == ',') c = ' ';
        std::istringstream in(text);
        std::vector<double> out;
        double v;
        while (in >> v) out.push_back(v);
        if (!in.eof())
            throw ConfigError(e.line, "expected a list of numbers for " + key);
        return out;
    }

private:
    struct Entry {
        std::string text;
        int line = 0;
    };

    const Entry& entry(const std::string& section, const std::string& key) const {
        auto sec = values_.find(section);
        if (sec == values_.end() || !sec->second.count(key))
            throw ConfigError("missing key [" + section + "] " + key);
        return sec->second.at(key);
    }

    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::map<std::string, Entry>> values_;
};

// ---------------------------------------------------------------------------
// Section builders.

inline ProtocolParams protocol_from_config(const Config& cfg) {
    ProtocolParams p;
    p.n_rounds = cfg.get_int64_or("protocol", "n_rounds", 100000000000000LL);
    p.mu = cfg.get_double_or("protocol", "mu", 0.01);
    p.p_est = cfg.get_double_or("protocol", "p_est", 0.1);
    p.r1 = static_cast<int>(cfg.get_int64_or("protocol", "r1", 0));
    p.r2 = static_cast<int>(cfg.get_int64_or("protocol", "r2", 0));
    if (cfg.has("protocol", "p0a_floor")) p.p0a_floor = cfg.get_double("protocol", "p0a_floor");
    if (cfg.has("protocol", "p0b_floor")) p.p0b_floor = cfg.get_double("protocol", "p0b_floor");
    return p;
}

inline double eps_tot_from_config(const Config& cfg) {
    return cfg.get_double_or("protocol", "eps_tot", 1e-10);
}

inline ChannelParams channel_from_config(const Config& cfg) {
    ChannelParams c;
    c.attenuation_db = cfg.get_double_or("channel", "attenuation_db", 0.0);
    c.dark = cfg.get_double_or("channel", "dark", 1e-10);
    c.e_mis = cfg.get_double_or("channel", "e_mis", 0.01);
    c.f_ec = cfg.get_double_or("channel", "f_ec", 1.1);
    return c;
}

inline CorrelationKernel kernel_from_config(const Config& cfg, const std::string& section,
                                            double default_mu) {
    std::string kind = cfg.has(section, "kind") ? cfg.get_string(section, "kind") : "ideal";
    double mu = cfg.get_double_or(section, "mu", default_mu);
    std::vector<double> prev, next;
    if (cfg.has(section, "c_prev")) prev = cfg.get_list(section, "c_prev");
    if (cfg.has(section, "c_next")) next = cfg.get_list(section, "c_next");
    if (kind == "ideal") return CorrelationKernel::ideal(mu);
    if (kind == "phase_leak") return CorrelationKernel::phase_leak(mu, prev, next);
    if (kind == "intensity_leak") return CorrelationKernel::intensity_leak(mu, prev, next);
    throw ConfigError("unknown kernel kind '" + kind + "' in [" + section + "]");
}

struct SweepSpec {
    double attenuation_start = 0.0;
    double attenuation_stop = 60.0;
    double attenuation_step = 2.0;
    std::vector<int> range_list;  // values of r1+r2 to sweep
};

inline void validate(const SweepSpec& s) {
    if (!(s.attenuation_step > 0.0))
        throw ConfigError("sweep: attenuation_step must be > 0");
    if (s.attenuation_start > s.attenuation_stop)
        throw ConfigError("sweep: attenuation_start must be <= attenuation_stop");
}

inline SweepSpec sweep_from_config(const Config& cfg) {
    SweepSpec s;
    s.attenuation_start = cfg.get_double_or("sweep", "attenuation_start", 0.0);
    s.attenuation_stop = cfg.get_double_or("sweep", "attenuation_stop", 60.0);
    s.attenuation_step = cfg.get_double_or("sweep", "attenuation_step", 2.0);
    if (cfg.has("sweep", "r_total_list"))
        for (double v : cfg.get_list("sweep", "r_total_list"))
            s.range_list.push_back(static_cast<int>(v));
    validate(s);
    return s;
}

} // namespace fcs
