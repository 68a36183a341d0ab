#include "compass/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>

namespace compass {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t pos; (pos = s.find(sep, start)) != std::string::npos; start = pos + 1)
        parts.push_back(trim(s.substr(start, pos - start)));
    parts.push_back(trim(s.substr(start)));
    return parts;
}

double parse_plain(const std::string& text, const std::string& key) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) throw ConfigError(key, "not a number: '" + text + "'");
    return value;
}

bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
    if (text == "0" || text == "false" || text == "no" || text == "off") return false;
    throw ConfigError(key, "expected a boolean, got '" + text + "'");
}

int parse_int(const std::string& text, const std::string& key) {
    const double v = parse_number(text, key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key, "expected an integer, got '" + text + "'");
    return static_cast<int>(v);
}

bool is_axis_key(const std::string& key) {
    return std::find_if(std::begin(kAxisNames), std::end(kAxisNames), [&](const char* a) { return key == a; }) !=
           std::end(kAxisNames);
}

void set_fixed(PointParams& p, const std::string& key, double v) {
    if (key == "B") p.B = v;
    else if (key == "theta") p.theta = v;
    else if (key == "T") p.T = v;
    else if (key == "k_S") p.k_S = v;
    else if (key == "g0") p.g0 = v;
    else if (key == "N") {
        if (v != std::floor(v)) throw ConfigError(key, "expected an integer");
        p.N = static_cast<int>(v);
    }
}

}  // namespace

ConfigEntries parse_config(std::istream& in) {
    ConfigEntries entries;
    std::string line;
    for (int number = 1; std::getline(in, line); ++number) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number), "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(number), "empty key");
        set_entry(entries, key, trim(line.substr(eq + 1)));
    }
    return entries;
}

ConfigEntries parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
    return parse_config(in);
}

std::pair<std::string, std::string> parse_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(text, "expected key=value");
    std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError(text, "empty key");
    return {key, trim(text.substr(eq + 1))};
}

void set_entry(ConfigEntries& entries, const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries.emplace_back(key, value);
}

double parse_number(const std::string& raw, const std::string& key) {
    const std::string text = trim(raw);
    const auto pos = text.find("pi");
    if (pos == std::string::npos) return parse_plain(text, key);

    // [factor][*]pi[/divisor]
    std::string factor = trim(text.substr(0, pos));
    std::string rest = trim(text.substr(pos + 2));
    if (!factor.empty() && factor.back() == '*') factor = trim(factor.substr(0, factor.size() - 1));
    double value = std::numbers::pi;
    if (!factor.empty()) value *= factor == "-" ? -1.0 : parse_plain(factor, key);
    if (!rest.empty()) {
        if (rest.front() != '/') throw ConfigError(key, "malformed pi expression '" + text + "'");
        value /= parse_plain(trim(rest.substr(1)), key);
    }
    return value;
}

std::vector<double> parse_values(const std::string& text, const std::string& key) {
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw ConfigError(key, "range must be lo:hi:count");
        const double lo = parse_number(parts[0], key);
        const double hi = parse_number(parts[1], key);
        const int n = parse_int(parts[2], key);
        if (n < 1) throw ConfigError(key, "range count must be >= 1");
        if (n == 1) {
            if (lo != hi) throw ConfigError(key, "a one-point range needs lo == hi");
            return {lo};
        }
        std::vector<double> values(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) values[i] = lo + (hi - lo) * i / (n - 1);
        values.back() = hi;
        return values;
    }
    std::vector<double> values;
    for (const auto& part : split(text, ',')) {
        if (part.empty()) throw ConfigError(key, "empty list element");
        values.push_back(parse_number(part, key));
    }
    return values;
}

SweepSpec apply_config(SweepSpec spec, const ConfigEntries& entries) {
    for (const auto& [key, value] : entries) {
        if (is_axis_key(key)) {
            std::vector<double> values = parse_values(value, key);
            auto it = std::find_if(spec.axes.begin(), spec.axes.end(), [&](const SweepAxis& a) { return a.name == key; });
            const bool scalar = values.size() == 1 && value.find(',') == std::string::npos &&
                                value.find(':') == std::string::npos;
            if (scalar) {
                if (it != spec.axes.end()) spec.axes.erase(it);
                set_fixed(spec.fixed, key, values.front());
            } else if (it != spec.axes.end()) {
                it->values = std::move(values);
            } else {
                spec.axes.push_back(SweepAxis{key, std::move(values)});
            }
        } else if (key == "J") {
            spec.fixed.J = parse_number(value, key);
        } else if (key == "nuclear_moment") {
            spec.fixed.nuclear_moment = parse_number(value, key);
        } else if (key == "omega") {
            spec.fixed.omega = parse_number(value, key);
        } else if (key == "K_c") {
            spec.cutoff_modes = parse_int(value, key);
        } else if (key == "engine") {
            const auto engine = parse_engine(value);
            if (!engine) throw ConfigError(key, "expected auto, fermion or ed, got '" + value + "'");
            spec.engine = *engine;
        } else if (key == "outputs") {
            spec.want_phi_s = spec.want_lambda_theta = spec.echo.enabled = false;
            for (const auto& item : split(value, ',')) {
                if (item == "phi_s") spec.want_phi_s = true;
                else if (item == "lambda_theta") spec.want_lambda_theta = true;
                else if (item == "echo") spec.echo.enabled = true;
                else throw ConfigError(key, "unknown output '" + item + "'");
            }
        } else if (key == "rel_tol") {
            spec.quadrature.rel_tol = parse_number(value, key);
        } else if (key == "truncation_eps") {
            spec.quadrature.truncation_eps = parse_number(value, key);
        } else if (key == "density") {
            spec.quadrature.min_points_per_period = parse_number(value, key);
        } else if (key == "max_refinements") {
            spec.quadrature.max_refinements = parse_int(value, key);
        } else if (key == "fd_step") {
            spec.fd_step = parse_number(value, key);
        } else if (key == "validate") {
            spec.validate = parse_bool(value, key);
        } else if (key == "t_max") {
            spec.echo.t_max = parse_number(value, key);
        } else if (key == "t_points") {
            const int n = parse_int(value, key);
            if (n < 2) throw ConfigError(key, "must be >= 2");
            spec.echo.points = static_cast<std::size_t>(n);
        } else if (key == "name") {
            spec.name = value;
        } else {
            throw ConfigError(key, "unknown configuration key");
        }
    }
    validate(spec);
    return spec;
}

}  // namespace compass
