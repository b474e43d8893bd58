#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rwl/data.hpp"
#include "rwl/report.hpp"

namespace rwl {

struct GridConfig {
    double r_max = 16.0;
    std::size_t n = 1600;
    double dt_ratio = 1.0;
    double t_end = 10.0;
    std::size_t record_stride = 1;

    friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct ExperimentConfig {
    std::vector<double> R;
    std::vector<double> R_scaled;
    std::vector<double> times;
    std::vector<double> epsilons;
    std::vector<double> ells;
    std::vector<double> lambdas;
    std::vector<double> amplitudes;
    std::size_t trials = 1;
    double horizon = 10.0;
    std::optional<std::uint64_t> seed;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct OutputConfig {
    std::string directory = "rwl-out";
    std::vector<std::string> formats{"json", "csv"};

    bool wants(std::string_view format) const {
        for (const auto& f : formats)
            if (f == format) return true;
        return false;
    }

    friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

/// Everything one CLI run needs.
struct RunConfig {
    std::string command;
    double p = 7.0;
    Sign iota = Sign::focusing;
    GridConfig grid;
    DataSpec data;
    ExperimentConfig experiment;
    OutputConfig output;

    Params params() const { return make_params(p, iota); }
    RadialGrid radial_grid() const { return RadialGrid(grid.r_max, grid.n); }

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

struct ConfigValue {
    enum class Kind { number, integer, string, boolean, array } kind = Kind::number;
    double number = 0.0;
    std::uint64_t integer = 0;
    bool negative = false;
    std::string text;
    bool boolean = false;
    std::vector<ConfigValue> items;
};

class ConfigParser {
public:
    ConfigParser(std::string_view source, std::string origin) : origin_(std::move(origin)) {
        std::size_t start = 0;
        while (start <= source.size()) {
            const std::size_t end = source.find('\n', start);
            lines_.emplace_back(source.substr(start, end == std::string_view::npos ? source.size() - start : end - start));
            if (end == std::string_view::npos) break;
            start = end + 1;
        }
    }

    template <class Handler>
    void run(Handler&& handler) {
        std::string table;
        for (line_ = 1; line_ <= lines_.size(); ++line_) {
            std::string_view s = lines_[line_ - 1];
            if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
            pos_ = 0;
            cur_ = s;
            skip_ws();
            if (at_end() || peek() == '#') continue;
            if (peek() == '[') {
                ++pos_;
                skip_ws();
                table = identifier();
                skip_ws();
                expect(']');
                skip_ws();
                if (!at_end()) fail("unexpected text after table header");
                handler(table, std::string{}, ConfigValue{}, line_);
                continue;
            }
            const std::string key = identifier();
            skip_ws();
            expect('=');
            skip_ws();
            ConfigValue value = parse_value(true);
            skip_ws();
            if (!at_end() && peek() != '#') fail("unexpected text after value");
            handler(table, key, value, line_);
        }
    }

    [[noreturn]] void fail(const std::string& msg) const { fail_at(line_, msg); }

    [[noreturn]] void fail_at(std::size_t line, const std::string& msg) const {
        throw Error(ErrorCode::ConfigError, origin_ + ":" + std::to_string(line) + ": " + msg);
    }

private:
    bool at_end() const { return pos_ >= cur_.size(); }
    char peek() const { return cur_[pos_]; }
    void skip_ws() {
        while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
    }
    void expect(char c) {
        if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string identifier() {
        const std::size_t start = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) != 0 || peek() == '_' || peek() == '-'))
            ++pos_;
        if (pos_ == start) fail("expected a key");
        return std::string(cur_.substr(start, pos_ - start));
    }

    ConfigValue parse_value(bool allow_array) {
        if (at_end()) fail("missing value");
        ConfigValue v;
        const char c = peek();
        if (c == '[') {
            if (!allow_array) fail("nested arrays are not supported");
            ++pos_;
            v.kind = ConfigValue::Kind::array;
            skip_ws();
            while (!at_end() && peek() != ']') {
                v.items.push_back(parse_value(false));
                skip_ws();
                if (!at_end() && peek() == ',') {
                    ++pos_;
                    skip_ws();
                } else {
                    break;
                }
            }
            expect(']');
            return v;
        }
        if (c == '"') {
            ++pos_;
            v.kind = ConfigValue::Kind::string;
            while (true) {
                if (at_end()) fail("unterminated string");
                char ch = peek();
                ++pos_;
                if (ch == '"') break;
                if (ch == '\\') {
                    if (at_end()) fail("unterminated escape");
                    ch = peek();
                    ++pos_;
                    if (ch == 'n') ch = '\n';
                    else if (ch == 't') ch = '\t';
                    else if (ch != '"' && ch != '\\') fail("unknown escape");
                }
                v.text += ch;
            }
            return v;
        }
        if (cur_.substr(pos_, 4) == "true") {
            pos_ += 4;
            v.kind = ConfigValue::Kind::boolean;
            v.boolean = true;
            return v;
        }
        if (cur_.substr(pos_, 5) == "false") {
            pos_ += 5;
            v.kind = ConfigValue::Kind::boolean;
            return v;
        }
        std::size_t end = pos_;
        while (end < cur_.size() && cur_[end] != ',' && cur_[end] != ']' && cur_[end] != ' ' && cur_[end] != '\t' &&
               cur_[end] != '#')
            ++end;
        const std::string_view token = cur_.substr(pos_, end - pos_);
        if (token.empty()) fail("missing value");
        const bool is_integer = token.find_first_of(".eEin") == std::string_view::npos;
        std::string_view digits = token;
        if (!digits.empty() && (digits.front() == '+' || digits.front() == '-')) {
            v.negative = digits.front() == '-';
            digits.remove_prefix(1);
        }
        if (is_integer) {
            auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v.integer);
            if (ec != std::errc() || p != digits.data() + digits.size()) fail("malformed number '" + std::string(token) + "'");
            v.kind = ConfigValue::Kind::integer;
            v.number = v.negative ? -static_cast<double>(v.integer) : static_cast<double>(v.integer);
        } else {
            auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v.number);
            if (ec != std::errc() || p != digits.data() + digits.size()) fail("malformed number '" + std::string(token) + "'");
            if (v.negative) v.number = -v.number;
            v.kind = ConfigValue::Kind::number;
        }
        pos_ = end;
        return v;
    }

    std::string origin_;
    std::vector<std::string_view> lines_;
    std::string_view cur_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
};

} // namespace detail

/// Parses a config document on top of `defaults`. Grammar (one item per line):
///   # comment
///   [table]
///   key = number | "string" | true | false | [scalar, scalar, ...]
/// Tables: params, grid, data, experiment, output; `command` lives at the top.
/// Relative data paths resolve against `base_dir`.
inline RunConfig parse_config(std::string_view source, RunConfig defaults = {}, const std::string& origin = "<config>",
                              const std::filesystem::path& base_dir = {}) {
    using Kind = detail::ConfigValue::Kind;
    detail::ConfigParser parser(source, origin);
    RunConfig cfg = std::move(defaults);
    std::size_t path_line = 0;

    parser.run([&](const std::string& table, const std::string& key, const detail::ConfigValue& v, std::size_t line) {
        auto bad = [&](const std::string& what) { parser.fail_at(line, what); };
        auto number = [&]() {
            if (v.kind != Kind::number && v.kind != Kind::integer) bad("'" + key + "' must be a number");
            return v.number;
        };
        auto count = [&]() -> std::uint64_t {
            if (v.kind != Kind::integer || v.negative) bad("'" + key + "' must be a nonnegative integer");
            return v.integer;
        };
        auto text = [&]() {
            if (v.kind != Kind::string) bad("'" + key + "' must be a string");
            return v.text;
        };
        auto numbers = [&]() {
            if (v.kind != Kind::array) bad("'" + key + "' must be an array");
            std::vector<double> out;
            for (const auto& item : v.items) {
                if (item.kind != Kind::number && item.kind != Kind::integer) bad("'" + key + "' must hold numbers");
                out.push_back(item.number);
            }
            return out;
        };
        auto strings = [&]() {
            if (v.kind != Kind::array) bad("'" + key + "' must be an array");
            std::vector<std::string> out;
            for (const auto& item : v.items) {
                if (item.kind != Kind::string) bad("'" + key + "' must hold strings");
                out.push_back(item.text);
            }
            return out;
        };

        if (key.empty()) {
            if (table != "params" && table != "grid" && table != "data" && table != "experiment" && table != "output")
                bad("unknown table [" + table + "]");
            return;
        }
        if (table.empty()) {
            if (key == "command") cfg.command = text();
            else bad("unknown top-level key '" + key + "'");
        } else if (table == "params") {
            if (key == "p") cfg.p = number();
            else if (key == "iota") {
                if (v.kind == Kind::string) {
                    if (v.text == "focusing") cfg.iota = Sign::focusing;
                    else if (v.text == "defocusing") cfg.iota = Sign::defocusing;
                    else bad("iota must be \"focusing\" or \"defocusing\"");
                } else {
                    const double s = number();
                    if (s == 1.0) cfg.iota = Sign::focusing;
                    else if (s == -1.0) cfg.iota = Sign::defocusing;
                    else bad("iota must be +1 or -1");
                }
            } else bad("unknown key '" + key + "' in [params]");
        } else if (table == "grid") {
            if (key == "r_max") cfg.grid.r_max = number();
            else if (key == "n") cfg.grid.n = count();
            else if (key == "dt_ratio") cfg.grid.dt_ratio = number();
            else if (key == "t_end") cfg.grid.t_end = number();
            else if (key == "record_stride") cfg.grid.record_stride = count();
            else bad("unknown key '" + key + "' in [grid]");
        } else if (table == "data") {
            if (key == "family") {
                try {
                    cfg.data.family = family_from_string(text());
                } catch (const Error& e) {
                    bad(e.what());
                }
            } else if (key == "amplitude") cfg.data.amplitude = number();
            else if (key == "width") cfg.data.width = number();
            else if (key == "center") cfg.data.center = number();
            else if (key == "velocity") cfg.data.velocity = number();
            else if (key == "rho") cfg.data.rho = number();
            else if (key == "support") cfg.data.support = number();
            else if (key == "bumps_min") cfg.data.bumps_min = static_cast<int>(count());
            else if (key == "bumps_max") cfg.data.bumps_max = static_cast<int>(count());
            else if (key == "seed") cfg.data.seed = count();
            else if (key == "path") {
                std::filesystem::path p = text();
                if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
                cfg.data.path = p.string();
                path_line = line;
            } else bad("unknown key '" + key + "' in [data]");
        } else if (table == "experiment") {
            if (key == "R") cfg.experiment.R = numbers();
            else if (key == "R_scaled") cfg.experiment.R_scaled = numbers();
            else if (key == "times") cfg.experiment.times = numbers();
            else if (key == "epsilons") cfg.experiment.epsilons = numbers();
            else if (key == "ells") cfg.experiment.ells = numbers();
            else if (key == "lambdas") cfg.experiment.lambdas = numbers();
            else if (key == "amplitudes") cfg.experiment.amplitudes = numbers();
            else if (key == "trials") cfg.experiment.trials = count();
            else if (key == "horizon") cfg.experiment.horizon = number();
            else if (key == "seed") cfg.experiment.seed = count();
            else bad("unknown key '" + key + "' in [experiment]");
        } else if (table == "output") {
            if (key == "directory") cfg.output.directory = text();
            else if (key == "formats") {
                cfg.output.formats = strings();
                for (const auto& f : cfg.output.formats)
                    if (f != "json" && f != "csv") bad("formats may only contain \"json\" and \"csv\"");
            } else bad("unknown key '" + key + "' in [output]");
        }
    });

    if (cfg.data.family == Family::samples) {
        if (cfg.data.path.empty()) parser.fail_at(path_line, "samples family needs data.path");
        if (!std::filesystem::exists(cfg.data.path))
            parser.fail_at(path_line, "data.path '" + cfg.data.path + "' does not exist");
    }
    if (!(cfg.p > 5.0)) throw Error(ErrorCode::ConfigError, origin + ": params.p must exceed 5");
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path, RunConfig defaults = {}) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::ConfigError, "cannot open config '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), std::move(defaults), path.string(), path.parent_path());
}

namespace detail {

inline std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        if (c == '\t') {
            out += "\\t";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

inline std::string number_list(const std::vector<double>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_double(xs[i]);
    }
    return out + "]";
}

/// Doubles always carry a '.' or exponent so they parse back as reals.
inline std::string real(double x) {
    std::string s = format_double(x);
    if (s.find_first_of(".eEin") == std::string::npos) s += ".0";
    return s;
}

} // namespace detail

/// Canonical text form; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& cfg) {
    using detail::quote;
    using detail::real;
    std::ostringstream out;
    out << "command = " << quote(cfg.command) << "\n\n";
    out << "[params]\n";
    out << "p = " << real(cfg.p) << "\n";
    out << "iota = " << quote(cfg.iota == Sign::focusing ? "focusing" : "defocusing") << "\n\n";
    out << "[grid]\n";
    out << "r_max = " << real(cfg.grid.r_max) << "\n";
    out << "n = " << cfg.grid.n << "\n";
    out << "dt_ratio = " << real(cfg.grid.dt_ratio) << "\n";
    out << "t_end = " << real(cfg.grid.t_end) << "\n";
    out << "record_stride = " << cfg.grid.record_stride << "\n\n";
    out << "[data]\n";
    out << "family = " << quote(to_string(cfg.data.family)) << "\n";
    out << "amplitude = " << real(cfg.data.amplitude) << "\n";
    out << "width = " << real(cfg.data.width) << "\n";
    out << "center = " << real(cfg.data.center) << "\n";
    out << "velocity = " << real(cfg.data.velocity) << "\n";
    out << "rho = " << real(cfg.data.rho) << "\n";
    out << "support = " << real(cfg.data.support) << "\n";
    out << "bumps_min = " << cfg.data.bumps_min << "\n";
    out << "bumps_max = " << cfg.data.bumps_max << "\n";
    out << "seed = " << cfg.data.seed << "\n";
    if (!cfg.data.path.empty()) out << "path = " << quote(cfg.data.path) << "\n";
    out << "\n[experiment]\n";
    out << "R = " << detail::number_list(cfg.experiment.R) << "\n";
    out << "R_scaled = " << detail::number_list(cfg.experiment.R_scaled) << "\n";
    out << "times = " << detail::number_list(cfg.experiment.times) << "\n";
    out << "epsilons = " << detail::number_list(cfg.experiment.epsilons) << "\n";
    out << "ells = " << detail::number_list(cfg.experiment.ells) << "\n";
    out << "lambdas = " << detail::number_list(cfg.experiment.lambdas) << "\n";
    out << "amplitudes = " << detail::number_list(cfg.experiment.amplitudes) << "\n";
    out << "trials = " << cfg.experiment.trials << "\n";
    out << "horizon = " << real(cfg.experiment.horizon) << "\n";
    if (cfg.experiment.seed) out << "seed = " << *cfg.experiment.seed << "\n";
    out << "\n[output]\n";
    out << "directory = " << quote(cfg.output.directory) << "\n";
    out << "formats = [";
    for (std::size_t i = 0; i < cfg.output.formats.size(); ++i) out << (i > 0 ? ", " : "") << quote(cfg.output.formats[i]);
    out << "]\n";
    return out.str();
}

/// Config echo embedded in reports; the output block is left out so that
/// reports do not depend on where they were written.
inline nlohmann::ordered_json config_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["command"] = cfg.command;
    j["params"] = {{"p", cfg.p}, {"iota", static_cast<int>(cfg.iota)}};
    j["grid"] = {{"r_max", cfg.grid.r_max},
                 {"n", cfg.grid.n},
                 {"dt_ratio", cfg.grid.dt_ratio},
                 {"t_end", cfg.grid.t_end},
                 {"record_stride", cfg.grid.record_stride}};
    nlohmann::ordered_json data = {{"family", to_string(cfg.data.family)},
                                   {"amplitude", cfg.data.amplitude},
                                   {"width", cfg.data.width},
                                   {"center", cfg.data.center},
                                   {"velocity", cfg.data.velocity},
                                   {"rho", cfg.data.rho},
                                   {"support", cfg.data.support},
                                   {"bumps_min", cfg.data.bumps_min},
                                   {"bumps_max", cfg.data.bumps_max},
                                   {"seed", cfg.data.seed}};
    if (!cfg.data.path.empty()) data["path"] = std::filesystem::path(cfg.data.path).filename().string();
    j["data"] = std::move(data);
    nlohmann::ordered_json exp = {{"R", cfg.experiment.R},
                                  {"R_scaled", cfg.experiment.R_scaled},
                                  {"times", cfg.experiment.times},
                                  {"epsilons", cfg.experiment.epsilons},
                                  {"ells", cfg.experiment.ells},
                                  {"lambdas", cfg.experiment.lambdas},
                                  {"amplitudes", cfg.experiment.amplitudes},
                                  {"trials", cfg.experiment.trials},
                                  {"horizon", cfg.experiment.horizon}};
    if (cfg.experiment.seed) exp["seed"] = *cfg.experiment.seed;
    else exp["seed"] = nullptr;
    j["experiment"] = std::move(exp);
    return j;
}

} // namespace rwl
