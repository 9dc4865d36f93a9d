#include "qkd/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qkd::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what); }

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view key, std::string_view value) {
    // from_chars(double) rejects leading '+' and needs a contiguous buffer
    const std::string buf(value);
    try {
        std::size_t pos = 0;
        const double v = std::stod(buf, &pos);
        if (pos != buf.size()) fail("trailing junk in value for " + std::string(key));
        return v;
    } catch (const std::invalid_argument&) {
        fail("malformed number for key " + std::string(key));
    } catch (const std::out_of_range&) {
        fail("number out of range for key " + std::string(key));
    }
}

count_t parse_count(std::string_view key, std::string_view value) {
    const double v = parse_number(key, value);
    if (v < 0 || std::floor(v) != v || v > 9.2e18)
        fail("expected a nonnegative integer for key " + std::string(key));
    return static_cast<count_t>(v);
}

std::map<std::string, std::string, std::less<>> parse_key_values(std::string_view text) {
    std::map<std::string, std::string, std::less<>> kv;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(
            pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header at line " +
                                         std::to_string(line_no));
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            fail("expected key = value at line " + std::to_string(line_no));
        std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) fail("empty key at line " + std::to_string(line_no));
        if (!section.empty() && key.find('.') == std::string::npos)
            key = section + "." + key;
        if (!kv.emplace(key, value).second) fail("duplicate key " + key);
    }
    return kv;
}

}  // namespace

bool RunConfig::operator==(const RunConfig& other) const {
    auto setup_eq = [](const SetupParams& a, const SetupParams& b) {
        return a.train_size == b.train_size && a.rep_rate_hz == b.rep_rate_hz &&
               a.storage_line_km == b.storage_line_km && a.det_eff == b.det_eff &&
               a.dead_time_s == b.dead_time_s && a.dark_count == b.dark_count &&
               a.extra_loss_db == b.extra_loss_db &&
               a.atten_db_per_km == b.atten_db_per_km && a.visibility == b.visibility;
    };
    auto sec_eq = [](const SecurityParams& a, const SecurityParams& b) {
        return a.eps_ver == b.eps_ver && a.eps_aut == b.eps_aut && a.eps_pa == b.eps_pa &&
               a.eps_decoy == b.eps_decoy && a.a == b.a && a.f_ec == b.f_ec;
    };
    auto int_eq = [](const IntensityConfig& a, const IntensityConfig& b) {
        return a.mu == b.mu && a.nu == b.nu && a.lambda == b.lambda && a.p_mu == b.p_mu &&
               a.p_nu == b.p_nu && a.p_lambda == b.p_lambda;
    };
    if (!setup_eq(setup, other.setup) || !sec_eq(security, other.security)) return false;
    if (intensity.has_value() != other.intensity.has_value()) return false;
    if (intensity && !int_eq(*intensity, *other.intensity)) return false;
    return true;
}

RunConfig parse_config(std::string_view text) {
    auto kv = parse_key_values(text);
    RunConfig cfg;
    bool has_intensity = false;

    auto take_double = [&](std::string_view key, double& out) {
        if (auto it = kv.find(key); it != kv.end()) {
            out = parse_number(key, it->second);
            kv.erase(it);
            return true;
        }
        return false;
    };
    auto take_count = [&](std::string_view key, count_t& out) {
        if (auto it = kv.find(key); it != kv.end()) {
            out = parse_count(key, it->second);
            kv.erase(it);
            return true;
        }
        return false;
    };

    take_double("setup.train_size", cfg.setup.train_size);
    take_double("setup.rep_rate_hz", cfg.setup.rep_rate_hz);
    take_double("setup.storage_line_km", cfg.setup.storage_line_km);
    take_double("setup.det_eff", cfg.setup.det_eff);
    take_double("setup.dead_time_s", cfg.setup.dead_time_s);
    take_double("setup.dark_count", cfg.setup.dark_count);
    take_double("setup.extra_loss_db", cfg.setup.extra_loss_db);
    take_double("setup.atten_db_per_km", cfg.setup.atten_db_per_km);
    take_double("setup.visibility", cfg.setup.visibility);

    take_double("security.eps_ver", cfg.security.eps_ver);
    take_double("security.eps_aut", cfg.security.eps_aut);
    take_double("security.eps_pa", cfg.security.eps_pa);
    take_double("security.eps_decoy", cfg.security.eps_decoy);
    take_count("security.a", cfg.security.a);
    take_double("security.f_ec", cfg.security.f_ec);

    IntensityConfig intensity;
    has_intensity |= take_double("intensity.mu", intensity.mu);
    has_intensity |= take_double("intensity.nu", intensity.nu);
    has_intensity |= take_double("intensity.lambda", intensity.lambda);
    has_intensity |= take_double("intensity.p_mu", intensity.p_mu);
    has_intensity |= take_double("intensity.p_nu", intensity.p_nu);

    if (!kv.empty()) fail("unknown configuration key: " + kv.begin()->first);

    cfg.setup.validate();
    cfg.security.validate();
    if (has_intensity) {
        intensity.p_lambda = 1.0 - intensity.p_mu - intensity.p_nu;
        intensity.validate();
        cfg.intensity = intensity;
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[setup]\n";
    out << "train_size = " << format_double(cfg.setup.train_size) << "\n";
    out << "rep_rate_hz = " << format_double(cfg.setup.rep_rate_hz) << "\n";
    out << "storage_line_km = " << format_double(cfg.setup.storage_line_km) << "\n";
    out << "det_eff = " << format_double(cfg.setup.det_eff) << "\n";
    out << "dead_time_s = " << format_double(cfg.setup.dead_time_s) << "\n";
    out << "dark_count = " << format_double(cfg.setup.dark_count) << "\n";
    out << "extra_loss_db = " << format_double(cfg.setup.extra_loss_db) << "\n";
    out << "atten_db_per_km = " << format_double(cfg.setup.atten_db_per_km) << "\n";
    out << "visibility = " << format_double(cfg.setup.visibility) << "\n";
    out << "\n[security]\n";
    out << "eps_ver = " << format_double(cfg.security.eps_ver) << "\n";
    out << "eps_aut = " << format_double(cfg.security.eps_aut) << "\n";
    out << "eps_pa = " << format_double(cfg.security.eps_pa) << "\n";
    out << "eps_decoy = " << format_double(cfg.security.eps_decoy) << "\n";
    out << "a = " << format_int(cfg.security.a) << "\n";
    out << "f_ec = " << format_double(cfg.security.f_ec) << "\n";
    if (cfg.intensity) {
        out << "\n[intensity]\n";
        out << "mu = " << format_double(cfg.intensity->mu) << "\n";
        out << "nu = " << format_double(cfg.intensity->nu) << "\n";
        out << "lambda = " << format_double(cfg.intensity->lambda) << "\n";
        out << "p_mu = " << format_double(cfg.intensity->p_mu) << "\n";
        out << "p_nu = " << format_double(cfg.intensity->p_nu) << "\n";
    }
    return out.str();
}

void save_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("cannot write config file: " + path);
    out << serialize_config(cfg);
}

ObservedCounts parse_counts(std::string_view text) {
    auto kv = parse_key_values(text);
    ObservedCounts c;
    auto take = [&](std::string_view key, count_t& out) {
        auto it = kv.find(key);
        if (it == kv.end()) fail("counts file is missing key " + std::string(key));
        out = parse_count(key, it->second);
        kv.erase(it);
    };
    take("N", c.N);
    take("N_mu", c.N_mu);
    take("N_nu", c.N_nu);
    take("N_lambda", c.N_lambda);
    take("n_mu", c.n_mu);
    take("n_nu", c.n_nu);
    take("n_lambda", c.n_lambda);
    take("l_ver", c.l_ver);
    take("n_err", c.n_err);
    if (!kv.empty()) fail("unknown counts key: " + kv.begin()->first);
    c.validate();
    return c;
}

ObservedCounts load_counts(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open counts file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_counts(ss.str());
}

std::string serialize_counts(const ObservedCounts& c) {
    std::ostringstream out;
    out << "N = " << format_int(c.N) << "\n";
    out << "N_mu = " << format_int(c.N_mu) << "\n";
    out << "N_nu = " << format_int(c.N_nu) << "\n";
    out << "N_lambda = " << format_int(c.N_lambda) << "\n";
    out << "n_mu = " << format_int(c.n_mu) << "\n";
    out << "n_nu = " << format_int(c.n_nu) << "\n";
    out << "n_lambda = " << format_int(c.n_lambda) << "\n";
    out << "l_ver = " << format_int(c.l_ver) << "\n";
    out << "n_err = " << format_int(c.n_err) << "\n";
    return out.str();
}

void save_counts(const ObservedCounts& counts, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("cannot write counts file: " + path);
    out << serialize_counts(counts);
}

std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // fold -0 into 0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_int(long long v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<double> parse_double_list(std::string_view text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const std::string_view item = trim(text.substr(
            pos, comma == std::string_view::npos ? text.size() - pos : comma - pos));
        if (!item.empty()) out.push_back(parse_number("list", item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace qkd::io
