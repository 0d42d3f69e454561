#include "config.hpp"

#include <fstream>
#include <sstream>

namespace plurilab::cli {

namespace {
std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError{"bad numeric value for '" + key + "': " + s};
    }
}
} // namespace

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(item, "list"));
    }
    return out;
}

std::vector<std::complex<double>> parse_scale_list(const std::string& s) {
    // either "geometric,ratio,count" or a comma list of moduli
    std::vector<std::complex<double>> out;
    if (s.rfind("geometric", 0) == 0) {
        auto parts = parse_double_list(s.substr(s.find(',') + 1));
        if (parts.size() != 2) throw ConfigError{"scales: want geometric,<ratio>,<count>"};
        double ratio = parts[0];
        int count = int(parts[1]);
        if (!(ratio > 0.0 && ratio < 1.0) || count < 2) throw ConfigError{"scales: bad geometric progression"};
        double a = 1.0;
        for (int i = 0; i < count; ++i) {
            out.emplace_back(a, 0.0);
            a *= ratio;
        }
        return out;
    }
    for (double v : parse_double_list(s)) out.emplace_back(v, 0.0);
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError{"cannot open config file: " + path};
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError{"line " + std::to_string(lineno) + ": expected key = value"};
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

void apply_key_values(ExperimentConfig& cfg, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, val] : kv) {
        if (key == "operation") cfg.operation = val;
        else if (key == "fixture") cfg.fixture = val;
        else if (key == "z0") {
            auto reals = parse_double_list(val);
            if (reals.size() % 2 != 0) throw ConfigError{"z0: want re,im pairs"};
            cfg.z0.clear();
            for (size_t i = 0; i + 1 < reals.size(); i += 2) cfg.z0.emplace_back(reals[i], reals[i + 1]);
        } else if (key == "grid") cfg.grid = parse_double_list(val);
        else if (key == "scales") cfg.scales = parse_scale_list(val);
        else if (key == "r1") cfg.r1 = parse_double(val, key);
        else if (key == "r2") cfg.r2 = parse_double(val, key);
        else if (key == "r0") cfg.r0 = parse_double(val, key);
        else if (key == "eps") cfg.eps = parse_double(val, key);
        else if (key == "r") cfg.r = parse_double(val, key);
        else if (key == "k") cfg.k = int(parse_double(val, key));
        else if (key == "p") cfg.p = int(parse_double(val, key));
        else if (key == "tol") cfg.tol = parse_double(val, key);
        else if (key == "budget") cfg.budget = std::int64_t(parse_double(val, key));
        else if (key == "seed") cfg.seed = std::uint64_t(parse_double(val, key));
        else if (key == "kappa") {
            if (val == "paper") cfg.kappa_mode = KappaMode::paper;
            else if (val == "calibrated") cfg.kappa_mode = KappaMode::calibrated;
            else throw ConfigError{"kappa: want paper or calibrated"};
        } else if (key == "kappa_artifact") cfg.kappa_artifact = val;
        else if (key == "out") cfg.out = val;
        else if (key == "filter") cfg.filter = val;
        else if (key == "profile") cfg.profile = val;
        else throw ConfigError{"unknown config key: " + key};
    }
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.budget < 1000) throw ConfigError{"budget must be at least 1e3"};
    if (!(cfg.tol > 0.0)) throw ConfigError{"tol must be positive"};
    for (size_t i = 0; i < cfg.grid.size(); ++i) {
        if (cfg.grid[i] <= 0.0) throw ConfigError{"grid radii must be positive"};
        if (i > 0 && cfg.grid[i] <= cfg.grid[i - 1]) throw ConfigError{"grid must be increasing"};
    }
    if (!(cfg.r1 >= 0.0 && cfg.r2 > cfg.r1)) throw ConfigError{"need 0 <= r1 < r2"};
    if (!(cfg.r0 > 0.0) || !(cfg.r > 0.0)) throw ConfigError{"radii must be positive"};
    if (cfg.profile != "quick" && cfg.profile != "full") throw ConfigError{"profile: want quick or full"};
}

std::string ExperimentConfig::echo() const {
    std::ostringstream os;
    os << "operation = " << operation << "\n";
    if (!fixture.empty()) os << "fixture = " << fixture << "\n";
    os << "seed = " << seed << "\n";
    os << "budget = " << budget << "\n";
    os << "tol = " << tol << "\n";
    os << "kappa = " << (kappa_mode == KappaMode::paper ? "paper" : "calibrated") << "\n";
    if (!grid.empty()) {
        os << "grid = ";
        for (size_t i = 0; i < grid.size(); ++i) os << (i ? "," : "") << grid[i];
        os << "\n";
    }
    if (!out.empty()) os << "out = " << out << "\n";
    return os.str();
}

} // namespace plurilab::cli
