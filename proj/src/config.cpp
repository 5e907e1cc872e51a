#include "uvsb/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace uvsb {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    }
}

long long to_integer(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    }
    return v;
}

int to_int(const std::string& key, const std::string& text)
{
    const long long v = to_integer(key, text);
    if (v < -2147483647LL || v > 2147483647LL) throw ConfigError(key + ": out of range");
    return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    for (const auto& item : split(text)) out.push_back(to_double("list", item));
    return out;
}

ConfigTable ConfigTable::defaults()
{
    ConfigTable t;
    t.entries_ = {
        {"model.x0", "100"},
        {"model.z0", "0.04"},
        {"model.T", "0.25"},
        {"model.r", "0"},
        {"model.d", "0.75"},
        {"model.u", "1.25"},
        {"model.kappa", "15"},
        {"model.theta", "0.04"},
        {"model.delta", "0.05"},
        {"model.rho", "-0.9"},
        {"grid.x_min", "0"},
        {"grid.x_max", "200"},
        {"grid.n_x", "101"},
        {"grid.z_min", "0"},
        {"grid.z_max", "0.12"},
        {"grid.n_z", "100"},
        {"grid.n_t", "20"},
        {"solver.cn_weight", "0.5"},
        {"solver.corrector_passes", "1"},
        {"solver.gamma_eps", "auto"},
        {"solver.lin_tol", "1e-10"},
        {"solver.rannacher_steps", "2"},
        {"solver.mode", "guarded"},
        {"solver.linear", "automatic"},
        {"solver.direct_limit", "250000"},
        {"payoff.type", "butterfly"},
        {"payoff.k1", "90"},
        {"payoff.k2", "100"},
        {"payoff.k3", "110"},
        {"payoff.strike", "100"},
        {"payoff.file", ""},
        {"payoff.regularize_eps", "0"},
        {"sweep.deltas", "0.005,0.01,0.015,0.02,0.025,0.03,0.035,0.04,0.045,0.05"},
        {"sweep.window_x_min", "60"},
        {"sweep.window_x_max", "140"},
        {"sweep.window_z_min", "0"},
        {"sweep.window_z_max", "inf"},
        {"gamma.deltas", "0.05,0.0125"},
        {"compare.x_min", "60"},
        {"compare.x_max", "140"},
        {"compare.tol", "auto"},
        {"mc.seed", "20240601"},
        {"mc.n_paths", "100000"},
        {"mc.n_steps", "100"},
        {"mc.n_batches", "20"},
        {"mc.deltas", "0.04,0.02,0.01,0.005,0.0025,0.00125"},
        {"mc.controls", "d,u,threshold"},
        {"mc.threshold_level", "100"},
        {"mc.bounds_paths", "20"},
        {"mc.bounds_steps", "250"},
    };
    return t;
}

bool ConfigTable::contains(const std::string& key) const
{
    return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
}

const std::string& ConfigTable::get(const std::string& key) const
{
    for (const auto& e : entries_) {
        if (e.first == key) return e.second;
    }
    throw ConfigError("unknown configuration key '" + key + "'");
}

void ConfigTable::set(const std::string& key, const std::string& value)
{
    for (auto& e : entries_) {
        if (e.first == key) {
            e.second = trim(value);
            return;
        }
    }
    throw ConfigError("unknown configuration key '" + key + "'");
}

void ConfigTable::set_override(const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
    set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void ConfigTable::load_file(const std::filesystem::path& path)
{
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.message() + " (line "
                          + std::to_string(e.line()) + ")");
    }
    std::map<std::string, bool> known_sections;
    for (const auto& e : entries_) known_sections[e.first.substr(0, e.first.find('.'))] = true;

    for (const auto& [section, body] : tree) {
        if (!known_sections.count(section)) continue;
        for (const auto& [key, value] : body) {
            set(section + "." + key, value.get_value<std::string>());
        }
    }
}

void ConfigTable::write_ini(const std::filesystem::path& path,
                            const std::vector<std::pair<std::string, std::string>>& extra) const
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    std::string section;
    auto emit = [&](const std::pair<std::string, std::string>& e) {
        const auto dot = e.first.find('.');
        const std::string s = e.first.substr(0, dot);
        if (s != section) {
            out << (section.empty() ? "" : "\n") << '[' << s << "]\n";
            section = s;
        }
        out << e.first.substr(dot + 1) << " = " << e.second << '\n';
    };
    for (const auto& e : entries_) emit(e);
    for (const auto& e : extra) emit(e);
    out.flush();
    if (!out) throw Error("write failed: " + path.string());
}

Settings resolve(const ConfigTable& t)
{
    auto num = [&t](const std::string& key) { return to_double(key, t.get(key)); };
    auto integer = [&t](const std::string& key) { return to_int(key, t.get(key)); };

    Settings s;
    ModelParams& m = s.model;
    m.x0 = num("model.x0");
    m.z0 = num("model.z0");
    m.T = num("model.T");
    m.r = num("model.r");
    m.d = num("model.d");
    m.u = num("model.u");
    m.kappa = num("model.kappa");
    m.theta = num("model.theta");
    m.delta = num("model.delta");
    m.rho = num("model.rho");
    require_valid(m);

    GridSpec& g = s.grid;
    g.x_min = num("grid.x_min");
    g.x_max = num("grid.x_max");
    g.n_x = integer("grid.n_x");
    g.z_min = num("grid.z_min");
    g.z_max = num("grid.z_max");
    g.n_z = integer("grid.n_z");
    g.n_t = integer("grid.n_t");
    build_grid(g, m.T);

    SolverConfig& c = s.solver;
    c = default_solver_config(m);
    c.cn_weight = num("solver.cn_weight");
    c.corrector_passes = integer("solver.corrector_passes");
    if (t.get("solver.gamma_eps") != "auto") c.gamma_eps = num("solver.gamma_eps");
    c.lin_tol = num("solver.lin_tol");
    c.rannacher_steps = integer("solver.rannacher_steps");
    const std::string mode = t.get("solver.mode");
    if (mode == "guarded") {
        c.mode = OptimizerMode::guarded;
    } else if (mode == "paper-exact") {
        c.mode = OptimizerMode::paper_exact;
    } else {
        throw ConfigError("solver.mode: expected guarded or paper-exact, got '" + mode + "'");
    }
    const std::string linear = t.get("solver.linear");
    if (linear == "automatic") {
        c.linear = LinearStrategy::automatic;
    } else if (linear == "direct") {
        c.linear = LinearStrategy::direct;
    } else if (linear == "iterative") {
        c.linear = LinearStrategy::iterative;
    } else {
        throw ConfigError("solver.linear: expected automatic, direct or iterative, got '" + linear + "'");
    }
    c.direct_limit = integer("solver.direct_limit");
    validate(c);

    const std::string type = t.get("payoff.type");
    if (type == "butterfly") {
        s.payoff = Butterfly{num("payoff.k1"), num("payoff.k2"), num("payoff.k3")};
    } else if (type == "call") {
        s.payoff = Call{num("payoff.strike")};
    } else if (type == "put") {
        s.payoff = Put{num("payoff.strike")};
    } else if (type == "capped") {
        s.payoff = CappedLinear{num("payoff.strike")};
    } else if (type == "tabulated") {
        if (t.get("payoff.file").empty()) throw ConfigError("payoff.file is required for a tabulated payoff");
        try {
            s.payoff = load_tabulated_csv(t.get("payoff.file"));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(std::string("payoff.file: ") + e.what());
        }
    } else {
        throw ConfigError("payoff.type: expected butterfly, call, put, capped or tabulated, got '" + type + "'");
    }
    validate(s.payoff);
    s.regularize_eps = num("payoff.regularize_eps");
    if (s.regularize_eps < 0.0) throw ConfigError("payoff.regularize_eps must be >= 0");

    s.sweep_deltas = parse_list(t.get("sweep.deltas"));
    s.sweep.window_x_min = num("sweep.window_x_min");
    s.sweep.window_x_max = num("sweep.window_x_max");
    s.sweep.window_z_min = num("sweep.window_z_min");
    s.sweep.window_z_max = num("sweep.window_z_max");
    s.gamma_deltas = parse_list(t.get("gamma.deltas"));
    s.compare_x_min = num("compare.x_min");
    s.compare_x_max = num("compare.x_max");
    s.compare_tol = t.get("compare.tol") == "auto" ? 1e-3 * m.x0 : num("compare.tol");

    McSettings& mc = s.mc;
    {
        const std::string text = trim(t.get("mc.seed"));
        std::uint64_t seed = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            throw ConfigError("mc.seed: expected an unsigned 64-bit integer, got '" + text + "'");
        }
        mc.seed = seed;
    }
    mc.rate.seed = mc.seed;
    mc.rate.n_paths = integer("mc.n_paths");
    mc.rate.n_steps = integer("mc.n_steps");
    mc.rate.n_batches = integer("mc.n_batches");
    mc.rate_deltas = parse_list(t.get("mc.deltas"));
    mc.controls = split(t.get("mc.controls"));
    mc.threshold_level = num("mc.threshold_level");
    mc.bounds_paths = integer("mc.bounds_paths");
    mc.bounds_steps = integer("mc.bounds_steps");
    for (const auto& name : mc.controls) make_control(name, s);
    return s;
}

ControlRule make_control(const std::string& name, const Settings& s)
{
    if (name == "d") return ConstantControl{s.model.d};
    if (name == "u") return ConstantControl{s.model.u};
    if (name == "threshold") return ThresholdControl{s.mc.threshold_level, s.model.u, s.model.d};
    throw ConfigError("mc.controls: unknown control '" + name + "' (expected d, u or threshold)");
}

}  // namespace uvsb
