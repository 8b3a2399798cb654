#include "cpbnr/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>

namespace cpbnr {

void ScenarioConfig::validate() const {
    params.validate();
    integrator.validate();
    if (!(tail_tolerance > 0.0) || !(tail_tolerance < 1.0))
        throw std::invalid_argument("config: tail_tolerance must lie in (0, 1)");
    if (n_max < 0 || n_max > kMaxFockIndex)
        throw std::invalid_argument("config: n_max out of range");
}

ModulationLaw law_of(const ScenarioConfig& cfg) {
    if (cfg.law == LawKind::Sinusoidal)
        return ModulationLaw::sinusoidal(cfg.params.tau, cfg.params.omega_prime);
    return ModulationLaw::constant();
}

AmplitudeState initial_state(const ScenarioConfig& cfg) {
    if (cfg.n_max > 0)
        return coherent_truncated(cfg.alpha, cfg.n_max);
    return coherent_init({cfg.alpha, cfg.tail_tolerance});
}

TrajectoryRecord run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    return propagate(initial_state(cfg), cfg.params, law_of(cfg), cfg.integrator);
}

namespace {

ScenarioConfig base_figure_config() {
    ScenarioConfig cfg;
    cfg.alpha = 5.0;  // mean occupation 25
    cfg.params.omega0 = 20000.0;
    cfg.params.omega_c = 20000.0;
    cfg.params.chi0 = 0.2;
    cfg.params.coupling_scale = 1.0;
    cfg.integrator.output_stride = 0.01;
    // figure-quality accuracy: keeps the lossless norm drift and the
    // gauge disagreement a couple of orders below the acceptance bounds
    cfg.integrator.rtol = 1e-11;
    cfg.integrator.atol = 1e-14;
    return cfg;
}

struct PresetRow {
    const char* name;
    double kappa, delta;
    bool modulated;
    double omega_prime;
    double t_end;
    const char* blurb;
};

// fig2/fig3 follow the inversion over t_end = 50, fig4/fig5 the entropy over
// t_end = 120.  Modulated rows use f(t) = tau sin(omega_prime t) with tau = 10
// and epsilon = 0.001.
constexpr PresetRow kPresets[] = {
    {"fig2a", 0.00, 0.00, false, 0.0, 50.0, "inversion, lossless"},
    {"fig2b", 0.01, 0.00, false, 0.0, 50.0, "inversion, qubit loss"},
    {"fig2c", 0.00, 0.01, false, 0.0, 50.0, "inversion, resonator loss"},
    {"fig3a", 0.01, 0.00, true, 1.0, 50.0, "inversion, slow modulation, qubit loss"},
    {"fig3b", 0.01, 0.00, true, 20.0, 50.0, "inversion, fast modulation, qubit loss"},
    {"fig3c", 0.00, 0.01, true, 20.0, 50.0, "inversion, fast modulation, resonator loss"},
    {"fig4a", 0.00, 0.00, false, 0.0, 120.0, "entropy, lossless"},
    {"fig4b", 0.01, 0.00, false, 0.0, 120.0, "entropy, qubit loss"},
    {"fig4c", 0.00, 0.01, false, 0.0, 120.0, "entropy, resonator loss"},
    {"fig5a", 0.01, 0.00, true, 1.0, 120.0, "entropy, slow modulation, qubit loss"},
    {"fig5b", 0.01, 0.00, true, 20.0, 120.0, "entropy, fast modulation, qubit loss"},
    {"fig5c", 0.00, 0.01, true, 20.0, 120.0, "entropy, fast modulation, resonator loss"},
};

} // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& r : kPresets) names.emplace_back(r.name);
    return names;
}

ScenarioConfig preset(const std::string& name) {
    for (const auto& r : kPresets) {
        if (name != r.name) continue;
        ScenarioConfig cfg = base_figure_config();
        cfg.name = r.name;
        cfg.params.kappa = r.kappa;
        cfg.params.delta = r.delta;
        if (r.modulated) {
            cfg.law = LawKind::Sinusoidal;
            cfg.params.tau = 10.0;
            cfg.params.omega_prime = r.omega_prime;
            cfg.params.epsilon = 0.001;
        }
        cfg.integrator.t_end = r.t_end;
        return cfg;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

std::string preset_table() {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-7s %-11s %6s %6s %12s %6s  %s\n",
                  "name", "law", "kappa", "delta", "omega_prime", "t_end", "description");
    out << line;
    for (const auto& r : kPresets) {
        std::snprintf(line, sizeof line, "%-7s %-11s %6.2f %6.2f %12g %6g  %s\n",
                      r.name, r.modulated ? "sinusoidal" : "constant", r.kappa, r.delta,
                      r.modulated ? r.omega_prime : 0.0, r.t_end, r.blurb);
        out << line;
    }
    return out.str();
}

ConfigError::ConfigError(int line_no, const std::string& msg)
    : std::runtime_error("config line " + std::to_string(line_no) + ": " + msg),
      line(line_no) {}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line) {
    try {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size())
            throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(line, "expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& v, int line) {
    try {
        size_t used = 0;
        const int x = std::stoi(v, &used);
        if (used != v.size())
            throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(line, "expected an integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& v, int line) {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw ConfigError(line, "expected 0/1/true/false, got '" + v + "'");
}

} // namespace

ScenarioConfig parse_config(std::istream& in) {
    ScenarioConfig cfg;
    cfg.params.coupling_scale = 1.0;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError(line_no, "expected 'key = value'");

        if (key == "name") cfg.name = val;
        else if (key == "law") {
            if (val == "constant") cfg.law = LawKind::Constant;
            else if (val == "sinusoidal") cfg.law = LawKind::Sinusoidal;
            else throw ConfigError(line_no, "law must be constant or sinusoidal");
        }
        else if (key == "omega0") cfg.params.omega0 = parse_double(val, line_no);
        else if (key == "omega_c") cfg.params.omega_c = parse_double(val, line_no);
        else if (key == "chi0") cfg.params.chi0 = parse_double(val, line_no);
        else if (key == "kappa") cfg.params.kappa = parse_double(val, line_no);
        else if (key == "delta") cfg.params.delta = parse_double(val, line_no);
        else if (key == "epsilon") cfg.params.epsilon = parse_double(val, line_no);
        else if (key == "tau") cfg.params.tau = parse_double(val, line_no);
        else if (key == "omega_prime") cfg.params.omega_prime = parse_double(val, line_no);
        else if (key == "coupling_scale") cfg.params.coupling_scale = parse_double(val, line_no);
        else if (key == "alpha_re") cfg.alpha.real(parse_double(val, line_no));
        else if (key == "alpha_im") cfg.alpha.imag(parse_double(val, line_no));
        else if (key == "tail_tolerance") cfg.tail_tolerance = parse_double(val, line_no);
        else if (key == "n_max") cfg.n_max = parse_int(val, line_no);
        else if (key == "t_end") cfg.integrator.t_end = parse_double(val, line_no);
        else if (key == "stride") cfg.integrator.output_stride = parse_double(val, line_no);
        else if (key == "rtol") cfg.integrator.rtol = parse_double(val, line_no);
        else if (key == "atol") cfg.integrator.atol = parse_double(val, line_no);
        else if (key == "gauge") {
            if (val == "trace") cfg.integrator.gauge = Gauge::TraceRemoved;
            else if (val == "direct") cfg.integrator.gauge = Gauge::Direct;
            else throw ConfigError(line_no, "gauge must be trace or direct");
        }
        else if (key == "threads") cfg.integrator.threads = parse_int(val, line_no);
        else if (key == "renormalize_entropy")
            cfg.integrator.entropy_renormalize = parse_bool(val, line_no);
        else
            throw ConfigError(line_no, "unknown key '" + key + "'");
    }
    return cfg;
}

std::string write_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    char buf[64];
    auto num = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << key << " = " << buf << "\n";
    };
    out << "name = " << cfg.name << "\n";
    out << "law = " << (cfg.law == LawKind::Sinusoidal ? "sinusoidal" : "constant") << "\n";
    num("omega0", cfg.params.omega0);
    num("omega_c", cfg.params.omega_c);
    num("chi0", cfg.params.chi0);
    num("kappa", cfg.params.kappa);
    num("delta", cfg.params.delta);
    num("epsilon", cfg.params.epsilon);
    num("tau", cfg.params.tau);
    num("omega_prime", cfg.params.omega_prime);
    num("coupling_scale", cfg.params.coupling_scale);
    num("alpha_re", cfg.alpha.real());
    num("alpha_im", cfg.alpha.imag());
    num("tail_tolerance", cfg.tail_tolerance);
    out << "n_max = " << cfg.n_max << "\n";
    num("t_end", cfg.integrator.t_end);
    num("stride", cfg.integrator.output_stride);
    num("rtol", cfg.integrator.rtol);
    num("atol", cfg.integrator.atol);
    out << "gauge = " << (cfg.integrator.gauge == Gauge::Direct ? "direct" : "trace") << "\n";
    out << "threads = " << cfg.integrator.threads << "\n";
    out << "renormalize_entropy = " << (cfg.integrator.entropy_renormalize ? 1 : 0) << "\n";
    return out.str();
}

void write_csv(std::ostream& out, const TrajectoryRecord& rec) {
    out << "t,inversion,entropy,norm2,mean_n\n";
    char row[200];
    for (size_t k = 0; k < rec.times.size(); ++k) {
        std::snprintf(row, sizeof row, "%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      rec.times[k], rec.inversion[k], rec.entropy[k],
                      rec.norm2[k], rec.mean_n[k]);
        out << row;
    }
}

SummaryMetrics summarize(const TrajectoryRecord& rec) {
    SummaryMetrics m{};
    const double nan = std::nan("");

    double acc = 0.0;
    size_t cnt = 0;
    for (size_t k = 0; k < rec.times.size(); ++k) {
        if (rec.times[k] >= 5.0 - 1e-9 && rec.times[k] <= 15.0 + 1e-9) {
            acc += rec.inversion[k];
            ++cnt;
        }
    }
    m.plateau_inversion = cnt ? acc / cnt : nan;

    size_t arg_max = 0;
    double s_max = 0.0;
    for (size_t k = 0; k < rec.entropy.size(); ++k) {
        if (rec.entropy[k] > s_max) {
            s_max = rec.entropy[k];
            arg_max = k;
        }
    }
    m.entropy_max = s_max;

    // last sample at or above 1% of the peak; the settle time is the next one
    m.entropy_time_to_1pct = nan;
    if (s_max > 0.0) {
        size_t last_hot = arg_max;
        for (size_t k = rec.entropy.size(); k-- > arg_max;) {
            if (rec.entropy[k] >= 0.01 * s_max) {
                last_hot = k;
                break;
            }
        }
        if (last_hot + 1 < rec.times.size())
            m.entropy_time_to_1pct = rec.times[last_hot + 1];
    }

    m.final_norm2 = rec.norm2.empty() ? nan : rec.norm2.back();
    return m;
}

std::string metrics_text(const SummaryMetrics& m) {
    std::ostringstream out;
    char buf[64];
    auto num = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        out << key << " = " << buf << "\n";
    };
    num("plateau_inversion", m.plateau_inversion);
    num("entropy_max", m.entropy_max);
    num("entropy_time_to_1pct", m.entropy_time_to_1pct);
    num("final_norm2", m.final_norm2);
    return out.str();
}

std::string plot_script(const std::string& csv_path) {
    std::ostringstream out;
    out << "set datafile separator ','\n"
        << "set terminal pngcairo size 1200,900\n"
        << "set output '" << csv_path << ".png'\n"
        << "set multiplot layout 2,2\n"
        << "set xlabel 't'\n"
        << "plot '" << csv_path << "' skip 1 using 1:2 with lines title 'inversion'\n"
        << "plot '" << csv_path << "' skip 1 using 1:3 with lines title 'entropy'\n"
        << "plot '" << csv_path << "' skip 1 using 1:4 with lines title 'norm^2'\n"
        << "plot '" << csv_path << "' skip 1 using 1:5 with lines title 'mean n'\n"
        << "unset multiplot\n";
    return out.str();
}

} // namespace cpbnr
