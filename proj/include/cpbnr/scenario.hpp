#pragma once

#include "cpbnr/dynamics.hpp"
#include "cpbnr/model.hpp"
#include "cpbnr/state.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cpbnr {

// A complete, reproducible run description: physics, initial state,
// truncation and integrator settings.  Everything the CSV depends on.
struct ScenarioConfig {
    std::string name = "custom";
    SystemParams params;
    LawKind law = LawKind::Constant;
    std::complex<double> alpha{0.0, 0.0};
    double tail_tolerance = 1e-12;
    int n_max = 0;  // 0 = adaptive truncation from tail_tolerance
    IntegratorConfig integrator;

    void validate() const;  // throws std::invalid_argument
};

ModulationLaw law_of(const ScenarioConfig& cfg);
AmplitudeState initial_state(const ScenarioConfig& cfg);
TrajectoryRecord run_scenario(const ScenarioConfig& cfg);

// Bundled figure scenarios: fig2a..fig2c, fig3a..fig3c (inversion, t_end 50)
// and fig4a..fig4c, fig5a..fig5c (entropy, t_end 120).
std::vector<std::string> preset_names();
ScenarioConfig preset(const std::string& name);  // throws std::invalid_argument
std::string preset_table();

// Flat "key = value" config text; '#' starts a comment.  write_config emits
// every key at full precision, so parse(write(cfg)) reproduces cfg exactly.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& msg);
    int line;
};

ScenarioConfig parse_config(std::istream& in);
std::string write_config(const ScenarioConfig& cfg);

// CSV with header t,inversion,entropy,norm2,mean_n at 12 significant digits.
void write_csv(std::ostream& out, const TrajectoryRecord& rec);

struct SummaryMetrics {
    double plateau_inversion;     // mean inversion over t in [5, 15]
    double entropy_max;
    double entropy_time_to_1pct;  // first time after the peak with S below 1% of max for good
    double final_norm2;
};

SummaryMetrics summarize(const TrajectoryRecord& rec);
std::string metrics_text(const SummaryMetrics& m);

// gnuplot script plotting the four observable columns of csv_path.
std::string plot_script(const std::string& csv_path);

} // namespace cpbnr
