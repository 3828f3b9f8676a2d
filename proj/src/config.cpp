// SPDX-License-Identifier: Apache-2.0
#include "fene/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "fene/errors.hpp"

namespace fene {
namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct Entry {
    std::string value;
    int line;
};

using KeyMap = std::map<std::string, Entry>;

[[noreturn]] void fail(const std::string& field, int line, const std::string& why) {
    throw ParseError("config: " + field + ": " + why + " (line " + std::to_string(line) + ")");
}

double parse_double(const std::string& field, const Entry& e) {
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (end == nullptr || *end != '\0' || e.value.empty()) fail(field, e.line, "not a number");
    return v;
}

long parse_long(const std::string& field, const Entry& e) {
    char* end = nullptr;
    const long v = std::strtol(e.value.c_str(), &end, 10);
    if (end == nullptr || *end != '\0' || e.value.empty()) fail(field, e.line, "not an integer");
    return v;
}

bool parse_bool(const std::string& field, const Entry& e) {
    std::string v = e.value;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(field, e.line, "not a boolean");
}

} // namespace

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::fenep_lift: return "fenep_lift";
        case ExperimentKind::fenep_coarse: return "fenep_coarse";
        case ExperimentKind::fene_lift: return "fene_lift";
        case ExperimentKind::qe_compare: return "qe_compare";
        case ExperimentKind::fene_coarse_startup: return "fene_coarse_startup";
        case ExperimentKind::fene_coarse_complex: return "fene_coarse_complex";
    }
    throw InternalError("to_string(ExperimentKind): unreachable");
}

FlowSchedule ExperimentConfig::make_flow() const {
    if (flow_token == "zero") return FlowSchedule::zero();
    if (flow_token == "complex") return FlowSchedule::complex();
    if (flow_token.rfind("constant:", 0) == 0) {
        char* end = nullptr;
        const std::string rest = flow_token.substr(9);
        const double rate = std::strtod(rest.c_str(), &end);
        if (end == nullptr || *end != '\0' || rest.empty()) {
            throw ParseError("flow token '" + flow_token + "': bad constant rate");
        }
        return FlowSchedule::constant(rate);
    }
    if (flow_token.rfind("tabulated:", 0) == 0) {
        return FlowSchedule::from_csv(flow_token.substr(10));
    }
    throw ParseError("unknown flow token '" + flow_token +
                     "' (expected zero, complex, constant:<rate>, tabulated:<csv>)");
}

StrategySpec ExperimentConfig::make_strategy() const {
    return StrategySpec::from_token(strategy_token, params);
}

ExperimentConfig validate_config(const std::string& text) {
    // parse into section.key entries
    KeyMap entries;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line, lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "model" && section != "flow" && section != "run") {
                fail("[" + section + "]", lineno, "unknown section");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line, lineno, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line, lineno, "empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (entries.count(full)) fail(full, lineno, "duplicate key");
        entries[full] = Entry{value, lineno};
    }

    ExperimentConfig cfg;
    auto take = [&entries](const std::string& key) {
        auto it = entries.find(key);
        if (it == entries.end()) return std::optional<Entry>{};
        std::optional<Entry> e = it->second;
        entries.erase(it);
        return e;
    };

    if (auto e = take("experiment")) {
        static const std::map<std::string, ExperimentKind> kinds = {
            {"fenep_lift", ExperimentKind::fenep_lift},
            {"fenep_coarse", ExperimentKind::fenep_coarse},
            {"fene_lift", ExperimentKind::fene_lift},
            {"qe_compare", ExperimentKind::qe_compare},
            {"fene_coarse_startup", ExperimentKind::fene_coarse_startup},
            {"fene_coarse_complex", ExperimentKind::fene_coarse_complex},
        };
        const auto it = kinds.find(e->value);
        if (it == kinds.end()) fail("experiment", e->line, "unknown experiment '" + e->value + "'");
        cfg.experiment = it->second;
        // experiment families carry their own model/flow defaults
        if (cfg.experiment == ExperimentKind::fenep_lift ||
            cfg.experiment == ExperimentKind::fenep_coarse) {
            cfg.params.force_model = ForceModel::fenep;
            cfg.flow_token = "complex";
            cfg.strategy_token = "even:1";
            cfg.dt = 1e-2;
            cfg.t_end = 2.0;
            cfg.n_particles = 20000;
            cfg.m_inf = 100;
            cfg.t_star = 0.3;
        } else if (cfg.experiment == ExperimentKind::fene_coarse_complex) {
            cfg.flow_token = "complex";
            cfg.m_inf = 100;
            cfg.n_particles = 2000;
        } else if (cfg.experiment == ExperimentKind::fene_coarse_startup) {
            cfg.n_particles = 2000;
        } else if (cfg.experiment == ExperimentKind::qe_compare) {
            cfg.n_particles = 2000;
        }
    }

    if (auto e = take("model.b")) {
        cfg.params.b = parse_double("model.b", *e);
        if (!(cfg.params.b > 0.0)) fail("model.b", e->line, "must be > 0");
    }
    if (auto e = take("model.we")) {
        cfg.params.we = parse_double("model.we", *e);
        if (!(cfg.params.we > 0.0)) fail("model.we", e->line, "must be > 0");
    }
    if (auto e = take("model.eps")) {
        cfg.params.eps = parse_double("model.eps", *e);
        if (!(cfg.params.eps > 0.0 && cfg.params.eps <= 1.0)) {
            fail("model.eps", e->line, "must satisfy 0 < eps <= 1");
        }
    }
    if (auto e = take("model.force")) {
        if (e->value == "hookean") cfg.params.force_model = ForceModel::hookean;
        else if (e->value == "fene") cfg.params.force_model = ForceModel::fene;
        else if (e->value == "fenep") cfg.params.force_model = ForceModel::fenep;
        else fail("model.force", e->line, "expected hookean, fene, or fenep");
    }
    if (auto e = take("flow.kappa")) cfg.flow_token = e->value;

    std::optional<Entry> strategy_entry = take("run.strategy");
    std::optional<Entry> l_entry = take("run.L");
    if (strategy_entry) cfg.strategy_token = strategy_entry->value;
    if (l_entry) {
        const long l = parse_long("run.L", *l_entry);
        if (l < 1 || l > 16) fail("run.L", l_entry->line, "must be in 1..16");
        const std::string& tok = cfg.strategy_token;
        if (tok == "cascade") {
            fail("run.L", l_entry->line, "cascade fixes L = 4; remove the L key");
        }
        if (tok.find(':') != std::string::npos) {
            fail("run.L", l_entry->line, "strategy token already carries :L");
        }
        if (tok != "even" && tok != "even+stress") {
            fail("run.L", l_entry->line, "L applies to even or even+stress strategies");
        }
        cfg.strategy_token = tok + ":" + std::to_string(l);
    }

    if (auto e = take("run.n_particles")) {
        const long n = parse_long("run.n_particles", *e);
        if (n < 1) fail("run.n_particles", e->line, "must be >= 1");
        cfg.n_particles = static_cast<std::size_t>(n);
    }
    if (auto e = take("run.dt")) {
        cfg.dt = parse_double("run.dt", *e);
        if (!(cfg.dt > 0.0)) fail("run.dt", e->line, "must be > 0");
    }
    if (auto e = take("run.k_steps")) {
        cfg.k_steps = parse_long("run.k_steps", *e);
        if (cfg.k_steps < 1) fail("run.k_steps", e->line, "must be >= 1");
    }
    if (auto e = take("run.m_inf")) {
        cfg.m_inf = parse_long("run.m_inf", *e);
        if (cfg.m_inf < 0) fail("run.m_inf", e->line, "must be >= 0");
    }
    if (auto e = take("run.t_star")) {
        cfg.t_star = parse_double("run.t_star", *e);
        if (cfg.t_star < 0.0) fail("run.t_star", e->line, "must be >= 0");
    }
    if (auto e = take("run.t_end")) {
        cfg.t_end = parse_double("run.t_end", *e);
        if (cfg.t_end < 0.0) fail("run.t_end", e->line, "must be >= 0");
    }
    if (auto e = take("run.seed")) {
        cfg.seed = static_cast<std::uint64_t>(parse_long("run.seed", *e));
    }
    if (auto e = take("run.lift_mode")) {
        if (e->value == "frozen") cfg.lift_mode = LiftMode::frozen_kappa;
        else if (e->value == "quasi_equilibrium") cfg.lift_mode = LiftMode::quasi_equilibrium;
        else fail("run.lift_mode", e->line, "expected frozen or quasi_equilibrium");
    }
    if (auto e = take("run.warm_start")) cfg.warm_start = parse_bool("run.warm_start", *e);
    if (auto e = take("run.n_bins")) {
        const long n = parse_long("run.n_bins", *e);
        if (n < 1 || n > 100000) fail("run.n_bins", e->line, "must be in 1..100000");
        cfg.n_bins = static_cast<int>(n);
    }
    if (auto e = take("run.plateau")) cfg.plateau_stop = parse_bool("run.plateau", *e);
    if (auto e = take("run.plateau_window")) {
        cfg.plateau_window = parse_long("run.plateau_window", *e);
        if (cfg.plateau_window < 0) fail("run.plateau_window", e->line, "must be >= 0");
    }

    if (!entries.empty()) {
        const auto& first = *entries.begin();
        fail(first.first, first.second.line, "unknown key");
    }

    // cross checks
    const bool fenep_exp = cfg.experiment == ExperimentKind::fenep_lift ||
                           cfg.experiment == ExperimentKind::fenep_coarse;
    if (fenep_exp && cfg.params.force_model != ForceModel::fenep) {
        throw ParseError("config: model.force: " + std::string(to_string(cfg.experiment)) +
                         " requires force = fenep");
    }
    if (!fenep_exp && cfg.params.force_model == ForceModel::fenep) {
        throw ParseError("config: model.force: " + std::string(to_string(cfg.experiment)) +
                         " requires force = fene (or hookean)");
    }
    cfg.params.validate();
    cfg.make_flow();
    cfg.make_strategy();
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return validate_config(ss.str());
}

namespace {

const std::vector<Preset> kPresets = {
    {"fig1", "FENE-P lifted distribution during constrained simulation",
     R"(experiment = fenep_lift

[model]
b = 49
we = 1
eps = 1
force = fenep

[flow]
kappa = complex

[run]
strategy = even:1
n_particles = 100000
dt = 1e-2
t_star = 0.3
m_inf = 5000
seed = 2026
n_bins = 100
)"},
    {"fig2", "FENE-P coarse time-stepper vs micro for Delta t in {dt,10dt,100dt}",
     R"(experiment = fenep_coarse

[model]
b = 49
we = 1
eps = 1
force = fenep

[flow]
kappa = complex

[run]
strategy = even:1
n_particles = 20000
dt = 1e-2
t_end = 2
m_inf = 100
seed = 2026
)"},
    {"fig3", "FENE lifted distributions, even moments L = 1..4",
     R"(experiment = fene_lift

[model]
b = 49
we = 1
eps = 1
force = fene

[flow]
kappa = constant:2

[run]
strategy = even:4
n_particles = 50000
dt = 2e-4
t_star = 1
m_inf = 25000
plateau = true
seed = 2026
n_bins = 100
)"},
    {"fig4", "stress relaxation during lifting: frozen kappa vs quasi-equilibrium",
     R"(experiment = qe_compare

[model]
b = 49
we = 1
eps = 1
force = fene

[flow]
kappa = constant:2

[run]
strategy = even:4
n_particles = 2000
dt = 2e-4
t_star = 1
m_inf = 10000
seed = 2026
)"},
    {"fig5", "FENE coarse stepper, startup flow, even moments L = 1..4",
     R"(experiment = fene_coarse_startup

[model]
b = 49
we = 1
eps = 1
force = fene

[flow]
kappa = constant:2

[run]
strategy = even:4
n_particles = 2000
dt = 2e-4
k_steps = 1
m_inf = 50
t_end = 4
seed = 2026
)"},
    {"fig6", "FENE coarse stepper under the complex flow (hysteresis)",
     R"(experiment = fene_coarse_complex

[model]
b = 49
we = 1
eps = 1
force = fene

[flow]
kappa = complex

[run]
strategy = even:4
n_particles = 2000
dt = 2e-4
k_steps = 1
m_inf = 100
t_end = 4
seed = 2026
)"},
    {"fig7", "FENE lifted distributions, even moments plus stress, L = 2..5",
     R"(experiment = fene_lift

[model]
b = 49
we = 1
eps = 1
force = fene

[flow]
kappa = constant:2

[run]
strategy = even+stress:5
n_particles = 50000
dt = 2e-4
t_star = 1
m_inf = 25000
plateau = true
seed = 2026
n_bins = 100
)"},
    {"fig8", "FENE coarse stepper, startup flow, even moments plus stress",
     R"(experiment = fene_coarse_startup

[model]
b = 49
we = 1
eps = 1
force = fene

[flow]
kappa = constant:2

[run]
strategy = even+stress:4
n_particles = 2000
dt = 2e-4
k_steps = 1
m_inf = 50
t_end = 4
seed = 2026
)"},
    {"fig9", "FENE lifted distribution, stress cascade (L = 4)",
     R"(experiment = fene_lift

[model]
b = 49
we = 1
eps = 1
force = fene

[flow]
kappa = constant:2

[run]
strategy = cascade
n_particles = 50000
dt = 2e-4
t_star = 1
m_inf = 25000
plateau = true
seed = 2026
n_bins = 100
)"},
    {"fig10", "FENE coarse stepper, startup flow, stress cascade",
     R"(experiment = fene_coarse_startup

[model]
b = 49
we = 1
eps = 1
force = fene

[flow]
kappa = constant:2

[run]
strategy = cascade
n_particles = 2000
dt = 2e-4
k_steps = 1
m_inf = 50
t_end = 4
seed = 2026
)"},
};

} // namespace

const std::vector<Preset>& presets() { return kPresets; }

const Preset* find_preset(const std::string& name) {
    for (const auto& p : kPresets) {
        if (name == p.name) return &p;
    }
    return nullptr;
}

} // namespace fene
