#include "heisenet/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include "heisenet/angles.hpp"

namespace heisenet {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return {};
    }
    std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream stream(s);
    std::string item;
    while (std::getline(stream, item, sep)) {
        parts.push_back(trim(item));
    }
    if (!s.empty() && s.back() == sep) {
        parts.emplace_back();
    }
    return parts;
}

double parse_plain_number(const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw std::invalid_argument("unparsable number '" + text + "'");
    }
    return value;
}

struct Entry {
    std::string value;
    int line = 0;
};

class KeyValues {
  public:
    void insert(int line, const std::string& key, const std::string& value,
                std::ostream& warnings) {
        auto [it, fresh] = entries_.try_emplace(key, Entry{value, line});
        if (!fresh) {
            warnings << "warning: line " << line << ": duplicate key '" << key
                     << "' overrides line " << it->second.line << "\n";
            it->second = Entry{value, line};
        }
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    const Entry& at(const std::string& key) const { return entries_.at(key); }

    const std::map<std::string, Entry>& all() const { return entries_; }

    std::string get_string(const std::string& key) const { return at(key).value; }

    double get_number(const std::string& key) const {
        return wrap_parse(key, [&] { return parse_plain_number(at(key).value); });
    }

    double get_angle(const std::string& key) const {
        return wrap_parse(key, [&] { return parse_angle(at(key).value); });
    }

    long get_integer(const std::string& key) const {
        return wrap_parse(key, [&]() -> long {
            double v = parse_plain_number(at(key).value);
            long n = static_cast<long>(v);
            if (static_cast<double>(n) != v) {
                throw std::invalid_argument("expected an integer, got '" + at(key).value + "'");
            }
            return n;
        });
    }

    bool get_bool(const std::string& key) const {
        return wrap_parse(key, [&]() -> bool {
            const std::string& v = at(key).value;
            if (v == "true") return true;
            if (v == "false") return false;
            throw std::invalid_argument("expected true or false, got '" + v + "'");
        });
    }

    std::vector<double> get_angle_list(const std::string& key) const {
        return wrap_parse(key, [&] {
            std::vector<double> values;
            for (const std::string& item : split(at(key).value, ',')) {
                values.push_back(parse_angle(item));
            }
            return values;
        });
    }

    std::vector<double> get_number_list(const std::string& key) const {
        return wrap_parse(key, [&] {
            std::vector<double> values;
            for (const std::string& item : split(at(key).value, ',')) {
                values.push_back(parse_plain_number(item));
            }
            return values;
        });
    }

    template <typename F>
    auto wrap_parse(const std::string& key, F&& f) const -> decltype(f()) {
        try {
            return f();
        } catch (const std::invalid_argument& error) {
            throw ConfigError(at(key).line, std::string("key '") + key + "': " + error.what());
        }
    }

  private:
    std::map<std::string, Entry> entries_;
};

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "mode",        "scenario",   "seed",          "threads",
        "phi",         "phi_cl",     "delta_alpha",   "alpha1",
        "alpha2",      "weights",    "kinds",         "local_delta_alpha",
        "local_phi2",  "local_phi3", "local_phi2_cl", "local_phi3_cl",
        "dim",         "layout",     "in_channel",    "out_channel",
        "N",           "n",          "R",             "k",
        "sign",        "c",          "theta_mode",    "sweep",
        "sweep_min",   "sweep_max",  "sweep_steps",   "theta",
        "prior_fixed",
    };
    return keys;
}

enum class ScenarioChoice { TwoChannel, LinearComb, Raw };

void extend(std::set<std::string>& into, std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
        into.insert(k);
    }
}

std::set<std::string> allowed_keys(RunMode mode, ScenarioChoice scenario) {
    std::set<std::string> allowed = {"mode", "seed", "threads"};
    bool needs_scenario_key = mode == RunMode::Fisher || mode == RunMode::Variance ||
                              mode == RunMode::Scaling || mode == RunMode::PriorProbe;
    if (needs_scenario_key) {
        allowed.insert("scenario");
    }
    switch (scenario) {
        case ScenarioChoice::TwoChannel:
            extend(allowed, {"phi", "delta_alpha", "alpha1", "alpha2"});
            break;
        case ScenarioChoice::LinearComb:
            extend(allowed, {"weights", "kinds", "phi", "local_delta_alpha", "local_phi2",
                             "local_phi3", "local_phi2_cl", "local_phi3_cl"});
            break;
        case ScenarioChoice::Raw:
            extend(allowed, {"dim", "layout", "phi", "in_channel", "out_channel"});
            break;
    }
    switch (mode) {
        case RunMode::Scaling:
            extend(allowed, {"N", "n", "R", "k", "sign", "c", "theta_mode"});
            break;
        case RunMode::Fisher:
            extend(allowed, {"N", "k", "sign", "phi_cl"});
            break;
        case RunMode::Variance:
            extend(allowed,
                   {"N", "sweep", "sweep_min", "sweep_max", "sweep_steps", "theta", "phi_cl"});
            break;
        case RunMode::ScenarioTwoChannel:
        case RunMode::ScenarioLinearComb:
            allowed.insert("phi_cl");
            break;
        case RunMode::PriorProbe:
            extend(allowed, {"N", "c", "R", "prior_fixed"});
            break;
    }
    return allowed;
}

RunMode parse_mode(const KeyValues& kv) {
    if (!kv.has("mode")) {
        throw ConfigError(0, "missing required key 'mode'");
    }
    const std::string& value = kv.get_string("mode");
    if (value == "fisher") return RunMode::Fisher;
    if (value == "variance") return RunMode::Variance;
    if (value == "scaling") return RunMode::Scaling;
    if (value == "scenario-two-channel") return RunMode::ScenarioTwoChannel;
    if (value == "scenario-linear-comb") return RunMode::ScenarioLinearComb;
    if (value == "prior-probe") return RunMode::PriorProbe;
    throw ConfigError(kv.at("mode").line, "unknown mode '" + value + "'");
}

ScenarioChoice parse_scenario_choice(const KeyValues& kv, RunMode mode) {
    if (mode == RunMode::ScenarioTwoChannel) {
        return ScenarioChoice::TwoChannel;
    }
    if (mode == RunMode::ScenarioLinearComb) {
        return ScenarioChoice::LinearComb;
    }
    if (!kv.has("scenario")) {
        throw ConfigError(0, "missing required key 'scenario'");
    }
    const std::string& value = kv.get_string("scenario");
    if (value == "two-channel") return ScenarioChoice::TwoChannel;
    if (value == "linear-comb") return ScenarioChoice::LinearComb;
    if (value == "raw") return ScenarioChoice::Raw;
    throw ConfigError(kv.at("scenario").line, "unknown scenario '" + value + "'");
}

void require(const KeyValues& kv, const std::string& key, const char* context) {
    if (!kv.has(key)) {
        throw ConfigError(0, std::string("missing required key '") + key + "' for " + context);
    }
}

Angle parse_layout_angle(const std::string& token) {
    if (!token.empty() && token.front() == '@') {
        long idx = std::strtol(token.c_str() + 1, nullptr, 10);
        if (idx < 1) {
            throw std::invalid_argument("parameter binding '" + token + "' must be @1, @2, ...");
        }
        return Angle::parameter(static_cast<int>(idx));
    }
    return Angle::fixed(parse_angle(token));
}

ParamNetwork parse_layout(const KeyValues& kv) {
    require(kv, "dim", "raw scenario");
    require(kv, "layout", "raw scenario");
    int dim = static_cast<int>(kv.get_integer("dim"));
    return kv.wrap_parse("layout", [&] {
        std::vector<NetworkElement> elements;
        for (const std::string& part : split(kv.get_string("layout"), ';')) {
            if (part.empty()) {
                continue;
            }
            std::stringstream stream(part);
            std::string op;
            stream >> op;
            std::vector<std::string> args;
            std::string tok;
            while (stream >> tok) {
                args.push_back(tok);
            }
            if (op == "ps" && args.size() == 2) {
                elements.push_back(PhaseShiftElement{std::stoi(args[0]),
                                                     parse_layout_angle(args[1])});
            } else if (op == "bs" && args.size() == 3) {
                elements.push_back(BeamSplitterElement{std::stoi(args[0]), std::stoi(args[1]),
                                                       parse_layout_angle(args[2])});
            } else {
                throw std::invalid_argument("layout element '" + part +
                                            "' (expected 'ps <ch> <angle>' or "
                                            "'bs <i> <j> <angle>')");
            }
        }
        if (elements.empty()) {
            throw std::invalid_argument("layout is empty");
        }
        return ParamNetwork(dim, std::move(elements));
    });
}

std::vector<LinearChannel> parse_kinds(const KeyValues& kv, std::size_t count) {
    std::vector<LinearChannel> channels(count);
    if (!kv.has("kinds")) {
        return channels;
    }
    std::vector<std::string> tokens = split(kv.get_string("kinds"), ',');
    if (tokens.size() != count) {
        throw ConfigError(kv.at("kinds").line, "kinds lists " + std::to_string(tokens.size()) +
                                                   " channels, weights list " +
                                                   std::to_string(count));
    }
    std::vector<std::size_t> local_channels;
    for (std::size_t i = 0; i < count; ++i) {
        if (tokens[i] == "ps") {
            channels[i].kind = ChannelKind::PhaseShift;
        } else if (tokens[i] == "bs") {
            channels[i].kind = ChannelKind::BeamSplitterViaV;
        } else if (tokens[i] == "local") {
            channels[i].kind = ChannelKind::GeneralizedLocal;
            channels[i].delta_alpha = pi / 2.0;
            local_channels.push_back(i);
        } else {
            throw ConfigError(kv.at("kinds").line,
                              "unknown channel kind '" + tokens[i] + "' (ps, bs, local)");
        }
    }
    auto fill = [&](const char* key, auto&& assign) {
        if (!kv.has(key)) {
            return;
        }
        std::vector<double> values = kv.get_angle_list(key);
        if (values.size() == 1 && local_channels.size() > 1) {
            values.assign(local_channels.size(), values[0]);
        }
        if (values.size() != local_channels.size()) {
            throw ConfigError(kv.at(key).line,
                              std::string("key '") + key + "' must list one value per 'local' "
                              "channel (or a single broadcast value)");
        }
        for (std::size_t j = 0; j < local_channels.size(); ++j) {
            assign(channels[local_channels[j]], values[j]);
        }
    };
    fill("local_delta_alpha", [](LinearChannel& ch, double v) { ch.delta_alpha = v; });
    fill("local_phi2", [](LinearChannel& ch, double v) { ch.local_phase_shifts[0] = v; });
    fill("local_phi3", [](LinearChannel& ch, double v) { ch.local_phase_shifts[1] = v; });
    fill("local_phi2_cl", [](LinearChannel& ch, double v) { ch.local_phase_priors[0] = v; });
    fill("local_phi3_cl", [](LinearChannel& ch, double v) { ch.local_phase_priors[1] = v; });
    return channels;
}

ScenarioSpec parse_scenario(const KeyValues& kv, ScenarioChoice choice) {
    switch (choice) {
        case ScenarioChoice::TwoChannel: {
            require(kv, "phi", "the two-channel scenario");
            std::vector<double> phi = kv.get_angle_list("phi");
            if (phi.size() != 3) {
                throw ConfigError(kv.at("phi").line, "two-channel scenario needs 3 phi values");
            }
            TwoChannelScenario scenario;
            scenario.phi = {phi[0], phi[1], phi[2]};
            if (kv.has("alpha1") != kv.has("alpha2")) {
                throw ConfigError(kv.has("alpha1") ? kv.at("alpha1").line : kv.at("alpha2").line,
                                  "alpha1 and alpha2 must be given together");
            }
            if (kv.has("alpha1")) {
                if (kv.has("delta_alpha")) {
                    throw ConfigError(kv.at("delta_alpha").line,
                                      "give either delta_alpha or alpha1/alpha2, not both");
                }
                scenario.alpha1 = kv.get_angle("alpha1");
                scenario.alpha2 = kv.get_angle("alpha2");
            } else {
                double dalpha = kv.has("delta_alpha") ? kv.get_angle("delta_alpha") : pi / 2.0;
                scenario.alpha1 = dalpha / 2.0;
                scenario.alpha2 = -dalpha / 2.0;
            }
            return scenario;
        }
        case ScenarioChoice::LinearComb: {
            require(kv, "weights", "the linear-combination scenario");
            require(kv, "phi", "the linear-combination scenario");
            LinearCombScenario scenario;
            scenario.weights = kv.get_number_list("weights");
            std::vector<double> phi = kv.get_angle_list("phi");
            if (phi.size() != scenario.weights.size()) {
                throw ConfigError(kv.at("phi").line, "phi length differs from weights length");
            }
            scenario.phi = Eigen::Map<const Eigen::VectorXd>(phi.data(),
                                                             static_cast<Eigen::Index>(phi.size()));
            scenario.channels = parse_kinds(kv, scenario.weights.size());
            return scenario;
        }
        case ScenarioChoice::Raw: {
            require(kv, "phi", "the raw scenario");
            RawScenario scenario{parse_layout(kv), Eigen::VectorXd(), 1, 1};
            std::vector<double> phi = kv.get_angle_list("phi");
            scenario.phi = Eigen::Map<const Eigen::VectorXd>(phi.data(),
                                                             static_cast<Eigen::Index>(phi.size()));
            if (scenario.network.num_params() != static_cast<int>(phi.size())) {
                throw ConfigError(kv.at("phi").line,
                                  "phi length differs from the layout's parameter count");
            }
            if (kv.has("in_channel")) {
                scenario.in_channel = static_cast<int>(kv.get_integer("in_channel"));
            }
            if (kv.has("out_channel")) {
                scenario.out_channel = static_cast<int>(kv.get_integer("out_channel"));
            }
            return scenario;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace

double parse_angle(const std::string& text) {
    std::string s = trim(text);
    std::size_t pos = s.find("pi");
    if (pos == std::string::npos) {
        return parse_plain_number(s);
    }
    double sign = 1.0;
    std::string prefix = s.substr(0, pos);
    if (!prefix.empty() && (prefix[0] == '+' || prefix[0] == '-')) {
        sign = prefix[0] == '-' ? -1.0 : 1.0;
        prefix = prefix.substr(1);
    }
    double numerator = prefix.empty() ? 1.0 : parse_plain_number(prefix);
    std::string rest = s.substr(pos + 2);
    double denominator = 1.0;
    if (!rest.empty()) {
        if (rest[0] != '/') {
            throw std::invalid_argument("malformed angle '" + text + "'");
        }
        denominator = parse_plain_number(rest.substr(1));
        if (denominator == 0.0) {
            throw std::invalid_argument("zero denominator in angle '" + text + "'");
        }
    }
    return sign * numerator * pi / denominator;
}

RunSpec parse_config(const std::string& text, std::ostream& warnings) {
    KeyValues kv;
    std::stringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(line_no, "expected 'key = value', got '" + line + "'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(line_no, "empty key");
        }
        if (known_keys().count(key) == 0) {
            throw ConfigError(line_no, "unknown key '" + key + "'");
        }
        kv.insert(line_no, key, value, warnings);
    }

    RunSpec spec;
    spec.mode = parse_mode(kv);
    ScenarioChoice choice = parse_scenario_choice(kv, spec.mode);
    std::set<std::string> allowed = allowed_keys(spec.mode, choice);
    for (const auto& [key, entry] : kv.all()) {
        if (allowed.count(key) == 0) {
            throw ConfigError(entry.line,
                              "key '" + key + "' is not used in mode '" + kv.get_string("mode") +
                                  "'");
        }
    }

    spec.experiment.scenario = parse_scenario(kv, choice);
    if (kv.has("seed")) {
        spec.experiment.seed = static_cast<std::uint64_t>(kv.get_integer("seed"));
    }
    if (kv.has("threads")) {
        spec.experiment.threads = static_cast<int>(kv.get_integer("threads"));
        if (spec.experiment.threads < 1) {
            throw ConfigError(kv.at("threads").line, "threads must be >= 1");
        }
    }
    if (kv.has("k")) {
        spec.experiment.k = kv.get_number("k");
    }
    if (kv.has("sign")) {
        long sign = kv.get_integer("sign");
        if (sign != 1 && sign != -1) {
            throw ConfigError(kv.at("sign").line, "sign must be +1 or -1");
        }
        spec.experiment.sign = static_cast<int>(sign);
    }
    if (kv.has("c")) {
        spec.experiment.prior_scale = kv.get_number("c");
        if (spec.experiment.prior_scale < 0.0) {
            throw ConfigError(kv.at("c").line, "c must be >= 0");
        }
    }
    if (kv.has("n")) {
        spec.experiment.samples_per_run = static_cast<int>(kv.get_integer("n"));
        if (spec.experiment.samples_per_run < 1) {
            throw ConfigError(kv.at("n").line, "n must be >= 1");
        }
    }
    if (kv.has("R")) {
        spec.experiment.repetitions = static_cast<int>(kv.get_integer("R"));
        if (spec.experiment.repetitions < 1) {
            throw ConfigError(kv.at("R").line, "R must be >= 1");
        }
    }
    if (kv.has("theta_mode")) {
        const std::string& value = kv.get_string("theta_mode");
        if (value == "ideal") {
            spec.experiment.theta_mode = ThetaMode::Ideal;
        } else if (value == "prior") {
            spec.experiment.theta_mode = ThetaMode::Prior;
        } else {
            throw ConfigError(kv.at("theta_mode").line,
                              "theta_mode must be 'ideal' or 'prior'");
        }
    }

    auto photon_list = [&](const char* context) {
        require(kv, "N", context);
        std::vector<double> grid = kv.get_number_list("N");
        for (double n_photons : grid) {
            if (n_photons <= 0.0) {
                throw ConfigError(kv.at("N").line, "photon numbers must be > 0");
            }
        }
        return grid;
    };

    switch (spec.mode) {
        case RunMode::Scaling: {
            spec.experiment.photon_grid = photon_list("scaling mode");
            if (spec.experiment.k == 0.0) {
                throw ConfigError(kv.has("k") ? kv.at("k").line : 0, "k must be nonzero");
            }
            break;
        }
        case RunMode::Fisher:
        case RunMode::Variance: {
            std::vector<double> grid = photon_list("this mode");
            if (grid.size() != 1) {
                throw ConfigError(kv.at("N").line, "this mode takes a single N value");
            }
            spec.single_photons = grid[0];
            if (spec.mode == RunMode::Variance) {
                require(kv, "sweep", "variance mode");
                require(kv, "sweep_min", "variance mode");
                require(kv, "sweep_max", "variance mode");
                require(kv, "sweep_steps", "variance mode");
                spec.sweep.axis = kv.get_string("sweep");
                if (spec.sweep.axis != "theta") {
                    if (spec.sweep.axis.rfind("phi", 0) != 0 ||
                        spec.sweep.axis.size() == 3) {
                        throw ConfigError(kv.at("sweep").line,
                                          "sweep must be 'theta' or 'phi<i>'");
                    }
                    int index = std::atoi(spec.sweep.axis.c_str() + 3);
                    if (index < 1 || index > scenario_num_params(spec.experiment.scenario)) {
                        throw ConfigError(kv.at("sweep").line,
                                          "sweep parameter index out of range");
                    }
                }
                spec.sweep.lo = kv.get_angle("sweep_min");
                spec.sweep.hi = kv.get_angle("sweep_max");
                spec.sweep.steps = static_cast<int>(kv.get_integer("sweep_steps"));
                if (spec.sweep.steps < 1) {
                    throw ConfigError(kv.at("sweep_steps").line, "sweep_steps must be >= 1");
                }
                if (kv.has("theta")) {
                    spec.sweep.fixed_theta = kv.get_angle("theta");
                }
            }
            break;
        }
        case RunMode::PriorProbe: {
            spec.experiment.photon_grid = photon_list("prior-probe mode");
            if (kv.has("prior_fixed")) {
                spec.prior_fixed_error = kv.get_bool("prior_fixed");
            }
            break;
        }
        case RunMode::ScenarioTwoChannel:
        case RunMode::ScenarioLinearComb:
            break;
    }

    // phi_cl (where allowed) defaults to phi: perfect prior.
    if (kv.has("phi_cl")) {
        std::vector<double> phi_cl = kv.get_angle_list("phi_cl");
        int expected = scenario_num_params(spec.experiment.scenario);
        if (static_cast<int>(phi_cl.size()) != expected) {
            throw ConfigError(kv.at("phi_cl").line,
                              "phi_cl needs " + std::to_string(expected) + " values");
        }
        spec.phi_cl = Eigen::Map<const Eigen::VectorXd>(phi_cl.data(),
                                                        static_cast<Eigen::Index>(phi_cl.size()));
    } else {
        spec.phi_cl = scenario_phi_true(spec.experiment.scenario);
    }
    return spec;
}

}  // namespace heisenet
