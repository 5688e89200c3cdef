#include "gsched/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gsched/errors.hpp"

namespace gsched {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

template <class T>
T parse_number(const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw std::invalid_argument("not a number: '" + text + "'");
    return value;
}

bool parse_bool(const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw std::invalid_argument("not a boolean: '" + text + "'");
}

void apply(TrainConfig& c, const std::string& key, const std::string& value) {
    if (key == "episodes") c.episodes = parse_number<int>(value);
    else if (key == "horizon") c.horizon = parse_number<int>(value);
    else if (key == "lookahead") c.lookahead = parse_number<int>(value);
    else if (key == "batch_size") c.batch_size = parse_number<int>(value);
    else if (key == "replay_capacity") c.replay_capacity = parse_number<int>(value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(value);
    else if (key == "checkpoint_every") c.checkpoint_every = parse_number<int>(value);
    else if (key == "checkpoint_dir") c.checkpoint_dir = value;
    else if (key == "phi") {
        if (value == "heaviside") c.phi = RewardActivation::heaviside;
        else if (value == "linear") c.phi = RewardActivation::linear;
        else throw std::invalid_argument("phi must be heaviside or linear");
    } else if (key == "graph_mix") {
        c.graph_mix.clear();
        for (const auto& item : split_list(value)) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) throw std::invalid_argument("graph_mix entries look like Name:weight");
            c.graph_mix.push_back({GraphSpec::parse(trim(item.substr(0, colon))),
                                   parse_number<double>(trim(item.substr(colon + 1)))});
        }
    } else if (key == "loads") c.loads = parse_double_list(value);
    else if (key == "rate_mean") c.rates.mean = parse_number<double>(value);
    else if (key == "rate_stddev") c.rates.stddev = parse_number<double>(value);
    else if (key == "layer_dims") {
        c.layer_dims.clear();
        for (const auto& item : split_list(value)) c.layer_dims.push_back(parse_number<int>(item));
    } else if (key == "init") {
        if (value == "glorot") c.init = ParamInit::glorot;
        else if (value == "identity") c.init = ParamInit::identity;
        else throw std::invalid_argument("init must be glorot or identity");
    } else if (key == "leaky_slope") c.leaky_slope = parse_number<double>(value);
    else if (key == "lr") c.adam.base_lr = parse_number<double>(value);
    else if (key == "lr_decay") c.adam.decay = parse_number<double>(value);
    else if (key == "beta1") c.adam.beta1 = parse_number<double>(value);
    else if (key == "beta2") c.adam.beta2 = parse_number<double>(value);
    else if (key == "epsilon") c.adam.epsilon = parse_number<double>(value);
    else if (key == "feature_scale") c.feature_scale = parse_number<double>(value);
    else if (key == "utility") c.utility = parse_utility_kind(value);
    else if (key == "recompute_unscheduled") c.recompute_unscheduled = parse_bool(value);
    else throw std::invalid_argument("unknown key '" + key + "'");
}

} // namespace

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(parse_number<double>(item));
    return out;
}

UtilityKind parse_utility_kind(const std::string& text) {
    if (text == "product") return UtilityKind::product;
    if (text == "min") return UtilityKind::min;
    throw std::invalid_argument("utility must be product or min");
}

const char* to_string(UtilityKind kind) { return kind == UtilityKind::product ? "product" : "min"; }
const char* to_string(RewardActivation phi) { return phi == RewardActivation::heaviside ? "heaviside" : "linear"; }

TrainConfig parse_train_config(std::istream& is, const std::string& source) {
    TrainConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(line_no) + ": ";
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
        try {
            apply(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + e.what());
        }
    }
    config.validate();
    return config;
}

TrainConfig load_train_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    return parse_train_config(is, path);
}

void write_train_config(std::ostream& os, const TrainConfig& c) {
    auto join = [](const auto& values) {
        std::ostringstream ss;
        for (std::size_t i = 0; i < values.size(); ++i) ss << (i ? "," : "") << values[i];
        return ss.str();
    };
    os << "episodes = " << c.episodes << '\n'
       << "horizon = " << c.horizon << '\n'
       << "lookahead = " << c.lookahead << '\n'
       << "phi = " << to_string(c.phi) << '\n'
       << "batch_size = " << c.batch_size << '\n'
       << "replay_capacity = " << c.replay_capacity << '\n'
       << "graph_mix = ";
    for (std::size_t i = 0; i < c.graph_mix.size(); ++i) {
        os << (i ? ", " : "") << c.graph_mix[i].spec.name() << ':' << c.graph_mix[i].weight;
    }
    os << '\n'
       << "loads = " << join(c.loads) << '\n'
       << "rate_mean = " << c.rates.mean << '\n'
       << "rate_stddev = " << c.rates.stddev << '\n'
       << "layer_dims = " << join(c.layer_dims) << '\n'
       << "init = " << (c.init == ParamInit::glorot ? "glorot" : "identity") << '\n'
       << "leaky_slope = " << c.leaky_slope << '\n'
       << "lr = " << c.adam.base_lr << '\n'
       << "lr_decay = " << c.adam.decay << '\n'
       << "beta1 = " << c.adam.beta1 << '\n'
       << "beta2 = " << c.adam.beta2 << '\n'
       << "epsilon = " << c.adam.epsilon << '\n'
       << "feature_scale = " << c.feature_scale << '\n'
       << "utility = " << to_string(c.utility) << '\n'
       << "recompute_unscheduled = " << (c.recompute_unscheduled ? "true" : "false") << '\n'
       << "seed = " << c.seed << '\n'
       << "checkpoint_every = " << c.checkpoint_every << '\n';
    if (!c.checkpoint_dir.empty()) os << "checkpoint_dir = " << c.checkpoint_dir << '\n';
}

} // namespace gsched
