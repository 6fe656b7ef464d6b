#include "splitsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "splitsim/rng.hpp"

namespace splitsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Known keys with documented units (suffix) and defaults. Everything except
// n_devices / n_subchannels is optional.
const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "n_devices", "n_subchannels", "seed", "batch_size", "phi",
        "subchannel_bandwidth_mhz", "band_start_ghz", "d_max_m",
        "f_server_cycles_per_s", "kappa_server_cycles_per_flop",
        "f_client_min_cycles_per_s", "f_client_max_cycles_per_s",
        "kappa_client_cycles_per_flop", "p_max_dbm", "p_th_dbm", "p_dl_dbm_per_hz",
        "noise_dbm_per_hz", "antenna_gain", "p_los", "ref_loss_db",
        "pathloss_exp_los", "pathloss_exp_nlos", "shadow_std_los_db",
        "shadow_std_nlos_db", "dataset_size", "epsilon_s", "max_bcd_iters",
        "profile", "target_epochs",
        "train_input_dim", "train_hidden_dim", "train_cut_dim", "train_classes",
        "train_size", "test_size", "eta_client", "eta_server", "epochs",
        "pt_switch_epoch", "train_loss", "agg_backprop",
    };
    return keys;
}

struct KeyedConfig {
    std::map<std::string, std::pair<std::string, int>> kv;  // key -> (value, line)

    bool has(const std::string& k) const { return kv.count(k) > 0; }
    int line_of(const std::string& k) const { return kv.at(k).second; }

    std::string str(const std::string& k, const std::string& fallback) const {
        auto it = kv.find(k);
        return it == kv.end() ? fallback : it->second.first;
    }
    double num(const std::string& k, double fallback) const {
        auto it = kv.find(k);
        if (it == kv.end()) return fallback;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second.first, &pos);
            if (pos != it->second.first.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(it->second.second, "key '" + k + "': not a number: '" +
                                                     it->second.first + "'");
        }
    }
    long long integer(const std::string& k, long long fallback) const {
        const double v = num(k, static_cast<double>(fallback));
        const long long r = static_cast<long long>(std::llround(v));
        if (static_cast<double>(r) != v) {
            auto it = kv.find(k);
            throw ConfigError(it == kv.end() ? 0 : it->second.second,
                              "key '" + k + "': expected an integer");
        }
        return r;
    }
};

void require_positive(const KeyedConfig& c, const std::string& key, double v) {
    if (v <= 0.0)
        throw ConfigError(c.has(key) ? c.line_of(key) : 0, "key '" + key + "' must be positive");
}

}  // namespace

void ScenarioConfig::set(const std::string& key, const std::string& value) {
    for (auto& e : entries) {
        if (e.first == key) {
            e.second = value;
            return;
        }
    }
    entries.emplace_back(key, value);
}

const std::string* ScenarioConfig::find(const std::string& key) const {
    for (const auto& e : entries)
        if (e.first == key) return &e.second;
    return nullptr;
}

ScenarioConfig parse_config_text(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(lineno, "expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(lineno, "empty key");
        if (value.empty()) throw ConfigError(lineno, "empty value for key '" + key + "'");
        if (!known_keys().count(key)) throw ConfigError(lineno, "unknown key '" + key + "'");
        if (cfg.find(key)) throw ConfigError(lineno, "duplicate key '" + key + "'");
        cfg.entries.emplace_back(key, value);
    }
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

Scenario build_scenario(const ScenarioConfig& cfg) {
    KeyedConfig c;
    int lineno = 0;
    for (const auto& e : cfg.entries) c.kv[e.first] = {e.second, ++lineno};

    for (const char* req : {"n_devices", "n_subchannels"})
        if (!c.has(req)) throw ConfigError(0, std::string("missing required key '") + req + "'");

    Scenario s;

    const long long n_dev = c.integer("n_devices", 0);
    const long long n_sub = c.integer("n_subchannels", 0);
    if (n_dev < 1) throw ConfigError(c.line_of("n_devices"), "n_devices must be >= 1");
    if (n_sub < 1) throw ConfigError(c.line_of("n_subchannels"), "n_subchannels must be >= 1");
    if (n_sub < n_dev)
        throw InfeasibleError("n_subchannels (" + std::to_string(n_sub) +
                              ") < n_devices (" + std::to_string(n_dev) +
                              "): every device needs at least one subchannel");

    s.hyper.seed = static_cast<std::uint64_t>(c.integer("seed", 1));
    s.hyper.batch = static_cast<int>(c.integer("batch_size", 64));
    if (s.hyper.batch < 1) throw ConfigError(c.line_of("batch_size"), "batch_size must be >= 1");
    try {
        s.hyper.phi = parse_ratio(c.str("phi", "0.5"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(c.has("phi") ? c.line_of("phi") : 0, std::string("phi: ") + e.what());
    }
    if (s.hyper.phi.num > s.hyper.phi.den)
        throw ConfigError(c.line_of("phi"), "phi must lie in [0, 1]");
    s.hyper.p_th_w = dbm_to_watts(c.num("p_th_dbm", 36.99));
    s.hyper.epsilon_s = c.num("epsilon_s", 1e-6);
    require_positive(c, "epsilon_s", s.hyper.epsilon_s);
    s.hyper.max_iters = static_cast<int>(c.integer("max_bcd_iters", 50));
    if (s.hyper.max_iters < 1)
        throw ConfigError(c.line_of("max_bcd_iters"), "max_bcd_iters must be >= 1");
    s.hyper.target_epochs = static_cast<int>(c.integer("target_epochs", 10));
    require_positive(c, "target_epochs", s.hyper.target_epochs);

    s.server.compute_cycles_per_s = c.num("f_server_cycles_per_s", 5e9);
    require_positive(c, "f_server_cycles_per_s", s.server.compute_cycles_per_s);
    s.server.intensity_cycles_per_flop = c.num("kappa_server_cycles_per_flop", 1.0 / 32.0);
    require_positive(c, "kappa_server_cycles_per_flop", s.server.intensity_cycles_per_flop);
    s.server.p_dl_w_per_hz = dbm_per_hz_to_w_per_hz(c.num("p_dl_dbm_per_hz", -50.0));
    s.noise_psd_w_per_hz = dbm_per_hz_to_w_per_hz(c.num("noise_dbm_per_hz", -174.0));

    s.channel.ref_loss_db = c.num("ref_loss_db", 32.44);
    s.channel.exp_los = c.num("pathloss_exp_los", 2.1);
    s.channel.exp_nlos = c.num("pathloss_exp_nlos", 3.4);
    require_positive(c, "pathloss_exp_los", s.channel.exp_los);
    require_positive(c, "pathloss_exp_nlos", s.channel.exp_nlos);
    s.channel.shadow_std_los_db = c.num("shadow_std_los_db", 3.6);
    s.channel.shadow_std_nlos_db = c.num("shadow_std_nlos_db", 9.7);
    if (s.channel.shadow_std_los_db < 0.0 || s.channel.shadow_std_nlos_db < 0.0)
        throw ConfigError(0, "shadow standard deviations must be >= 0");
    s.channel.p_los = c.num("p_los", 0.5);
    if (s.channel.p_los < 0.0 || s.channel.p_los > 1.0)
        throw ConfigError(c.has("p_los") ? c.line_of("p_los") : 0, "p_los must lie in [0, 1]");
    s.channel.antenna_gain = c.num("antenna_gain", 10.0);
    require_positive(c, "antenna_gain", s.channel.antenna_gain);
    s.channel.seed = derive_seed(s.hyper.seed, 0xC4A);

    // Subchannel grid: contiguous equal-width channels growing upward from the
    // band start, so widening the band keeps existing channels in place.
    const double b_hz = c.num("subchannel_bandwidth_mhz", 10.0) * 1e6;
    require_positive(c, "subchannel_bandwidth_mhz", b_hz);
    const double band_start_hz = c.num("band_start_ghz", 27.9) * 1e9;
    require_positive(c, "band_start_ghz", band_start_hz);
    for (int k = 0; k < n_sub; ++k) {
        SubchannelSpec sub;
        sub.index = k + 1;
        sub.bandwidth_hz = b_hz;
        sub.center_freq_hz = band_start_hz + (k + 0.5) * b_hz;
        s.subchannels.push_back(sub);
    }

    // Devices: distances drawn uniformly over a disc of radius d_max with the
    // server at the center, compute capability uniform in [f_min, f_max].
    // Per-device substreams keep device i identical across device counts.
    const double d_max = c.num("d_max_m", 200.0);
    require_positive(c, "d_max_m", d_max);
    const double f_min = c.num("f_client_min_cycles_per_s", 1e9);
    const double f_max = c.num("f_client_max_cycles_per_s", 1.6e9);
    require_positive(c, "f_client_min_cycles_per_s", f_min);
    if (f_max < f_min)
        throw ConfigError(0, "f_client_max_cycles_per_s below f_client_min_cycles_per_s");
    const double kappa_c = c.num("kappa_client_cycles_per_flop", 1.0 / 16.0);
    require_positive(c, "kappa_client_cycles_per_flop", kappa_c);
    const double p_max_w = dbm_to_watts(c.num("p_max_dbm", 31.76));
    const long long dataset_size = c.integer("dataset_size", 8000);
    if (dataset_size < n_dev)
        throw ConfigError(c.has("dataset_size") ? c.line_of("dataset_size") : 0,
                          "dataset_size must cover at least one sample per device");

    for (int i = 0; i < n_dev; ++i) {
        Rng rng(derive_seed(s.hyper.seed, 0xDE00 + static_cast<std::uint64_t>(i)));
        DeviceProfile d;
        d.id = i;
        d.distance_m = d_max * std::sqrt(std::max(rng.uniform01(), 1e-12));
        d.compute_cycles_per_s = rng.uniform(f_min, f_max);
        d.intensity_cycles_per_flop = kappa_c;
        d.p_max_w = p_max_w;
        d.data_count = dataset_size / n_dev + (i < dataset_size % n_dev ? 1 : 0);
        s.devices.push_back(d);
    }

    const std::string profile = c.str("profile", "resnet18");
    if (profile == "resnet18") {
        s.profile = resnet18_preset();
    } else {
        try {
            s.profile = load_profile_file(profile);
        } catch (const ProfileError& e) {
            throw ConfigError(c.has("profile") ? c.line_of("profile") : 0,
                              "profile '" + profile + "': " + e.what());
        }
    }

    s.train.input_dim = static_cast<int>(c.integer("train_input_dim", 8));
    s.train.hidden_dim = static_cast<int>(c.integer("train_hidden_dim", 16));
    s.train.cut_dim = static_cast<int>(c.integer("train_cut_dim", 8));
    s.train.classes = static_cast<int>(c.integer("train_classes", 2));
    s.train.eta_client = c.num("eta_client", 1.5e-4);
    s.train.eta_server = c.num("eta_server", 1e-4);
    s.train.epochs = static_cast<int>(c.integer("epochs", 10));
    s.train.switch_epoch = static_cast<int>(c.integer("pt_switch_epoch", 0));
    s.train.train_size = static_cast<int>(c.integer("train_size", 2000));
    s.train.test_size = static_cast<int>(c.integer("test_size", 500));
    s.train.loss = c.str("train_loss", "softmax_ce");
    if (s.train.loss != "softmax_ce" && s.train.loss != "mse")
        throw ConfigError(c.line_of("train_loss"), "train_loss must be softmax_ce or mse");
    s.train.agg_backprop = c.str("agg_backprop", "merged");
    if (s.train.agg_backprop != "merged" && s.train.agg_backprop != "per_client")
        throw ConfigError(c.line_of("agg_backprop"), "agg_backprop must be merged or per_client");
    for (const char* k : {"train_input_dim", "train_hidden_dim", "train_cut_dim"})
        if (c.integer(k, 8) < 1) throw ConfigError(c.line_of(k), std::string(k) + " must be >= 1");
    if (s.train.classes < 2) throw ConfigError(0, "train_classes must be >= 2");

    return s;
}

Scenario load_scenario(const std::string& path) { return build_scenario(parse_config_file(path)); }

}  // namespace splitsim
