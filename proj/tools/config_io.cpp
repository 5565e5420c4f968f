#include "config_io.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace mmtc {

namespace {

struct Field {
    std::string key;
    std::function<void(SimConfig&, const YAML::Node&)> read;
    std::function<void(const SimConfig&, YAML::Emitter&)> write;
};

template <typename T>
Field scalar(std::string key, T SimConfig::*member) {
    return {key, [member](SimConfig& c, const YAML::Node& n) { c.*member = n.as<T>(); },
            [member](const SimConfig& c, YAML::Emitter& e) { e << c.*member; }};
}

template <typename T>
Field idd_scalar(std::string key, T IddConfig::*member) {
    return {key, [member](SimConfig& c, const YAML::Node& n) { c.idd.*member = n.as<T>(); },
            [member](const SimConfig& c, YAML::Emitter& e) { e << c.idd.*member; }};
}

template <typename E>
Field enumeration(std::string key, E SimConfig::*member, std::vector<std::pair<std::string, E>> names) {
    return {key,
            [key, member, names](SimConfig& c, const YAML::Node& n) {
                const auto s = n.as<std::string>();
                for (const auto& [name, value] : names)
                    if (name == s) {
                        c.*member = value;
                        return;
                    }
                throw ContractError("config key '" + key + "': unknown value '" + s + "'");
            },
            [member, names](const SimConfig& c, YAML::Emitter& e) {
                for (const auto& [name, value] : names)
                    if (value == c.*member) e << name;
            }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        scalar("schema_version", &SimConfig::schema_version),
        scalar("N", &SimConfig::N),
        scalar("M", &SimConfig::M),
        scalar("rho_lo", &SimConfig::rho_lo),
        scalar("rho_hi", &SimConfig::rho_hi),
        scalar("t_pilot", &SimConfig::t_pilot),
        scalar("t_data", &SimConfig::t_data),
        scalar("block_length", &SimConfig::block_length),
        {"snr_grid", [](SimConfig& c, const YAML::Node& n) { c.snr_grid = n.as<std::vector<double>>(); },
         [](const SimConfig& c, YAML::Emitter& e) { e << YAML::Flow << c.snr_grid; }},
        scalar("trials", &SimConfig::trials),
        {"algorithms",
         [](SimConfig& c, const YAML::Node& n) {
             c.algorithms.clear();
             for (const auto& tag : n.as<std::vector<std::string>>()) c.algorithms.push_back(parse_algorithm(tag));
         },
         [](const SimConfig& c, YAML::Emitter& e) {
             std::vector<std::string> tags;
             for (auto a : c.algorithms) tags.emplace_back(to_string(a));
             e << YAML::Flow << tags;
         }},
        scalar("coded", &SimConfig::coded),
        scalar("lambda", &SimConfig::lambda),
        scalar("beta", &SimConfig::beta),
        scalar("gamma", &SimConfig::gamma),
        enumeration("p_init_mode", &SimConfig::p_init_mode, {{"fixed", PInit::fixed}, {"activity", PInit::activity}}),
        scalar("p_init", &SimConfig::p_init),
        scalar("dd_adapt", &SimConfig::dd_adapt),
        scalar("reorder_per_pilot", &SimConfig::reorder_per_pilot),
        scalar("base_seed", &SimConfig::base_seed),
        scalar("csi_error_div", &SimConfig::csi_error_div),
        enumeration("spreading", &SimConfig::spreading,
                    {{"complex_gaussian", SpreadingKind::complex_gaussian}, {"binary", SpreadingKind::binary}}),
        scalar("freeze_spreading", &SimConfig::freeze_spreading),
        scalar("frames_per_channel", &SimConfig::frames_per_channel),
        scalar("ldpc_n", &SimConfig::ldpc_n),
        scalar("ldpc_k", &SimConfig::ldpc_k),
        scalar("ldpc_column_weight", &SimConfig::ldpc_column_weight),
        scalar("ldpc_seed", &SimConfig::ldpc_seed),
        idd_scalar("idd_outer_iterations", &IddConfig::outer_iterations),
        idd_scalar("idd_inner_iterations", &IddConfig::inner_ldpc_iterations),
        idd_scalar("idd_reestimate", &IddConfig::reestimate_gaussian),
        scalar("workers", &SimConfig::workers),
    };
    return f;
}

}  // namespace

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& f : fields()) keys.push_back(f.key);
    return keys;
}

SimConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ContractError(std::string("config: ") + e.what());
    }
    if (!root.IsMap()) throw ContractError("config: top level must be a key-value mapping");
    if (!root["schema_version"]) throw ContractError("config: missing schema_version");

    std::set<std::string> known;
    for (const auto& f : fields()) known.insert(f.key);
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (!known.count(key)) throw ContractError("config: unknown key '" + key + "'");
    }

    SimConfig c;
    for (const auto& f : fields()) {
        const auto node = root[f.key];
        if (!node) continue;
        try {
            f.read(c, node);
        } catch (const YAML::Exception& e) {
            throw ContractError("config key '" + f.key + "': " + e.what());
        }
    }
    c.validate();
    return c;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const SimConfig& config) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    for (const auto& f : fields()) {
        e << YAML::Key << f.key << YAML::Value;
        f.write(config, e);
    }
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

}  // namespace mmtc
