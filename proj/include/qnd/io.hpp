// io.hpp
// JSON configs and reports, CSV group tables.
//
// Config (all keys optional, unknown keys rejected):
//   {
//     "protocol":   {"group_size", "num_groups", "digits_per_value",
//                    "digits_sacrificed", "normalization": "received"|"sent"},
//     "tolerances": {"accuracy_factor", "separation_factor", "phi_sum_floor",
//                    "theta_margin"},
//     "channel":    {"alpha_db_per_km", "length_km", "fixed_loss_db", "error_rate"},
//     "attack":     {"kind": "none"|"intercept_resend"|"entangle_measure",
//                    "fraction", "eve_gamma", "eve_delta", "eve_eta"},
//     "seed": 42
//   }
// where each eve_* probe is {"theta": rad, "phi": rad}.

#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qnd/protocol.hpp"

namespace qnd {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "qnd.session_report/1";
inline constexpr const char* kGroupsCsvSchema = "qnd.groups/1";
inline constexpr const char* kSweepCsvSchema = "qnd.sweep/1";

/// Malformed config; `field` is the dotted path of the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error("config field '" + field + "': " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
    }
}

inline const json* child(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

template <typename T>
void read_number(const json& obj, const std::string& path, const char* key, T& out) {
    const json* v = child(obj, key);
    if (!v) return;
    const std::string name = path + "." + key;
    if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw ConfigError(name, "expected a number");
        out = v->get<T>();
    } else if constexpr (std::is_unsigned_v<T>) {
        if (!v->is_number_unsigned()) throw ConfigError(name, "expected a non-negative integer");
        out = v->get<T>();
    } else {
        if (!v->is_number_integer()) throw ConfigError(name, "expected an integer");
        out = v->get<T>();
    }
}

inline PreparationParams read_params(const json& v, const std::string& path) {
    if (!v.is_object()) throw ConfigError(path, "expected an object with theta and phi");
    reject_unknown(v, path, {"theta", "phi"});
    PreparationParams p;
    if (!child(v, "theta") || !child(v, "phi")) throw ConfigError(path, "needs both theta and phi");
    read_number(v, path, "theta", p.theta);
    read_number(v, path, "phi", p.phi);
    return p;
}

inline const json& section(const json& root, const char* key) {
    const json* s = child(root, key);
    static const json empty = json::object();
    if (!s) return empty;
    if (!s->is_object()) throw ConfigError(key, "expected an object");
    return *s;
}

}  // namespace detail

inline ProtocolConfig config_from_json(const json& root) {
    using namespace detail;
    if (!root.is_object()) throw ConfigError("", "top level must be an object");
    reject_unknown(root, "", {"protocol", "tolerances", "channel", "attack", "seed"});
    ProtocolConfig cfg;

    const json& p = section(root, "protocol");
    reject_unknown(p, "protocol", {"group_size", "num_groups", "digits_per_value", "digits_sacrificed", "normalization"});
    read_number(p, "protocol", "group_size", cfg.group_size);
    read_number(p, "protocol", "num_groups", cfg.num_groups);
    read_number(p, "protocol", "digits_per_value", cfg.digits_per_value);
    read_number(p, "protocol", "digits_sacrificed", cfg.digits_sacrificed);
    if (const json* n = child(p, "normalization")) {
        if (*n == "received") cfg.normalization = Normalization::kReceived;
        else if (*n == "sent") cfg.normalization = Normalization::kSent;
        else throw ConfigError("protocol.normalization", "expected \"received\" or \"sent\"");
    }

    const json& t = section(root, "tolerances");
    reject_unknown(t, "tolerances", {"accuracy_factor", "separation_factor", "phi_sum_floor", "theta_margin"});
    read_number(t, "tolerances", "accuracy_factor", cfg.tolerances.accuracy_factor);
    read_number(t, "tolerances", "separation_factor", cfg.tolerances.separation_factor);
    read_number(t, "tolerances", "phi_sum_floor", cfg.tolerances.phi_sum_floor);
    read_number(t, "tolerances", "theta_margin", cfg.tolerances.theta_margin);

    const json& c = section(root, "channel");
    reject_unknown(c, "channel", {"alpha_db_per_km", "length_km", "fixed_loss_db", "error_rate"});
    read_number(c, "channel", "alpha_db_per_km", cfg.channel.alpha_db_per_km);
    read_number(c, "channel", "length_km", cfg.channel.length_km);
    read_number(c, "channel", "fixed_loss_db", cfg.channel.fixed_loss_db);
    read_number(c, "channel", "error_rate", cfg.channel.error_rate);

    const json& a = section(root, "attack");
    reject_unknown(a, "attack", {"kind", "fraction", "eve_gamma", "eve_delta", "eve_eta"});
    if (const json* k = child(a, "kind")) {
        if (!k->is_string()) throw ConfigError("attack.kind", "expected a string");
        try {
            cfg.attack.kind = parse_attack_kind(k->get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError("attack.kind", e.what());
        }
    }
    read_number(a, "attack", "fraction", cfg.attack.fraction);
    if (const json* v = child(a, "eve_gamma")) cfg.attack.eve_gamma = read_params(*v, "attack.eve_gamma");
    if (const json* v = child(a, "eve_delta")) cfg.attack.eve_delta = read_params(*v, "attack.eve_delta");
    if (const json* v = child(a, "eve_eta")) cfg.attack.eve_eta = read_params(*v, "attack.eve_eta");

    read_number(root, "", "seed", cfg.master_seed);

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        throw ConfigError(msg.substr(0, msg.find(' ')), msg);
    }
    return cfg;
}

inline ProtocolConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    return config_from_json(root);
}

inline json to_json(const PreparationParams& p) { return {{"theta", p.theta}, {"phi", p.phi}}; }

inline json to_json(const ProtocolConfig& cfg) {
    return {
        {"protocol",
         {{"group_size", cfg.group_size},
          {"num_groups", cfg.num_groups},
          {"digits_per_value", cfg.digits_per_value},
          {"digits_sacrificed", cfg.digits_sacrificed},
          {"normalization", cfg.normalization == Normalization::kReceived ? "received" : "sent"}}},
        {"tolerances",
         {{"accuracy_factor", cfg.tolerances.accuracy_factor},
          {"separation_factor", cfg.tolerances.separation_factor},
          {"phi_sum_floor", cfg.tolerances.phi_sum_floor},
          {"theta_margin", cfg.tolerances.theta_margin}}},
        {"channel",
         {{"alpha_db_per_km", cfg.channel.alpha_db_per_km},
          {"length_km", cfg.channel.length_km},
          {"fixed_loss_db", cfg.channel.fixed_loss_db},
          {"error_rate", cfg.channel.error_rate}}},
        {"attack",
         {{"kind", to_string(cfg.attack.kind)},
          {"fraction", cfg.attack.fraction},
          {"eve_gamma", to_json(cfg.attack.eve_gamma)},
          {"eve_delta", to_json(cfg.attack.eve_delta)},
          {"eve_eta", to_json(cfg.attack.eve_eta)}}},
        {"seed", cfg.master_seed},
    };
}

/// Embedded in every report. `timestamp` stays null unless the caller
/// stamps it, so that reruns are byte-identical.
struct RunManifest {
    ProtocolConfig config;
    std::optional<std::string> timestamp;
    std::vector<std::string> outputs;
};

inline json to_json(const RunManifest& m) {
    json outputs = json::array();
    for (const auto& o : m.outputs) outputs.push_back(o);
    return {{"tool", "qnd"},
            {"tool_version", kToolVersion},
            {"master_seed", m.config.master_seed},
            {"timestamp", m.timestamp ? json(*m.timestamp) : json(nullptr)},
            {"outputs", outputs},
            {"config", to_json(m.config)}};
}

inline json to_json(const ConclusiveQuadruple& q) {
    return {{"p1010", q.p1010}, {"p1011", q.p1011}, {"p1110", q.p1110}, {"p1111", q.p1111}};
}

inline json to_json(const RecoveredValues& r) {
    return {{"cos_theta", r.cos_theta},
            {"cos_phi", r.cos_phi},
            {"cos_phi_sum", r.cos_phi_sum},
            {"divisor_margin", r.divisor_margin},
            {"theta_reliable", r.theta_reliable},
            {"phi_reliable", r.phi_reliable}};
}

inline json to_json(const GroupResult& g) {
    return {{"alice_params", to_json(g.alice_params)},
            {"bob_params", to_json(g.bob_params)},
            {"n_sent", g.n_sent},
            {"n_received", g.n_received},
            {"quadruple", to_json(g.quadruple)},
            {"alice_recovers_bob", to_json(g.alice_recovered)},
            {"bob_recovers_alice", to_json(g.bob_recovered)},
            {"alice_digits", g.alice_digits},
            {"bob_digits", g.bob_digits},
            {"compared_positions", g.compared_positions},
            {"verdicts",
             {{"accuracy", g.verdicts.accuracy},
              {"estimates_reliable", g.verdicts.estimates_reliable},
              {"eavesdrop", g.verdicts.eavesdrop},
              {"phi_degeneracy", g.verdicts.phi_degeneracy},
              {"digit_comparison", g.verdicts.digit_comparison}}},
            {"kept_digits", g.kept_digits},
            {"discard_reason", g.discard_reason.empty() ? json(nullptr) : json(g.discard_reason)}};
}

inline json to_json(const SessionReport& r, const RunManifest& manifest) {
    json groups = json::array();
    for (const auto& g : r.groups) groups.push_back(to_json(g));
    return {{"schema", kReportSchema},
            {"manifest", to_json(manifest)},
            {"summary",
             {{"groups", r.groups.size()},
              {"groups_kept", r.groups_kept},
              {"discarded",
               {{"accuracy", r.discarded_accuracy},
                {"eavesdrop", r.discarded_eavesdrop},
                {"phi_degeneracy", r.discarded_phi},
                {"digit_comparison", r.discarded_digits}}},
              {"total_sent", r.total_sent},
              {"total_received", r.total_received},
              {"key_length", r.final_key.size()},
              {"keys_agree", r.keys_agree()},
              {"efficiency", r.efficiency()}}},
            {"final_key", r.final_key},
            {"bob_key", r.bob_key},
            {"groups", groups}};
}

/// Fixed column order; the first line names the schema version.
inline std::string groups_csv(const SessionReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "# " << kGroupsCsvSchema << '\n';
    os << "group,theta_a,phi_a,theta_b,phi_b,n_sent,n_received,p1010,p1011,p1110,p1111,"
          "alice_cos_theta_b,alice_cos_phi_b,bob_cos_theta_a,bob_cos_phi_a,alice_digits,bob_digits,"
          "accuracy,estimates_reliable,eavesdrop,phi_degeneracy,digit_comparison,kept_digits,discard_reason\n";
    for (std::size_t i = 0; i < r.groups.size(); ++i) {
        const auto& g = r.groups[i];
        os << i << ',' << g.alice_params.theta << ',' << g.alice_params.phi << ',' << g.bob_params.theta << ','
           << g.bob_params.phi << ',' << g.n_sent << ',' << g.n_received << ',' << g.quadruple.p1010 << ','
           << g.quadruple.p1011 << ',' << g.quadruple.p1110 << ',' << g.quadruple.p1111 << ','
           << g.alice_recovered.cos_theta << ',' << g.alice_recovered.cos_phi << ',' << g.bob_recovered.cos_theta
           << ',' << g.bob_recovered.cos_phi << ',' << g.alice_digits << ',' << g.bob_digits << ','
           << g.verdicts.accuracy << ',' << g.verdicts.estimates_reliable << ',' << g.verdicts.eavesdrop << ','
           << g.verdicts.phi_degeneracy << ',' << g.verdicts.digit_comparison << ',' << g.kept_digits << ','
           << g.discard_reason << '\n';
    }
    return os.str();
}

}  // namespace qnd
