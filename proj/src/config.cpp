#include "mmf/config.hpp"

#include <algorithm>
#include <vector>

#include <json.hpp>

namespace mmf {

using ordered_json = nlohmann::ordered_json;

namespace {

Tier parse_tier_field(const ordered_json& j, const char* key, Tier fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string())
        throw Error(Errc::parse, std::string("config: ") + key + " must be \"H\" or \"L\"");
    auto t = tier_from(j[key].get<std::string>());
    if (!t) throw Error(Errc::parse, std::string("config: ") + key + " must be \"H\" or \"L\"");
    return *t;
}

double parse_number_field(const ordered_json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        throw Error(Errc::parse, std::string("config: ") + key + " must be a number");
    return j[key].get<double>();
}

} // namespace

std::string FusionConfig::combo() const {
    return {tier_char(od), tier_char(asr), tier_char(tc), tier_char(gr)};
}

void FusionConfig::validate() const {
    if (vision_timeout_ms <= 0.0)
        throw Error(Errc::validation, "config: vision_timeout_ms must be positive");
    if (match_window_ms < 0.0)
        throw Error(Errc::validation, "config: match_window_ms must be nonnegative");
    if (frames_per_detect < 1)
        throw Error(Errc::validation, "config: frames_per_detect must be at least 1");
}

FusionConfig parse_config(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw Error(Errc::parse, std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(Errc::parse, "config: top level must be an object");

    static const std::vector<std::string> known{
        "od", "asr", "tc", "gr", "vision_timeout_ms", "match_window_ms",
        "frames_per_detect", "escalation_enabled",
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw Error(Errc::parse, "config: unknown field \"" + it.key() + "\"");
    }

    FusionConfig cfg;
    cfg.od = parse_tier_field(j, "od", cfg.od);
    cfg.asr = parse_tier_field(j, "asr", cfg.asr);
    cfg.tc = parse_tier_field(j, "tc", cfg.tc);
    cfg.gr = parse_tier_field(j, "gr", cfg.gr);
    cfg.vision_timeout_ms = parse_number_field(j, "vision_timeout_ms", cfg.vision_timeout_ms);
    cfg.match_window_ms = parse_number_field(j, "match_window_ms", cfg.match_window_ms);
    double frames = parse_number_field(j, "frames_per_detect", cfg.frames_per_detect);
    if (frames != static_cast<int>(frames))
        throw Error(Errc::parse, "config: frames_per_detect must be an integer");
    cfg.frames_per_detect = static_cast<int>(frames);
    if (j.contains("escalation_enabled")) {
        if (!j["escalation_enabled"].is_boolean())
            throw Error(Errc::parse, "config: escalation_enabled must be a boolean");
        cfg.escalation_enabled = j["escalation_enabled"].get<bool>();
    }
    cfg.validate();
    return cfg;
}

std::string serialize_config(const FusionConfig& cfg) {
    ordered_json j;
    j["od"] = std::string(1, tier_char(cfg.od));
    j["asr"] = std::string(1, tier_char(cfg.asr));
    j["tc"] = std::string(1, tier_char(cfg.tc));
    j["gr"] = std::string(1, tier_char(cfg.gr));
    j["vision_timeout_ms"] = cfg.vision_timeout_ms;
    j["match_window_ms"] = cfg.match_window_ms;
    j["frames_per_detect"] = cfg.frames_per_detect;
    j["escalation_enabled"] = cfg.escalation_enabled;
    return j.dump(2) + "\n";
}

FusionConfig config_for_combo(const std::string& combo) {
    if (combo.size() != 4)
        throw Error(Errc::invalid_arg, "combo must be 4 tier letters, e.g. HHLH");
    FusionConfig cfg;
    Tier* slots[4] = {&cfg.od, &cfg.asr, &cfg.tc, &cfg.gr};
    for (int i = 0; i < 4; ++i) {
        auto t = tier_from(std::string(1, combo[static_cast<size_t>(i)]));
        if (!t) throw Error(Errc::invalid_arg, "combo must use only H/L letters");
        *slots[i] = *t;
    }
    return cfg;
}

} // namespace mmf
