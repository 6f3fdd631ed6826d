#ifndef MMF_CONFIG_HPP
#define MMF_CONFIG_HPP

#include <string>

#include "mmf/types.hpp"

namespace mmf {

// Which model tier each engine runs, plus the runtime knobs an operator can
// change between interactions without restarting the pipeline.
struct FusionConfig {
    Tier od = Tier::H;  // object detection
    Tier asr = Tier::H; // speech transcription
    Tier tc = Tier::H;  // text command classification
    Tier gr = Tier::H;  // gesture recognition

    Millis vision_timeout_ms = 5000.0; // max wait for a detector pass
    Millis match_window_ms = 2000.0;   // aural/gesture pairing window
    int frames_per_detect = 5;         // frames scanned per detector request

    // One-shot H-tier retry when an L-tier pass finds no target. Benchmark
    // sweeps turn this off so each cell measures a fixed model combination.
    bool escalation_enabled = true;

    std::string combo() const; // "HLHL" style, od/asr/tc/gr order

    // Throws Error{validation} with the offending field named.
    void validate() const;
};

// JSON <-> struct. Unknown keys and out-of-range values are errors; absent
// keys keep their defaults. serialize(parse(s)) is a fixed point.
FusionConfig parse_config(const std::string& text);
std::string serialize_config(const FusionConfig& cfg);

FusionConfig config_for_combo(const std::string& combo); // "HHLH" -> tiers

} // namespace mmf

#endif
