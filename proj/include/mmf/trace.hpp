#ifndef MMF_TRACE_HPP
#define MMF_TRACE_HPP

#include <optional>
#include <string>
#include <vector>

#include "mmf/engines.hpp"
#include "mmf/fusion.hpp"
#include "mmf/rng.hpp"
#include "mmf/scene.hpp"
#include "mmf/types.hpp"

namespace mmf {

enum class TraceKind { utterance, gesture };

// One scripted user action plus its ground truth. Utterance events carry the
// intended command and the exact keywords the user speaks; gesture events
// carry the performed gesture and hand position.
struct TraceEvent {
    TraceKind kind = TraceKind::utterance;
    Millis t = 0.0;
    int interaction = 0;

    // utterance fields
    AuralOp true_op = AuralOp::no_op; // locate / describe_* only
    int object_class = -1;
    Multiplicity multiplicity = Multiplicity::singular;
    bool deictic = false;
    std::vector<std::string> keywords; // spoken content words, operation word first

    // gesture fields
    GestureLabel true_label = GestureLabel::pointing;
    Point hand{0.5, 0.5};

    // ground truth: scene object indices the system should act on
    std::vector<int> targets;
};

struct Trace {
    std::vector<TraceEvent> events; // nondecreasing t
    int interactions() const;
};

// Line format, one event per line (see README): "u ..." utterance, "g ..."
// gesture, "#" comments. parse(serialize(t)) reproduces t exactly (times are
// kept at millisecond resolution by the generator).
Trace parse_trace(const std::string& text);
std::string serialize_trace(const Trace& trace);

enum class ScenarioOp { locate, describe, describe_ambiguous, zoom, capture };
std::optional<ScenarioOp> scenario_op_from(std::string_view s);
const char* scenario_op_name(ScenarioOp op);

struct ScenarioOptions {
    double deictic_fraction = 0.5;  // describe only: share of "this ..." phrasings
    bool with_pointing = true;      // emit the pointing gesture for deictic events
    double plural_fraction = 0.0;   // share of plural-object commands
    Millis gesture_offset_min = 200.0;  // gesture trails the utterance by U(min,max)
    Millis gesture_offset_max = 1500.0;
    Millis interaction_gap_ms = 6000.0; // spacing between interactions
    double hand_noise = 0.03;           // pointing scatter around the target
};

// Synthesizes n interactions of the given kind against the scene. Times are
// whole milliseconds. describe_ambiguous requires a class with >= 2 instances
// in the scene (Error{invalid_arg} otherwise); its utterances are all deictic.
Trace generate_scenario(ScenarioOp op, const SceneContext& scene, int n, Seed seed,
                        const ScenarioOptions& opt = {});

// Ground truth view of one interaction, assembled from its trace events.
GroundTruth interaction_truth(const Trace& trace, int interaction);

} // namespace mmf

#endif
