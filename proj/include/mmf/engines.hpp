#ifndef MMF_ENGINES_HPP
#define MMF_ENGINES_HPP

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mmf/profiles.hpp"
#include "mmf/rng.hpp"
#include "mmf/scene.hpp"
#include "mmf/types.hpp"

namespace mmf {

// ---- aural path -----------------------------------------------------------

enum class AuralOp {
    locate,             // highlight where something is
    describe_explicit,  // describe a named object
    describe_ambiguous, // "describe this ..." -> needs the pointing gesture
    no_op,              // not a command (or nothing actionable survived ASR)
};
const char* aural_op_name(AuralOp op);

struct AuralToken {
    AuralOp op = AuralOp::no_op;
    std::optional<int> object_class;           // absent only for no_op
    Multiplicity multiplicity = Multiplicity::singular;
    Millis t = 0.0;                            // utterance capture time
    int interaction = -1;
    // stage costs, kept on the token so fusion can report a breakdown
    Millis asr_ms = 0.0;
    Millis tc_ms = 0.0;
};

// What survived transcription. Keyword list keeps utterance order.
struct AsrResult {
    std::vector<std::string> keywords;
    Millis latency_ms = 0.0;
};

// Per-keyword survival model: each keyword independently survives with the
// tier's success_prob; latency = base (+ cloud RTT on L) +/- jitter.
AsrResult simulate_asr(std::span<const std::string> keywords, Tier tier,
                       const ProfileSet& p, Rng& rng);

// Maps surviving keywords to a command token, with no access to ground
// truth. A surviving operation word ("locate"/"find"/... vs
// "describe"/"what"/...) yields its command with the tier's success
// probability, otherwise a confusion (mostly the sibling command,
// occasionally no_op). With the operation word lost but an object word
// present, the classifier guesses uniformly across the three labels; with
// nothing actionable left it emits no_op. A command token without a
// recoverable object word also degrades to no_op.
AuralToken classify_text(const AsrResult& asr, Tier tier, const ProfileSet& p, Rng& rng);

// The operation families the classifier understands.
std::optional<AuralOp> op_word_family(std::string_view keyword);

// ---- gestural path ----------------------------------------------------------

enum class GestureLabel { pointing, zoom_in, zoom_out, capture };
const char* gesture_label_name(GestureLabel label);
std::optional<GestureLabel> gesture_label_from(std::string_view s);

struct GestureToken {
    GestureLabel label = GestureLabel::pointing;
    std::optional<Point> hand;  // present iff label == pointing
    Millis t = 0.0;             // gesture capture time
    int interaction = -1;
    Millis gr_ms = 0.0;         // window fill + classifier + jitter
};

// Classifies one performed gesture: correct with the tier's recall, otherwise
// a uniform draw over the remaining labels. Latency is the fixed sample
// window fill plus the tier's classifier cost.
GestureToken recognize_gesture(GestureLabel truth, const Point& hand, Tier tier,
                               const ProfileSet& p, Rng& rng);

// ---- vision path ------------------------------------------------------------

struct VisionResult {
    std::vector<Detection> detections;
    int frames = 0;
    Millis elapsed_ms = 0.0;
    Tier tier_used = Tier::H;
};

// Scans `frames` frames for the wanted classes over the candidate object
// list. Each candidate of a wanted class is detected with
// detection_probability(); hits carry noisy positions and the model's
// confidence. elapsed = frames * per-frame latency (+/- jitter).
VisionResult detect_objects(std::span<const SceneObject> candidates,
                            const std::set<int>& wanted_classes, Tier tier,
                            int frames, const ProfileSet& p, Rng& rng);

// Follows one detection across `frames` frames as a bounded random walk
// (stand-in for a correlation tracker). First entry is the input detection.
std::vector<Detection> track_object(const Detection& start, int frames,
                                    const ProfileSet& p, Rng& rng);

} // namespace mmf

#endif
