#ifndef MMF_FUSION_HPP
#define MMF_FUSION_HPP

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mmf/config.hpp"
#include "mmf/engines.hpp"
#include "mmf/profiles.hpp"
#include "mmf/scene.hpp"
#include "mmf/syncq.hpp"
#include "mmf/types.hpp"

namespace mmf {

enum class OutcomeOp { locate, describe, zoom, capture, rejected };
const char* outcome_op_name(OutcomeOp op);

enum class RejectReason {
    none,
    no_op_token,       // classifier said the utterance was not a command
    needs_gesture,     // ambiguous describe with no usable pointing gesture
    vision_timeout,    // detector pass exceeded the configured wait
    no_object,         // nothing of the requested class was detected
    unmatched_gesture, // pointing gesture flushed without an utterance
};
const char* reject_reason_name(RejectReason r);

struct StageCost {
    std::string stage; // asr | tc | gesture_wait | vision | vision_escalation | overhead
    Millis ms = 0.0;
};

struct InteractionOutcome {
    int interaction = -1;
    OutcomeOp operation = OutcomeOp::rejected;
    RejectReason reject = RejectReason::none;
    std::vector<Detection> targets;     // what the system acted on
    std::optional<GestureLabel> gesture_effect; // zoom/capture: the applied gesture
    bool escalated = false;             // H-tier retry fired
    std::vector<StageCost> breakdown;   // sums to total_latency_ms
    Millis total_latency_ms = 0.0;
    std::optional<bool> correct;        // only when ground truth was supplied
};

// Zoom/capture side effects land here.
struct ViewportState {
    double zoom_level = 1.0;
    std::vector<int> captured_frames;

    static constexpr double zoom_min = 1.0;
    static constexpr double zoom_max = 4.0;
    static constexpr double zoom_step = 1.5;
};

// Zoom steps are multiplicative and clamp to [1, 4]; wrong-label calls are
// Error{invalid_arg}.
void apply_zoom(const GestureToken& g, ViewportState& vp);
void apply_capture(const GestureToken& g, ViewportState& vp, int frame_id);

// Ground truth for scoring one interaction (from the trace generator).
struct GroundTruth {
    OutcomeOp expected_op = OutcomeOp::rejected;
    std::vector<int> target_objects;    // scene indices that should be acted on
    std::optional<GestureLabel> expected_gesture;
};

// Detector seam: the simulator binds this to detect_objects() with the
// interaction's RNG stream; tests may substitute canned responses.
using VisionFn = std::function<VisionResult(std::span<const SceneObject> candidates,
                                            const std::set<int>& wanted, Tier tier,
                                            int frames)>;

class FusionEngine {
public:
    FusionEngine(const FusionConfig& cfg, const SceneContext& scene,
                 const ProfileSet& profiles, VisionFn vision);

    // Resolves one matched bundle into an outcome, applying viewport side
    // effects. When ground truth is given, outcome.correct says whether the
    // system acted on exactly the expected scene objects (target-based: the
    // locate/describe distinction does not matter for scoring as long as the
    // right thing was acted on).
    InteractionOutcome fuse(const MatchedBundle& bundle,
                            const GroundTruth* truth = nullptr);

    const ViewportState& viewport() const { return viewport_; }
    ViewportState& viewport() { return viewport_; }

private:
    struct VisionOutcome {
        std::optional<VisionResult> result; // nullopt = timeout
        Millis first_pass_ms = 0.0;
        Millis escalation_ms = 0.0;
        bool escalated = false;
    };

    InteractionOutcome resolve_locate(const AuralToken& a, const MatchedBundle& bundle);
    InteractionOutcome resolve_describe(const AuralToken& a, const MatchedBundle& bundle);
    // One detector request over `candidates`, retried once at H tier when an
    // L-tier pass finds nothing of target_class (and escalation is on).
    VisionOutcome run_detector(std::span<const SceneObject> candidates,
                               const std::set<int>& wanted, int target_class);
    void finish_outcome(InteractionOutcome& out, const MatchedBundle& bundle,
                        const VisionOutcome* vision, const GroundTruth* truth);
    void score_outcome(InteractionOutcome& out, const GroundTruth* truth);

    FusionConfig cfg_;
    const SceneContext& scene_;
    const ProfileSet& profiles_;
    VisionFn vision_;
    ViewportState viewport_;
    int next_capture_id_ = 0;
};

// Scores an outcome against ground truth: the acted-on source objects must
// equal the expected target set (order-insensitive); gesture-only operations
// must match the expected gesture effect.
bool outcome_matches_truth(const InteractionOutcome& out, const GroundTruth& truth);

} // namespace mmf

#endif
