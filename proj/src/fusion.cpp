#include "mmf/fusion.hpp"

#include <algorithm>

#include "mmf/lexicon.hpp"

namespace mmf {

const char* outcome_op_name(OutcomeOp op) {
    switch (op) {
    case OutcomeOp::locate: return "locate";
    case OutcomeOp::describe: return "describe";
    case OutcomeOp::zoom: return "zoom";
    case OutcomeOp::capture: return "capture";
    case OutcomeOp::rejected: return "rejected";
    }
    return "?";
}

const char* reject_reason_name(RejectReason r) {
    switch (r) {
    case RejectReason::none: return "none";
    case RejectReason::no_op_token: return "no_op_token";
    case RejectReason::needs_gesture: return "needs_gesture";
    case RejectReason::vision_timeout: return "vision_timeout";
    case RejectReason::no_object: return "no_object";
    case RejectReason::unmatched_gesture: return "unmatched_gesture";
    }
    return "?";
}

void apply_zoom(const GestureToken& g, ViewportState& vp) {
    if (g.label == GestureLabel::zoom_in)
        vp.zoom_level = std::min(ViewportState::zoom_max, vp.zoom_level * ViewportState::zoom_step);
    else if (g.label == GestureLabel::zoom_out)
        vp.zoom_level = std::max(ViewportState::zoom_min, vp.zoom_level / ViewportState::zoom_step);
    else
        throw Error(Errc::invalid_arg, "apply_zoom: gesture is not a zoom");
}

void apply_capture(const GestureToken& g, ViewportState& vp, int frame_id) {
    if (g.label != GestureLabel::capture)
        throw Error(Errc::invalid_arg, "apply_capture: gesture is not a capture");
    vp.captured_frames.push_back(frame_id);
}

FusionEngine::FusionEngine(const FusionConfig& cfg, const SceneContext& scene,
                           const ProfileSet& profiles, VisionFn vision)
    : cfg_(cfg), scene_(scene), profiles_(profiles), vision_(std::move(vision)) {
    cfg_.validate();
    if (!vision_) throw Error(Errc::invalid_arg, "fusion: vision callback required");
}

namespace {

std::vector<Detection> detections_of_class(const VisionResult& vr, int class_id) {
    std::vector<Detection> out;
    for (const auto& d : vr.detections)
        if (d.class_id == class_id) out.push_back(d);
    return out;
}

} // namespace

FusionEngine::VisionOutcome FusionEngine::run_detector(std::span<const SceneObject> candidates,
                                                       const std::set<int>& wanted,
                                                       int target_class) {
    VisionOutcome out;
    VisionResult first = vision_(candidates, wanted, cfg_.od, cfg_.frames_per_detect);
    if (first.elapsed_ms > cfg_.vision_timeout_ms) {
        out.first_pass_ms = cfg_.vision_timeout_ms; // waited the full budget, then gave up
        return out;
    }
    out.first_pass_ms = first.elapsed_ms;

    bool found_target = !detections_of_class(first, target_class).empty();
    if (found_target || !cfg_.escalation_enabled || cfg_.od == Tier::H) {
        out.result = std::move(first);
        return out;
    }

    // L tier came back empty-handed: one H-tier retry on the same classes
    out.escalated = true;
    VisionResult second = vision_(candidates, wanted, Tier::H, cfg_.frames_per_detect);
    if (second.elapsed_ms > cfg_.vision_timeout_ms) {
        out.escalation_ms = cfg_.vision_timeout_ms;
        return out;
    }
    out.escalation_ms = second.elapsed_ms;
    out.result = std::move(second);
    return out;
}

InteractionOutcome FusionEngine::resolve_locate(const AuralToken& a,
                                                const MatchedBundle& bundle) {
    InteractionOutcome out;
    out.operation = OutcomeOp::locate;
    if (!a.object_class) throw Error(Errc::internal, "locate token without object class");

    VisionOutcome vo = run_detector(scene_.objects, {*a.object_class}, *a.object_class);
    out.escalated = vo.escalated;
    if (!vo.result) {
        out.operation = OutcomeOp::rejected;
        out.reject = RejectReason::vision_timeout;
        finish_outcome(out, bundle, &vo, nullptr);
        return out;
    }
    out.targets = detections_of_class(*vo.result, *a.object_class);
    if (out.targets.empty()) {
        out.operation = OutcomeOp::rejected;
        out.reject = RejectReason::no_object;
    }
    finish_outcome(out, bundle, &vo, nullptr);
    return out;
}

InteractionOutcome FusionEngine::resolve_describe(const AuralToken& a,
                                                  const MatchedBundle& bundle) {
    InteractionOutcome out;
    out.operation = OutcomeOp::describe;
    if (!a.object_class) throw Error(Errc::internal, "describe token without object class");
    int cls = *a.object_class;

    bool deictic = a.op == AuralOp::describe_ambiguous;
    const GestureToken* pointer = nullptr;
    if (bundle.gesture && bundle.gesture->label == GestureLabel::pointing &&
        bundle.gesture->hand)
        pointer = &*bundle.gesture;

    if (deictic && !pointer) {
        out.operation = OutcomeOp::rejected;
        out.reject = RejectReason::needs_gesture;
        finish_outcome(out, bundle, nullptr, nullptr);
        return out;
    }

    // Deictic runs with the user's hand as an extra detector candidate so
    // the pointing anchor comes out of the same vision pass.
    std::set<int> wanted{cls};
    std::vector<SceneObject> pool(scene_.objects.begin(), scene_.objects.end());
    if (deictic) {
        wanted.insert(Lexicon::hand_class);
        SceneObject hand;
        hand.class_id = Lexicon::hand_class;
        hand.size_class = SizeClass::small;
        hand.distance_m = profiles_.scene.hand_distance_m;
        hand.position = *pointer->hand;
        pool.push_back(hand);
    }

    VisionOutcome vo = run_detector(pool, wanted, cls);
    out.escalated = vo.escalated;
    if (!vo.result) {
        out.operation = OutcomeOp::rejected;
        out.reject = RejectReason::vision_timeout;
        finish_outcome(out, bundle, &vo, nullptr);
        return out;
    }

    std::vector<Detection> candidates = detections_of_class(*vo.result, cls);
    if (candidates.empty()) {
        out.operation = OutcomeOp::rejected;
        out.reject = RejectReason::no_object;
        finish_outcome(out, bundle, &vo, nullptr);
        return out;
    }

    if (a.multiplicity == Multiplicity::plural) {
        out.targets = candidates; // describe them all
        finish_outcome(out, bundle, &vo, nullptr);
        return out;
    }

    if (deictic) {
        // anchor at the detected hand when vision found it, else at the raw
        // gesture coordinate
        Point anchor = *pointer->hand;
        auto hands = detections_of_class(*vo.result, Lexicon::hand_class);
        if (!hands.empty())
            anchor = hands[nearest_detection(hands, *pointer->hand)].position;
        size_t pick = nearest_detection(candidates, anchor);
        out.targets = {candidates[pick]};
        finish_outcome(out, bundle, &vo, nullptr);
        return out;
    }

    // explicit singular describe: highest-confidence detection, lowest index on ties
    size_t pick = 0;
    for (size_t i = 1; i < candidates.size(); ++i)
        if (candidates[i].confidence > candidates[pick].confidence) pick = i;
    out.targets = {candidates[pick]};
    finish_outcome(out, bundle, &vo, nullptr);
    return out;
}

InteractionOutcome FusionEngine::fuse(const MatchedBundle& bundle, const GroundTruth* truth) {
    if (!bundle.aural && !bundle.gesture)
        throw Error(Errc::invalid_arg, "fuse: empty bundle");

    InteractionOutcome out;
    if (bundle.aural) {
        const AuralToken& a = *bundle.aural;
        out.interaction = a.interaction;
        switch (a.op) {
        case AuralOp::no_op:
            out.operation = OutcomeOp::rejected;
            out.reject = RejectReason::no_op_token;
            finish_outcome(out, bundle, nullptr, truth);
            return out;
        case AuralOp::locate:
            out = resolve_locate(a, bundle);
            break;
        case AuralOp::describe_explicit:
        case AuralOp::describe_ambiguous:
            out = resolve_describe(a, bundle);
            break;
        }
        out.interaction = a.interaction;
        score_outcome(out, truth);
        return out;
    }

    const GestureToken& g = *bundle.gesture;
    out.interaction = g.interaction;
    switch (g.label) {
    case GestureLabel::zoom_in:
    case GestureLabel::zoom_out:
        apply_zoom(g, viewport_);
        out.operation = OutcomeOp::zoom;
        out.gesture_effect = g.label;
        break;
    case GestureLabel::capture:
        apply_capture(g, viewport_, next_capture_id_++);
        out.operation = OutcomeOp::capture;
        out.gesture_effect = g.label;
        break;
    case GestureLabel::pointing:
        out.operation = OutcomeOp::rejected;
        out.reject = RejectReason::unmatched_gesture;
        break;
    }
    finish_outcome(out, bundle, nullptr, truth);
    return out;
}

void FusionEngine::finish_outcome(InteractionOutcome& out, const MatchedBundle& bundle,
                                  const VisionOutcome* vision, const GroundTruth* truth) {
    out.breakdown.clear();
    Millis start, pre_vision;
    if (bundle.aural) {
        const AuralToken& a = *bundle.aural;
        start = a.t;
        Millis aural_done = a.t + a.asr_ms + a.tc_ms;
        pre_vision = std::max(bundle.ready_t, aural_done) - start;
        out.breakdown.push_back({"asr", a.asr_ms});
        out.breakdown.push_back({"tc", a.tc_ms});
        Millis wait = pre_vision - a.asr_ms - a.tc_ms;
        if (wait > 1e-9 || bundle.gesture) out.breakdown.push_back({"gesture_wait", std::max(0.0, wait)});
    } else {
        const GestureToken& g = *bundle.gesture;
        start = g.t;
        pre_vision = std::max(bundle.ready_t, g.t + g.gr_ms) - start;
        out.breakdown.push_back({"gesture_wait", pre_vision});
    }
    if (vision) {
        out.breakdown.push_back({"vision", vision->first_pass_ms});
        if (vision->escalated)
            out.breakdown.push_back({"vision_escalation", vision->escalation_ms});
    }
    out.breakdown.push_back({"overhead", profiles_.fusion_overhead_ms});

    out.total_latency_ms = 0.0;
    for (const auto& s : out.breakdown) out.total_latency_ms += s.ms;
    score_outcome(out, truth);
}

void FusionEngine::score_outcome(InteractionOutcome& out, const GroundTruth* truth) {
    if (!truth) return;
    out.correct = outcome_matches_truth(out, *truth);
}

bool outcome_matches_truth(const InteractionOutcome& out, const GroundTruth& truth) {
    switch (truth.expected_op) {
    case OutcomeOp::locate:
    case OutcomeOp::describe: {
        if (out.operation != OutcomeOp::locate && out.operation != OutcomeOp::describe)
            return false;
        // target-based: the acted-on scene objects must be exactly the
        // expected ones, whichever of the two commands carried them there
        std::vector<int> acted;
        for (const auto& d : out.targets) acted.push_back(d.source_object);
        std::sort(acted.begin(), acted.end());
        std::vector<int> want = truth.target_objects;
        std::sort(want.begin(), want.end());
        return acted == want && !want.empty();
    }
    case OutcomeOp::zoom:
        return out.operation == OutcomeOp::zoom && out.gesture_effect &&
               truth.expected_gesture && *out.gesture_effect == *truth.expected_gesture;
    case OutcomeOp::capture:
        return out.operation == OutcomeOp::capture;
    case OutcomeOp::rejected:
        return out.operation == OutcomeOp::rejected; // chatter should stay rejected
    }
    return false;
}

} // namespace mmf
