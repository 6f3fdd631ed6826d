#include "mmf/engines.hpp"

#include <algorithm>
#include <cmath>

#include "mmf/lexicon.hpp"

namespace mmf {

const char* aural_op_name(AuralOp op) {
    switch (op) {
    case AuralOp::locate: return "locate";
    case AuralOp::describe_explicit: return "describe";
    case AuralOp::describe_ambiguous: return "describe_this";
    case AuralOp::no_op: return "no_op";
    }
    return "?";
}

const char* gesture_label_name(GestureLabel label) {
    switch (label) {
    case GestureLabel::pointing: return "pointing";
    case GestureLabel::zoom_in: return "zoom_in";
    case GestureLabel::zoom_out: return "zoom_out";
    case GestureLabel::capture: return "capture";
    }
    return "?";
}

std::optional<GestureLabel> gesture_label_from(std::string_view s) {
    if (s == "pointing") return GestureLabel::pointing;
    if (s == "zoom_in") return GestureLabel::zoom_in;
    if (s == "zoom_out") return GestureLabel::zoom_out;
    if (s == "capture") return GestureLabel::capture;
    return std::nullopt;
}

AsrResult simulate_asr(std::span<const std::string> keywords, Tier tier,
                       const ProfileSet& p, Rng& rng) {
    const auto& tp = p.asr.tier(tier);
    AsrResult out;
    for (const auto& kw : keywords)
        if (rng.bernoulli(tp.success_prob)) out.keywords.push_back(kw);
    double base = tp.base_latency_ms + (tier == Tier::L ? p.cloud_rtt_ms : 0.0);
    double jitter = tp.latency_jitter_ms > 0.0
                        ? rng.uniform(-tp.latency_jitter_ms, tp.latency_jitter_ms)
                        : 0.0;
    out.latency_ms = std::max(0.0, base + jitter);
    return out;
}

std::optional<AuralOp> op_word_family(std::string_view keyword) {
    if (keyword == "locate" || keyword == "find" || keyword == "where" || keyword == "spot")
        return AuralOp::locate;
    if (keyword == "describe" || keyword == "what" || keyword == "explain" || keyword == "tell")
        return AuralOp::describe_explicit;
    return std::nullopt;
}

AuralToken classify_text(const AsrResult& asr, Tier tier, const ProfileSet& p, Rng& rng) {
    const auto& tp = p.tc.tier(tier);
    AuralToken tok;
    double jitter = tp.latency_jitter_ms > 0.0
                        ? rng.uniform(-tp.latency_jitter_ms, tp.latency_jitter_ms)
                        : 0.0;
    tok.tc_ms = std::max(0.0, tp.base_latency_ms + jitter);
    tok.asr_ms = asr.latency_ms;

    std::optional<AuralOp> spoken_op;
    for (const auto& kw : asr.keywords) {
        if (auto fam = op_word_family(kw)) {
            spoken_op = fam;
            break;
        }
    }
    auto object_hit = Lexicon::builtin().lookup(asr.keywords);

    AuralOp drawn;
    if (spoken_op) {
        AuralOp sibling = *spoken_op == AuralOp::locate ? AuralOp::describe_explicit
                                                        : AuralOp::locate;
        if (rng.bernoulli(tp.success_prob)) {
            drawn = *spoken_op;
        } else if (rng.bernoulli(p.tc_noop_weight)) {
            drawn = AuralOp::no_op;
        } else {
            drawn = sibling;
        }
    } else if (object_hit) {
        // operation word lost in transcription: uniform guess over the labels
        switch (rng.uniform_index(3)) {
        case 0: drawn = AuralOp::locate; break;
        case 1: drawn = AuralOp::describe_explicit; break;
        default: drawn = AuralOp::no_op; break;
        }
    } else {
        tok.op = AuralOp::no_op; // nothing actionable survived (or chatter)
        return tok;
    }

    if (drawn == AuralOp::no_op) {
        tok.op = AuralOp::no_op;
        return tok;
    }
    if (!object_hit) {
        tok.op = AuralOp::no_op; // command without a recoverable object
        return tok;
    }
    tok.object_class = object_hit->class_id;
    tok.multiplicity = object_hit->multiplicity;

    bool deictic_survived =
        std::find(asr.keywords.begin(), asr.keywords.end(), "this") != asr.keywords.end();
    if (drawn == AuralOp::describe_explicit && deictic_survived &&
        tok.multiplicity == Multiplicity::singular)
        drawn = AuralOp::describe_ambiguous;
    tok.op = drawn;
    return tok;
}

GestureToken recognize_gesture(GestureLabel truth, const Point& hand, Tier tier,
                               const ProfileSet& p, Rng& rng) {
    const auto& tp = p.gr.tier(tier);
    GestureToken tok;
    GestureLabel label = truth;
    if (!rng.bernoulli(tp.success_prob)) {
        // uniform confusion over the three other labels
        static const GestureLabel all[4] = {GestureLabel::pointing, GestureLabel::zoom_in,
                                            GestureLabel::zoom_out, GestureLabel::capture};
        GestureLabel others[3];
        int k = 0;
        for (auto l : all)
            if (l != truth) others[k++] = l;
        label = others[rng.uniform_index(3)];
    }
    tok.label = label;
    if (label == GestureLabel::pointing) tok.hand = hand;
    double jitter = tp.latency_jitter_ms > 0.0
                        ? rng.uniform(-tp.latency_jitter_ms, tp.latency_jitter_ms)
                        : 0.0;
    tok.gr_ms = std::max(0.0, p.gr_window_fill_ms + tp.base_latency_ms + jitter);
    return tok;
}

VisionResult detect_objects(std::span<const SceneObject> candidates,
                            const std::set<int>& wanted_classes, Tier tier,
                            int frames, const ProfileSet& p, Rng& rng) {
    if (frames < 1) throw Error(Errc::invalid_arg, "detect_objects: frames must be >= 1");
    const auto& tp = p.od.tier(tier);
    VisionResult out;
    out.frames = frames;
    out.tier_used = tier;
    for (size_t i = 0; i < candidates.size(); ++i) {
        const auto& obj = candidates[i];
        if (!wanted_classes.count(obj.class_id)) continue;
        double prob = detection_probability(obj, tp.success_prob, p.scene.size_factor_small,
                                            p.scene.distance_lambda);
        if (!rng.bernoulli(prob)) continue;
        Detection d;
        d.class_id = obj.class_id;
        d.position.x = clamp01(obj.position.x +
                               rng.uniform(-p.od_position_noise, p.od_position_noise));
        d.position.y = clamp01(obj.position.y +
                               rng.uniform(-p.od_position_noise, p.od_position_noise));
        d.confidence = prob;
        d.source_object = static_cast<int>(i);
        out.detections.push_back(d);
    }
    double jitter = tp.latency_jitter_ms > 0.0
                        ? rng.uniform(-tp.latency_jitter_ms, tp.latency_jitter_ms)
                        : 0.0;
    out.elapsed_ms = std::max(0.0, frames * tp.base_latency_ms + jitter);
    return out;
}

std::vector<Detection> track_object(const Detection& start, int frames,
                                    const ProfileSet& p, Rng& rng) {
    if (frames < 1) throw Error(Errc::invalid_arg, "track_object: frames must be >= 1");
    std::vector<Detection> out;
    out.reserve(static_cast<size_t>(frames));
    out.push_back(start);
    for (int f = 1; f < frames; ++f) {
        Detection d = out.back();
        d.position.x = clamp01(d.position.x + rng.uniform(-p.track_step, p.track_step));
        d.position.y = clamp01(d.position.y + rng.uniform(-p.track_step, p.track_step));
        out.push_back(d);
    }
    return out;
}

} // namespace mmf
