#include "mmf/syncq.hpp"

#include <algorithm>
#include <cmath>

namespace mmf {

// ---- CommQueue -------------------------------------------------------------

CommQueue::CommQueue(size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw Error(Errc::invalid_arg, "queue: capacity must be positive");
}

void CommQueue::enqueue(TokenEnvelope env) {
    std::unique_lock lock(mu_);
    not_full_.wait(lock, [&] { return closed_ || items_.size() < capacity_; });
    if (closed_) throw Error(Errc::state, "queue: enqueue after close");
    env.seq = next_seq_++;
    items_.push_back(std::move(env));
    not_empty_.notify_one();
}

bool CommQueue::try_enqueue(TokenEnvelope env) {
    std::lock_guard lock(mu_);
    if (closed_) throw Error(Errc::state, "queue: enqueue after close");
    if (items_.size() >= capacity_) return false;
    env.seq = next_seq_++;
    items_.push_back(std::move(env));
    not_empty_.notify_one();
    return true;
}

std::optional<TokenEnvelope> CommQueue::dequeue() {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return closed_ || !items_.empty(); });
    if (items_.empty()) return std::nullopt; // closed and drained
    TokenEnvelope env = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return env;
}

std::optional<TokenEnvelope> CommQueue::try_dequeue() {
    std::lock_guard lock(mu_);
    if (items_.empty()) return std::nullopt;
    TokenEnvelope env = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return env;
}

void CommQueue::close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
}

bool CommQueue::closed() const {
    std::lock_guard lock(mu_);
    return closed_;
}

size_t CommQueue::size() const {
    std::lock_guard lock(mu_);
    return items_.size();
}

// ---- SoftMatcher -----------------------------------------------------------

SoftMatcher::SoftMatcher(Millis window_ms) : window_(window_ms) {
    if (window_ms < 0.0) throw Error(Errc::invalid_arg, "matcher: window must be nonnegative");
}

namespace {

bool is_pointing(const TokenEnvelope& env) {
    return !env.is_aural() && env.gesture().label == GestureLabel::pointing;
}

} // namespace

void SoftMatcher::push(TokenEnvelope env) {
    if (env.capture_t < watermark_)
        throw Error(Errc::state, "matcher: capture times must be nondecreasing");
    watermark_ = env.capture_t;

    // everyone whose window closed strictly before this capture leaves first
    flush_until(env.capture_t, false);

    if (!env.is_aural()) {
        const auto& g = env.gesture();
        if (g.label != GestureLabel::pointing) {
            // zoom/capture act alone; no utterance needed
            emit_single(env, false);
            return;
        }
        // pointing: look for a waiting deictic describe, closest capture wins
        int best = find_partner(env, /*want_aural=*/true);
        if (best >= 0) {
            TokenEnvelope aural = pending_[static_cast<size_t>(best)].env;
            pending_.erase(pending_.begin() + best);
            emit_pair(aural, env);
        } else {
            pending_.push_back({env, env.capture_t + window_});
        }
        return;
    }

    if (env.aural().op != AuralOp::describe_ambiguous) {
        // no gesture could change the meaning; act on it immediately
        emit_single(env, false);
        return;
    }

    // deictic describe: pair with the waiting pointing of smallest gap
    int best = find_partner(env, /*want_aural=*/false);
    if (best >= 0) {
        TokenEnvelope gesture = pending_[static_cast<size_t>(best)].env;
        pending_.erase(pending_.begin() + best);
        emit_pair(env, gesture);
    } else {
        pending_.push_back({env, env.capture_t + window_});
    }
}

int SoftMatcher::find_partner(const TokenEnvelope& env, bool want_aural) const {
    int best = -1;
    double best_gap = 0.0;
    for (size_t i = 0; i < pending_.size(); ++i) {
        const auto& cand = pending_[i].env;
        if (want_aural ? !cand.is_aural() : !is_pointing(cand)) continue;
        double gap = std::abs(env.capture_t - cand.capture_t);
        if (gap > window_) continue;
        if (best < 0 || gap < best_gap) {
            best = static_cast<int>(i);
            best_gap = gap;
        }
    }
    return best;
}

void SoftMatcher::advance(Millis capture_now) {
    watermark_ = std::max(watermark_, capture_now);
    flush_until(capture_now, false);
}

void SoftMatcher::finish() { flush_until(0.0, true); }

void SoftMatcher::flush_until(Millis capture_now, bool all) {
    // pending_ holds capture order, so deadlines are nondecreasing too
    while (!pending_.empty() &&
           (all || pending_.front().deadline < capture_now)) {
        TokenEnvelope env = pending_.front().env;
        pending_.erase(pending_.begin());
        emit_single(env, true);
    }
}

void SoftMatcher::emit_pair(const TokenEnvelope& aural, const TokenEnvelope& gesture) {
    MatchedBundle b;
    b.aural = aural.aural();
    b.gesture = gesture.gesture();
    b.anchor_t = std::max(aural.capture_t, gesture.capture_t);
    b.ready_t = std::max(aural.enqueue_t, gesture.enqueue_t);
    ready_.push_back(std::move(b));
}

void SoftMatcher::emit_single(const TokenEnvelope& env, bool expired) {
    MatchedBundle b;
    if (env.is_aural())
        b.aural = env.aural();
    else
        b.gesture = env.gesture();
    b.anchor_t = expired ? env.capture_t + window_ : env.capture_t;
    b.ready_t = std::max(env.enqueue_t, b.anchor_t);
    ready_.push_back(std::move(b));
}

std::vector<MatchedBundle> SoftMatcher::take_ready() {
    std::vector<MatchedBundle> out;
    out.swap(ready_);
    return out;
}

// ---- VisionGate -------------------------------------------------------------

void VisionGate::post(VisionResult result) {
    if (slot_) throw Error(Errc::state, "vision gate: a request is already outstanding");
    slot_ = std::move(result);
}

std::optional<VisionResult> VisionGate::await(Millis timeout_ms) {
    if (!slot_) throw Error(Errc::state, "vision gate: no outstanding request");
    std::optional<VisionResult> taken;
    taken.swap(slot_);
    if (taken->elapsed_ms <= timeout_ms) return taken;
    return std::nullopt; // too slow; result abandoned
}

} // namespace mmf
