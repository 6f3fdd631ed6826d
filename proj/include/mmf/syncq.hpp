#ifndef MMF_SYNCQ_HPP
#define MMF_SYNCQ_HPP

#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <variant>
#include <vector>

#include "mmf/engines.hpp"
#include "mmf/types.hpp"

namespace mmf {

// One modality output in flight between an engine and the fusion consumer.
// capture_t is when the user acted; enqueue_t is when the engine finished
// (capture + engine latency). Matching works in capture time so a slow
// engine cannot starve its own modality out of the pairing window.
struct TokenEnvelope {
    std::variant<AuralToken, GestureToken> payload;
    Millis capture_t = 0.0;
    Millis enqueue_t = 0.0;
    int producer = 0;
    uint64_t seq = 0; // assigned by the queue/matcher, total order tie-break

    bool is_aural() const { return payload.index() == 0; }
    const AuralToken& aural() const { return std::get<AuralToken>(payload); }
    const GestureToken& gesture() const { return std::get<GestureToken>(payload); }
};

// A fused unit of user intent handed to the fusion engine.
struct MatchedBundle {
    std::optional<AuralToken> aural;
    std::optional<GestureToken> gesture;
    Millis anchor_t = 0.0; // capture-domain decision time (pair or flush)
    Millis ready_t = 0.0;  // earliest virtual time fusion may act (max enqueue)
};

// Bounded MPSC queue used by the live (threaded) pipeline. enqueue blocks
// while full; dequeue blocks while empty; close() wakes everyone and makes
// further enqueues an Error{state}.
class CommQueue {
public:
    explicit CommQueue(size_t capacity = 64);

    void enqueue(TokenEnvelope env);
    bool try_enqueue(TokenEnvelope env); // false when full, throws when closed
    std::optional<TokenEnvelope> dequeue();     // nullopt only after close+drain
    std::optional<TokenEnvelope> try_dequeue(); // non-blocking

    void close();
    bool closed() const;
    size_t size() const;
    size_t capacity() const { return capacity_; }

private:
    mutable std::mutex mu_;
    std::condition_variable not_full_, not_empty_;
    std::deque<TokenEnvelope> items_;
    size_t capacity_;
    bool closed_ = false;
    uint64_t next_seq_ = 0;
};

// Soft timestamp matcher. Feed envelopes in nondecreasing capture order;
// bundles come out in decision order:
//   - a non-pointing gesture (zoom/capture) forms a bundle immediately;
//   - self-sufficient aural tokens (locate, explicit describe, no_op) form a
//     bundle immediately: they cannot use a gesture, so they never wait;
//   - a deictic describe pairs with the pending pointing gesture of minimum
//     |capture gap| within the window (ties: earliest), and vice versa for
//     an arriving pointing gesture against pending deictic describes;
//   - anything still unpaired is flushed alone once processing time passes
//     its capture + window.
// Every fed token lands in exactly one bundle.
class SoftMatcher {
public:
    explicit SoftMatcher(Millis window_ms);

    void push(TokenEnvelope env);     // may emit bundles into the ready list
    void advance(Millis capture_now); // flush entries whose window has passed
    void finish();                    // flush everything still pending

    std::vector<MatchedBundle> take_ready();
    size_t pending() const { return pending_.size(); }

private:
    struct Pending {
        TokenEnvelope env;
        Millis deadline; // capture_t + window
    };

    void flush_until(Millis capture_now, bool all);
    void emit_pair(const TokenEnvelope& aural, const TokenEnvelope& gesture);
    void emit_single(const TokenEnvelope& env, bool expired);
    int find_partner(const TokenEnvelope& env, bool want_aural) const;

    Millis window_;
    Millis watermark_ = 0.0; // highest capture time seen
    std::vector<Pending> pending_; // capture order (stable)
    std::vector<MatchedBundle> ready_;
};

// Hand-off slot for one outstanding detector request. The fusion engine
// posts the request's completion, then awaits it with a timeout; a result
// slower than the timeout is abandoned (timeout outcome).
class VisionGate {
public:
    void post(VisionResult result);                       // pre: a request is outstanding
    std::optional<VisionResult> await(Millis timeout_ms); // nullopt on timeout
    bool outstanding() const { return static_cast<bool>(slot_); }

private:
    std::optional<VisionResult> slot_;
};

} // namespace mmf

#endif
