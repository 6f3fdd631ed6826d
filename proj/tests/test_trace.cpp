#include <doctest.h>

#include <cmath>
#include <set>

#include "mmf/lexicon.hpp"
#include "mmf/trace.hpp"

using namespace mmf;

namespace {

bool events_equal(const TraceEvent& a, const TraceEvent& b) {
    if (a.kind != b.kind || a.t != b.t || a.interaction != b.interaction) return false;
    if (a.targets != b.targets) return false;
    if (a.kind == TraceKind::utterance)
        return a.true_op == b.true_op && a.object_class == b.object_class &&
               a.multiplicity == b.multiplicity && a.deictic == b.deictic &&
               a.keywords == b.keywords;
    if (a.true_label != b.true_label) return false;
    // the hand coordinate is only meaningful (and only serialized) for pointing
    return a.true_label != GestureLabel::pointing ||
           (a.hand.x == b.hand.x && a.hand.y == b.hand.y);
}

SceneContext dup_scene() {
    const auto& lex = Lexicon::builtin();
    SceneContext scene;
    scene.name = "dup";
    SceneObject o;
    o.class_id = *lex.class_of("cup");
    o.position = {0.2, 0.3};
    scene.objects.push_back(o);
    o.position = {0.8, 0.7};
    scene.objects.push_back(o);
    o.class_id = *lex.class_of("book");
    o.position = {0.5, 0.5};
    scene.objects.push_back(o);
    return scene;
}

} // namespace

TEST_CASE("generated traces round trip through the line format exactly") {
    SceneContext a = load_context("A");
    SceneContext dups = dup_scene();
    struct Case {
        ScenarioOp op;
        const SceneContext* scene;
    } cases[] = {
        {ScenarioOp::locate, &a},
        {ScenarioOp::describe, &a},
        {ScenarioOp::describe_ambiguous, &dups},
        {ScenarioOp::zoom, &a},
        {ScenarioOp::capture, &a},
    };
    for (const auto& c : cases) {
        Trace t = generate_scenario(c.op, *c.scene, 12, 99);
        Trace back = parse_trace(serialize_trace(t));
        REQUIRE(back.events.size() == t.events.size());
        for (size_t i = 0; i < t.events.size(); ++i) CHECK(events_equal(t.events[i], back.events[i]));
        CHECK(serialize_trace(back) == serialize_trace(t));
    }
}

TEST_CASE("parser accepts comments and blank lines, reports bad lines by number") {
    Trace t = parse_trace("# header comment\n\nu t=0 inter=0 op=locate kw=locate,cup target=4\n");
    REQUIRE(t.events.size() == 1);
    CHECK(t.events[0].keywords.size() == 2);
    CHECK(t.events[0].targets == std::vector<int>{4});

    auto fails_with = [](const std::string& text, const char* needle) {
        try {
            parse_trace(text);
            return false;
        } catch (const Error& e) {
            return std::string(e.what()).find(needle) != std::string::npos;
        }
    };
    CHECK(fails_with("x t=0\n", "line 1"));
    CHECK(fails_with("u t=0 inter=0 op=fly kw=a\n", "op must be"));
    CHECK(fails_with("u inter=0 op=locate kw=locate,cup\n", "missing t="));
    CHECK(fails_with("u t=0 inter=0 op=locate\n", "needs kw="));
    CHECK(fails_with("g t=0 inter=0\n", "missing label="));
    CHECK(fails_with("g t=0 inter=0 label=pointing\n", "needs x="));
    CHECK(fails_with("g t=0 inter=0 label=wave\n", "unknown gesture label"));
    CHECK(fails_with("u t=5 inter=0 op=locate kw=locate,cup\nu t=4 inter=1 op=locate kw=locate,cup\n",
                     "nondecreasing"));
    CHECK(fails_with("u t=0 inter=0 op=locate obj=unicorn kw=locate,cup\n", "unknown object"));
    CHECK(fails_with("u t=0 inter=0 op=locate kw=locate,cup zz=1\n", "unknown key"));
}

TEST_CASE("multi-word object names survive the trace format") {
    const auto& lex = Lexicon::builtin();
    TraceEvent ev;
    ev.kind = TraceKind::utterance;
    ev.t = 0;
    ev.interaction = 0;
    ev.true_op = AuralOp::locate;
    ev.object_class = *lex.class_of("mobile phone");
    ev.keywords = {"locate", "mobile", "phone"};
    ev.targets = {1};
    Trace t;
    t.events.push_back(ev);
    std::string text = serialize_trace(t);
    CHECK(text.find("obj=mobile_phone") != std::string::npos);
    Trace back = parse_trace(text);
    CHECK(back.events[0].object_class == ev.object_class);
}

TEST_CASE("locate scenarios carry whole-class ground truth and no gestures") {
    SceneContext a = load_context("A");
    Trace t = generate_scenario(ScenarioOp::locate, a, 25, 7);
    int utterances = 0;
    for (const auto& ev : t.events) {
        REQUIRE(ev.kind == TraceKind::utterance);
        ++utterances;
        CHECK(ev.true_op == AuralOp::locate);
        CHECK_FALSE(ev.deictic);
        CHECK(ev.keywords.size() >= 2);
        // ground truth lists every instance of the named class
        CHECK(ev.targets == a.indices_of(ev.object_class));
        CHECK(ev.t == ev.interaction * 6000.0);
    }
    CHECK(utterances == 25);
    CHECK(t.interactions() == 25);
}

TEST_CASE("describe scenarios hit the deictic fraction exactly") {
    SceneContext a = load_context("A");
    ScenarioOptions opt;
    opt.deictic_fraction = 0.5;
    Trace t = generate_scenario(ScenarioOp::describe, a, 10, 3, opt);
    int deictic = 0, gestures = 0;
    for (const auto& ev : t.events) {
        if (ev.kind == TraceKind::utterance && ev.deictic) ++deictic;
        if (ev.kind == TraceKind::gesture) {
            ++gestures;
            CHECK(ev.true_label == GestureLabel::pointing);
        }
    }
    CHECK(deictic == 5);
    CHECK(gestures == 5); // one pointing gesture per deictic describe

    opt.deictic_fraction = 0.0;
    t = generate_scenario(ScenarioOp::describe, a, 10, 3, opt);
    for (const auto& ev : t.events) CHECK(ev.kind == TraceKind::utterance);
}

TEST_CASE("deictic describes keep their utterance when pointing is withheld") {
    SceneContext a = load_context("A");
    ScenarioOptions with, without;
    with.deictic_fraction = without.deictic_fraction = 1.0;
    without.with_pointing = false;

    Trace t_with = generate_scenario(ScenarioOp::describe, a, 15, 11, with);
    Trace t_without = generate_scenario(ScenarioOp::describe, a, 15, 11, without);

    // withholding the gesture must not reshuffle the utterances
    std::vector<const TraceEvent*> u_with, u_without;
    for (const auto& ev : t_with.events)
        if (ev.kind == TraceKind::utterance) u_with.push_back(&ev);
    for (const auto& ev : t_without.events) {
        CHECK(ev.kind == TraceKind::utterance);
        u_without.push_back(&ev);
    }
    REQUIRE(u_with.size() == u_without.size());
    for (size_t i = 0; i < u_with.size(); ++i) CHECK(events_equal(*u_with[i], *u_without[i]));
}

TEST_CASE("gesture offsets stay inside the configured range") {
    SceneContext a = load_context("A");
    ScenarioOptions opt;
    opt.deictic_fraction = 1.0;
    opt.gesture_offset_min = 250.0;
    opt.gesture_offset_max = 900.0;
    Trace t = generate_scenario(ScenarioOp::describe, a, 20, 5, opt);
    Millis base = -1.0;
    for (const auto& ev : t.events) {
        if (ev.kind == TraceKind::utterance) {
            base = ev.t;
        } else {
            Millis offset = ev.t - base;
            CHECK(offset >= 250.0);
            CHECK(offset <= 900.0);
            CHECK(offset == std::round(offset)); // whole milliseconds
        }
    }
}

TEST_CASE("pointing lands near the intended object") {
    SceneContext a = load_context("A");
    ScenarioOptions opt;
    opt.deictic_fraction = 1.0;
    opt.hand_noise = 0.02;
    Trace t = generate_scenario(ScenarioOp::describe, a, 30, 13, opt);
    for (size_t i = 0; i < t.events.size(); ++i) {
        const auto& ev = t.events[i];
        if (ev.kind != TraceKind::gesture) continue;
        REQUIRE(ev.targets.size() == 1);
        const auto& obj = a.objects[static_cast<size_t>(ev.targets[0])];
        CHECK(std::abs(ev.hand.x - obj.position.x) <= 0.02 + 1e-4); // quantized to 1e-4
        CHECK(std::abs(ev.hand.y - obj.position.y) <= 0.02 + 1e-4);
    }
}

TEST_CASE("ambiguous describe needs a duplicated class") {
    SceneContext a = load_context("A"); // all classes unique
    CHECK_THROWS_AS(generate_scenario(ScenarioOp::describe_ambiguous, a, 5, 1), Error);

    SceneContext dups = dup_scene();
    Trace t = generate_scenario(ScenarioOp::describe_ambiguous, dups, 20, 1);
    const auto& lex = Lexicon::builtin();
    for (const auto& ev : t.events) {
        if (ev.kind != TraceKind::utterance) continue;
        CHECK(ev.deictic);
        CHECK(ev.object_class == *lex.class_of("cup")); // the only duplicated class
        REQUIRE(ev.targets.size() == 1);                // one specific instance
    }
}

TEST_CASE("plural commands name the duplicated class and target all instances") {
    SceneContext dups = dup_scene();
    ScenarioOptions opt;
    opt.plural_fraction = 1.0;
    Trace t = generate_scenario(ScenarioOp::locate, dups, 12, 17, opt);
    for (const auto& ev : t.events) {
        CHECK(ev.multiplicity == Multiplicity::plural);
        CHECK(ev.targets.size() == 2);
    }
}

TEST_CASE("zoom and capture scenarios are gesture-only") {
    SceneContext a = load_context("A");
    Trace tz = generate_scenario(ScenarioOp::zoom, a, 10, 23);
    std::set<GestureLabel> seen;
    for (const auto& ev : tz.events) {
        REQUIRE(ev.kind == TraceKind::gesture);
        seen.insert(ev.true_label);
        CHECK((ev.true_label == GestureLabel::zoom_in || ev.true_label == GestureLabel::zoom_out));
    }
    CHECK(seen.size() == 2); // both directions show up across 10 draws

    Trace tc = generate_scenario(ScenarioOp::capture, a, 4, 23);
    for (const auto& ev : tc.events) CHECK(ev.true_label == GestureLabel::capture);
}

TEST_CASE("interaction truth mirrors the trace") {
    SceneContext a = load_context("A");
    ScenarioOptions opt;
    opt.deictic_fraction = 1.0;
    Trace t = generate_scenario(ScenarioOp::describe, a, 5, 31, opt);
    for (int i = 0; i < 5; ++i) {
        GroundTruth truth = interaction_truth(t, i);
        CHECK(truth.expected_op == OutcomeOp::describe);
        CHECK(truth.target_objects.size() == 1);
    }

    Trace tz = generate_scenario(ScenarioOp::zoom, a, 3, 31);
    GroundTruth zt = interaction_truth(tz, 0);
    CHECK(zt.expected_op == OutcomeOp::zoom);
    CHECK(zt.expected_gesture.has_value());

    CHECK_THROWS_AS(interaction_truth(t, 99), Error);
}

TEST_CASE("generation is deterministic in the seed") {
    SceneContext a = load_context("A");
    CHECK(serialize_trace(generate_scenario(ScenarioOp::describe, a, 20, 42)) ==
          serialize_trace(generate_scenario(ScenarioOp::describe, a, 20, 42)));
    CHECK(serialize_trace(generate_scenario(ScenarioOp::describe, a, 20, 42)) !=
          serialize_trace(generate_scenario(ScenarioOp::describe, a, 20, 43)));
}

TEST_CASE("generator rejects bad options") {
    SceneContext a = load_context("A");
    ScenarioOptions opt;
    CHECK_THROWS_AS(generate_scenario(ScenarioOp::locate, a, 0, 1), Error);
    opt.deictic_fraction = 1.5;
    CHECK_THROWS_AS(generate_scenario(ScenarioOp::describe, a, 5, 1, opt), Error);
    opt = {};
    opt.gesture_offset_max = 100.0; // below min
    CHECK_THROWS_AS(generate_scenario(ScenarioOp::describe, a, 5, 1, opt), Error);
    SceneContext empty;
    CHECK_THROWS_AS(generate_scenario(ScenarioOp::locate, empty, 5, 1), Error);
}
