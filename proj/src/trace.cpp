#include "mmf/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mmf/lexicon.hpp"

namespace mmf {

int Trace::interactions() const {
    int highest = -1;
    for (const auto& e : events) highest = std::max(highest, e.interaction);
    return highest + 1;
}

std::optional<ScenarioOp> scenario_op_from(std::string_view s) {
    if (s == "locate") return ScenarioOp::locate;
    if (s == "describe") return ScenarioOp::describe;
    if (s == "describe_ambiguous") return ScenarioOp::describe_ambiguous;
    if (s == "zoom") return ScenarioOp::zoom;
    if (s == "capture") return ScenarioOp::capture;
    return std::nullopt;
}

const char* scenario_op_name(ScenarioOp op) {
    switch (op) {
    case ScenarioOp::locate: return "locate";
    case ScenarioOp::describe: return "describe";
    case ScenarioOp::describe_ambiguous: return "describe_ambiguous";
    case ScenarioOp::zoom: return "zoom";
    case ScenarioOp::capture: return "capture";
    }
    return "?";
}

namespace {

std::string fmt_ms(Millis t) {
    char buf[64];
    if (std::abs(t - std::round(t)) < 1e-9)
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(std::llround(t)));
    else
        std::snprintf(buf, sizeof buf, "%.3f", t);
    return buf;
}

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// trace object names use '_' where the lexicon canonical has spaces
std::string trace_name(const std::string& canonical) {
    std::string out = canonical;
    std::replace(out.begin(), out.end(), ' ', '_');
    return out;
}

std::string canonical_name(const std::string& traced) {
    std::string out = traced;
    std::replace(out.begin(), out.end(), '_', ' ');
    return out;
}

[[noreturn]] void fail_line(size_t lineno, const std::string& why) {
    throw Error(Errc::parse, "trace line " + std::to_string(lineno) + ": " + why);
}

double parse_num(const std::string& v, size_t lineno, const char* key) {
    try {
        size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        fail_line(lineno, std::string("bad number for ") + key);
    }
}

} // namespace

Trace parse_trace(const std::string& text) {
    Trace trace;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    Millis last_t = -1.0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head) || head[0] == '#') continue;
        if (head != "u" && head != "g")
            fail_line(lineno, "expected 'u' or 'g' record, got \"" + head + "\"");

        TraceEvent ev;
        ev.kind = head == "u" ? TraceKind::utterance : TraceKind::gesture;
        bool have_t = false, have_inter = false, have_op = false, have_label = false;
        bool have_x = false, have_y = false;
        std::string field;
        while (ls >> field) {
            auto eq = field.find('=');
            if (eq == std::string::npos) fail_line(lineno, "expected key=value, got \"" + field + "\"");
            std::string key = field.substr(0, eq);
            std::string val = field.substr(eq + 1);
            if (key == "t") {
                ev.t = parse_num(val, lineno, "t");
                have_t = true;
            } else if (key == "inter") {
                ev.interaction = static_cast<int>(parse_num(val, lineno, "inter"));
            } else if (key == "op" && ev.kind == TraceKind::utterance) {
                if (val == "locate") ev.true_op = AuralOp::locate;
                else if (val == "describe") ev.true_op = AuralOp::describe_explicit;
                else if (val == "no_op") ev.true_op = AuralOp::no_op;
                else fail_line(lineno, "op must be locate/describe/no_op");
                have_op = true;
            } else if (key == "obj" && ev.kind == TraceKind::utterance) {
                auto id = Lexicon::builtin().class_of(canonical_name(val));
                if (!id) fail_line(lineno, "unknown object class \"" + val + "\"");
                ev.object_class = *id;
            } else if (key == "mult" && ev.kind == TraceKind::utterance) {
                if (val == "s") ev.multiplicity = Multiplicity::singular;
                else if (val == "p") ev.multiplicity = Multiplicity::plural;
                else fail_line(lineno, "mult must be s or p");
            } else if (key == "deictic" && ev.kind == TraceKind::utterance) {
                if (val == "0") ev.deictic = false;
                else if (val == "1") ev.deictic = true;
                else fail_line(lineno, "deictic must be 0 or 1");
            } else if (key == "kw" && ev.kind == TraceKind::utterance) {
                ev.keywords = split(val, ',');
                if (ev.keywords.size() == 1 && ev.keywords[0].empty()) ev.keywords.clear();
            } else if (key == "label" && ev.kind == TraceKind::gesture) {
                auto l = gesture_label_from(val);
                if (!l) fail_line(lineno, "unknown gesture label \"" + val + "\"");
                ev.true_label = *l;
                have_label = true;
            } else if (key == "x" && ev.kind == TraceKind::gesture) {
                ev.hand.x = parse_num(val, lineno, "x");
                have_x = true;
            } else if (key == "y" && ev.kind == TraceKind::gesture) {
                ev.hand.y = parse_num(val, lineno, "y");
                have_y = true;
            } else if (key == "target") {
                if (!val.empty())
                    for (const auto& part : split(val, ','))
                        ev.targets.push_back(static_cast<int>(parse_num(part, lineno, "target")));
            } else {
                fail_line(lineno, "unknown key \"" + key + "\"");
            }
        }
        if (!have_t) fail_line(lineno, "missing t=");
        if (ev.kind == TraceKind::utterance) {
            if (!have_op) fail_line(lineno, "utterance missing op=");
            if (ev.true_op != AuralOp::no_op && ev.keywords.empty())
                fail_line(lineno, "command utterance needs kw=");
        } else {
            if (!have_label) fail_line(lineno, "gesture missing label=");
            if (ev.true_label == GestureLabel::pointing && (!have_x || !have_y))
                fail_line(lineno, "pointing gesture needs x= and y=");
        }
        (void)have_inter;
        if (ev.t < last_t) fail_line(lineno, "event times must be nondecreasing");
        last_t = ev.t;
        trace.events.push_back(std::move(ev));
    }
    return trace;
}

std::string serialize_trace(const Trace& trace) {
    std::ostringstream out;
    const auto& lex = Lexicon::builtin();
    for (const auto& ev : trace.events) {
        if (ev.kind == TraceKind::utterance) {
            out << "u t=" << fmt_ms(ev.t) << " inter=" << ev.interaction;
            out << " op="
                << (ev.true_op == AuralOp::no_op
                        ? "no_op"
                        : ev.true_op == AuralOp::locate ? "locate" : "describe");
            if (ev.object_class >= 0) out << " obj=" << trace_name(lex.name_of(ev.object_class));
            out << " mult=" << multiplicity_char(ev.multiplicity);
            out << " deictic=" << (ev.deictic ? 1 : 0);
            if (!ev.keywords.empty()) {
                out << " kw=";
                for (size_t i = 0; i < ev.keywords.size(); ++i) {
                    if (i) out << ',';
                    out << ev.keywords[i];
                }
            }
        } else {
            out << "g t=" << fmt_ms(ev.t) << " inter=" << ev.interaction;
            out << " label=" << gesture_label_name(ev.true_label);
            if (ev.true_label == GestureLabel::pointing)
                out << " x=" << fmt_coord(ev.hand.x) << " y=" << fmt_coord(ev.hand.y);
        }
        if (!ev.targets.empty()) {
            out << " target=";
            for (size_t i = 0; i < ev.targets.size(); ++i) {
                if (i) out << ',';
                out << ev.targets[i];
            }
        }
        out << '\n';
    }
    return out.str();
}

namespace {

// multi-word surface forms ("smart phone") arrive as separate keywords
void push_words(std::vector<std::string>& kws, const std::string& surface) {
    std::istringstream in(surface);
    std::string w;
    while (in >> w) kws.push_back(w);
}

double quant4(double v) { return std::round(v * 10000.0) / 10000.0; }

} // namespace

Trace generate_scenario(ScenarioOp op, const SceneContext& scene, int n, Seed seed,
                        const ScenarioOptions& opt) {
    if (n < 1) throw Error(Errc::invalid_arg, "gen: n must be positive");
    if (opt.deictic_fraction < 0.0 || opt.deictic_fraction > 1.0)
        throw Error(Errc::invalid_arg, "gen: deictic_fraction must lie in [0,1]");
    if (opt.gesture_offset_min < 0.0 || opt.gesture_offset_max < opt.gesture_offset_min)
        throw Error(Errc::invalid_arg, "gen: bad gesture offset range");
    if (scene.objects.empty()) throw Error(Errc::invalid_arg, "gen: scene has no objects");

    const auto& lex = Lexicon::builtin();
    Rng rng(derive_stream(seed, "scenario"));

    // classes with at least two instances (needed for ambiguous describe)
    std::vector<int> dup_classes;
    for (int c = 0; c < lex.size(); ++c)
        if (scene.count_of(c) >= 2) dup_classes.push_back(c);
    if (op == ScenarioOp::describe_ambiguous && dup_classes.empty())
        throw Error(Errc::invalid_arg,
                    "gen: describe_ambiguous needs a class with >= 2 scene instances");

    // exact deictic count for describe: pick which interactions are deictic
    std::vector<bool> deictic(static_cast<size_t>(n), false);
    if (op == ScenarioOp::describe) {
        int k = static_cast<int>(std::floor(opt.deictic_fraction * n + 0.5));
        std::vector<int> idx(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
        for (int i = 0; i < k; ++i) { // partial Fisher-Yates
            size_t j = i + rng.uniform_index(static_cast<uint64_t>(n - i));
            std::swap(idx[static_cast<size_t>(i)], idx[j]);
        }
        for (int i = 0; i < k; ++i) deictic[static_cast<size_t>(idx[static_cast<size_t>(i)])] = true;
    } else if (op == ScenarioOp::describe_ambiguous) {
        deictic.assign(static_cast<size_t>(n), true);
    }

    static const char* locate_words[] = {"locate", "find", "where"};
    static const char* describe_words[] = {"describe", "what", "tell"};

    Trace trace;
    for (int i = 0; i < n; ++i) {
        Millis base_t = static_cast<Millis>(i) * opt.interaction_gap_ms;

        if (op == ScenarioOp::zoom || op == ScenarioOp::capture) {
            TraceEvent g;
            g.kind = TraceKind::gesture;
            g.t = base_t;
            g.interaction = i;
            if (op == ScenarioOp::zoom)
                g.true_label = rng.bernoulli(0.5) ? GestureLabel::zoom_in : GestureLabel::zoom_out;
            else
                g.true_label = GestureLabel::capture;
            g.hand = {quant4(rng.uniform(0.2, 0.8)), quant4(rng.uniform(0.2, 0.8))};
            trace.events.push_back(g);
            continue;
        }

        // choose the target: an object index, or a whole duplicated class
        bool is_deictic = deictic[static_cast<size_t>(i)];
        bool plural = false;
        int target_obj;
        if (op == ScenarioOp::describe_ambiguous) {
            int cls = dup_classes[rng.uniform_index(dup_classes.size())];
            auto instances = scene.indices_of(cls);
            target_obj = instances[rng.uniform_index(instances.size())];
        } else {
            target_obj = static_cast<int>(rng.uniform_index(scene.objects.size()));
            if (opt.plural_fraction > 0.0 && !dup_classes.empty() &&
                rng.bernoulli(opt.plural_fraction)) {
                plural = true;
                int cls = dup_classes[rng.uniform_index(dup_classes.size())];
                target_obj = scene.indices_of(cls)[0];
                is_deictic = false; // plural commands name the whole class
            }
        }
        int cls = scene.objects[static_cast<size_t>(target_obj)].class_id;

        TraceEvent u;
        u.kind = TraceKind::utterance;
        u.t = base_t;
        u.interaction = i;
        u.true_op = op == ScenarioOp::locate ? AuralOp::locate : AuralOp::describe_explicit;
        u.object_class = cls;
        u.multiplicity = plural ? Multiplicity::plural : Multiplicity::singular;
        u.deictic = is_deictic && u.true_op != AuralOp::locate;

        const char* opword = u.true_op == AuralOp::locate
                                 ? locate_words[rng.uniform_index(3)]
                                 : describe_words[rng.uniform_index(3)];
        u.keywords.push_back(opword);
        if (u.deictic) u.keywords.push_back("this");
        const auto& entry = lex.entry(cls);
        const auto& surfaces = plural ? entry.plural_surfaces : entry.surfaces;
        push_words(u.keywords, surfaces[rng.uniform_index(surfaces.size())]);

        // ground truth object set
        if (u.true_op == AuralOp::locate || plural) {
            for (int j : scene.indices_of(cls)) u.targets.push_back(j);
        } else {
            u.targets.push_back(target_obj);
        }
        trace.events.push_back(u);

        // deictic describes come with a trailing pointing gesture (unless the
        // scenario deliberately withholds it)
        if (u.deictic) {
            Millis offset = std::round(rng.uniform(opt.gesture_offset_min, opt.gesture_offset_max));
            const Point& at = scene.objects[static_cast<size_t>(target_obj)].position;
            Point hand{quant4(clamp01(at.x + rng.uniform(-opt.hand_noise, opt.hand_noise))),
                       quant4(clamp01(at.y + rng.uniform(-opt.hand_noise, opt.hand_noise)))};
            if (opt.with_pointing) {
                TraceEvent g;
                g.kind = TraceKind::gesture;
                g.t = base_t + offset;
                g.interaction = i;
                g.true_label = GestureLabel::pointing;
                g.hand = hand;
                g.targets = {target_obj};
                trace.events.push_back(g);
            }
        }
    }
    return trace;
}

GroundTruth interaction_truth(const Trace& trace, int interaction) {
    GroundTruth truth;
    const TraceEvent* utterance = nullptr;
    const TraceEvent* gesture = nullptr;
    for (const auto& ev : trace.events) {
        if (ev.interaction != interaction) continue;
        if (ev.kind == TraceKind::utterance && !utterance) utterance = &ev;
        if (ev.kind == TraceKind::gesture && !gesture) gesture = &ev;
    }
    if (utterance) {
        switch (utterance->true_op) {
        case AuralOp::locate: truth.expected_op = OutcomeOp::locate; break;
        case AuralOp::describe_explicit:
        case AuralOp::describe_ambiguous: truth.expected_op = OutcomeOp::describe; break;
        case AuralOp::no_op: truth.expected_op = OutcomeOp::rejected; break;
        }
        truth.target_objects = utterance->targets;
        return truth;
    }
    if (gesture) {
        switch (gesture->true_label) {
        case GestureLabel::zoom_in:
        case GestureLabel::zoom_out:
            truth.expected_op = OutcomeOp::zoom;
            truth.expected_gesture = gesture->true_label;
            break;
        case GestureLabel::capture:
            truth.expected_op = OutcomeOp::capture;
            truth.expected_gesture = gesture->true_label;
            break;
        case GestureLabel::pointing:
            truth.expected_op = OutcomeOp::rejected;
            break;
        }
        return truth;
    }
    throw Error(Errc::invalid_arg, "trace has no events for interaction " +
                                       std::to_string(interaction));
}

} // namespace mmf
