#include "mmf/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mmf/lexicon.hpp"

namespace mmf {

using ordered_json = nlohmann::ordered_json;

std::vector<int> SceneContext::indices_of(int class_id) const {
    std::vector<int> out;
    for (size_t i = 0; i < objects.size(); ++i)
        if (objects[i].class_id == class_id) out.push_back(static_cast<int>(i));
    return out;
}

int SceneContext::count_of(int class_id) const {
    return static_cast<int>(indices_of(class_id).size());
}

namespace {

SceneObject make_obj(const char* canonical, SizeClass size, double dist, double x, double y) {
    SceneObject o;
    auto id = Lexicon::builtin().class_of(canonical);
    if (!id) throw Error(Errc::internal, std::string("unknown builtin class ") + canonical);
    o.class_id = *id;
    o.size_class = size;
    o.distance_m = dist;
    o.position = {x, y};
    return o;
}

// Desk layout about a metre away: mostly large objects, one small cup.
SceneContext builtin_a() {
    SceneContext s;
    s.name = "A";
    s.objects = {
        make_obj("monitor", SizeClass::large, 1.0, 0.50, 0.35),
        make_obj("laptop", SizeClass::large, 1.0, 0.25, 0.60),
        make_obj("keyboard", SizeClass::large, 1.0, 0.55, 0.70),
        make_obj("book", SizeClass::large, 1.0, 0.80, 0.60),
        make_obj("cup", SizeClass::small, 1.0, 0.70, 0.78),
    };
    return s;
}

// Same desk from across the room: twice the distance, more small clutter.
SceneContext builtin_b() {
    SceneContext s;
    s.name = "B";
    s.objects = {
        make_obj("monitor", SizeClass::large, 2.0, 0.50, 0.40),
        make_obj("laptop", SizeClass::large, 2.0, 0.30, 0.58),
        make_obj("book", SizeClass::large, 2.0, 0.75, 0.55),
        make_obj("cup", SizeClass::small, 2.0, 0.62, 0.70),
        make_obj("pen", SizeClass::small, 2.0, 0.45, 0.72),
    };
    return s;
}

SizeClass size_class_from(const std::string& s) {
    if (s == "large") return SizeClass::large;
    if (s == "small") return SizeClass::small;
    throw Error(Errc::parse, "scene: size_class must be \"large\" or \"small\"");
}

} // namespace

SceneContext parse_scene(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw Error(Errc::parse, std::string("scene: invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("objects") || !j["objects"].is_array())
        throw Error(Errc::parse, "scene: expected {\"name\":..., \"objects\":[...]}");

    SceneContext scene;
    scene.name = j.value("name", std::string("custom"));
    const auto& lex = Lexicon::builtin();
    for (const auto& item : j["objects"]) {
        if (!item.is_object()) throw Error(Errc::parse, "scene: object entries must be objects");
        SceneObject o;
        if (!item.contains("class") || !item["class"].is_string())
            throw Error(Errc::parse, "scene: object needs a \"class\" name");
        auto id = lex.class_of(item["class"].get<std::string>());
        if (!id)
            throw Error(Errc::parse,
                        "scene: unknown class \"" + item["class"].get<std::string>() + "\"");
        o.class_id = *id;
        o.size_class = size_class_from(item.value("size_class", std::string("large")));
        o.distance_m = item.value("distance_m", 1.0);
        o.position.x = item.value("x", 0.5);
        o.position.y = item.value("y", 0.5);
        if (o.distance_m <= 0.0)
            throw Error(Errc::validation, "scene: distance_m must be positive");
        if (o.position.x < 0.0 || o.position.x > 1.0 || o.position.y < 0.0 || o.position.y > 1.0)
            throw Error(Errc::validation, "scene: positions must lie in [0,1]");
        scene.objects.push_back(o);
    }
    if (scene.objects.empty()) throw Error(Errc::validation, "scene: needs at least one object");
    return scene;
}

std::string serialize_scene(const SceneContext& scene) {
    ordered_json j;
    j["name"] = scene.name;
    j["objects"] = ordered_json::array();
    const auto& lex = Lexicon::builtin();
    for (const auto& o : scene.objects) {
        ordered_json item;
        item["class"] = lex.name_of(o.class_id);
        item["size_class"] = o.size_class == SizeClass::large ? "large" : "small";
        item["distance_m"] = o.distance_m;
        item["x"] = o.position.x;
        item["y"] = o.position.y;
        j["objects"].push_back(item);
    }
    return j.dump(2) + "\n";
}

SceneContext load_context(const std::string& name_or_path) {
    if (name_or_path == "A" || name_or_path == "a") return builtin_a();
    if (name_or_path == "B" || name_or_path == "b") return builtin_b();
    std::ifstream in(name_or_path);
    if (!in) throw Error(Errc::io, "scene: cannot open \"" + name_or_path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scene(buf.str());
}

size_t nearest_detection(std::span<const Detection> candidates, const Point& point) {
    if (candidates.empty())
        throw Error(Errc::invalid_arg, "nearest_detection: empty candidate list");
    size_t best = 0;
    double best_d = dist2(candidates[0].position, point);
    for (size_t i = 1; i < candidates.size(); ++i) {
        double d = dist2(candidates[i].position, point);
        if (d < best_d) { // strict: ties keep the lowest index
            best_d = d;
            best = i;
        }
    }
    return best;
}

double detection_probability(const SceneObject& obj, double base_map,
                             double size_factor_small, double distance_lambda) {
    double size_factor = obj.size_class == SizeClass::small ? size_factor_small : 1.0;
    double distance_factor = std::exp(-distance_lambda * (obj.distance_m - 1.0));
    return clamp01(base_map * size_factor * distance_factor);
}

} // namespace mmf
