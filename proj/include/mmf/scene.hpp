#ifndef MMF_SCENE_HPP
#define MMF_SCENE_HPP

#include <span>
#include <string>
#include <vector>

#include "mmf/types.hpp"

namespace mmf {

enum class SizeClass { large, small };

struct SceneObject {
    int class_id = -1;
    SizeClass size_class = SizeClass::large;
    double distance_m = 1.0;   // camera to object
    Point position;            // normalized [0,1]^2 frame coordinates
};

struct SceneContext {
    std::string name;
    std::vector<SceneObject> objects;

    std::vector<int> indices_of(int class_id) const;
    int count_of(int class_id) const;
};

// A single simulated detector hit. source_object indexes the candidate list
// handed to the detector, so ground truth stays recoverable in tests.
struct Detection {
    int class_id = -1;
    Point position;     // ground truth + bounded noise, clamped to the frame
    double confidence = 0.0;
    int source_object = -1;
};

// Built-in desk scenes: "A" is the near/easy layout, "B" is farther away
// with smaller clutter. Anything else is treated as a path to a scene JSON.
SceneContext load_context(const std::string& name_or_path);
SceneContext parse_scene(const std::string& text);
std::string serialize_scene(const SceneContext& scene);

// Index of the detection closest to `point` (squared euclidean); ties go to
// the lowest index. Throws Error{invalid_arg} on an empty candidate list.
size_t nearest_detection(std::span<const Detection> candidates, const Point& point);

// Per-object detection probability model:
//   base_map(tier) * size_factor(size_class) * exp(-lambda * (distance - 1))
// clamped to [0,1]. base_map and the factors come from the profile set; this
// low-level form takes them already resolved.
double detection_probability(const SceneObject& obj, double base_map,
                             double size_factor_small, double distance_lambda);

} // namespace mmf

#endif
