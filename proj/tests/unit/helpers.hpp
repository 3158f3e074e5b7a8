#pragma once

// Shared generators for the property-style tests.

#include <random>
#include <string>
#include <vector>

#include "radcap/geometry.hpp"
#include "radcap/tensor.hpp"

namespace testing_helpers {

inline const std::vector<std::string>& canonical_classes() {
    return radcap::ClassVocabulary::defaults().classes();
}

inline radcap::SceneObject random_object(std::mt19937& rng) {
    const auto& classes = canonical_classes();
    std::uniform_int_distribution<size_t> cls(0, classes.size() - 1);
    std::uniform_real_distribution<double> range(0.5, 80.0);
    std::uniform_real_distribution<double> az(-53.0, 53.0);
    return {classes[cls(rng)], range(rng), az(rng)};
}

inline std::vector<radcap::SceneObject> random_scene(std::mt19937& rng, size_t max_objects = 8) {
    std::uniform_int_distribution<size_t> count(0, max_objects);
    std::vector<radcap::SceneObject> objs(count(rng));
    for (auto& o : objs) o = random_object(rng);
    return objs;
}

inline radcap::Tensor random_tensor(std::mt19937& rng, std::vector<uint32_t> shape,
                                    float lo = 0.0f, float hi = 10.0f) {
    radcap::Tensor t(std::move(shape));
    std::uniform_real_distribution<float> dist(lo, hi);
    for (float& v : t.values()) v = dist(rng);
    return t;
}

}  // namespace testing_helpers
