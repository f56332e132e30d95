#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace centerdepth {

enum class ObjectClass { Car = 0, Van, Truck, Bicycle, Pedestrian };

inline constexpr std::array<ObjectClass, 5> kAllClasses{
    ObjectClass::Car, ObjectClass::Van, ObjectClass::Truck, ObjectClass::Bicycle,
    ObjectClass::Pedestrian};

constexpr std::string_view to_string(ObjectClass c) {
    switch (c) {
        case ObjectClass::Car: return "car";
        case ObjectClass::Van: return "van";
        case ObjectClass::Truck: return "truck";
        case ObjectClass::Bicycle: return "bicycle";
        case ObjectClass::Pedestrian: return "pedestrian";
    }
    return "car";
}

constexpr std::optional<ObjectClass> class_from_string(std::string_view s) {
    for (auto c : kAllClasses)
        if (to_string(c) == s) return c;
    return std::nullopt;
}

}  // namespace centerdepth
