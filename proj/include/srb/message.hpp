#ifndef SRB_MESSAGE_HPP
#define SRB_MESSAGE_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "srb/error.hpp"
#include "srb/geometry.hpp"

namespace srb {

// Wire type tags. Values are part of the binary protocol.
enum class Tag : uint8_t {
    String = 1,
    Bool = 2,
    Int = 3,
    Double = 4,
    IntArray = 5,
    DoubleArray = 6,
    IntTable = 7,
    DoubleTable = 8,
    PoseStamped = 9,
    WrenchStamped = 10,
    PoseArray = 11,
    UInt8Image = 12,
    PointCloud = 13,
    JointState = 14,
    TfTransform = 15,
};

constexpr uint8_t kMinTag = 1;
constexpr uint8_t kMaxTag = 15;

inline const char* tag_name(Tag t) {
    switch (t) {
    case Tag::String: return "String";
    case Tag::Bool: return "Bool";
    case Tag::Int: return "Int";
    case Tag::Double: return "Double";
    case Tag::IntArray: return "IntArray";
    case Tag::DoubleArray: return "DoubleArray";
    case Tag::IntTable: return "IntTable";
    case Tag::DoubleTable: return "DoubleTable";
    case Tag::PoseStamped: return "PoseStamped";
    case Tag::WrenchStamped: return "WrenchStamped";
    case Tag::PoseArray: return "PoseArray";
    case Tag::UInt8Image: return "UInt8Image";
    case Tag::PointCloud: return "PointCloud";
    case Tag::JointState: return "JointState";
    case Tag::TfTransform: return "TfTransform";
    }
    return "unknown";
}

inline Tag tag_from_name(const std::string& name) {
    for (uint8_t t = kMinTag; t <= kMaxTag; ++t) {
        if (name == tag_name(static_cast<Tag>(t))) return static_cast<Tag>(t);
    }
    throw Error(errc::invalid_input, "unknown message type: " + name);
}

struct IntTable {
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::vector<int64_t> data; // row-major, size rows*cols

    bool operator==(const IntTable&) const = default;
};

struct DoubleTable {
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::vector<double> data;

    bool operator==(const DoubleTable&) const = default;
};

struct PoseStamped {
    int64_t stamp_ns = 0;
    std::string frame_id;
    Vec3 position;
    Quaternion orientation;
};

struct WrenchStamped {
    int64_t stamp_ns = 0;
    std::string frame_id;
    Vec3 force;  // N
    Vec3 torque; // N*m
};

struct PoseArray {
    int64_t stamp_ns = 0;
    std::string frame_id;
    std::vector<std::pair<Vec3, Quaternion>> poses;
};

struct UInt8Image {
    int64_t stamp_ns = 0;
    std::string frame_id;
    uint32_t height = 0;
    uint32_t width = 0;
    std::string encoding; // "mono8" or "rgb8"
    uint32_t step = 0;    // bytes per row
    std::vector<uint8_t> data;
};

struct PointCloud {
    int64_t stamp_ns = 0;
    std::string frame_id;
    std::vector<std::array<float, 3>> points; // meters
};

struct JointState {
    int64_t stamp_ns = 0;
    std::vector<std::string> names;
    std::vector<double> positions;
};

struct TfTransform {
    std::string parent_frame;
    std::string child_frame;
    int64_t stamp_ns = 0;
    Vec3 translation;
    Quaternion rotation;
};

// Tagged union over the 13 Table-style wire types plus the JointState and
// TfTransform extensions. Variant index is tag - 1.
using BridgeValue =
    std::variant<std::string, bool, int64_t, double, std::vector<int64_t>, std::vector<double>,
                 IntTable, DoubleTable, PoseStamped, WrenchStamped, PoseArray, UInt8Image,
                 PointCloud, JointState, TfTransform>;

inline Tag tag_of(const BridgeValue& v) {
    return static_cast<Tag>(static_cast<uint8_t>(v.index()) + 1);
}

inline uint32_t image_channels(const std::string& encoding) {
    if (encoding == "mono8") return 1;
    if (encoding == "rgb8") return 3;
    throw Error(errc::unsupported, "unsupported image encoding: " + encoding);
}

// Shape invariants of a BridgeValue; throws invalid_message on violation.
inline void validate(const BridgeValue& v) {
    switch (tag_of(v)) {
    case Tag::IntTable: {
        const auto& t = std::get<IntTable>(v);
        if (t.data.size() != static_cast<size_t>(t.rows) * t.cols) {
            throw Error(errc::invalid_message, "int table data length != rows*cols");
        }
        break;
    }
    case Tag::DoubleTable: {
        const auto& t = std::get<DoubleTable>(v);
        if (t.data.size() != static_cast<size_t>(t.rows) * t.cols) {
            throw Error(errc::invalid_message, "double table data length != rows*cols");
        }
        break;
    }
    case Tag::PoseStamped:
        if (!std::get<PoseStamped>(v).orientation.is_unit()) {
            throw Error(errc::invalid_message, "pose orientation is not unit norm");
        }
        break;
    case Tag::PoseArray:
        for (const auto& [p, q] : std::get<PoseArray>(v).poses) {
            (void)p;
            if (!q.is_unit()) {
                throw Error(errc::invalid_message, "pose array orientation is not unit norm");
            }
        }
        break;
    case Tag::UInt8Image: {
        const auto& img = std::get<UInt8Image>(v);
        uint32_t ch = image_channels(img.encoding);
        if (img.step < img.width * ch) {
            throw Error(errc::invalid_message, "image step smaller than width * channels");
        }
        if (img.data.size() != static_cast<size_t>(img.height) * img.step) {
            throw Error(errc::invalid_message, "image data length != height * step");
        }
        break;
    }
    case Tag::JointState: {
        const auto& js = std::get<JointState>(v);
        if (js.names.size() != js.positions.size()) {
            throw Error(errc::invalid_message, "joint state name/position count mismatch");
        }
        break;
    }
    case Tag::TfTransform: {
        const auto& t = std::get<TfTransform>(v);
        if (t.parent_frame == t.child_frame) {
            throw Error(errc::invalid_message, "tf parent equals child frame");
        }
        if (!t.rotation.is_unit()) {
            throw Error(errc::invalid_message, "tf rotation is not unit norm");
        }
        break;
    }
    default:
        break;
    }
}

// ---- Scene-side values (Table middle column) --------------------------------

struct SceneImage {
    uint32_t height = 0;
    uint32_t width = 0;
    std::string encoding;
    uint32_t step = 0;
    std::vector<uint8_t> data;

    bool operator==(const SceneImage&) const = default;
};

struct ScenePointSet {
    std::vector<std::array<float, 3>> points;

    bool operator==(const ScenePointSet&) const = default;
};

struct SceneJointState {
    std::vector<std::string> names;
    std::vector<double> positions;

    bool operator==(const SceneJointState&) const = default;
};

// Scene-side mirror of the wire union: strings/scalars/arrays map directly,
// poses become homogeneous matrices, wrenches become 6-element arrays
// (fx,fy,fz,tx,ty,tz), pose arrays become ordered transform collections.
using SceneValue =
    std::variant<std::string, bool, int64_t, double, std::vector<int64_t>, std::vector<double>,
                 IntTable, DoubleTable, Mat4, std::array<double, 6>, std::vector<Mat4>, SceneImage,
                 ScenePointSet, SceneJointState, Mat4>;

// The variant has two Mat4 alternatives (pose at index 8, tf at index 14);
// construct by index when the distinction matters.
inline SceneValue scene_pose(const Mat4& m) { return SceneValue(std::in_place_index<8>, m); }
inline SceneValue scene_tf(const Mat4& m) { return SceneValue(std::in_place_index<14>, m); }

} // namespace srb

#endif
