#ifndef SRB_TEST_SUPPORT_HPP
#define SRB_TEST_SUPPORT_HPP

#include <cmath>
#include <random>

#include "srb/geometry.hpp"

// Test-only oracles, independent of the library implementation paths they
// check.

namespace oracle {

// Rodrigues rotation formula written out directly.
inline srb::Mat4 rodrigues(const srb::Vec3& axis, double angle) {
    srb::Vec3 a = axis.normalized();
    double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    srb::Mat4 m;
    m.at(0, 0) = c + a.x * a.x * t;
    m.at(0, 1) = a.x * a.y * t - a.z * s;
    m.at(0, 2) = a.x * a.z * t + a.y * s;
    m.at(1, 0) = a.y * a.x * t + a.z * s;
    m.at(1, 1) = c + a.y * a.y * t;
    m.at(1, 2) = a.y * a.z * t - a.x * s;
    m.at(2, 0) = a.z * a.x * t - a.y * s;
    m.at(2, 1) = a.z * a.y * t + a.x * s;
    m.at(2, 2) = c + a.z * a.z * t;
    return m;
}

inline srb::Quaternion random_unit_quaternion(std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    srb::Quaternion q{n(rng), n(rng), n(rng), n(rng)};
    double norm = q.norm();
    while (norm < 1e-6) {
        q = {n(rng), n(rng), n(rng), n(rng)};
        norm = q.norm();
    }
    return {q.x / norm, q.y / norm, q.z / norm, q.w / norm};
}

inline srb::Vec3 random_unit_axis(std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    srb::Vec3 v{n(rng), n(rng), n(rng)};
    while (v.norm() < 1e-6) v = {n(rng), n(rng), n(rng)};
    return v.normalized();
}

// Random rotation built from the axis-angle oracle, not from quaternions.
inline srb::Mat4 random_rotation_matrix(std::mt19937& rng) {
    std::uniform_real_distribution<double> angle(-3.14159, 3.14159);
    return rodrigues(random_unit_axis(rng), angle(rng));
}

inline srb::Mat4 random_rigid_transform(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    srb::Mat4 m = random_rotation_matrix(rng);
    m.set_translation({u(rng), u(rng), u(rng)});
    return m;
}

// Gram test: rows of the rotation block orthonormal, determinant +1.
inline bool passes_gram_test(const srb::Mat4& m, double tol) {
    srb::Vec3 r0{m.at(0, 0), m.at(0, 1), m.at(0, 2)};
    srb::Vec3 r1{m.at(1, 0), m.at(1, 1), m.at(1, 2)};
    srb::Vec3 r2{m.at(2, 0), m.at(2, 1), m.at(2, 2)};
    if (std::abs(r0.dot(r0) - 1) > tol || std::abs(r1.dot(r1) - 1) > tol ||
        std::abs(r2.dot(r2) - 1) > tol) {
        return false;
    }
    if (std::abs(r0.dot(r1)) > tol || std::abs(r0.dot(r2)) > tol || std::abs(r1.dot(r2)) > tol) {
        return false;
    }
    return std::abs(r0.dot(r1.cross(r2)) - 1.0) <= tol;
}

} // namespace oracle

#endif

#ifdef SRB_TEST_SUPPORT_WANT_VALUES
#ifndef SRB_TEST_SUPPORT_VALUES_HPP
#define SRB_TEST_SUPPORT_VALUES_HPP

#include <string>

#include "srb/message.hpp"

namespace oracle {

inline std::string random_text(std::mt19937& rng, size_t max_len) {
    std::uniform_int_distribution<size_t> len(0, max_len);
    std::uniform_int_distribution<int> ch(32, 126);
    std::string s(len(rng), ' ');
    for (char& c : s) c = static_cast<char>(ch(rng));
    return s;
}

// A random well-formed value of the given wire tag, exercising variable
// lengths, negative numbers, and both image encodings.
inline srb::BridgeValue random_bridge_value(std::mt19937& rng, srb::Tag tag) {
    using namespace srb;
    std::uniform_int_distribution<int64_t> i64d(-1'000'000'000'000, 1'000'000'000'000);
    std::uniform_real_distribution<double> f64d(-1e6, 1e6);
    std::uniform_int_distribution<uint32_t> dim(0, 8);
    std::uniform_int_distribution<uint32_t> dim1(1, 8);
    switch (tag) {
    case Tag::String: return random_text(rng, 64);
    case Tag::Bool: return (i64d(rng) & 1) != 0;
    case Tag::Int: return i64d(rng);
    case Tag::Double: return f64d(rng);
    case Tag::IntArray: {
        std::vector<int64_t> a(dim(rng));
        for (auto& x : a) x = i64d(rng);
        return a;
    }
    case Tag::DoubleArray: {
        std::vector<double> a(dim(rng));
        for (auto& x : a) x = f64d(rng);
        return a;
    }
    case Tag::IntTable: {
        IntTable t;
        t.rows = dim(rng);
        t.cols = dim1(rng);
        t.data.resize(static_cast<size_t>(t.rows) * t.cols);
        for (auto& x : t.data) x = i64d(rng);
        return t;
    }
    case Tag::DoubleTable: {
        DoubleTable t;
        t.rows = dim(rng);
        t.cols = dim1(rng);
        t.data.resize(static_cast<size_t>(t.rows) * t.cols);
        for (auto& x : t.data) x = f64d(rng);
        return t;
    }
    case Tag::PoseStamped: {
        PoseStamped p;
        p.stamp_ns = i64d(rng);
        p.frame_id = random_text(rng, 16);
        p.position = {f64d(rng), f64d(rng), f64d(rng)};
        p.orientation = random_unit_quaternion(rng);
        return p;
    }
    case Tag::WrenchStamped: {
        WrenchStamped w;
        w.stamp_ns = i64d(rng);
        w.frame_id = random_text(rng, 16);
        w.force = {f64d(rng), f64d(rng), f64d(rng)};
        w.torque = {f64d(rng), f64d(rng), f64d(rng)};
        return w;
    }
    case Tag::PoseArray: {
        PoseArray pa;
        pa.stamp_ns = i64d(rng);
        pa.frame_id = random_text(rng, 16);
        pa.poses.resize(dim(rng));
        for (auto& [pos, rot] : pa.poses) {
            pos = {f64d(rng), f64d(rng), f64d(rng)};
            rot = random_unit_quaternion(rng);
        }
        return pa;
    }
    case Tag::UInt8Image: {
        UInt8Image img;
        img.stamp_ns = i64d(rng);
        img.frame_id = random_text(rng, 16);
        img.height = dim(rng);
        img.width = dim(rng);
        img.encoding = (i64d(rng) & 1) ? "rgb8" : "mono8";
        img.step = img.width * image_channels(img.encoding) + (dim(rng) & 3);
        img.data.resize(static_cast<size_t>(img.height) * img.step);
        std::uniform_int_distribution<int> byte(0, 255);
        for (auto& b : img.data) b = static_cast<uint8_t>(byte(rng));
        return img;
    }
    case Tag::PointCloud: {
        PointCloud pc;
        pc.stamp_ns = i64d(rng);
        pc.frame_id = random_text(rng, 16);
        pc.points.resize(dim(rng));
        std::uniform_real_distribution<float> f32d(-100.0f, 100.0f);
        for (auto& p : pc.points) p = {f32d(rng), f32d(rng), f32d(rng)};
        return pc;
    }
    case Tag::JointState: {
        JointState js;
        js.stamp_ns = i64d(rng);
        uint32_t n = dim(rng);
        for (uint32_t i = 0; i < n; ++i) js.names.push_back("j" + std::to_string(i));
        js.positions.resize(n);
        for (auto& p : js.positions) p = f64d(rng);
        return js;
    }
    case Tag::TfTransform: {
        TfTransform t;
        t.parent_frame = "p_" + random_text(rng, 8);
        t.child_frame = "c_" + random_text(rng, 8);
        t.stamp_ns = i64d(rng);
        t.translation = {f64d(rng), f64d(rng), f64d(rng)};
        t.rotation = random_unit_quaternion(rng);
        return t;
    }
    }
    throw std::logic_error("bad tag");
}

} // namespace oracle

#endif
#endif
