#ifndef SRB_CODEC_HPP
#define SRB_CODEC_HPP

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "srb/error.hpp"
#include "srb/message.hpp"

namespace srb {

constexpr char kWireMagic[4] = {'S', 'R', 'B', '2'};
constexpr uint8_t kWireVersion = 1;

namespace wire {

// Little-endian primitive writers/readers.

inline void put_u8(std::vector<uint8_t>& out, uint8_t v) { out.push_back(v); }

inline void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

inline void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline void put_i64(std::vector<uint8_t>& out, int64_t v) {
    put_u64(out, static_cast<uint64_t>(v));
}

inline void put_f64(std::vector<uint8_t>& out, double v) {
    uint64_t u;
    std::memcpy(&u, &v, 8);
    put_u64(out, u);
}

inline void put_f32(std::vector<uint8_t>& out, float v) {
    uint32_t u;
    std::memcpy(&u, &v, 4);
    put_u32(out, u);
}

inline void put_str16(std::vector<uint8_t>& out, const std::string& s) {
    if (s.size() > 0xFFFF) {
        throw Error(errc::invalid_input, "string exceeds 16-bit length prefix");
    }
    put_u16(out, static_cast<uint16_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

struct Reader {
    const uint8_t* data;
    size_t size;
    size_t pos = 0;

    void need(size_t n) const {
        if (pos + n > size) {
            throw Error(errc::truncation, "payload truncated");
        }
    }

    uint8_t u8() {
        need(1);
        return data[pos++];
    }

    uint16_t u16() {
        need(2);
        uint16_t v = static_cast<uint16_t>(data[pos] | (data[pos + 1] << 8));
        pos += 2;
        return v;
    }

    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }

    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }

    int64_t i64() { return static_cast<int64_t>(u64()); }

    double f64() {
        uint64_t u = u64();
        double v;
        std::memcpy(&v, &u, 8);
        return v;
    }

    float f32() {
        uint32_t u = u32();
        float v;
        std::memcpy(&v, &u, 4);
        return v;
    }

    std::string str16() {
        uint16_t n = u16();
        need(n);
        std::string s(reinterpret_cast<const char*>(data + pos), n);
        pos += n;
        return s;
    }

    std::vector<uint8_t> bytes(size_t n) {
        need(n);
        std::vector<uint8_t> b(data + pos, data + pos + n);
        pos += n;
        return b;
    }
};

inline void put_vec3(std::vector<uint8_t>& out, const Vec3& v) {
    put_f64(out, v.x);
    put_f64(out, v.y);
    put_f64(out, v.z);
}

inline Vec3 get_vec3(Reader& r) {
    Vec3 v;
    v.x = r.f64();
    v.y = r.f64();
    v.z = r.f64();
    return v;
}

inline void put_quat(std::vector<uint8_t>& out, const Quaternion& q) {
    put_f64(out, q.x);
    put_f64(out, q.y);
    put_f64(out, q.z);
    put_f64(out, q.w);
}

inline Quaternion get_quat(Reader& r) {
    Quaternion q;
    q.x = r.f64();
    q.y = r.f64();
    q.z = r.f64();
    q.w = r.f64();
    return q;
}

} // namespace wire

inline std::vector<uint8_t> encode_payload(const BridgeValue& v) {
    using namespace wire;
    std::vector<uint8_t> out;
    switch (tag_of(v)) {
    case Tag::String: {
        const auto& s = std::get<std::string>(v);
        put_u32(out, static_cast<uint32_t>(s.size()));
        out.insert(out.end(), s.begin(), s.end());
        break;
    }
    case Tag::Bool:
        put_u8(out, std::get<bool>(v) ? 1 : 0);
        break;
    case Tag::Int:
        put_i64(out, std::get<int64_t>(v));
        break;
    case Tag::Double:
        put_f64(out, std::get<double>(v));
        break;
    case Tag::IntArray: {
        const auto& a = std::get<std::vector<int64_t>>(v);
        put_u32(out, static_cast<uint32_t>(a.size()));
        for (int64_t x : a) put_i64(out, x);
        break;
    }
    case Tag::DoubleArray: {
        const auto& a = std::get<std::vector<double>>(v);
        put_u32(out, static_cast<uint32_t>(a.size()));
        for (double x : a) put_f64(out, x);
        break;
    }
    case Tag::IntTable: {
        const auto& t = std::get<IntTable>(v);
        put_u32(out, t.rows);
        put_u32(out, t.cols);
        for (int64_t x : t.data) put_i64(out, x);
        break;
    }
    case Tag::DoubleTable: {
        const auto& t = std::get<DoubleTable>(v);
        put_u32(out, t.rows);
        put_u32(out, t.cols);
        for (double x : t.data) put_f64(out, x);
        break;
    }
    case Tag::PoseStamped: {
        const auto& p = std::get<PoseStamped>(v);
        put_i64(out, p.stamp_ns);
        put_str16(out, p.frame_id);
        put_vec3(out, p.position);
        put_quat(out, p.orientation);
        break;
    }
    case Tag::WrenchStamped: {
        const auto& w = std::get<WrenchStamped>(v);
        put_i64(out, w.stamp_ns);
        put_str16(out, w.frame_id);
        put_vec3(out, w.force);
        put_vec3(out, w.torque);
        break;
    }
    case Tag::PoseArray: {
        const auto& pa = std::get<PoseArray>(v);
        put_i64(out, pa.stamp_ns);
        put_str16(out, pa.frame_id);
        put_u32(out, static_cast<uint32_t>(pa.poses.size()));
        for (const auto& [pos, rot] : pa.poses) {
            put_vec3(out, pos);
            put_quat(out, rot);
        }
        break;
    }
    case Tag::UInt8Image: {
        const auto& img = std::get<UInt8Image>(v);
        put_i64(out, img.stamp_ns);
        put_str16(out, img.frame_id);
        put_u32(out, img.height);
        put_u32(out, img.width);
        put_str16(out, img.encoding);
        put_u32(out, img.step);
        put_u32(out, static_cast<uint32_t>(img.data.size()));
        out.insert(out.end(), img.data.begin(), img.data.end());
        break;
    }
    case Tag::PointCloud: {
        const auto& pc = std::get<PointCloud>(v);
        put_i64(out, pc.stamp_ns);
        put_str16(out, pc.frame_id);
        put_u32(out, static_cast<uint32_t>(pc.points.size()));
        for (const auto& p : pc.points) {
            put_f32(out, p[0]);
            put_f32(out, p[1]);
            put_f32(out, p[2]);
        }
        break;
    }
    case Tag::JointState: {
        const auto& js = std::get<JointState>(v);
        put_i64(out, js.stamp_ns);
        put_u32(out, static_cast<uint32_t>(js.names.size()));
        for (const auto& n : js.names) put_str16(out, n);
        put_u32(out, static_cast<uint32_t>(js.positions.size()));
        for (double p : js.positions) put_f64(out, p);
        break;
    }
    case Tag::TfTransform: {
        const auto& t = std::get<TfTransform>(v);
        put_str16(out, t.parent_frame);
        put_str16(out, t.child_frame);
        put_i64(out, t.stamp_ns);
        put_vec3(out, t.translation);
        put_quat(out, t.rotation);
        break;
    }
    }
    return out;
}

inline BridgeValue decode_payload(Tag tag, const uint8_t* data, size_t size) {
    using namespace wire;
    Reader r{data, size};
    BridgeValue v;
    switch (tag) {
    case Tag::String: {
        uint32_t n = r.u32();
        r.need(n);
        v = std::string(reinterpret_cast<const char*>(r.data + r.pos), n);
        r.pos += n;
        break;
    }
    case Tag::Bool:
        v = (r.u8() != 0);
        break;
    case Tag::Int:
        v = r.i64();
        break;
    case Tag::Double:
        v = r.f64();
        break;
    case Tag::IntArray: {
        uint32_t n = r.u32();
        std::vector<int64_t> a(n);
        for (auto& x : a) x = r.i64();
        v = std::move(a);
        break;
    }
    case Tag::DoubleArray: {
        uint32_t n = r.u32();
        std::vector<double> a(n);
        for (auto& x : a) x = r.f64();
        v = std::move(a);
        break;
    }
    case Tag::IntTable: {
        IntTable t;
        t.rows = r.u32();
        t.cols = r.u32();
        t.data.resize(static_cast<size_t>(t.rows) * t.cols);
        for (auto& x : t.data) x = r.i64();
        v = std::move(t);
        break;
    }
    case Tag::DoubleTable: {
        DoubleTable t;
        t.rows = r.u32();
        t.cols = r.u32();
        t.data.resize(static_cast<size_t>(t.rows) * t.cols);
        for (auto& x : t.data) x = r.f64();
        v = std::move(t);
        break;
    }
    case Tag::PoseStamped: {
        PoseStamped p;
        p.stamp_ns = r.i64();
        p.frame_id = r.str16();
        p.position = get_vec3(r);
        p.orientation = get_quat(r);
        v = std::move(p);
        break;
    }
    case Tag::WrenchStamped: {
        WrenchStamped w;
        w.stamp_ns = r.i64();
        w.frame_id = r.str16();
        w.force = get_vec3(r);
        w.torque = get_vec3(r);
        v = std::move(w);
        break;
    }
    case Tag::PoseArray: {
        PoseArray pa;
        pa.stamp_ns = r.i64();
        pa.frame_id = r.str16();
        uint32_t n = r.u32();
        pa.poses.resize(n);
        for (auto& [pos, rot] : pa.poses) {
            pos = get_vec3(r);
            rot = get_quat(r);
        }
        v = std::move(pa);
        break;
    }
    case Tag::UInt8Image: {
        UInt8Image img;
        img.stamp_ns = r.i64();
        img.frame_id = r.str16();
        img.height = r.u32();
        img.width = r.u32();
        img.encoding = r.str16();
        img.step = r.u32();
        uint32_t n = r.u32();
        img.data = r.bytes(n);
        v = std::move(img);
        break;
    }
    case Tag::PointCloud: {
        PointCloud pc;
        pc.stamp_ns = r.i64();
        pc.frame_id = r.str16();
        uint32_t n = r.u32();
        pc.points.resize(n);
        for (auto& p : pc.points) {
            p[0] = r.f32();
            p[1] = r.f32();
            p[2] = r.f32();
        }
        v = std::move(pc);
        break;
    }
    case Tag::JointState: {
        JointState js;
        js.stamp_ns = r.i64();
        uint32_t nn = r.u32();
        js.names.resize(nn);
        for (auto& n : js.names) n = r.str16();
        uint32_t np = r.u32();
        js.positions.resize(np);
        for (auto& p : js.positions) p = r.f64();
        v = std::move(js);
        break;
    }
    case Tag::TfTransform: {
        TfTransform t;
        t.parent_frame = r.str16();
        t.child_frame = r.str16();
        t.stamp_ns = r.i64();
        t.translation = get_vec3(r);
        t.rotation = get_quat(r);
        v = std::move(t);
        break;
    }
    }
    if (r.pos != r.size) {
        throw Error(errc::truncation, "payload has trailing bytes");
    }
    return v;
}

// Frame layout: magic "SRB2", version byte, tag byte, topic (u16 length +
// UTF-8 bytes), payload (u32 length + bytes). All integers little-endian.
inline std::vector<uint8_t> encode(const std::string& topic, const BridgeValue& v) {
    using namespace wire;
    if (topic.empty()) {
        throw Error(errc::invalid_input, "topic must be nonempty");
    }
    std::vector<uint8_t> out;
    out.insert(out.end(), kWireMagic, kWireMagic + 4);
    put_u8(out, kWireVersion);
    put_u8(out, static_cast<uint8_t>(tag_of(v)));
    put_str16(out, topic);
    std::vector<uint8_t> payload = encode_payload(v);
    put_u32(out, static_cast<uint32_t>(payload.size()));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

struct DecodedFrame {
    std::string topic;
    BridgeValue value;
    size_t consumed = 0;
};

inline DecodedFrame decode(const uint8_t* data, size_t size) {
    using namespace wire;
    Reader r{data, size};
    r.need(6);
    if (std::memcmp(r.data, kWireMagic, 4) != 0) {
        throw Error(errc::framing, "bad magic");
    }
    r.pos = 4;
    uint8_t version = r.u8();
    if (version != kWireVersion) {
        throw Error(errc::unsupported, "unsupported wire version " + std::to_string(version));
    }
    uint8_t tag = r.u8();
    std::string topic = r.str16();
    uint32_t payload_len = r.u32();
    r.need(payload_len);
    if (tag < kMinTag || tag > kMaxTag) {
        throw Error(errc::unsupported, "unknown type tag " + std::to_string(tag));
    }
    BridgeValue v = decode_payload(static_cast<Tag>(tag), r.data + r.pos, payload_len);
    r.pos += payload_len;
    return DecodedFrame{std::move(topic), std::move(v), r.pos};
}

inline DecodedFrame decode(const std::vector<uint8_t>& bytes) {
    return decode(bytes.data(), bytes.size());
}

// Position of the next magic at or after `from`, for stream resync after a
// framing error. Returns size when none is found.
inline size_t find_magic(const uint8_t* data, size_t size, size_t from) {
    for (size_t i = from; i + 4 <= size; ++i) {
        if (std::memcmp(data + i, kWireMagic, 4) == 0) return i;
    }
    return size;
}

// ---- Table conversions: wire value -> scene value ---------------------------

inline SceneValue bridge_to_scene(const BridgeValue& v) {
    validate(v);
    switch (tag_of(v)) {
    case Tag::String: return SceneValue(std::in_place_index<0>, std::get<std::string>(v));
    case Tag::Bool: return SceneValue(std::in_place_index<1>, std::get<bool>(v));
    case Tag::Int: return SceneValue(std::in_place_index<2>, std::get<int64_t>(v));
    case Tag::Double: return SceneValue(std::in_place_index<3>, std::get<double>(v));
    case Tag::IntArray:
        return SceneValue(std::in_place_index<4>, std::get<std::vector<int64_t>>(v));
    case Tag::DoubleArray:
        return SceneValue(std::in_place_index<5>, std::get<std::vector<double>>(v));
    case Tag::IntTable: return SceneValue(std::in_place_index<6>, std::get<IntTable>(v));
    case Tag::DoubleTable: return SceneValue(std::in_place_index<7>, std::get<DoubleTable>(v));
    case Tag::PoseStamped: {
        const auto& p = std::get<PoseStamped>(v);
        return scene_pose(make_transform(p.position, p.orientation));
    }
    case Tag::WrenchStamped: {
        const auto& w = std::get<WrenchStamped>(v);
        return SceneValue(std::in_place_index<9>,
                          std::array<double, 6>{w.force.x, w.force.y, w.force.z, w.torque.x,
                                                w.torque.y, w.torque.z});
    }
    case Tag::PoseArray: {
        const auto& pa = std::get<PoseArray>(v);
        std::vector<Mat4> mats;
        mats.reserve(pa.poses.size());
        for (const auto& [pos, rot] : pa.poses) {
            mats.push_back(make_transform(pos, rot));
        }
        return SceneValue(std::in_place_index<10>, std::move(mats));
    }
    case Tag::UInt8Image: {
        const auto& img = std::get<UInt8Image>(v);
        return SceneValue(std::in_place_index<11>,
                          SceneImage{img.height, img.width, img.encoding, img.step, img.data});
    }
    case Tag::PointCloud:
        return SceneValue(std::in_place_index<12>, ScenePointSet{std::get<PointCloud>(v).points});
    case Tag::JointState: {
        const auto& js = std::get<JointState>(v);
        return SceneValue(std::in_place_index<13>, SceneJointState{js.names, js.positions});
    }
    case Tag::TfTransform: {
        const auto& t = std::get<TfTransform>(v);
        return scene_tf(make_transform(t.translation, t.rotation));
    }
    }
    throw Error(errc::invalid_message, "unreachable tag");
}

// ---- Table conversions: scene value -> wire value ---------------------------

// Inverse of bridge_to_scene on the overlapping domain. The stamp and frame
// are caller-supplied (the bridge node fills them from its clock).
inline BridgeValue scene_to_bridge(const SceneValue& v, Tag target, int64_t stamp_ns = 0,
                                   const std::string& frame_id = "") {
    auto shape_error = [&]() {
        return Error(errc::invalid_input, std::string("scene value is not convertible to ") +
                                              tag_name(target));
    };
    switch (target) {
    case Tag::String:
        if (auto* s = std::get_if<0>(&v)) return BridgeValue(*s);
        throw shape_error();
    case Tag::Bool:
        if (auto* b = std::get_if<1>(&v)) return BridgeValue(*b);
        throw shape_error();
    case Tag::Int:
        if (auto* i = std::get_if<2>(&v)) return BridgeValue(*i);
        throw shape_error();
    case Tag::Double:
        if (auto* d = std::get_if<3>(&v)) return BridgeValue(*d);
        throw shape_error();
    case Tag::IntArray:
        if (auto* a = std::get_if<4>(&v)) return BridgeValue(*a);
        throw shape_error();
    case Tag::DoubleArray:
        if (auto* a = std::get_if<5>(&v)) return BridgeValue(*a);
        throw shape_error();
    case Tag::IntTable:
        if (auto* t = std::get_if<6>(&v)) {
            BridgeValue b = *t;
            validate(b);
            return b;
        }
        throw shape_error();
    case Tag::DoubleTable:
        if (auto* t = std::get_if<7>(&v)) {
            BridgeValue b = *t;
            validate(b);
            return b;
        }
        throw shape_error();
    case Tag::PoseStamped:
        if (auto* m = std::get_if<8>(&v)) {
            if (!m->is_rigid(1e-6)) {
                throw Error(errc::invalid_input, "pose matrix is not rigid");
            }
            PoseStamped p;
            p.stamp_ns = stamp_ns;
            p.frame_id = frame_id;
            p.position = m->translation_part();
            p.orientation = matrix_to_quat(*m);
            return p;
        }
        throw shape_error();
    case Tag::WrenchStamped:
        if (auto* a = std::get_if<9>(&v)) {
            WrenchStamped w;
            w.stamp_ns = stamp_ns;
            w.frame_id = frame_id;
            w.force = {(*a)[0], (*a)[1], (*a)[2]};
            w.torque = {(*a)[3], (*a)[4], (*a)[5]};
            return w;
        }
        throw shape_error();
    case Tag::PoseArray:
        if (auto* mats = std::get_if<10>(&v)) {
            PoseArray pa;
            pa.stamp_ns = stamp_ns;
            pa.frame_id = frame_id;
            pa.poses.reserve(mats->size());
            for (const Mat4& m : *mats) {
                if (!m.is_rigid(1e-6)) {
                    throw Error(errc::invalid_input, "pose array matrix is not rigid");
                }
                pa.poses.emplace_back(m.translation_part(), matrix_to_quat(m));
            }
            return pa;
        }
        throw shape_error();
    case Tag::UInt8Image:
        if (auto* img = std::get_if<11>(&v)) {
            UInt8Image out;
            out.stamp_ns = stamp_ns;
            out.frame_id = frame_id;
            out.height = img->height;
            out.width = img->width;
            out.encoding = img->encoding;
            out.step = img->step;
            out.data = img->data;
            BridgeValue b = std::move(out);
            validate(b);
            return b;
        }
        throw shape_error();
    case Tag::PointCloud:
        if (auto* ps = std::get_if<12>(&v)) {
            PointCloud pc;
            pc.stamp_ns = stamp_ns;
            pc.frame_id = frame_id;
            pc.points = ps->points;
            return pc;
        }
        throw shape_error();
    case Tag::JointState:
        if (auto* js = std::get_if<13>(&v)) {
            JointState out;
            out.stamp_ns = stamp_ns;
            out.names = js->names;
            out.positions = js->positions;
            BridgeValue b = std::move(out);
            validate(b);
            return b;
        }
        throw shape_error();
    case Tag::TfTransform:
        // Frames are not recoverable from a bare matrix; tf frames are built
        // by the broadcast path.
        throw Error(errc::invalid_input, "tf transforms are published via broadcast");
    }
    throw shape_error();
}

} // namespace srb

#endif
