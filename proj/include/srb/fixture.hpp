#ifndef SRB_FIXTURE_HPP
#define SRB_FIXTURE_HPP

#include <cmath>
#include <optional>
#include <string>

#include "srb/error.hpp"
#include "srb/geometry.hpp"
#include "srb/mesh.hpp"
#include "srb/node.hpp"

namespace srb {

// Closest point on a triangle (Ericson's region walk).
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 ab = b - a;
    Vec3 ac = c - a;
    Vec3 ap = p - a;
    double d1 = ab.dot(ap);
    double d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    Vec3 bp = p - b;
    double d3 = ab.dot(bp);
    double d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        double v = d1 / (d1 - d3);
        return a + ab * v;
    }

    Vec3 cp = p - c;
    double d5 = ab.dot(cp);
    double d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        double w = d2 / (d2 - d6);
        return a + ac * w;
    }

    double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }

    double denom = 1.0 / (va + vb + vc);
    double v = vb * denom;
    double w = vc * denom;
    return a + ab * v + ac * w;
}

// Exact minimum over all triangles (vertex / edge / interior cases).
inline std::pair<double, Vec3> point_mesh_distance(const Vec3& p, const MeshData& mesh) {
    if (mesh.empty()) {
        throw Error(errc::invalid_input, "mesh has no triangles");
    }
    double best = std::numeric_limits<double>::infinity();
    Vec3 closest;
    for (const auto& t : mesh.triangles) {
        Vec3 c = closest_point_on_triangle(p, mesh.vertices[t[0]], mesh.vertices[t[1]],
                                           mesh.vertices[t[2]]);
        double d = (p - c).norm();
        if (d < best) {
            best = d;
            closest = c;
        }
    }
    return {best, closest};
}

namespace detail {

enum class RayHit { miss, hit, degenerate };

// Watertight-enough ray/triangle test: hits within 1e-9 of an edge or
// vertex, or rays nearly parallel to the plane, report degenerate so the
// caller can re-cast.
inline RayHit ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                           const Vec3& c) {
    constexpr double eps = 1e-9;
    Vec3 e1 = b - a;
    Vec3 e2 = c - a;
    Vec3 h = dir.cross(e2);
    double det = e1.dot(h);
    if (std::abs(det) < eps * e1.norm() * e2.norm()) {
        // Parallel; only degenerate if the triangle is near the ray.
        Vec3 cp = closest_point_on_triangle(origin, a, b, c);
        Vec3 d = cp - origin;
        double along = d.dot(dir);
        if (along > -eps && (d - dir * along).norm() < eps) return RayHit::degenerate;
        return RayHit::miss;
    }
    double inv = 1.0 / det;
    Vec3 s = origin - a;
    double u = s.dot(h) * inv;
    Vec3 q = s.cross(e1);
    double v = dir.dot(q) * inv;
    double t = e2.dot(q) * inv;
    if (t < -eps) return RayHit::miss;
    if (u < -eps || v < -eps || u + v > 1.0 + eps) return RayHit::miss;
    if (u < eps || v < eps || u + v > 1.0 - eps || t < eps) return RayHit::degenerate;
    return RayHit::hit;
}

} // namespace detail

// Ray-casting parity test for watertight meshes. Degenerate hits trigger a
// deterministic re-cast with a perturbed direction, up to 8 retries.
inline bool is_inside(const Vec3& p, const MeshData& mesh) {
    if (mesh.empty()) {
        throw Error(errc::invalid_input, "mesh has no triangles");
    }
    Vec3 dir{1, 0, 0};
    for (int attempt = 0; attempt < 8; ++attempt) {
        int crossings = 0;
        bool degenerate = false;
        for (const auto& t : mesh.triangles) {
            switch (detail::ray_triangle(p, dir, mesh.vertices[t[0]], mesh.vertices[t[1]],
                                         mesh.vertices[t[2]])) {
            case detail::RayHit::hit:
                crossings++;
                break;
            case detail::RayHit::degenerate:
                degenerate = true;
                break;
            case detail::RayHit::miss:
                break;
            }
            if (degenerate) break;
        }
        if (!degenerate) return (crossings % 2) == 1;
        // Deterministic perturbation sequence.
        double a = 0.37 * (attempt + 1);
        double b = 0.71 * (attempt + 1);
        dir = Vec3{std::cos(a) * std::cos(b), std::sin(a) * std::cos(b), std::sin(b)}.normalized();
    }
    throw Error(errc::degenerate_geometry, "ray casting retries exhausted");
}

enum class BreachEvent { none, entered, exited };

// Tracks a tool tip against a closed surface: inside flag, signed distance
// (negative inside), and transition events.
struct BreachWarningState {
    std::string watched_node_id;
    MeshData surface;
    bool inside = false;
    bool initialized = false;
    double signed_distance = 0.0;
    Vec3 closest_point;
    int64_t last_stamp_ns = 0;

    BreachEvent update(const Vec3& tool_position, int64_t stamp_ns) {
        auto [dist, closest] = point_mesh_distance(tool_position, surface);
        bool now_inside = is_inside(tool_position, surface);
        signed_distance = now_inside ? -dist : dist;
        closest_point = closest;
        last_stamp_ns = stamp_ns;
        BreachEvent event = BreachEvent::none;
        if (initialized && now_inside != inside) {
            event = now_inside ? BreachEvent::entered : BreachEvent::exited;
        } else if (!initialized && now_inside) {
            event = BreachEvent::entered;
        }
        inside = now_inside;
        initialized = true;
        return event;
    }
};

enum class FixtureMode { latch, literal };

// Hold-in-place controller: while the tool is inside the surface it servos
// the robot pose publisher; while outside it publishes a null wrench and
// clears the latch. Exactly one publication per step.
class FixtureController {
public:
    FixtureController(BridgeNode& node, FixtureMode mode = FixtureMode::latch,
                      const std::string& measured_topic = "/measured_cp",
                      const std::string& servo_topic = "/servo_cp",
                      const std::string& wrench_topic = "/body/servo_cf")
        : node_(node), mode_(mode) {
        measured_sub_ = &node.create_subscriber(Tag::PoseStamped, measured_topic);
        servo_pub_ = &node.create_publisher(Tag::PoseStamped, servo_topic);
        wrench_pub_ = &node.create_publisher(Tag::WrenchStamped, wrench_topic);
    }

    Subscriber& measured_subscriber() { return *measured_sub_; }
    const std::optional<Mat4>& latched_pose() const { return latched_pose_; }
    FixtureMode mode() const { return mode_; }

    // One controller step given the breach state and the measured pose.
    void step(const BreachWarningState& state, const Mat4& measured_pose) {
        if (state.inside) {
            if (!latched_pose_) latched_pose_ = measured_pose;
            const Mat4& target = mode_ == FixtureMode::latch ? *latched_pose_ : measured_pose;
            node_.publish(*servo_pub_, scene_pose(target));
        } else {
            latched_pose_.reset();
            node_.publish(*wrench_pub_,
                          SceneValue(std::in_place_index<9>,
                                     std::array<double, 6>{0, 0, 0, 0, 0, 0}));
        }
    }

private:
    BridgeNode& node_;
    FixtureMode mode_;
    Subscriber* measured_sub_;
    Publisher* servo_pub_;
    Publisher* wrench_pub_;
    std::optional<Mat4> latched_pose_;
};

} // namespace srb

#endif
