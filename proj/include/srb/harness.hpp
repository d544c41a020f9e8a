#ifndef SRB_HARNESS_HPP
#define SRB_HARNESS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "srb/error.hpp"
#include "srb/geometry.hpp"
#include "srb/node.hpp"
#include "srb/robot.hpp"

namespace srb {

constexpr const char* kLatencyPingTopic = "/latency/ping";
constexpr const char* kLatencyPongTopic = "/latency/pong";

// ---- Round-trip latency -----------------------------------------------------

struct LatencyReport {
    uint64_t sent = 0;
    uint64_t received = 0;
    uint64_t lost = 0;
    std::vector<int64_t> tof_ns;

    double mean_ms() const {
        if (tof_ns.empty()) return 0.0;
        double s = 0;
        for (int64_t t : tof_ns) s += static_cast<double>(t);
        return s / static_cast<double>(tof_ns.size()) / 1e6;
    }

    double stddev_ms() const {
        if (tof_ns.size() < 2) return 0.0;
        double m = mean_ms();
        double s = 0;
        for (int64_t t : tof_ns) {
            double x = static_cast<double>(t) / 1e6 - m;
            s += x * x;
        }
        return std::sqrt(s / static_cast<double>(tof_ns.size() - 1));
    }

    double min_ms() const {
        return tof_ns.empty()
                   ? 0.0
                   : static_cast<double>(*std::min_element(tof_ns.begin(), tof_ns.end())) / 1e6;
    }

    double max_ms() const {
        return tof_ns.empty()
                   ? 0.0
                   : static_cast<double>(*std::max_element(tof_ns.begin(), tof_ns.end())) / 1e6;
    }
};

inline nlohmann::json latency_report_to_json(const LatencyReport& r) {
    return {{"sent", r.sent},       {"received", r.received}, {"lost", r.lost},
            {"mean_ms", r.mean_ms()}, {"stddev_ms", r.stddev_ms()}, {"min_ms", r.min_ms()},
            {"max_ms", r.max_ms()}};
}

// Server half of the relay loop: each ping is republished as a pong from
// the subscriber's modified observer.
inline void attach_latency_responder(BridgeNode& server) {
    server.attach_relay(Tag::Double, kLatencyPingTopic, kLatencyPongTopic);
}

// Client half: publishes Double messages embedding the send time and
// measures time of flight against the arrival stamp of the returned copy.
// Both timestamps come from this process's clock.
//
// Successive sends advance by period + period/count, sweeping the send
// phase across the responder's polling cycle so the per-run mean reflects
// the expected half-period wait instead of one arbitrary fixed phase.
inline LatencyReport run_latency_client(BridgeNode& client, std::chrono::nanoseconds period,
                                        uint64_t count) {
    Publisher& pub = client.create_publisher(Tag::Double, kLatencyPingTopic);
    Subscriber& sub = client.create_subscriber(Tag::Double, kLatencyPongTopic);
    LatencyReport report;
    client.scene().observe_modified(sub.scene_node_id, [&](const std::string&) {
        double embedded = std::get<double>(sub.latest_scene);
        report.tof_ns.push_back(sub.receive_stamp_ns - static_cast<int64_t>(embedded));
        report.received++;
    });

    // A random phase offset per send keeps the arrival phase at the
    // responder uniform even if the two loops drift, so the mean time of
    // flight approaches half the responder's period.
    std::mt19937 rng(20221);
    std::uniform_int_distribution<int64_t> phase(0, period.count() - 1);
    auto start = std::chrono::steady_clock::now();
    for (uint64_t i = 0; i < count; ++i) {
        client.publish(pub, SceneValue(std::in_place_index<3>,
                                       static_cast<double>(steady_now_ns())));
        report.sent++;
        client.spin_once();
        auto next = start + (static_cast<int64_t>(i) + 1) * period +
                    std::chrono::nanoseconds(phase(rng));
        std::this_thread::sleep_until(next);
    }
    // Collect stragglers for up to one second.
    auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(1);
    while (report.received < report.sent && std::chrono::steady_clock::now() < deadline) {
        client.spin_once();
        std::this_thread::sleep_for(period / 4);
    }
    report.lost = report.sent - report.received;
    return report;
}

// ---- Simulated servo device -------------------------------------------------

// First-order servo stand-in for a haptic or teleoperated robot. With a
// target set, the pose converges geometrically; otherwise it follows the
// scripted input stream. The script index always advances: the input is
// consumed whether or not the servo overrides it.
class SimDevice {
public:
    Mat4 pose;
    std::optional<Mat4> servo_target;
    double gain = 0.2; // alpha in (0, 1]
    std::vector<Mat4> script;
    size_t script_index = 0;

    BridgeNode* publish_node = nullptr;
    Publisher* measured_pub = nullptr;

    bool script_done() const { return script_index >= script.size(); }

    std::optional<Mat4> current_script_pose() const {
        if (script.empty()) return std::nullopt;
        size_t i = std::min(script_index, script.size() - 1);
        return script[i];
    }

    void step(double dt) {
        if (dt <= 0.0) {
            throw Error(errc::invalid_input, "step dt must be positive");
        }
        if (servo_target) {
            pose = interpolate_pose(pose, *servo_target, gain);
            if (script_index < script.size()) script_index++;
        } else if (script_index < script.size()) {
            pose = script[script_index++];
        }
        if (publish_node && measured_pub) {
            publish_node->publish(*measured_pub, scene_pose(pose));
        }
    }

    static Mat4 interpolate_pose(const Mat4& from, const Mat4& to, double t) {
        Vec3 p = from.translation_part() + (to.translation_part() - from.translation_part()) * t;
        Quaternion q = slerp(matrix_to_quat(from), matrix_to_quat(to), t);
        return make_transform(p, q);
    }
};

// ---- Trajectory relay -------------------------------------------------------

struct TrajectoryPlan {
    std::vector<Mat4> poses;
    double speed = 0.1;          // m/s
    double sample_period = 0.01; // s
};

// Samples a scene node's world transform at a fixed cadence. The advance
// callback runs between samples and stands in for whatever moves the node.
inline TrajectoryPlan capture_pose_array(Scene& scene, const std::string& node_id,
                                         double sample_period, double duration,
                                         const std::function<void()>& advance = {}) {
    TrajectoryPlan plan;
    plan.sample_period = sample_period;
    int samples = static_cast<int>(std::round(duration / sample_period));
    for (int i = 0; i < samples; ++i) {
        plan.poses.push_back(scene.world_transform(node_id));
        if (advance) advance();
    }
    return plan;
}

inline PoseArray plan_to_pose_array(const TrajectoryPlan& plan, int64_t stamp_ns,
                                    const std::string& frame_id) {
    SceneValue collection(std::in_place_index<10>, plan.poses);
    return std::get<PoseArray>(scene_to_bridge(collection, Tag::PoseArray, stamp_ns, frame_id));
}

inline TrajectoryPlan pose_array_to_plan(const PoseArray& pa, double speed,
                                         double sample_period) {
    TrajectoryPlan plan;
    plan.speed = speed;
    plan.sample_period = sample_period;
    for (const auto& [pos, rot] : pa.poses) {
        plan.poses.push_back(make_transform(pos, rot));
    }
    return plan;
}

// Constant-speed interpolating follower: linear position and slerp
// orientation between waypoints, one recorded pose per sample period.
inline std::vector<Mat4> follow_trajectory(SimDevice& device, const TrajectoryPlan& plan) {
    if (plan.poses.empty()) {
        throw Error(errc::invalid_input, "trajectory plan is empty");
    }
    for (const Mat4& m : plan.poses) {
        for (double v : m.m) {
            if (!std::isfinite(v)) {
                throw Error(errc::invalid_input, "trajectory plan contains non-finite pose");
            }
        }
    }
    constexpr double kReachTolerance = 1e-4; // m
    std::vector<Mat4> trace;
    trace.push_back(device.pose);
    double step = plan.speed * plan.sample_period;
    for (const Mat4& waypoint : plan.poses) {
        while ((device.pose.translation_part() - waypoint.translation_part()).norm() >
               kReachTolerance) {
            Vec3 from = device.pose.translation_part();
            Vec3 to = waypoint.translation_part();
            double dist = (to - from).norm();
            double t = std::min(1.0, step / dist);
            Vec3 p = from + (to - from) * t;
            Quaternion q = slerp(matrix_to_quat(device.pose), matrix_to_quat(waypoint), t);
            device.pose = make_transform(p, q);
            trace.push_back(device.pose);
        }
        device.pose = waypoint;
    }
    return trace;
}

inline double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    Vec3 ab = b - a;
    double len2 = ab.dot(ab);
    if (len2 == 0.0) return (p - a).norm();
    double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

struct PathDeviation {
    double mean_m = 0;
    double max_m = 0;
};

// Per executed sample: distance to the nearest point on the planned
// polyline.
inline PathDeviation path_deviation(const std::vector<Mat4>& planned,
                                    const std::vector<Mat4>& executed) {
    if (planned.empty() || executed.empty()) {
        throw Error(errc::invalid_input, "traces must be nonempty");
    }
    PathDeviation out;
    double sum = 0;
    for (const Mat4& e : executed) {
        Vec3 p = e.translation_part();
        double best = std::numeric_limits<double>::infinity();
        if (planned.size() == 1) {
            best = (p - planned[0].translation_part()).norm();
        }
        for (size_t i = 0; i + 1 < planned.size(); ++i) {
            best = std::min(best, point_segment_distance(p, planned[i].translation_part(),
                                                         planned[i + 1].translation_part()));
        }
        sum += best;
        out.max_m = std::max(out.max_m, best);
    }
    out.mean_m = sum / static_cast<double>(executed.size());
    return out;
}

// Index of the nearest planned waypoint for each executed sample; used to
// check monotone progress.
inline std::vector<size_t> nearest_waypoint_indices(const std::vector<Mat4>& planned,
                                                    const std::vector<Mat4>& executed) {
    std::vector<size_t> out;
    out.reserve(executed.size());
    for (const Mat4& e : executed) {
        Vec3 p = e.translation_part();
        size_t best_i = 0;
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < planned.size(); ++i) {
            double d = (p - planned[i].translation_part()).norm();
            if (d < best) {
                best = d;
                best_i = i;
            }
        }
        out.push_back(best_i);
    }
    return out;
}

// ---- Spin overhead ----------------------------------------------------------

// Pushes joint-state frames straight into a node's inbound queue at a fixed
// rate, standing in for a remote publisher process.
class JointStateStreamer {
public:
    JointStateStreamer(InboundQueue& target, std::vector<std::string> joint_names,
                       std::chrono::nanoseconds period)
        : target_(target), joint_names_(std::move(joint_names)), period_(period) {
        thread_ = std::thread([this] { run(); });
    }

    ~JointStateStreamer() { stop(); }

    void stop() {
        stopping_ = true;
        if (thread_.joinable()) thread_.join();
    }

private:
    void run() {
        auto next = std::chrono::steady_clock::now();
        uint64_t tick = 0;
        while (!stopping_) {
            JointState js;
            js.stamp_ns = system_now_ns();
            js.names = joint_names_;
            for (size_t i = 0; i < joint_names_.size(); ++i) {
                js.positions.push_back(0.3 * std::sin(0.05 * static_cast<double>(tick) +
                                                      static_cast<double>(i)));
            }
            target_.push(encode(kJointStateTopic, BridgeValue(js)));
            tick++;
            next += period_;
            std::this_thread::sleep_until(next);
        }
    }

    InboundQueue& target_;
    std::vector<std::string> joint_names_;
    std::chrono::nanoseconds period_;
    std::atomic<bool> stopping_{false};
    std::thread thread_;
};

inline nlohmann::json spin_report_to_json(const SpinAggregate& agg) {
    return {{"cycles", agg.cycles},
            {"overruns", agg.overruns},
            {"messages_processed", agg.messages_processed},
            {"malformed_frames", agg.malformed_frames},
            {"mean_ms", agg.mean_ms()},
            {"stddev_ms", agg.stddev_ms()}};
}

} // namespace srb

#endif
