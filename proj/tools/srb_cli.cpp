// Command-line front end: serve/pub/echo/params for ad-hoc topic work, plus
// benchmark and demo subcommands. Machine output is JSON on stdout; logs go
// to stderr. Exit codes: 0 success, 1 runtime error, 2 usage error.
#include <chrono>
#include <filesystem>
#include <numbers>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "srb/srb.hpp"

using namespace srb;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

struct CliConfig {
    std::string node_name = "srb-cli";
    int period_ms = 20;
    std::string listen_address;
    std::vector<std::string> connect_addresses;
    std::vector<std::string> mesh_roots;
    std::string report_path;
    std::string log_level = "info";
};

json config_to_json(const CliConfig& c) {
    return json{{"node_name", c.node_name},
                {"period_ms", c.period_ms},
                {"listen_address", c.listen_address},
                {"connect_addresses", c.connect_addresses},
                {"mesh_roots", c.mesh_roots},
                {"report_path", c.report_path},
                {"log_level", c.log_level}};
}

void log_info(const CliConfig& c, const std::string& msg) {
    if (c.log_level != "quiet") std::cerr << "[srb] " << msg << "\n";
}

std::unique_ptr<BridgeNode> make_node(const CliConfig& c) {
    auto node = std::make_unique<BridgeNode>(c.node_name,
                                             std::chrono::milliseconds(c.period_ms));
    if (!c.listen_address.empty()) {
        node->listen(c.listen_address);
        log_info(c, "listening on " + c.listen_address);
    }
    for (const auto& addr : c.connect_addresses) {
        node->connect(addr);
        log_info(c, "connected to " + addr);
    }
    return node;
}

void emit(const CliConfig& c, const json& report) {
    std::string text = report.dump(2);
    if (!c.report_path.empty()) {
        std::ofstream out(c.report_path);
        out << text << "\n";
    }
    std::cout << text << "\n";
}

json quat_json(const Quaternion& q) { return json::array({q.x, q.y, q.z, q.w}); }
json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json bridge_to_json(const BridgeValue& v) {
    json j;
    j["type"] = tag_name(tag_of(v));
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::string> || std::is_same_v<T, bool> ||
                          std::is_same_v<T, int64_t> || std::is_same_v<T, double> ||
                          std::is_same_v<T, std::vector<int64_t>> ||
                          std::is_same_v<T, std::vector<double>>) {
                j["value"] = x;
            } else if constexpr (std::is_same_v<T, IntTable> || std::is_same_v<T, DoubleTable>) {
                j["value"] = {{"rows", x.rows}, {"cols", x.cols}, {"data", x.data}};
            } else if constexpr (std::is_same_v<T, PoseStamped>) {
                j["value"] = {{"stamp_ns", x.stamp_ns},
                              {"frame_id", x.frame_id},
                              {"position", vec_json(x.position)},
                              {"orientation", quat_json(x.orientation)}};
            } else if constexpr (std::is_same_v<T, WrenchStamped>) {
                j["value"] = {{"stamp_ns", x.stamp_ns},
                              {"frame_id", x.frame_id},
                              {"force", vec_json(x.force)},
                              {"torque", vec_json(x.torque)}};
            } else if constexpr (std::is_same_v<T, PoseArray>) {
                json poses = json::array();
                for (const auto& [p, q] : x.poses) {
                    poses.push_back({{"position", vec_json(p)}, {"orientation", quat_json(q)}});
                }
                j["value"] = {{"stamp_ns", x.stamp_ns}, {"frame_id", x.frame_id}, {"poses", poses}};
            } else if constexpr (std::is_same_v<T, UInt8Image>) {
                j["value"] = {{"stamp_ns", x.stamp_ns}, {"frame_id", x.frame_id},
                              {"height", x.height},   {"width", x.width},
                              {"encoding", x.encoding}, {"step", x.step},
                              {"bytes", x.data.size()}};
            } else if constexpr (std::is_same_v<T, PointCloud>) {
                j["value"] = {{"stamp_ns", x.stamp_ns},
                              {"frame_id", x.frame_id},
                              {"points", x.points.size()}};
            } else if constexpr (std::is_same_v<T, JointState>) {
                j["value"] = {{"stamp_ns", x.stamp_ns},
                              {"names", x.names},
                              {"positions", x.positions}};
            } else if constexpr (std::is_same_v<T, TfTransform>) {
                j["value"] = {{"parent_frame", x.parent_frame},
                              {"child_frame", x.child_frame},
                              {"stamp_ns", x.stamp_ns},
                              {"translation", vec_json(x.translation)},
                              {"rotation", quat_json(x.rotation)}};
            }
        },
        v);
    return j;
}

// Builds a publishable value from the command line. The text is parsed as
// JSON; for String a bare unquoted value is also accepted.
BridgeValue bridge_from_text(Tag tag, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception&) {
        if (tag == Tag::String) return BridgeValue(std::in_place_index<0>, text);
        throw Error(errc::invalid_input, "value is not valid JSON: " + text);
    }
    try {
        switch (tag) {
        case Tag::String: return BridgeValue(std::in_place_index<0>, j.get<std::string>());
        case Tag::Bool: return BridgeValue(std::in_place_index<1>, j.get<bool>());
        case Tag::Int: return BridgeValue(std::in_place_index<2>, j.get<int64_t>());
        case Tag::Double: return BridgeValue(std::in_place_index<3>, j.get<double>());
        case Tag::IntArray:
            return BridgeValue(std::in_place_index<4>, j.get<std::vector<int64_t>>());
        case Tag::DoubleArray:
            return BridgeValue(std::in_place_index<5>, j.get<std::vector<double>>());
        case Tag::PoseStamped: {
            PoseStamped p;
            p.stamp_ns = system_now_ns();
            p.frame_id = j.value("frame_id", "");
            auto pos = j.at("position");
            p.position = {pos.at(0), pos.at(1), pos.at(2)};
            if (j.contains("orientation")) {
                auto q = j.at("orientation");
                p.orientation = {q.at(0), q.at(1), q.at(2), q.at(3)};
            }
            return BridgeValue(p);
        }
        case Tag::JointState: {
            JointState s;
            s.stamp_ns = system_now_ns();
            s.names = j.at("names").get<std::vector<std::string>>();
            s.positions = j.at("positions").get<std::vector<double>>();
            return BridgeValue(s);
        }
        default:
            throw Error(errc::invalid_input,
                        std::string("pub does not support type ") + tag_name(tag));
        }
    } catch (const json::exception& e) {
        throw Error(errc::invalid_input,
                    std::string("value does not match type ") + tag_name(tag) + ": " + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw Error(errc::not_found, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Spins until pred() or the deadline passes; returns whether pred held.
bool spin_until(BridgeNode& node, const std::function<bool()>& pred,
                std::chrono::milliseconds deadline) {
    auto end = std::chrono::steady_clock::now() + deadline;
    while (std::chrono::steady_clock::now() < end) {
        node.spin_once();
        if (pred()) return true;
        std::this_thread::sleep_for(node.spin_period());
    }
    return pred();
}

// Accepts name=value where value is JSON; a bare word is taken as a string.
ParamValue parse_param_value(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception&) {
        return ParamValue(text);
    }
    if (j.is_boolean()) return ParamValue(j.get<bool>());
    if (j.is_number_integer()) return ParamValue(j.get<int64_t>());
    if (j.is_number_float()) return ParamValue(j.get<double>());
    if (j.is_string()) return ParamValue(j.get<std::string>());
    throw Error(errc::invalid_input, "unsupported parameter value: " + text);
}

int cmd_serve(const CliConfig& cfg, uint64_t cycles,
              const std::vector<std::string>& param_specs) {
    auto node = make_node(cfg);
    for (const auto& spec : param_specs) {
        size_t eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw Error(errc::invalid_input, "expected name=value, got: " + spec);
        }
        node->set_parameter(spec.substr(0, eq), parse_param_value(spec.substr(eq + 1)));
    }
    log_info(cfg, "serving as '" + cfg.node_name + "'");
    SpinAggregate agg = node->spin_loop(cycles);
    emit(cfg, spin_report_to_json(agg));
    return 0;
}

int cmd_pub(const CliConfig& cfg, const std::string& topic, const std::string& type,
            const std::string& value_text) {
    Tag tag = tag_from_name(type);
    BridgeValue value = bridge_from_text(tag, value_text);
    auto node = make_node(cfg);
    Publisher& pub = node->create_publisher(tag, topic);
    std::string frame_id;
    if (const auto* p = std::get_if<PoseStamped>(&value)) frame_id = p->frame_id;
    node->publish(pub, bridge_to_scene(value), frame_id);
    node->spin_once();
    emit(cfg, json{{"published", 1}, {"topic", topic}, {"type", type}});
    return 0;
}

int cmd_echo(const CliConfig& cfg, const std::string& topic, const std::string& type,
             uint64_t count, int timeout_ms) {
    if (count == 0) return 0;
    Tag tag = tag_from_name(type);
    auto node = make_node(cfg);
    Subscriber& sub = node->create_subscriber(tag, topic);
    uint64_t printed = 0;
    node->scene().observe_modified(sub.scene_node_id, [&](const std::string&) {
        if (printed < count) {
            std::cout << bridge_to_json(sub.latest_bridge).dump() << "\n";
            ++printed;
        }
    });
    spin_until(*node, [&] { return printed >= count; },
               std::chrono::milliseconds(timeout_ms));
    if (printed < count) {
        log_info(cfg, "timed out after " + std::to_string(printed) + " messages");
        return 1;
    }
    return 0;
}

int cmd_params(const CliConfig& cfg, const std::string& remote, int timeout_ms) {
    auto node = make_node(cfg);
    ParameterMonitor& monitor = node->create_parameter_monitor(remote);
    if (!spin_until(*node, [&] { return monitor.any_received(); },
                    std::chrono::milliseconds(timeout_ms))) {
        throw Error(errc::unready, "no parameter broadcast from '" + remote + "'");
    }
    json snapshot = json::object();
    for (const auto& [name, value] : monitor.snapshot()) {
        snapshot[name] = param_to_json(value);
    }
    emit(cfg, json{{"node", remote}, {"parameters", snapshot}});
    return 0;
}

int cmd_load_urdf(const CliConfig& cfg, const std::string& path,
                  const std::string& fixed_frame) {
    CliConfig local = cfg;
    local.mesh_roots.push_back(std::filesystem::path(path).parent_path().string());
    auto node = make_node(local);
    node->set_parameter(kRobotDescriptionParam, ParamValue(read_file(path)));
    auto robot = load_robot(
        *node, cfg.node_name, kRobotDescriptionParam,
        fixed_frame.empty() ? std::nullopt : std::optional<std::string>(fixed_frame),
        local.mesh_roots);
    node->spin_once();
    node->spin_once();
    if (robot->status() != RobotLoadStatus::loaded) {
        throw Error(errc::parse, robot->error());
    }
    const RobotModel& m = robot->model();
    size_t visuals = 0;
    for (const auto& link : m.links) visuals += link.visuals.size();
    emit(cfg, json{{"name", m.name},
                   {"links", m.links.size()},
                   {"joints", m.joints.size()},
                   {"visuals", visuals},
                   {"root_link", m.root_link},
                   {"model_nodes", robot->model_node_ids().size()},
                   {"lookups", robot->lookup_count()},
                   {"fixed_frame", fixed_frame}});
    return 0;
}

// Runs both latency endpoints in this process over loopback TCP. The server
// spins on its own thread at its own period, as a second process would.
int cmd_bench_latency(const CliConfig& cfg, int server_period_ms, int client_period_ms,
                      uint64_t count) {
    BridgeNode server(cfg.node_name + "-server",
                      std::chrono::milliseconds(server_period_ms));
    BridgeNode client(cfg.node_name + "-client",
                      std::chrono::milliseconds(client_period_ms));
    server.listen("127.0.0.1:0");
    client.connect("127.0.0.1:" + std::to_string(server.listen_port()));
    attach_latency_responder(server);
    std::thread server_thread([&] { server.spin_loop(); });
    LatencyReport report =
        run_latency_client(client, std::chrono::milliseconds(client_period_ms), count);
    server.request_stop();
    server_thread.join();
    json j = latency_report_to_json(report);
    j["server_period_ms"] = server_period_ms;
    j["client_period_ms"] = client_period_ms;
    emit(cfg, j);
    return 0;
}

int cmd_bench_spin(const CliConfig& cfg, const std::string& urdf_path, uint64_t cycles,
                   int stream_period_ms) {
    auto node = make_node(cfg);
    node->set_parameter(kRobotDescriptionParam, ParamValue(read_file(urdf_path)));
    auto robot = load_robot(*node, cfg.node_name);
    node->spin_once();
    if (robot->status() != RobotLoadStatus::loaded) {
        throw Error(errc::parse, robot->error());
    }
    auto sp = create_state_publisher(*node, robot->model());
    std::vector<std::string> names;
    for (const auto& jnt : robot->model().joints) names.push_back(jnt.name);
    SpinAggregate agg;
    {
        JointStateStreamer streamer(node->inbound(), names,
                                    std::chrono::milliseconds(stream_period_ms));
        agg = node->spin_loop(cycles);
    }
    json j = spin_report_to_json(agg);
    j["robot"] = robot->model().name;
    j["joint_states_published"] = sp->published_states();
    emit(cfg, j);
    return 0;
}

int cmd_fixture_demo(const CliConfig& cfg, const std::string& mesh_path,
                     const std::string& mode_name) {
    FixtureMode mode = mode_name == "literal" ? FixtureMode::literal : FixtureMode::latch;
    BreachWarningState state;
    state.surface = mesh_path.empty() ? tessellate_sphere(1.0, 16, 32)
                                      : load_stl([&] {
                                            std::string bytes = read_file(mesh_path);
                                            return std::vector<uint8_t>(bytes.begin(),
                                                                        bytes.end());
                                        }());

    auto node = make_node(cfg);
    FixtureController ctrl(*node, mode);
    Subscriber& servo = node->create_subscriber(Tag::PoseStamped, "/servo_cp");

    SimDevice device;
    device.pose = Mat4::translation({1.2, 0, 0});

    // Scripted tool path: approach along -x, cross the surface, push 50 mm
    // past the entry point, then retreat. 0.5 mm steps.
    std::vector<double> xs;
    for (double x = 1.2; x > 0.95; x -= 0.0005) xs.push_back(x);
    for (double x = 0.95; x <= 1.2; x += 0.0005) xs.push_back(x);

    int entered = 0, exited = 0;
    uint64_t outside_wrenches = 0;
    double hold_error_max = 0;
    std::optional<Vec3> entry;
    for (size_t i = 0; i < xs.size(); ++i) {
        Vec3 p{xs[i], 0.02, 0.03}; // slightly off-axis, as a held tool would be
        BreachEvent ev = state.update(p, static_cast<int64_t>(i));
        ctrl.step(state, Mat4::translation(p));
        node->spin_once();
        if (ev == BreachEvent::entered) {
            ++entered;
            entry = p;
        } else if (ev == BreachEvent::exited) {
            ++exited;
        }
        if (state.inside) {
            device.servo_target =
                Mat4::translation(std::get<PoseStamped>(servo.latest_bridge).position);
            device.step(0.001);
            if (entry) {
                hold_error_max = std::max(
                    hold_error_max, (device.pose.translation_part() - *entry).norm());
            }
        } else {
            ++outside_wrenches; // controller published a null wrench this step
            device.servo_target.reset();
            device.pose = Mat4::translation(p);
        }
    }
    emit(cfg, json{{"mode", mode_name},
                   {"steps", xs.size()},
                   {"entered", entered},
                   {"exited", exited},
                   {"outside_wrench_steps", outside_wrenches},
                   {"hold_error_max_m", hold_error_max}});
    return 0;
}

int cmd_relay_demo(const CliConfig& cfg, double radius, double speed) {
    // Capture a circular tool path from a scene node, ship it as one
    // PoseArray through the codec, and replay it on a simulated follower.
    Scene scene;
    auto tn = std::make_unique<TransformNode>();
    tn->record.id = "tool";
    scene.add_node(std::move(tn));
    int i = 0;
    auto advance = [&] {
        double a = 2 * std::numbers::pi * (++i) / 32.0;
        scene.set_transform(
            "tool", Mat4::translation({radius * std::cos(a), radius * std::sin(a), 0}));
    };
    scene.set_transform("tool", Mat4::translation({radius, 0, 0}));
    TrajectoryPlan plan = capture_pose_array(scene, "tool", 0.01, 0.32, advance);

    std::vector<uint8_t> wire =
        encode("/trajectory", BridgeValue(plan_to_pose_array(plan, system_now_ns(), "world")));
    DecodedFrame frame = decode(wire);
    TrajectoryPlan received =
        pose_array_to_plan(std::get<PoseArray>(frame.value), speed, plan.sample_period);

    SimDevice device;
    device.pose = received.poses.front();
    std::vector<Mat4> trace = follow_trajectory(device, received);
    PathDeviation dev = path_deviation(received.poses, trace);
    auto indices = nearest_waypoint_indices(received.poses, trace);
    bool monotone = true;
    for (size_t k = 1; k < indices.size(); ++k) {
        if (indices[k] + 1 < indices[k - 1]) monotone = false;
    }
    emit(cfg, json{{"radius_m", radius},
                   {"speed_mps", speed},
                   {"waypoints", received.poses.size()},
                   {"executed_samples", trace.size()},
                   {"wire_bytes", wire.size()},
                   {"mean_deviation_m", dev.mean_m},
                   {"max_deviation_m", dev.max_m},
                   {"monotone_progress", monotone}});
    return 0;
}

int cmd_image_sink(const CliConfig& cfg, const std::string& topic, uint64_t count,
                   const std::string& out_dir, int timeout_ms) {
    std::filesystem::create_directories(out_dir);
    auto node = make_node(cfg);
    Subscriber& sub = node->create_subscriber(Tag::UInt8Image, topic);
    uint64_t written = 0, skipped = 0;
    node->scene().observe_modified(sub.scene_node_id, [&](const std::string&) {
        const auto& img = std::get<UInt8Image>(sub.latest_bridge);
        if (img.encoding != "mono8") {
            ++skipped;
            return;
        }
        std::string path = out_dir + "/img_" + std::to_string(written) + ".pgm";
        std::ofstream out(path, std::ios::binary);
        out << "P5\n" << img.width << " " << img.height << "\n255\n";
        for (uint32_t row = 0; row < img.height; ++row) {
            out.write(reinterpret_cast<const char*>(img.data.data() + row * img.step),
                      img.width);
        }
        log_info(cfg, "wrote " + path);
        ++written;
    });
    spin_until(*node, [&] { return written >= count; },
               std::chrono::milliseconds(timeout_ms));
    emit(cfg, json{{"written", written}, {"skipped", skipped}, {"out_dir", out_dir}});
    return written >= count ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scene bridge command-line tool"};
    app.require_subcommand(0, 1);
    app.fallthrough(); // global flags may follow the subcommand

    CliConfig cfg;
    bool dump_config = false;
    app.add_option("--name", cfg.node_name, "Node name")->envname("SRB_NAME");
    app.add_option("--period", cfg.period_ms, "Spin period in ms")
        ->envname("SRB_PERIOD")
        ->check(CLI::PositiveNumber);
    app.add_option("--listen", cfg.listen_address, "Listen address host:port")
        ->envname("SRB_LISTEN");
    app.add_option("--connect", cfg.connect_addresses, "Peer address host:port")
        ->envname("SRB_CONNECT");
    app.add_option("--mesh-root", cfg.mesh_roots, "Mesh search root")
        ->envname("SRB_MESH_ROOT");
    app.add_option("--output", cfg.report_path, "Also write the JSON report to this file")
        ->envname("SRB_OUTPUT");
    app.add_option("--log-level", cfg.log_level, "info or quiet")->envname("SRB_LOG_LEVEL");
    app.add_flag("--dump-config", dump_config, "Print the parsed configuration and exit");

    uint64_t serve_cycles = 0;
    std::vector<std::string> serve_params;
    CLI::App* serve = app.add_subcommand("serve", "Run a spin loop");
    serve->add_option("--cycles", serve_cycles, "Stop after N cycles (0 = run until killed)");
    serve->add_option("--param", serve_params, "Set a parameter, name=value (value is JSON)");

    std::string topic, type, value_text;
    CLI::App* pub = app.add_subcommand("pub", "Publish one message");
    pub->add_option("topic", topic)->required();
    pub->add_option("type", type)->required();
    pub->add_option("value", value_text)->required();

    uint64_t echo_count = 1;
    int timeout_ms = 5000;
    CLI::App* echo = app.add_subcommand("echo", "Print received messages as JSON");
    echo->add_option("topic", topic)->required();
    echo->add_option("type", type)->required();
    echo->add_option("count", echo_count);
    echo->add_option("--timeout", timeout_ms, "Timeout in ms");

    std::string remote_node;
    CLI::App* params = app.add_subcommand("params", "Print a node's parameter snapshot");
    params->add_option("node", remote_node)->required();
    params->add_option("--timeout", timeout_ms, "Timeout in ms");

    std::string urdf_path, fixed_frame;
    CLI::App* load = app.add_subcommand("load-urdf", "Load a robot description");
    load->add_option("path", urdf_path)->required()->check(CLI::ExistingFile);
    load->add_option("--fixed-frame", fixed_frame, "Parent frame for link lookups");

    int server_period_ms = 20, client_period_ms = 20;
    uint64_t bench_count = 100;
    CLI::App* bl = app.add_subcommand("bench-latency", "Round-trip time-of-flight benchmark");
    bl->add_option("server_period_ms", server_period_ms)->check(CLI::PositiveNumber);
    bl->add_option("client_period_ms", client_period_ms)->check(CLI::PositiveNumber);
    bl->add_option("count", bench_count);

    uint64_t spin_cycles = 100;
    int stream_period_ms = 20;
    CLI::App* bs = app.add_subcommand("bench-spin", "Spin duration benchmark with a robot");
    bs->add_option("urdf", urdf_path)->required()->check(CLI::ExistingFile);
    bs->add_option("cycles", spin_cycles);
    bs->add_option("--stream-period", stream_period_ms, "Joint-state stream period in ms");

    std::string mesh_path, fixture_mode = "latch";
    CLI::App* fx = app.add_subcommand("fixture-demo", "Scripted breach-warning fixture run");
    fx->add_option("--mesh", mesh_path, "STL surface (default: unit sphere)")
        ->check(CLI::ExistingFile);
    fx->add_option("--mode", fixture_mode)->check(CLI::IsMember({"latch", "literal"}));

    double relay_radius = 0.05, relay_speed = 0.01;
    CLI::App* relay = app.add_subcommand("relay-demo", "Circular trajectory relay run");
    relay->add_option("radius", relay_radius)->check(CLI::PositiveNumber);
    relay->add_option("speed", relay_speed)->check(CLI::PositiveNumber);

    std::string sink_dir = ".";
    uint64_t sink_count = 1;
    CLI::App* sink = app.add_subcommand("image-sink", "Write received mono8 images as PGM");
    sink->add_option("topic", topic)->required();
    sink->add_option("count", sink_count);
    sink->add_option("--out-dir", sink_dir);
    sink->add_option("--timeout", timeout_ms, "Timeout in ms");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (dump_config) {
            std::cout << config_to_json(cfg).dump(2) << "\n";
            return 0;
        }
        if (serve->parsed()) return cmd_serve(cfg, serve_cycles, serve_params);
        if (pub->parsed()) return cmd_pub(cfg, topic, type, value_text);
        if (echo->parsed()) return cmd_echo(cfg, topic, type, echo_count, timeout_ms);
        if (params->parsed()) return cmd_params(cfg, remote_node, timeout_ms);
        if (load->parsed()) return cmd_load_urdf(cfg, urdf_path, fixed_frame);
        if (bl->parsed())
            return cmd_bench_latency(cfg, server_period_ms, client_period_ms, bench_count);
        if (bs->parsed()) return cmd_bench_spin(cfg, urdf_path, spin_cycles, stream_period_ms);
        if (fx->parsed()) return cmd_fixture_demo(cfg, mesh_path, fixture_mode);
        if (relay->parsed()) return cmd_relay_demo(cfg, relay_radius, relay_speed);
        if (sink->parsed()) return cmd_image_sink(cfg, topic, sink_count, sink_dir, timeout_ms);
        std::cerr << app.help();
        return 2;
    } catch (const Error& e) {
        // Bad values or names given on the command line are usage errors.
        if (e.code() == errc::invalid_input) {
            std::cerr << "usage error: " << e.what() << "\n";
            return 2;
        }
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
