#ifndef SRB_ROBOT_HPP
#define SRB_ROBOT_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "srb/error.hpp"
#include "srb/mesh.hpp"
#include "srb/node.hpp"
#include "srb/urdf.hpp"

namespace srb {

constexpr const char* kJointStateTopic = "/joint_states";
constexpr const char* kRobotDescriptionParam = "robot_description";

// Link frame names are namespaced per robot so two robots coexist in one tf
// tree.
inline std::string link_frame(const RobotModel& model, const std::string& link) {
    return model.name + "/" + link;
}

// Subscribes to the joint-state topic and broadcasts one tf edge per joint
// after each received state. Messages naming unknown joints are skipped.
class StatePublisher {
public:
    StatePublisher(BridgeNode& node, RobotModel model) : node_(node), model_(std::move(model)) {
        sub_ = &node_.create_subscriber(Tag::JointState, kJointStateTopic);
        node_.scene().observe_modified(sub_->scene_node_id,
                                       [this](const std::string&) { on_joint_state(); });
    }

    uint64_t skipped_messages() const { return skipped_; }
    uint64_t published_states() const { return published_; }
    const RobotModel& model() const { return model_; }

private:
    void on_joint_state() {
        const auto* js = std::get_if<SceneJointState>(&sub_->latest_scene);
        if (!js) return;
        std::map<std::string, double> q;
        for (size_t i = 0; i < js->names.size(); ++i) {
            bool known = false;
            for (const auto& j : model_.joints) {
                if (j.name == js->names[i]) {
                    known = true;
                    break;
                }
            }
            if (!known) {
                skipped_++;
                return;
            }
            q[js->names[i]] = js->positions[i];
        }
        int64_t stamp = std::get<JointState>(sub_->latest_bridge).stamp_ns;
        std::map<std::string, Mat4> joint_mats;
        try {
            for (const UrdfJoint* j : model_.joints_in_tree_order()) {
                double qj = 0.0;
                if (auto it = q.find(j->name); it != q.end()) qj = it->second;
                joint_mats[j->name] = joint_transform(*j, qj);
            }
        } catch (const Error&) {
            skipped_++;
            return;
        }
        for (const auto& j : model_.joints) {
            TfTransform t;
            t.parent_frame = link_frame(model_, j.parent_link);
            t.child_frame = link_frame(model_, j.child_link);
            t.stamp_ns = stamp;
            const Mat4& m = joint_mats.at(j.name);
            t.translation = m.translation_part();
            t.rotation = matrix_to_quat(m);
            node_.broadcast(t);
        }
        published_++;
    }

    BridgeNode& node_;
    RobotModel model_;
    Subscriber* sub_;
    uint64_t skipped_ = 0;
    uint64_t published_ = 0;
};

inline std::unique_ptr<StatePublisher> create_state_publisher(BridgeNode& node,
                                                              RobotModel model) {
    return std::make_unique<StatePublisher>(node, std::move(model));
}

inline std::vector<uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(errc::not_found, "cannot open file: " + path);
    }
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                                std::istreambuf_iterator<char>());
}

// Mesh references resolve against a configurable search-root list; the
// package:// scheme maps to the same roots.
inline std::string resolve_mesh_path(const std::string& path,
                                     const std::vector<std::string>& search_roots) {
    namespace fs = std::filesystem;
    std::vector<std::string> candidates;
    std::string rest = path;
    if (rest.rfind("package://", 0) == 0) {
        rest = rest.substr(10);
        candidates.push_back(rest);
        // Also try with the package name stripped.
        auto slash = rest.find('/');
        if (slash != std::string::npos) candidates.push_back(rest.substr(slash + 1));
    } else {
        candidates.push_back(rest);
    }
    for (const auto& c : candidates) {
        if (fs::path(c).is_absolute() && fs::exists(c)) return c;
        for (const auto& root : search_roots) {
            fs::path p = fs::path(root) / c;
            if (fs::exists(p)) return p.string();
        }
        if (fs::exists(c)) return c;
    }
    throw Error(errc::not_found, "mesh file not found: " + path);
}

inline MeshData build_visual_mesh(const UrdfVisual& visual,
                                  const std::vector<std::string>& search_roots) {
    if (const auto* mesh = std::get_if<MeshFileGeometry>(&visual.geometry)) {
        MeshData m = load_stl(read_file_bytes(resolve_mesh_path(mesh->path, search_roots)));
        return scale_mesh(m, mesh->scale);
    }
    if (const auto* box = std::get_if<BoxGeometry>(&visual.geometry)) {
        return tessellate_box(box->size);
    }
    if (const auto* cyl = std::get_if<CylinderGeometry>(&visual.geometry)) {
        return tessellate_cylinder(cyl->radius, cyl->length);
    }
    return tessellate_sphere(std::get<SphereGeometry>(visual.geometry).radius);
}

enum class RobotLoadStatus { pending, loaded, failed };

// Auto-populates the scene from a monitored robot-description parameter:
// one transform node per link, one model node per visual, one lookup node
// per link. Loading progresses during spin and never raises.
class RobotNode {
public:
    RobotNode(BridgeNode& node, std::string param_node, std::string param_name,
              std::optional<std::string> fixed_frame, std::vector<std::string> mesh_search_roots)
        : node_(node), param_node_(std::move(param_node)), param_name_(std::move(param_name)),
          fixed_frame_(std::move(fixed_frame)), mesh_search_roots_(std::move(mesh_search_roots)) {
        monitor_ = &node_.create_parameter_monitor(param_node_);
    }

    RobotLoadStatus status() const { return status_; }
    const std::string& error() const { return error_; }
    const RobotModel& model() const { return model_; }
    const std::vector<std::string>& link_transform_ids() const { return link_transform_ids_; }
    const std::vector<std::string>& model_node_ids() const { return model_node_ids_; }
    size_t lookup_count() const { return lookup_count_; }

    // Called once per spin by the owning node.
    void update() {
        if (status_ != RobotLoadStatus::pending) return;
        if (!monitor_->ready(param_name_)) return;
        try {
            const auto& v = monitor_->get(param_name_);
            const auto* text = std::get_if<std::string>(&v);
            if (!text) {
                throw Error(errc::type_mismatch, "parameter '" + param_name_ + "' is not a string");
            }
            model_ = parse_urdf(*text);
            populate_scene();
            status_ = RobotLoadStatus::loaded;
        } catch (const Error& e) {
            status_ = RobotLoadStatus::failed;
            error_ = e.what();
        }
    }

private:
    void populate_scene() {
        Scene& scene = node_.scene();
        for (const auto& link : model_.links) {
            auto tn = std::make_unique<TransformNode>();
            tn->record.name = link_frame(model_, link.name);
            tn->record.class_tag = "srbRobotLinkNode";
            std::string link_id = scene.add_node(std::move(tn));
            link_transform_ids_.push_back(link_id);

            for (const auto& visual : link.visuals) {
                // The visual origin sits as a constant offset under the link
                // frame.
                auto offset = std::make_unique<TransformNode>();
                offset->record.name = link_frame(model_, link.name) + "/visual-offset";
                offset->record.class_tag = "srbRobotVisualOffsetNode";
                Mat4 origin =
                    rpy_to_matrix(visual.origin_rpy.x, visual.origin_rpy.y, visual.origin_rpy.z);
                origin.set_translation(visual.origin_xyz);
                offset->matrix = origin;
                std::string offset_id = scene.add_node(std::move(offset));
                scene.set_parent(offset_id, link_id);

                auto mn = std::make_unique<ModelNode>();
                mn->record.name = link_frame(model_, link.name) + "/visual";
                mn->record.class_tag = "srbRobotModelNode";
                mn->mesh = build_visual_mesh(visual, mesh_search_roots_);
                mn->color = {visual.color[0], visual.color[1], visual.color[2]};
                mn->opacity = visual.color[3];
                std::string model_id = scene.add_node(std::move(mn));
                scene.set_parent(model_id, offset_id);
                model_node_ids_.push_back(model_id);
            }

            std::string parent =
                fixed_frame_ ? *fixed_frame_ : link_frame(model_, model_.root_link);
            node_.create_lookup_node(parent, link_frame(model_, link.name));
            lookup_count_++;
        }
    }

    BridgeNode& node_;
    std::string param_node_;
    std::string param_name_;
    std::optional<std::string> fixed_frame_;
    std::vector<std::string> mesh_search_roots_;
    ParameterMonitor* monitor_;
    RobotModel model_;
    RobotLoadStatus status_ = RobotLoadStatus::pending;
    std::string error_;
    std::vector<std::string> link_transform_ids_;
    std::vector<std::string> model_node_ids_;
    size_t lookup_count_ = 0;
};

inline std::shared_ptr<RobotNode> load_robot(BridgeNode& node, const std::string& param_node_name,
                                             const std::string& param_name = kRobotDescriptionParam,
                                             std::optional<std::string> fixed_frame = std::nullopt,
                                             std::vector<std::string> mesh_search_roots = {}) {
    auto robot = std::make_shared<RobotNode>(node, param_node_name, param_name,
                                             std::move(fixed_frame), std::move(mesh_search_roots));
    node.add_spin_task([robot] { robot->update(); });
    return robot;
}

} // namespace srb

#endif
