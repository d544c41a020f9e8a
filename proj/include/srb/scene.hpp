#ifndef SRB_SCENE_HPP
#define SRB_SCENE_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "srb/error.hpp"
#include "srb/geometry.hpp"
#include "srb/mesh.hpp"

namespace srb {

struct SceneNodeRecord {
    std::string id;
    std::string name;
    std::string class_tag;
    uint64_t modified_count = 0;
};

struct SceneNode {
    SceneNodeRecord record;
    std::optional<std::string> parent_transform_id;

    virtual ~SceneNode() = default;
    virtual const Mat4* local_matrix() const { return nullptr; }
};

struct TransformNode : SceneNode {
    Mat4 matrix;

    const Mat4* local_matrix() const override { return &matrix; }
};

struct ModelNode : SceneNode {
    MeshData mesh;
    std::array<double, 3> color{0.5, 0.5, 0.5};
    double opacity = 1.0;
};

struct ObserverHandle {
    uint64_t id = 0;
    std::string node_id;
};

// Observable scene graph. Single-owner: all mutation and observer dispatch
// happen on the owning node's spin thread.
class Scene {
public:
    using Callback = std::function<void(const std::string& node_id)>;

    std::string add_node(std::unique_ptr<SceneNode> node) {
        if (node->record.id.empty()) {
            node->record.id = "scene-node-" + std::to_string(next_auto_id_++);
        }
        const std::string id = node->record.id;
        if (nodes_.count(id)) {
            throw Error(errc::conflict, "node id already present: " + id);
        }
        nodes_.emplace(id, std::move(node));
        return id;
    }

    SceneNode& get_node(const std::string& id) {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) {
            throw Error(errc::not_found, "no node with id " + id);
        }
        return *it->second;
    }

    const SceneNode& get_node(const std::string& id) const {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) {
            throw Error(errc::not_found, "no node with id " + id);
        }
        return *it->second;
    }

    bool has_node(const std::string& id) const { return nodes_.count(id) != 0; }

    TransformNode& get_transform_node(const std::string& id) {
        auto* t = dynamic_cast<TransformNode*>(&get_node(id));
        if (!t) {
            throw Error(errc::type_mismatch, "node is not a transform node: " + id);
        }
        return *t;
    }

    ModelNode& get_model_node(const std::string& id) {
        auto* m = dynamic_cast<ModelNode*>(&get_node(id));
        if (!m) {
            throw Error(errc::type_mismatch, "node is not a model node: " + id);
        }
        return *m;
    }

    void remove_node(const std::string& id) {
        if (!nodes_.count(id)) {
            throw Error(errc::not_found, "no node with id " + id);
        }
        // Children keep their local matrices but lose the parent reference.
        for (auto& [other_id, node] : nodes_) {
            if (node->parent_transform_id == id) {
                node->parent_transform_id.reset();
            }
        }
        observers_.erase(id);
        nodes_.erase(id);
    }

    void set_parent(const std::string& child_id, const std::string& parent_id) {
        SceneNode& child = get_node(child_id);
        get_transform_node(parent_id);
        // Walk up from the prospective parent; hitting the child is a cycle.
        std::string cursor = parent_id;
        while (true) {
            if (cursor == child_id) {
                throw Error(errc::cycle, "parenting " + child_id + " under " + parent_id +
                                             " would create a cycle");
            }
            const SceneNode& n = get_node(cursor);
            if (!n.parent_transform_id) break;
            cursor = *n.parent_transform_id;
        }
        child.parent_transform_id = parent_id;
    }

    void clear_parent(const std::string& child_id) {
        get_node(child_id).parent_transform_id.reset();
    }

    Mat4 world_transform(const std::string& id) const {
        const SceneNode& n = get_node(id);
        Mat4 local = n.local_matrix() ? *n.local_matrix() : Mat4::identity();
        if (!n.parent_transform_id) return local;
        return world_transform(*n.parent_transform_id) * local;
    }

    ObserverHandle observe_modified(const std::string& node_id, Callback cb) {
        get_node(node_id);
        ObserverHandle h{next_observer_id_++, node_id};
        observers_[node_id].push_back({h.id, std::move(cb)});
        return h;
    }

    void unobserve(const ObserverHandle& handle) {
        auto it = observers_.find(handle.node_id);
        if (it == observers_.end()) {
            throw Error(errc::not_found, "no observers for node " + handle.node_id);
        }
        auto& list = it->second;
        for (auto lit = list.begin(); lit != list.end(); ++lit) {
            if (lit->id == handle.id) {
                list.erase(lit);
                return;
            }
        }
        throw Error(errc::not_found, "stale observer handle");
    }

    // Increments modified_count and fires observers in registration order.
    // Re-entrant notifications from inside a callback are deferred until the
    // current callback chain completes.
    void notify_modified(const std::string& node_id) {
        get_node(node_id).record.modified_count++;
        pending_.push_back(node_id);
        if (dispatching_) return;
        dispatching_ = true;
        while (!pending_.empty()) {
            std::string id = pending_.front();
            pending_.erase(pending_.begin());
            auto it = observers_.find(id);
            if (it == observers_.end()) continue;
            // Copy: callbacks may add or remove observers.
            auto entries = it->second;
            for (auto& e : entries) {
                bool still_registered = false;
                for (auto& live : observers_[id]) {
                    if (live.id == e.id) { still_registered = true; break; }
                }
                if (still_registered) e.callback(id);
            }
        }
        dispatching_ = false;
    }

    void set_transform(const std::string& id, const Mat4& m) {
        get_transform_node(id).matrix = m;
        notify_modified(id);
    }

    std::vector<std::string> node_ids() const {
        std::vector<std::string> ids;
        ids.reserve(nodes_.size());
        for (const auto& [id, _] : nodes_) ids.push_back(id);
        return ids;
    }

    size_t size() const { return nodes_.size(); }

private:
    struct ObserverEntry {
        uint64_t id;
        Callback callback;
    };

    std::map<std::string, std::unique_ptr<SceneNode>> nodes_;
    std::map<std::string, std::vector<ObserverEntry>> observers_;
    std::vector<std::string> pending_;
    bool dispatching_ = false;
    uint64_t next_observer_id_ = 1;
    uint64_t next_auto_id_ = 1;
};

} // namespace srb

#endif
