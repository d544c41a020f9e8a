#ifndef SRB_URDF_HPP
#define SRB_URDF_HPP

#include <array>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "srb/error.hpp"
#include "srb/geometry.hpp"
#include "srb/xml.hpp"

namespace srb {

struct MeshFileGeometry {
    std::string path;
    Vec3 scale{1, 1, 1};
};

struct BoxGeometry {
    Vec3 size;
};

struct CylinderGeometry {
    double radius = 0;
    double length = 0;
};

struct SphereGeometry {
    double radius = 0;
};

using VisualGeometry =
    std::variant<MeshFileGeometry, BoxGeometry, CylinderGeometry, SphereGeometry>;

struct UrdfVisual {
    VisualGeometry geometry;
    Vec3 origin_xyz;
    Vec3 origin_rpy; // radians, applied as Rz(y)*Ry(p)*Rx(r)
    std::array<double, 4> color{0.5, 0.5, 0.5, 1.0};
};

struct UrdfLink {
    std::string name;
    std::vector<UrdfVisual> visuals;
};

enum class JointKind { fixed, revolute, continuous, prismatic };

struct JointLimits {
    double lower = 0;
    double upper = 0;
};

struct UrdfJoint {
    std::string name;
    JointKind kind = JointKind::fixed;
    std::string parent_link;
    std::string child_link;
    Vec3 origin_xyz;
    Vec3 origin_rpy;
    Vec3 axis{1, 0, 0};
    std::optional<JointLimits> limits; // required for revolute and prismatic
};

struct RobotModel {
    std::string name;
    std::vector<UrdfLink> links;
    std::vector<UrdfJoint> joints;
    std::string root_link;
    std::vector<std::string> warnings; // skipped unsupported elements

    const UrdfLink* find_link(const std::string& link_name) const {
        for (const auto& l : links) {
            if (l.name == link_name) return &l;
        }
        return nullptr;
    }

    // Joints in tree order (parents before children).
    std::vector<const UrdfJoint*> joints_in_tree_order() const {
        std::vector<const UrdfJoint*> order;
        std::set<std::string> placed{root_link};
        while (order.size() < joints.size()) {
            bool progressed = false;
            for (const auto& j : joints) {
                if (placed.count(j.child_link)) continue;
                if (placed.count(j.parent_link)) {
                    order.push_back(&j);
                    placed.insert(j.child_link);
                    progressed = true;
                }
            }
            if (!progressed) break;
        }
        return order;
    }
};

namespace detail {

inline std::vector<double> parse_number_list(const std::string& text, size_t expected, int line,
                                             const std::string& what) {
    std::istringstream in(text);
    std::vector<double> out;
    double v;
    while (in >> v) out.push_back(v);
    if (out.size() != expected) {
        throw ParseError(what + " expects " + std::to_string(expected) + " numbers, got '" + text +
                             "'",
                         line);
    }
    return out;
}

inline void parse_origin(const xml::Element* origin, Vec3& xyz, Vec3& rpy) {
    xyz = {0, 0, 0};
    rpy = {0, 0, 0};
    if (!origin) return;
    if (origin->has_attribute("xyz")) {
        auto v = parse_number_list(origin->attribute("xyz"), 3, origin->line, "origin xyz");
        xyz = {v[0], v[1], v[2]};
    }
    if (origin->has_attribute("rpy")) {
        auto v = parse_number_list(origin->attribute("rpy"), 3, origin->line, "origin rpy");
        rpy = {v[0], v[1], v[2]};
    }
}

inline VisualGeometry parse_geometry(const xml::Element& geom) {
    if (const auto* mesh = geom.first_child("mesh")) {
        MeshFileGeometry g;
        g.path = mesh->attribute("filename");
        if (mesh->has_attribute("scale")) {
            auto v = parse_number_list(mesh->attribute("scale"), 3, mesh->line, "mesh scale");
            g.scale = {v[0], v[1], v[2]};
        }
        return g;
    }
    if (const auto* box = geom.first_child("box")) {
        auto v = parse_number_list(box->attribute("size"), 3, box->line, "box size");
        return BoxGeometry{{v[0], v[1], v[2]}};
    }
    if (const auto* cyl = geom.first_child("cylinder")) {
        CylinderGeometry g;
        g.radius = std::stod(cyl->attribute("radius"));
        g.length = std::stod(cyl->attribute("length"));
        return g;
    }
    if (const auto* sph = geom.first_child("sphere")) {
        return SphereGeometry{std::stod(sph->attribute("radius"))};
    }
    throw ParseError("geometry element has no supported shape", geom.line);
}

} // namespace detail

// Parses the URDF subset: links with visual geometry and materials, joints
// of the four supported kinds. Collision, inertial, and transmission
// elements are skipped with a recorded warning.
inline RobotModel parse_urdf(const std::string& xml_text) {
    std::unique_ptr<xml::Element> root;
    try {
        root = xml::parse(xml_text);
    } catch (const ParseError&) {
        throw;
    }
    if (root->name != "robot") {
        throw ParseError("document root must be <robot>, got <" + root->name + ">", root->line);
    }
    RobotModel model;
    model.name = root->attribute_or("name", "robot");

    // Named materials declared at robot level.
    std::map<std::string, std::array<double, 4>> materials;
    auto read_material_color = [](const xml::Element& mat) -> std::optional<std::array<double, 4>> {
        if (const auto* color = mat.first_child("color")) {
            auto v = detail::parse_number_list(color->attribute("rgba"), 4, color->line,
                                               "material rgba");
            return std::array<double, 4>{v[0], v[1], v[2], v[3]};
        }
        return std::nullopt;
    };
    for (const auto* mat : root->children_named("material")) {
        if (auto c = read_material_color(*mat); c && mat->has_attribute("name")) {
            materials[mat->attribute("name")] = *c;
        }
    }

    std::set<std::string> link_names;
    for (const auto& child : root->children) {
        if (child->name == "link") {
            UrdfLink link;
            link.name = child->attribute("name");
            if (!link_names.insert(link.name).second) {
                throw ParseError("duplicate link name '" + link.name + "'", child->line);
            }
            for (const auto* vis : child->children_named("visual")) {
                UrdfVisual visual;
                const auto* geom = vis->first_child("geometry");
                if (!geom) {
                    throw ParseError("visual without geometry in link '" + link.name + "'",
                                     vis->line);
                }
                visual.geometry = detail::parse_geometry(*geom);
                detail::parse_origin(vis->first_child("origin"), visual.origin_xyz,
                                     visual.origin_rpy);
                if (const auto* mat = vis->first_child("material")) {
                    if (auto c = read_material_color(*mat)) {
                        visual.color = *c;
                    } else if (mat->has_attribute("name")) {
                        auto it = materials.find(mat->attribute("name"));
                        if (it != materials.end()) visual.color = it->second;
                    }
                }
                link.visuals.push_back(std::move(visual));
            }
            for (const auto& sub : child->children) {
                if (sub->name == "collision" || sub->name == "inertial") {
                    model.warnings.push_back("skipped <" + sub->name + "> in link '" + link.name +
                                             "' (line " + std::to_string(sub->line) + ")");
                }
            }
            model.links.push_back(std::move(link));
        } else if (child->name == "joint") {
            UrdfJoint joint;
            joint.name = child->attribute("name");
            std::string type = child->attribute("type");
            if (type == "fixed") joint.kind = JointKind::fixed;
            else if (type == "revolute") joint.kind = JointKind::revolute;
            else if (type == "continuous") joint.kind = JointKind::continuous;
            else if (type == "prismatic") joint.kind = JointKind::prismatic;
            else {
                throw ParseError("unsupported joint type '" + type + "'", child->line);
            }
            const auto* parent = child->first_child("parent");
            const auto* jchild = child->first_child("child");
            if (!parent || !jchild) {
                throw ParseError("joint '" + joint.name + "' missing parent or child",
                                 child->line);
            }
            joint.parent_link = parent->attribute("link");
            joint.child_link = jchild->attribute("link");
            detail::parse_origin(child->first_child("origin"), joint.origin_xyz, joint.origin_rpy);
            if (const auto* axis = child->first_child("axis")) {
                auto v = detail::parse_number_list(axis->attribute("xyz"), 3, axis->line,
                                                   "joint axis");
                Vec3 a{v[0], v[1], v[2]};
                if (a.norm() < 1e-12) {
                    throw ParseError("joint '" + joint.name + "' has zero axis", axis->line);
                }
                joint.axis = a.normalized();
            }
            if (const auto* limit = child->first_child("limit")) {
                JointLimits lim;
                lim.lower = std::stod(limit->attribute_or("lower", "0"));
                lim.upper = std::stod(limit->attribute_or("upper", "0"));
                if (lim.lower > lim.upper) {
                    throw ParseError("joint '" + joint.name + "' has lower > upper limit",
                                     limit->line);
                }
                joint.limits = lim;
            }
            if ((joint.kind == JointKind::revolute || joint.kind == JointKind::prismatic) &&
                !joint.limits) {
                throw ParseError("joint '" + joint.name + "' (" + type + ") requires limits",
                                 child->line);
            }
            model.joints.push_back(std::move(joint));
        } else if (child->name == "transmission" || child->name == "gazebo") {
            model.warnings.push_back("skipped <" + child->name + "> (line " +
                                     std::to_string(child->line) + ")");
        }
    }

    // Structural checks: known links, unique child attachment, single root,
    // acyclic.
    std::map<std::string, int> child_counts;
    for (const auto& j : model.joints) {
        if (!link_names.count(j.parent_link)) {
            throw ParseError("joint '" + j.name + "' references unknown parent link '" +
                                 j.parent_link + "'",
                             root->line);
        }
        if (!link_names.count(j.child_link)) {
            throw ParseError("joint '" + j.name + "' references unknown child link '" +
                                 j.child_link + "'",
                             root->line);
        }
        if (++child_counts[j.child_link] > 1) {
            throw ParseError("link '" + j.child_link + "' is the child of multiple joints",
                             root->line);
        }
    }
    std::vector<std::string> roots;
    for (const auto& name : link_names) {
        if (!child_counts.count(name)) roots.push_back(name);
    }
    if (model.links.empty()) {
        throw ParseError("robot has no links", root->line);
    }
    if (roots.empty()) {
        throw ParseError("robot has no root link (joint graph contains a cycle)", root->line);
    }
    if (roots.size() > 1) {
        std::string names;
        for (const auto& r : roots) names += (names.empty() ? "" : ", ") + r;
        throw ParseError("robot has multiple root links: " + names, root->line);
    }
    model.root_link = roots[0];
    // Every joint must be reachable from the root; an unreachable joint
    // implies a cycle detached from the tree.
    if (model.joints_in_tree_order().size() != model.joints.size()) {
        throw ParseError("joint graph contains a cycle", root->line);
    }
    return model;
}

inline Mat4 joint_origin_transform(const UrdfJoint& j) {
    Mat4 t = rpy_to_matrix(j.origin_rpy.x, j.origin_rpy.y, j.origin_rpy.z);
    t.set_translation(j.origin_xyz);
    return t;
}

// Origin transform composed with the joint motion at position q.
inline Mat4 joint_transform(const UrdfJoint& j, double q) {
    if ((j.kind == JointKind::revolute || j.kind == JointKind::prismatic) && j.limits) {
        if (q < j.limits->lower || q > j.limits->upper) {
            throw Error(errc::joint_limit, "joint '" + j.name + "' position " + std::to_string(q) +
                                               " outside [" + std::to_string(j.limits->lower) +
                                               ", " + std::to_string(j.limits->upper) + "]");
        }
    }
    Mat4 origin = joint_origin_transform(j);
    switch (j.kind) {
    case JointKind::fixed:
        return origin;
    case JointKind::revolute:
    case JointKind::continuous:
        return origin * axis_angle_to_matrix(j.axis, q);
    case JointKind::prismatic:
        return origin * Mat4::translation(j.axis * q);
    }
    return origin;
}

// Link poses in the root frame. Missing joints default to position 0.
inline std::map<std::string, Mat4> forward_kinematics(const RobotModel& model,
                                                      const std::map<std::string, double>& q) {
    std::map<std::string, Mat4> poses;
    poses[model.root_link] = Mat4::identity();
    for (const UrdfJoint* j : model.joints_in_tree_order()) {
        double qj = 0.0;
        if (auto it = q.find(j->name); it != q.end()) qj = it->second;
        try {
            poses[j->child_link] = poses.at(j->parent_link) * joint_transform(*j, qj);
        } catch (const Error& e) {
            if (e.code() == errc::joint_limit) throw;
            throw Error(errc::invalid_input,
                        "forward kinematics failed at joint '" + j->name + "': " + e.what());
        }
    }
    return poses;
}

} // namespace srb

#endif
