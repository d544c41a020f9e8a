#ifndef SRB_TF_BUFFER_HPP
#define SRB_TF_BUFFER_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "srb/error.hpp"
#include "srb/geometry.hpp"
#include "srb/message.hpp"

namespace srb {

constexpr int64_t kTfLatest = INT64_MIN;
constexpr int64_t kTfDefaultCacheNs = 10'000'000'000; // 10 s
constexpr int64_t kTfExtrapolationToleranceNs = 1'000'000; // 1 ms

// Per-edge time-sorted store of stamped transforms over a frame tree.
// Each child frame has at most one parent; a broadcast naming a different
// parent replaces the edge and is flagged.
class TfBufferStore {
public:
    struct Sample {
        int64_t stamp_ns;
        Vec3 translation;
        Quaternion rotation;
    };

    explicit TfBufferStore(int64_t cache_duration_ns = kTfDefaultCacheNs)
        : cache_duration_ns_(cache_duration_ns) {}

    void insert(const TfTransform& t) {
        if (t.parent_frame == t.child_frame) {
            throw Error(errc::invalid_input, "tf parent equals child frame");
        }
        if (!t.rotation.is_unit()) {
            throw Error(errc::invalid_input, "tf rotation is not unit norm");
        }
        Edge& edge = edges_[t.child_frame];
        if (!edge.parent.empty() && edge.parent != t.parent_frame) {
            edge.samples.clear();
            parent_replacements_++;
        }
        edge.parent = t.parent_frame;
        Sample s{t.stamp_ns, t.translation, t.rotation.normalized().canonicalized()};
        auto it = std::lower_bound(edge.samples.begin(), edge.samples.end(), s,
                                   [](const Sample& a, const Sample& b) {
                                       return a.stamp_ns < b.stamp_ns;
                                   });
        if (it != edge.samples.end() && it->stamp_ns == s.stamp_ns) {
            *it = s; // re-broadcast at the same stamp supersedes
        } else {
            edge.samples.insert(it, s);
        }
        int64_t cutoff = edge.samples.back().stamp_ns - cache_duration_ns_;
        while (edge.samples.size() > 1 && edge.samples.front().stamp_ns < cutoff) {
            edge.samples.erase(edge.samples.begin());
        }
    }

    bool has_frame(const std::string& frame) const {
        if (edges_.count(frame)) return true;
        for (const auto& [child, edge] : edges_) {
            if (edge.parent == frame) return true;
        }
        return false;
    }

    // T such that p_target = T * p_source, via the unique tree path through
    // the lowest common ancestor. Per edge, translation is lerped and
    // rotation slerped between the bracketing samples.
    Mat4 lookup(const std::string& target_frame, const std::string& source_frame,
                int64_t time_ns = kTfLatest) const {
        if (target_frame == source_frame) return Mat4::identity();
        if (!has_frame(target_frame)) {
            throw Error(errc::connectivity, "unknown frame: " + target_frame);
        }
        if (!has_frame(source_frame)) {
            throw Error(errc::connectivity, "unknown frame: " + source_frame);
        }
        auto source_chain = ancestry(source_frame);
        auto target_chain = ancestry(target_frame);
        // Find the deepest frame of the source chain present in the target chain.
        std::set<std::string> target_set(target_chain.begin(), target_chain.end());
        std::optional<size_t> meet;
        for (size_t i = 0; i < source_chain.size(); ++i) {
            if (target_set.count(source_chain[i])) {
                meet = i;
                break;
            }
        }
        if (!meet) {
            throw Error(errc::connectivity,
                        "frames disconnected: " + target_frame + " <- " + source_frame);
        }
        const std::string& ancestor = source_chain[*meet];
        Mat4 source_to_ancestor = chain_transform(source_frame, ancestor, time_ns);
        Mat4 target_to_ancestor = chain_transform(target_frame, ancestor, time_ns);
        return invert(target_to_ancestor) * source_to_ancestor;
    }

    uint64_t parent_replacements() const { return parent_replacements_; }
    int64_t cache_duration_ns() const { return cache_duration_ns_; }

    std::vector<std::string> frames() const {
        std::set<std::string> all;
        for (const auto& [child, edge] : edges_) {
            all.insert(child);
            all.insert(edge.parent);
        }
        return {all.begin(), all.end()};
    }

private:
    struct Edge {
        std::string parent;
        std::vector<Sample> samples;
    };

    std::vector<std::string> ancestry(const std::string& frame) const {
        std::vector<std::string> chain{frame};
        std::string cursor = frame;
        while (true) {
            auto it = edges_.find(cursor);
            if (it == edges_.end()) break;
            cursor = it->second.parent;
            chain.push_back(cursor);
            if (chain.size() > edges_.size() + 1) {
                throw Error(errc::cycle, "tf graph contains a cycle at " + cursor);
            }
        }
        return chain;
    }

    // Transform mapping `frame` coordinates into `ancestor` coordinates.
    Mat4 chain_transform(const std::string& frame, const std::string& ancestor,
                         int64_t time_ns) const {
        Mat4 acc = Mat4::identity();
        std::string cursor = frame;
        while (cursor != ancestor) {
            const Edge& edge = edges_.at(cursor);
            acc = edge_transform(edge, time_ns) * acc;
            cursor = edge.parent;
        }
        return acc;
    }

    Mat4 edge_transform(const Edge& edge, int64_t time_ns) const {
        const auto& s = edge.samples;
        if (s.empty()) {
            throw Error(errc::connectivity, "edge has no samples");
        }
        if (time_ns == kTfLatest) {
            return make_transform(s.back().translation, s.back().rotation);
        }
        if (time_ns < s.front().stamp_ns - kTfExtrapolationToleranceNs ||
            time_ns > s.back().stamp_ns + kTfExtrapolationToleranceNs) {
            throw Error(errc::extrapolation,
                        "requested time outside buffered range for edge to " + edge.parent);
        }
        if (time_ns <= s.front().stamp_ns) {
            return make_transform(s.front().translation, s.front().rotation);
        }
        if (time_ns >= s.back().stamp_ns) {
            return make_transform(s.back().translation, s.back().rotation);
        }
        auto upper = std::lower_bound(s.begin(), s.end(), time_ns,
                                      [](const Sample& a, int64_t t) { return a.stamp_ns < t; });
        const Sample& hi = *upper;
        const Sample& lo = *(upper - 1);
        if (hi.stamp_ns == time_ns) {
            return make_transform(hi.translation, hi.rotation);
        }
        double t = static_cast<double>(time_ns - lo.stamp_ns) /
                   static_cast<double>(hi.stamp_ns - lo.stamp_ns);
        Vec3 trans = lo.translation + (hi.translation - lo.translation) * t;
        Quaternion rot = slerp(lo.rotation, hi.rotation, t);
        return make_transform(trans, rot);
    }

    std::map<std::string, Edge> edges_;
    int64_t cache_duration_ns_;
    uint64_t parent_replacements_ = 0;
};

enum class LookupStatus { unresolved, ok, extrapolation };

// Per-spin lookup mirroring one frame relationship into a scene transform
// node. Failures are recorded, not raised.
struct LookupNode {
    std::string parent_frame;
    std::string child_frame;
    std::string scene_node_id;
    LookupStatus status = LookupStatus::unresolved;
    Mat4 last_matrix;
};

} // namespace srb

#endif
