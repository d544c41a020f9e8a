#ifndef SRB_NODE_HPP
#define SRB_NODE_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "srb/codec.hpp"
#include "srb/error.hpp"
#include "srb/message.hpp"
#include "srb/scene.hpp"
#include "srb/tf_buffer.hpp"
#include "srb/transport.hpp"

namespace srb {

constexpr std::chrono::milliseconds kDefaultSpinPeriod{20}; // 50 Hz
constexpr size_t kSubscriberQueueCapacity = 100;
constexpr const char* kTfTopic = "/tf";
constexpr const char* kParamTopicPrefix = "/__params/";

// ---- Parameters -------------------------------------------------------------

using ParamValue = std::variant<bool, int64_t, double, std::string, std::vector<bool>,
                                std::vector<int64_t>, std::vector<double>,
                                std::vector<std::string>>;

inline nlohmann::json param_to_json(const ParamValue& v) {
    nlohmann::json j;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, bool>) j = {{"type", "bool"}, {"value", x}};
            else if constexpr (std::is_same_v<T, int64_t>) j = {{"type", "int"}, {"value", x}};
            else if constexpr (std::is_same_v<T, double>) j = {{"type", "double"}, {"value", x}};
            else if constexpr (std::is_same_v<T, std::string>)
                j = {{"type", "string"}, {"value", x}};
            else if constexpr (std::is_same_v<T, std::vector<bool>>)
                j = {{"type", "bool[]"}, {"value", x}};
            else if constexpr (std::is_same_v<T, std::vector<int64_t>>)
                j = {{"type", "int[]"}, {"value", x}};
            else if constexpr (std::is_same_v<T, std::vector<double>>)
                j = {{"type", "double[]"}, {"value", x}};
            else j = {{"type", "string[]"}, {"value", x}};
        },
        v);
    return j;
}

inline ParamValue param_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    const nlohmann::json& v = j.at("value");
    if (type == "bool") return v.get<bool>();
    if (type == "int") return v.get<int64_t>();
    if (type == "double") return v.get<double>();
    if (type == "string") return v.get<std::string>();
    if (type == "bool[]") return v.get<std::vector<bool>>();
    if (type == "int[]") return v.get<std::vector<int64_t>>();
    if (type == "double[]") return v.get<std::vector<double>>();
    if (type == "string[]") return v.get<std::vector<std::string>>();
    throw Error(errc::invalid_message, "unknown parameter type '" + type + "'");
}

// Mirror of a remote node's full parameter set. The snapshot is replaced
// atomically on each full-set broadcast.
class ParameterMonitor {
public:
    explicit ParameterMonitor(std::string remote_node) : remote_node_(std::move(remote_node)) {}

    const std::string& remote_node() const { return remote_node_; }

    bool ready(const std::string& name) const { return snapshot_.count(name) != 0; }

    bool any_received() const { return received_broadcasts_ > 0; }

    const ParamValue& get(const std::string& name) const {
        auto it = snapshot_.find(name);
        if (it == snapshot_.end()) {
            throw Error(errc::unready, "parameter '" + name + "' not yet received from node '" +
                                           remote_node_ + "'");
        }
        return it->second;
    }

    const std::map<std::string, ParamValue>& snapshot() const { return snapshot_; }

    void replace_snapshot(std::map<std::string, ParamValue> params) {
        snapshot_ = std::move(params);
        received_broadcasts_++;
    }

private:
    std::string remote_node_;
    std::map<std::string, ParamValue> snapshot_;
    uint64_t received_broadcasts_ = 0;
};

// ---- Publisher / Subscriber -------------------------------------------------

struct Publisher {
    std::string topic;
    Tag tag = Tag::String;
    uint64_t publish_count = 0;
};

// Scene node holding the most recently converted value of a subscriber.
struct ValueSceneNode : SceneNode {
    SceneValue value;
};

struct Subscriber {
    struct InMsg {
        BridgeValue value;
        int64_t arrival_ns;
    };

    std::string topic;
    Tag tag = Tag::String;
    std::deque<InMsg> queue; // capacity kSubscriberQueueCapacity, drop-oldest
    BridgeValue latest_bridge;
    SceneValue latest_scene;
    int64_t receive_stamp_ns = 0;
    bool has_latest = false;
    std::string scene_node_id;
    uint64_t received_count = 0;
    uint64_t dropped_count = 0;
};

struct SpinStats {
    uint64_t messages_processed = 0;
    uint64_t malformed_frames = 0;
    int64_t duration_ns = 0;
};

struct SpinAggregate {
    uint64_t cycles = 0;
    uint64_t overruns = 0;
    uint64_t messages_processed = 0;
    uint64_t malformed_frames = 0;
    std::vector<int64_t> durations_ns;

    double mean_ms() const {
        if (durations_ns.empty()) return 0.0;
        double s = 0;
        for (int64_t d : durations_ns) s += static_cast<double>(d);
        return s / static_cast<double>(durations_ns.size()) / 1e6;
    }

    double stddev_ms() const {
        if (durations_ns.size() < 2) return 0.0;
        double m = mean_ms();
        double s = 0;
        for (int64_t d : durations_ns) {
            double x = static_cast<double>(d) / 1e6 - m;
            s += x * x;
        }
        return std::sqrt(s / static_cast<double>(durations_ns.size() - 1));
    }
};

inline void validate_topic(const std::string& topic) {
    if (topic.empty() || topic[0] != '/') {
        throw Error(errc::invalid_input, "topic must start with '/': '" + topic + "'");
    }
    for (char c : topic) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            throw Error(errc::invalid_input, "topic must not contain whitespace: '" + topic + "'");
        }
    }
}

// A named bridge endpoint: publishers, subscribers, parameters, tf, and the
// periodic spin execution model. The scene and every registry are owned by
// the spin thread; transport receiver threads only enqueue raw frames.
class BridgeNode {
public:
    explicit BridgeNode(std::string name,
                        std::chrono::nanoseconds spin_period = kDefaultSpinPeriod)
        : name_(std::move(name)), spin_period_(spin_period) {
        if (name_.empty()) {
            throw Error(errc::invalid_input, "node name must be nonempty");
        }
        if (spin_period_ <= std::chrono::nanoseconds::zero()) {
            throw Error(errc::invalid_input, "spin period must be positive");
        }
        std::lock_guard<std::mutex> lock(registry_mutex());
        if (!registry().insert(name_).second) {
            throw Error(errc::conflict, "a node named '" + name_ + "' already exists");
        }
    }

    ~BridgeNode() {
        listener_.reset();
        {
            std::lock_guard<std::mutex> lock(peers_mutex_);
            peers_.clear();
        }
        std::lock_guard<std::mutex> lock(registry_mutex());
        registry().erase(name_);
    }

    BridgeNode(const BridgeNode&) = delete;
    BridgeNode& operator=(const BridgeNode&) = delete;

    const std::string& name() const { return name_; }
    std::chrono::nanoseconds spin_period() const { return spin_period_; }
    Scene& scene() { return scene_; }
    TfBufferStore& tf_store() { return tf_store_; }
    InboundQueue& inbound() { return inbound_; }
    uint64_t framing_errors() const { return framing_errors_; }

    // ---- publishers / subscribers ----

    Publisher& create_publisher(Tag tag, const std::string& topic) {
        check_topic_tag(topic, tag);
        publishers_.push_back(std::make_unique<Publisher>(Publisher{topic, tag, 0}));
        return *publishers_.back();
    }

    Subscriber& create_subscriber(Tag tag, const std::string& topic) {
        check_topic_tag(topic, tag);
        auto sub = std::make_unique<Subscriber>();
        sub->topic = topic;
        sub->tag = tag;
        auto bound = std::make_unique<ValueSceneNode>();
        bound->record.name = topic;
        bound->record.class_tag = std::string("srbSubscriber") + tag_name(tag) + "Node";
        sub->scene_node_id = scene_.add_node(std::move(bound));
        subscribers_.push_back(std::move(sub));
        return *subscribers_.back();
    }

    // Converts, stamps from the node clock, and delivers to every in-process
    // subscriber on the topic plus every connected peer. Owner thread only.
    void publish(Publisher& pub, const SceneValue& value, const std::string& frame_id = "") {
        BridgeValue bridge = scene_to_bridge(value, pub.tag, system_now_ns(), frame_id);
        deliver(pub.topic, bridge);
        pub.publish_count++;
    }

    // ---- parameters ----

    void set_parameter(const std::string& name, ParamValue value) {
        params_[name] = std::move(value);
        broadcast_parameters();
    }

    const ParamValue& get_parameter(const std::string& name) const {
        auto it = params_.find(name);
        if (it == params_.end()) {
            throw Error(errc::not_found, "no parameter named '" + name + "'");
        }
        return it->second;
    }

    const std::map<std::string, ParamValue>& parameters() const { return params_; }

    // One monitor per remote node; repeated calls return the existing one.
    ParameterMonitor& create_parameter_monitor(const std::string& remote_node) {
        if (remote_node.empty()) {
            throw Error(errc::invalid_input, "remote node name must be nonempty");
        }
        for (auto& m : monitors_) {
            if (m->remote_node() == remote_node) return *m;
        }
        monitors_.push_back(std::make_unique<ParameterMonitor>(remote_node));
        // A monitor of this node's own store starts from the current set.
        if (remote_node == name_ && !params_.empty()) {
            monitors_.back()->replace_snapshot(params_);
        }
        return *monitors_.back();
    }

    // ---- tf ----

    void broadcast(const TfTransform& t) {
        BridgeValue v = t;
        validate(v);
        tf_store_.insert(t);
        send_to_peers(encode(kTfTopic, v));
    }

    LookupNode& create_lookup_node(const std::string& parent_frame,
                                   const std::string& child_frame) {
        auto bound = std::make_unique<TransformNode>();
        bound->record.name = parent_frame + "->" + child_frame;
        bound->record.class_tag = "srbTf2LookupNode";
        std::string id = scene_.add_node(std::move(bound));
        auto node = std::make_unique<LookupNode>();
        node->parent_frame = parent_frame;
        node->child_frame = child_frame;
        node->scene_node_id = id;
        lookup_nodes_.push_back(std::move(node));
        return *lookup_nodes_.back();
    }

    const std::vector<std::unique_ptr<LookupNode>>& lookup_nodes() const { return lookup_nodes_; }

    // Per-spin update hook (robot loaders and similar).
    void add_spin_task(std::function<void()> task) { spin_tasks_.push_back(std::move(task)); }

    // ---- transport ----

    void listen(const std::string& address) {
        auto [host, port] = parse_address(address);
        listener_ = std::make_unique<TcpListener>(
            host, port,
            [this](std::shared_ptr<Peer> peer) {
                std::lock_guard<std::mutex> lock(peers_mutex_);
                peers_.push_back(std::move(peer));
            },
            inbound_, framing_errors_);
    }

    uint16_t listen_port() const {
        if (!listener_) {
            throw Error(errc::invalid_input, "node is not listening");
        }
        return listener_->port();
    }

    void connect(const std::string& address) {
        auto [host, port] = parse_address(address);
        int fd = tcp_connect(host, port);
        std::lock_guard<std::mutex> lock(peers_mutex_);
        peers_.push_back(std::make_shared<TcpPeer>(fd, inbound_, framing_errors_));
    }

    // In-process peering: this node's published frames land in `other`'s
    // inbound queue (one direction; call twice for both ways).
    void connect_local(BridgeNode& other) {
        std::lock_guard<std::mutex> lock(peers_mutex_);
        peers_.push_back(std::make_shared<LocalPeer>(other.inbound()));
    }

    // ---- spin ----

    SpinStats spin_once() {
        int64_t t0 = steady_now_ns();
        SpinStats stats;

        // Late joiners get the current parameter set: the broadcast only
        // happens on set_parameter, so peers that connect afterwards would
        // otherwise never see it.
        bool new_peers = false;
        {
            std::lock_guard<std::mutex> lock(peers_mutex_);
            new_peers = peers_.size() > known_peer_count_;
            known_peer_count_ = peers_.size();
        }
        if (new_peers && !params_.empty()) broadcast_parameters();

        for (RawFrame& raw : inbound_.drain()) {
            DecodedFrame frame;
            try {
                frame = decode(raw.bytes);
            } catch (const Error&) {
                stats.malformed_frames++;
                continue;
            }
            route(frame, raw.arrival_ns, stats);
        }

        for (auto& sub : subscribers_) {
            while (!sub->queue.empty()) {
                Subscriber::InMsg msg = std::move(sub->queue.front());
                sub->queue.pop_front();
                process_subscriber_message(*sub, std::move(msg), stats);
            }
        }

        run_lookups();
        for (auto& task : spin_tasks_) task();

        stats.duration_ns = steady_now_ns() - t0;
        total_spins_++;
        return stats;
    }

    // Fixed-period loop with overrun accounting. cycles == 0 runs until
    // request_stop().
    SpinAggregate spin_loop(uint64_t cycles = 0) {
        SpinAggregate agg;
        stop_requested_ = false;
        auto next = std::chrono::steady_clock::now();
        while (!stop_requested_ && (cycles == 0 || agg.cycles < cycles)) {
            SpinStats s = spin_once();
            agg.cycles++;
            agg.messages_processed += s.messages_processed;
            agg.malformed_frames += s.malformed_frames;
            agg.durations_ns.push_back(s.duration_ns);
            if (s.duration_ns > spin_period_.count()) agg.overruns++;
            next += spin_period_;
            std::this_thread::sleep_until(next);
        }
        return agg;
    }

    void request_stop() { stop_requested_ = true; }

    uint64_t total_spins() const { return total_spins_; }

    const std::vector<std::unique_ptr<Subscriber>>& subscribers() const { return subscribers_; }

    // Latency responder: every message received on `in_topic` is immediately
    // republished on `out_topic` from the subscriber's modified observer.
    void attach_relay(Tag tag, const std::string& in_topic, const std::string& out_topic) {
        Subscriber& sub = create_subscriber(tag, in_topic);
        Publisher& pub = create_publisher(tag, out_topic);
        scene_.observe_modified(sub.scene_node_id, [this, &sub, &pub](const std::string&) {
            publish(pub, sub.latest_scene);
        });
    }

private:
    static std::set<std::string>& registry() {
        static std::set<std::string> r;
        return r;
    }

    static std::mutex& registry_mutex() {
        static std::mutex m;
        return m;
    }

    void check_topic_tag(const std::string& topic, Tag tag) {
        validate_topic(topic);
        auto it = topic_tags_.find(topic);
        if (it != topic_tags_.end() && it->second != tag) {
            throw Error(errc::conflict, "topic '" + topic + "' already bound to type " +
                                            tag_name(it->second));
        }
        topic_tags_[topic] = tag;
    }

    void deliver(const std::string& topic, const BridgeValue& value) {
        int64_t arrival = steady_now_ns();
        for (auto& sub : subscribers_) {
            if (sub->topic == topic && sub->tag == tag_of(value)) {
                enqueue_for(*sub, Subscriber::InMsg{value, arrival});
            }
        }
        send_to_peers(encode(topic, value));
    }

    void enqueue_for(Subscriber& sub, Subscriber::InMsg msg) {
        if (sub.queue.size() >= kSubscriberQueueCapacity) {
            sub.queue.pop_front();
            sub.dropped_count++;
        }
        sub.queue.push_back(std::move(msg));
    }

    void send_to_peers(const std::vector<uint8_t>& frame) {
        std::lock_guard<std::mutex> lock(peers_mutex_);
        for (auto it = peers_.begin(); it != peers_.end();) {
            if (!(*it)->alive()) {
                it = peers_.erase(it);
                continue;
            }
            try {
                (*it)->send(frame);
                ++it;
            } catch (const Error&) {
                it = peers_.erase(it);
            }
        }
    }

    void broadcast_parameters() {
        // The broadcast always carries the complete store in one message.
        nlohmann::json j;
        for (const auto& [k, v] : params_) {
            j[k] = param_to_json(v);
        }
        BridgeValue v = j.dump();
        send_to_peers(encode(kParamTopicPrefix + name_, v));
        // Local monitors of this node see it immediately.
        apply_parameter_broadcast(name_, std::get<std::string>(v));
    }

    void apply_parameter_broadcast(const std::string& remote, const std::string& json_text) {
        std::map<std::string, ParamValue> params;
        try {
            nlohmann::json j = nlohmann::json::parse(json_text);
            for (auto& [k, v] : j.items()) {
                params[k] = param_from_json(v);
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(errc::invalid_message, std::string("bad parameter broadcast: ") + e.what());
        }
        for (auto& m : monitors_) {
            if (m->remote_node() == remote) {
                m->replace_snapshot(params);
            }
        }
    }

    void route(DecodedFrame& frame, int64_t arrival_ns, SpinStats& stats) {
        if (frame.topic == kTfTopic && tag_of(frame.value) == Tag::TfTransform) {
            try {
                tf_store_.insert(std::get<TfTransform>(frame.value));
                stats.messages_processed++;
            } catch (const Error&) {
                stats.malformed_frames++;
            }
            return;
        }
        if (frame.topic.rfind(kParamTopicPrefix, 0) == 0 &&
            tag_of(frame.value) == Tag::String) {
            std::string remote = frame.topic.substr(std::string(kParamTopicPrefix).size());
            try {
                apply_parameter_broadcast(remote, std::get<std::string>(frame.value));
                stats.messages_processed++;
            } catch (const Error&) {
                stats.malformed_frames++;
            }
            return;
        }
        bool matched = false;
        for (auto& sub : subscribers_) {
            if (sub->topic == frame.topic && sub->tag == tag_of(frame.value)) {
                enqueue_for(*sub, Subscriber::InMsg{frame.value, arrival_ns});
                matched = true;
            }
        }
        if (!matched) {
            // No consumer; still a processed frame.
            stats.messages_processed++;
        }
    }

    void process_subscriber_message(Subscriber& sub, Subscriber::InMsg msg, SpinStats& stats) {
        SceneValue converted;
        try {
            converted = bridge_to_scene(msg.value);
        } catch (const Error&) {
            stats.malformed_frames++;
            return;
        }
        sub.latest_bridge = std::move(msg.value);
        sub.latest_scene = std::move(converted);
        sub.receive_stamp_ns = msg.arrival_ns;
        sub.has_latest = true;
        sub.received_count++;
        auto& bound = dynamic_cast<ValueSceneNode&>(scene_.get_node(sub.scene_node_id));
        bound.value = sub.latest_scene;
        scene_.notify_modified(sub.scene_node_id);
        stats.messages_processed++;
    }

    void run_lookups() {
        for (auto& node : lookup_nodes_) {
            Mat4 result;
            try {
                result = tf_store_.lookup(node->parent_frame, node->child_frame, kTfLatest);
            } catch (const Error& e) {
                node->status = e.code() == errc::extrapolation ? LookupStatus::extrapolation
                                                               : LookupStatus::unresolved;
                continue;
            }
            bool changed = node->status != LookupStatus::ok ||
                           node->last_matrix.max_abs_diff(result) > 1e-12;
            node->status = LookupStatus::ok;
            if (changed) {
                node->last_matrix = result;
                scene_.set_transform(node->scene_node_id, result);
            }
        }
    }

    std::string name_;
    std::chrono::nanoseconds spin_period_;
    Scene scene_;
    TfBufferStore tf_store_;
    InboundQueue inbound_;
    std::atomic<uint64_t> framing_errors_{0};

    std::vector<std::unique_ptr<Publisher>> publishers_;
    std::vector<std::unique_ptr<Subscriber>> subscribers_;
    std::map<std::string, Tag> topic_tags_;
    std::map<std::string, ParamValue> params_;
    std::vector<std::unique_ptr<ParameterMonitor>> monitors_;
    std::vector<std::unique_ptr<LookupNode>> lookup_nodes_;
    std::vector<std::function<void()>> spin_tasks_;

    std::mutex peers_mutex_;
    size_t known_peer_count_ = 0;
    std::vector<std::shared_ptr<Peer>> peers_;
    std::unique_ptr<TcpListener> listener_;

    std::atomic<bool> stop_requested_{false};
    uint64_t total_spins_ = 0;
};

} // namespace srb

#endif
