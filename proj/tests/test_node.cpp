#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <thread>

#include "srb/node.hpp"
#include "test_support.hpp"

using namespace srb;
using namespace std::chrono_literals;

namespace {

// Spin `node` until `done` returns true or the deadline passes.
bool spin_until(BridgeNode& node, std::function<bool()> done,
                std::chrono::milliseconds deadline = 2000ms) {
    auto end = std::chrono::steady_clock::now() + deadline;
    while (std::chrono::steady_clock::now() < end) {
        node.spin_once();
        if (done()) return true;
        std::this_thread::sleep_for(1ms);
    }
    return done();
}

} // namespace

TEST_CASE("node creation validates name, period, and uniqueness") {
    CHECK_THROWS_AS(BridgeNode(""), Error);
    CHECK_THROWS_AS(BridgeNode("zero-period", std::chrono::milliseconds(0)), Error);
    BridgeNode a("dup-check");
    try {
        BridgeNode b("dup-check");
        FAIL("expected conflict");
    } catch (const Error& e) {
        CHECK(e.code() == errc::conflict);
    }
    // The name is released on destruction.
    {
        BridgeNode c("transient");
    }
    CHECK_NOTHROW(BridgeNode("transient"));
}

TEST_CASE("default spin period is 20 ms and custom periods are honored") {
    BridgeNode a("period-default");
    CHECK(a.spin_period() == std::chrono::milliseconds(20));
    BridgeNode b("period-10ms", std::chrono::milliseconds(10));
    CHECK(b.spin_period() == std::chrono::milliseconds(10));
}

TEST_CASE("topics are validated and tag conflicts rejected") {
    BridgeNode node("topic-check");
    CHECK_THROWS_AS(node.create_publisher(Tag::String, "no-slash"), Error);
    CHECK_THROWS_AS(node.create_publisher(Tag::String, "/has space"), Error);
    node.create_publisher(Tag::String, "/chatter");
    try {
        node.create_subscriber(Tag::Int, "/chatter");
        FAIL("expected conflict");
    } catch (const Error& e) {
        CHECK(e.code() == errc::conflict);
    }
    // Same tag on the same topic is fine.
    CHECK_NOTHROW(node.create_subscriber(Tag::String, "/chatter"));
}

TEST_CASE("publish with zero subscribers succeeds and counts") {
    BridgeNode node("lonely-pub");
    Publisher& pub = node.create_publisher(Tag::String, "/void");
    node.publish(pub, SceneValue(std::in_place_index<0>, std::string("x")));
    CHECK(pub.publish_count == 1);
}

TEST_CASE("subscribe, publish in-process, spin: latest value and scene update") {
    BridgeNode node("self-loop");
    Subscriber& sub = node.create_subscriber(Tag::String, "/pub");
    Publisher& pub = node.create_publisher(Tag::String, "/pub");
    int modified = 0;
    node.scene().observe_modified(sub.scene_node_id, [&](const std::string&) { ++modified; });

    node.publish(pub, SceneValue(std::in_place_index<0>, std::string("Hello world.")));
    CHECK_FALSE(sub.has_latest); // nothing processed until spin
    SpinStats stats = node.spin_once();
    CHECK(sub.has_latest);
    CHECK(std::get<std::string>(sub.latest_bridge) == "Hello world.");
    CHECK(std::get<0>(sub.latest_scene) == "Hello world.");
    CHECK(sub.received_count == 1);
    CHECK(modified == 1);
    CHECK(stats.messages_processed >= 1);
    auto& bound = dynamic_cast<ValueSceneNode&>(node.scene().get_node(sub.scene_node_id));
    CHECK(std::get<0>(bound.value) == "Hello world.");
}

TEST_CASE("two publishers on one topic interleave by send order") {
    BridgeNode node("interleave");
    Subscriber& sub = node.create_subscriber(Tag::Int, "/seq");
    Publisher& p1 = node.create_publisher(Tag::Int, "/seq");
    Publisher& p2 = node.create_publisher(Tag::Int, "/seq");
    std::vector<int64_t> seen;
    node.scene().observe_modified(sub.scene_node_id, [&](const std::string&) {
        seen.push_back(std::get<int64_t>(sub.latest_bridge));
    });
    for (int64_t i = 0; i < 100; ++i) {
        node.publish((i % 2 == 0) ? p1 : p2, SceneValue(std::in_place_index<2>, i));
    }
    node.spin_once();
    REQUIRE(seen.size() == 100);
    for (int64_t i = 0; i < 100; ++i) CHECK(seen[static_cast<size_t>(i)] == i);
}

TEST_CASE("150 queued messages with capacity 100 drop the oldest 50") {
    BridgeNode node("overflow");
    Subscriber& sub = node.create_subscriber(Tag::Int, "/flood");
    Publisher& pub = node.create_publisher(Tag::Int, "/flood");
    for (int64_t i = 0; i < 150; ++i) {
        node.publish(pub, SceneValue(std::in_place_index<2>, i));
    }
    std::vector<int64_t> seen;
    node.scene().observe_modified(sub.scene_node_id, [&](const std::string&) {
        seen.push_back(std::get<int64_t>(sub.latest_bridge));
    });
    node.spin_once();
    CHECK(sub.dropped_count == 50);
    REQUIRE(seen.size() == 100);
    CHECK(seen.front() == 50); // oldest survivors start at 50
    CHECK(seen.back() == 149);
}

TEST_CASE("relay republishes each received message from the observer") {
    BridgeNode node("relay-node");
    node.attach_relay(Tag::Double, "/ping", "/pong");
    Subscriber& out = node.create_subscriber(Tag::Double, "/pong");
    Publisher& in = node.create_publisher(Tag::Double, "/ping");
    node.publish(in, SceneValue(std::in_place_index<3>, 2.5));
    node.spin_once(); // processes /ping, relays to /pong
    node.spin_once(); // processes /pong
    CHECK(out.has_latest);
    CHECK(std::get<double>(out.latest_bridge) == 2.5);
}

TEST_CASE("set then get parameter; missing name is not-found") {
    BridgeNode node("param-basic");
    node.set_parameter("rate", ParamValue(int64_t{50}));
    CHECK(std::get<int64_t>(node.get_parameter("rate")) == 50);
    node.set_parameter("rate", ParamValue(int64_t{100}));
    CHECK(std::get<int64_t>(node.get_parameter("rate")) == 100);
    try {
        node.get_parameter("missing");
        FAIL("expected not-found");
    } catch (const Error& e) {
        CHECK(e.code() == errc::not_found);
    }
}

TEST_CASE("parameter broadcast carries the full set in one message") {
    BridgeNode server("param-server");
    BridgeNode client("param-client");
    server.connect_local(client);
    ParameterMonitor& mon = client.create_parameter_monitor("param-server");

    server.set_parameter("a", ParamValue(true));
    server.set_parameter("b", ParamValue(3.25));
    // Drain the two broadcasts, then count messages for the third set.
    client.spin_once();
    size_t before = client.inbound().size();
    CHECK(before == 0);
    server.set_parameter("c", ParamValue(std::string("str")));
    CHECK(client.inbound().size() == 1); // one message carries all three
    client.spin_once();
    CHECK(mon.ready("a"));
    CHECK(mon.ready("b"));
    CHECK(mon.ready("c"));
    CHECK(std::get<bool>(mon.get("a")) == true);
    CHECK(std::get<double>(mon.get("b")) == 3.25);
    CHECK(std::get<std::string>(mon.get("c")) == "str");
}

TEST_CASE("monitor get before any broadcast is unready") {
    BridgeNode node("mon-unready");
    ParameterMonitor& mon = node.create_parameter_monitor("nonexistent-remote");
    CHECK_FALSE(mon.ready("robot_description"));
    try {
        mon.get("robot_description");
        FAIL("expected unready");
    } catch (const Error& e) {
        CHECK(e.code() == errc::unready);
    }
}

TEST_CASE("one monitor per remote node") {
    BridgeNode node("mon-identity");
    ParameterMonitor& a = node.create_parameter_monitor("remote-x");
    ParameterMonitor& b = node.create_parameter_monitor("remote-x");
    CHECK(&a == &b);
    ParameterMonitor& c = node.create_parameter_monitor("remote-y");
    CHECK(&a != &c);
    CHECK_THROWS_AS(node.create_parameter_monitor(""), Error);
}

TEST_CASE("list parameters round-trip through the JSON broadcast typed") {
    BridgeNode server("param-lists");
    BridgeNode client("param-lists-client");
    server.connect_local(client);
    ParameterMonitor& mon = client.create_parameter_monitor("param-lists");
    server.set_parameter("ints", ParamValue(std::vector<int64_t>{1, -2, 3}));
    server.set_parameter("doubles", ParamValue(std::vector<double>{0.5, 1.5}));
    server.set_parameter("strings", ParamValue(std::vector<std::string>{"x", "y"}));
    client.spin_once();
    CHECK(std::get<std::vector<int64_t>>(mon.get("ints")) == std::vector<int64_t>{1, -2, 3});
    CHECK(std::get<std::vector<double>>(mon.get("doubles")) == std::vector<double>{0.5, 1.5});
    CHECK(std::get<std::vector<std::string>>(mon.get("strings")) ==
          std::vector<std::string>{"x", "y"});
}

TEST_CASE("empty spin has no messages but measurable duration") {
    BridgeNode node("idle-spin");
    SpinStats s = node.spin_once();
    CHECK(s.messages_processed == 0);
    CHECK(s.malformed_frames == 0);
    CHECK(s.duration_ns >= 0);
}

TEST_CASE("malformed inbound frames are counted and skipped") {
    BridgeNode node("malformed");
    Subscriber& sub = node.create_subscriber(Tag::String, "/ok");
    node.inbound().push({0x00, 0x01, 0x02});
    node.inbound().push(encode("/ok", BridgeValue(std::string("good"))));
    auto bad = encode("/ok", BridgeValue(std::string("trunc")));
    bad.resize(bad.size() - 2);
    node.inbound().push(bad);
    SpinStats s = node.spin_once();
    CHECK(s.malformed_frames == 2);
    CHECK(sub.has_latest);
    CHECK(std::get<std::string>(sub.latest_bridge) == "good");
}

TEST_CASE("spin_loop counts overruns only when work exceeds the period") {
    BridgeNode idle("loop-idle", std::chrono::milliseconds(2));
    SpinAggregate agg = idle.spin_loop(20);
    CHECK(agg.cycles == 20);
    CHECK(agg.overruns == 0);

    BridgeNode busy("loop-busy", std::chrono::milliseconds(1));
    busy.add_spin_task([] { std::this_thread::sleep_for(3ms); });
    SpinAggregate busy_agg = busy.spin_loop(5);
    CHECK(busy_agg.overruns == 5);
    CHECK(busy_agg.mean_ms() > 1.0);
}

TEST_CASE("connecting to a non-listening port is a transport error") {
    BridgeNode node("no-server");
    try {
        node.connect("127.0.0.1:1"); // reserved port, nothing listens
        FAIL("expected transport error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::transport);
    }
}

TEST_CASE("two nodes over loopback TCP deliver in order with zero loss") {
    BridgeNode server("tcp-server");
    server.listen("127.0.0.1:0");
    Subscriber& sub = server.create_subscriber(Tag::Int, "/stream");

    BridgeNode client("tcp-client");
    client.connect("127.0.0.1:" + std::to_string(server.listen_port()));
    Publisher& pub = client.create_publisher(Tag::Int, "/stream");

    std::vector<int64_t> seen;
    server.scene().observe_modified(sub.scene_node_id, [&](const std::string&) {
        seen.push_back(std::get<int64_t>(sub.latest_bridge));
    });
    for (int64_t i = 0; i < 100; ++i) {
        client.publish(pub, SceneValue(std::in_place_index<2>, i));
    }
    bool ok = spin_until(server, [&] { return seen.size() >= 100; });
    CHECK(ok);
    REQUIRE(seen.size() == 100);
    for (int64_t i = 0; i < 100; ++i) CHECK(seen[static_cast<size_t>(i)] == i);
    CHECK(sub.dropped_count == 0);
    CHECK(server.framing_errors() == 0);
}

TEST_CASE("tf broadcast reaches a remote peer and resolves after one spin") {
    BridgeNode server("tf-server");
    server.listen("127.0.0.1:0");
    BridgeNode client("tf-client");
    client.connect("127.0.0.1:" + std::to_string(server.listen_port()));

    TfTransform t;
    t.parent_frame = "world";
    t.child_frame = "probe";
    t.stamp_ns = 123;
    t.translation = {0.5, 0, 0};
    t.rotation = {0, 0, 0, 1};
    client.broadcast(t);
    // Broadcast is inserted locally without a spin.
    CHECK(client.tf_store().lookup("world", "probe").translation_part().x ==
          doctest::Approx(0.5));
    bool ok = spin_until(server, [&] { return server.tf_store().has_frame("probe"); });
    CHECK(ok);
    CHECK(server.tf_store().lookup("world", "probe", 123).translation_part().x ==
          doctest::Approx(0.5));
}

TEST_CASE("parameter broadcast crosses TCP to a monitoring peer") {
    BridgeNode server("tcp-param-server");
    server.listen("127.0.0.1:0");
    BridgeNode client("tcp-param-client");
    client.connect("127.0.0.1:" + std::to_string(server.listen_port()));

    ParameterMonitor& mon = server.create_parameter_monitor("tcp-param-client");
    client.set_parameter("robot_description", ParamValue(std::string("<robot/>")));
    bool ok = spin_until(server, [&] { return mon.ready("robot_description"); });
    CHECK(ok);
    CHECK(std::get<std::string>(mon.get("robot_description")) == "<robot/>");
}
