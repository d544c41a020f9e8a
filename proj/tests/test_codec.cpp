#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "srb/codec.hpp"
#define SRB_TEST_SUPPORT_WANT_VALUES
#include "test_support.hpp"

using namespace srb;

TEST_CASE("string frame round-trips byte-exactly") {
    BridgeValue v = std::string("Hello world.");
    auto bytes = encode("/pub", v);
    DecodedFrame f = decode(bytes);
    CHECK(f.topic == "/pub");
    CHECK(std::get<std::string>(f.value) == "Hello world.");
    CHECK(f.consumed == bytes.size());
    CHECK(encode(f.topic, f.value) == bytes);
}

TEST_CASE("frame header layout is bit-exact") {
    auto bytes = encode("/t", BridgeValue(true));
    REQUIRE(bytes.size() >= 10);
    CHECK(bytes[0] == 'S');
    CHECK(bytes[1] == 'R');
    CHECK(bytes[2] == 'B');
    CHECK(bytes[3] == '2');
    CHECK(bytes[4] == 1); // version
    CHECK(bytes[5] == 2); // Bool tag
    CHECK(bytes[6] == 2); // topic length lo
    CHECK(bytes[7] == 0); // topic length hi
    CHECK(bytes[8] == '/');
    CHECK(bytes[9] == 't');
    // payload: u32 length 1, then the byte 0x01
    CHECK(bytes[10] == 1);
    CHECK(bytes[14] == 1);
    CHECK(bytes.size() == 15);
}

TEST_CASE("empty point cloud round-trips") {
    PointCloud pc;
    pc.stamp_ns = 42;
    pc.frame_id = "cam";
    auto bytes = encode("/cloud", BridgeValue(pc));
    DecodedFrame f = decode(bytes);
    const auto& back = std::get<PointCloud>(f.value);
    CHECK(back.stamp_ns == 42);
    CHECK(back.frame_id == "cam");
    CHECK(back.points.empty());
}

TEST_CASE("random values of every tag round-trip byte-exactly") {
    std::mt19937 rng(61);
    for (uint8_t t = kMinTag; t <= kMaxTag; ++t) {
        for (int i = 0; i < 100; ++i) {
            BridgeValue v = oracle::random_bridge_value(rng, static_cast<Tag>(t));
            auto bytes = encode("/fuzz", v);
            DecodedFrame f = decode(bytes);
            CHECK(tag_of(f.value) == static_cast<Tag>(t));
            // Byte-exact: re-encoding the decoded value reproduces the frame.
            CHECK(encode(f.topic, f.value) == bytes);
        }
    }
}

TEST_CASE("decode error taxonomy") {
    auto good = encode("/x", BridgeValue(int64_t{7}));

    SUBCASE("bad magic is a framing error") {
        auto bad = good;
        bad[0] = 'X';
        try {
            decode(bad);
            FAIL("expected framing");
        } catch (const Error& e) {
            CHECK(e.code() == errc::framing);
        }
    }
    SUBCASE("unknown version is unsupported") {
        auto bad = good;
        bad[4] = 9;
        try {
            decode(bad);
            FAIL("expected unsupported");
        } catch (const Error& e) {
            CHECK(e.code() == errc::unsupported);
        }
    }
    SUBCASE("unknown tag is unsupported") {
        auto bad = good;
        bad[5] = 200;
        try {
            decode(bad);
            FAIL("expected unsupported");
        } catch (const Error& e) {
            CHECK(e.code() == errc::unsupported);
        }
    }
    SUBCASE("truncated payload is a truncation error") {
        auto bad = good;
        bad.resize(bad.size() - 3);
        try {
            decode(bad);
            FAIL("expected truncation");
        } catch (const Error& e) {
            CHECK(e.code() == errc::truncation);
        }
    }
    SUBCASE("payload with trailing bytes is a truncation error") {
        // Declare a payload longer than the Int needs and pad it.
        auto bad = good;
        bad[8 /* topic len 2 -> payload len at 4+1+1+2+2 */] = bad[8];
        size_t payload_len_pos = 4 + 1 + 1 + 2 + 2;
        bad[payload_len_pos] = 9; // 8-byte int declared as 9 bytes
        bad.push_back(0);
        try {
            decode(bad);
            FAIL("expected truncation");
        } catch (const Error& e) {
            CHECK(e.code() == errc::truncation);
        }
    }
}

TEST_CASE("empty topic is rejected at encode time") {
    CHECK_THROWS_AS(encode("", BridgeValue(true)), Error);
}

TEST_CASE("find_magic resynchronizes a garbled stream") {
    auto frame = encode("/ok", BridgeValue(std::string("x")));
    std::vector<uint8_t> stream{0xde, 0xad, 'S', 'R'}; // partial magic decoy
    size_t offset = stream.size();
    stream.insert(stream.end(), frame.begin(), frame.end());
    CHECK(find_magic(stream.data(), stream.size(), 0) == offset);
    DecodedFrame f = decode(stream.data() + offset, stream.size() - offset);
    CHECK(f.topic == "/ok");
}

TEST_CASE("bool maps to boolean and pose with identity orientation to a translation") {
    CHECK(std::get<1>(bridge_to_scene(BridgeValue(true))) == true);

    PoseStamped p;
    p.position = {1, 2, 3};
    p.orientation = {0, 0, 0, 1};
    SceneValue s = bridge_to_scene(BridgeValue(p));
    CHECK(std::get<8>(s).max_abs_diff(Mat4::translation({1, 2, 3})) == 0.0);
}

TEST_CASE("scalars, arrays and tables map directly both ways") {
    std::mt19937 rng(67);
    for (Tag t : {Tag::String, Tag::Bool, Tag::Int, Tag::Double, Tag::IntArray, Tag::DoubleArray,
                  Tag::IntTable, Tag::DoubleTable}) {
        for (int i = 0; i < 50; ++i) {
            BridgeValue v = oracle::random_bridge_value(rng, t);
            BridgeValue back = scene_to_bridge(bridge_to_scene(v), t);
            // Float bits identical for direct mappings: payloads match exactly.
            CHECK(encode_payload(back) == encode_payload(v));
        }
    }
}

TEST_CASE("pose round trip preserves position exactly, orientation to 1e-9") {
    std::mt19937 rng(71);
    for (int i = 0; i < 200; ++i) {
        PoseStamped p;
        p.position = {0.5, -1.25, 3.0};
        p.orientation = oracle::random_unit_quaternion(rng).canonicalized();
        BridgeValue back = scene_to_bridge(bridge_to_scene(BridgeValue(p)), Tag::PoseStamped);
        const auto& bp = std::get<PoseStamped>(back);
        CHECK(bp.position.x == p.position.x);
        CHECK(bp.position.y == p.position.y);
        CHECK(bp.position.z == p.position.z);
        Quaternion q = bp.orientation.canonicalized();
        CHECK(std::abs(q.x - p.orientation.x) < 1e-9);
        CHECK(std::abs(q.y - p.orientation.y) < 1e-9);
        CHECK(std::abs(q.z - p.orientation.z) < 1e-9);
        CHECK(std::abs(q.w - p.orientation.w) < 1e-9);
    }
}

TEST_CASE("six-element zero array becomes a null wrench") {
    SceneValue s(std::in_place_index<9>, std::array<double, 6>{});
    BridgeValue v = scene_to_bridge(s, Tag::WrenchStamped, 5, "tool");
    const auto& w = std::get<WrenchStamped>(v);
    CHECK(w.force.norm() == 0.0);
    CHECK(w.torque.norm() == 0.0);
    CHECK(w.stamp_ns == 5);
    CHECK(w.frame_id == "tool");
}

TEST_CASE("wrench ordering is force then torque") {
    WrenchStamped w;
    w.force = {1, 2, 3};
    w.torque = {4, 5, 6};
    auto arr = std::get<9>(bridge_to_scene(BridgeValue(w)));
    CHECK(arr == std::array<double, 6>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("transform collection converts to a pose array with order preserved") {
    std::mt19937 rng(73);
    std::vector<Mat4> mats;
    for (int i = 0; i < 5; ++i) {
        Mat4 m = oracle::random_rotation_matrix(rng);
        m.set_translation({static_cast<double>(i), 0, 0});
        mats.push_back(m);
    }
    SceneValue s(std::in_place_index<10>, mats);
    BridgeValue v = scene_to_bridge(s, Tag::PoseArray);
    const auto& pa = std::get<PoseArray>(v);
    REQUIRE(pa.poses.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(pa.poses[static_cast<size_t>(i)].first.x == doctest::Approx(i));
    }
}

TEST_CASE("empty double array converts to a zero-length wire array") {
    SceneValue s(std::in_place_index<5>, std::vector<double>{});
    BridgeValue v = scene_to_bridge(s, Tag::DoubleArray);
    CHECK(std::get<std::vector<double>>(v).empty());
}

TEST_CASE("shape mismatches and non-rigid matrices are invalid input") {
    SceneValue five(std::in_place_index<5>, std::vector<double>{1, 2, 3, 4, 5});
    CHECK_THROWS_AS(scene_to_bridge(five, Tag::WrenchStamped), Error);

    Mat4 sheared = Mat4::identity();
    sheared.at(0, 1) = 0.5;
    try {
        scene_to_bridge(scene_pose(sheared), Tag::PoseStamped);
        FAIL("expected invalid input");
    } catch (const Error& e) {
        CHECK(e.code() == errc::invalid_input);
    }
}

TEST_CASE("invariant-violating wire values are invalid messages") {
    IntTable t;
    t.rows = 2;
    t.cols = 3;
    t.data = {1, 2, 3}; // wrong length
    try {
        bridge_to_scene(BridgeValue(t));
        FAIL("expected invalid message");
    } catch (const Error& e) {
        CHECK(e.code() == errc::invalid_message);
    }

    PoseStamped p;
    p.orientation = {0, 0, 0, 2};
    CHECK_THROWS_AS(bridge_to_scene(BridgeValue(p)), Error);

    UInt8Image img;
    img.height = 2;
    img.width = 4;
    img.encoding = "mono8";
    img.step = 2; // smaller than width * channels
    img.data.resize(4);
    CHECK_THROWS_AS(bridge_to_scene(BridgeValue(img)), Error);
}

TEST_CASE("tables preserve row-major element positions through conversion and wire") {
    std::mt19937 rng(79);
    for (int trial = 0; trial < 50; ++trial) {
        DoubleTable t;
        t.rows = 3;
        t.cols = 4;
        t.data.resize(12);
        std::uniform_real_distribution<double> u(-10, 10);
        for (auto& x : t.data) x = u(rng);

        DecodedFrame f = decode(encode("/tbl", BridgeValue(t)));
        const auto& wire_t = std::get<DoubleTable>(f.value);
        SceneValue scene_v = bridge_to_scene(f.value);
        const auto& scene_t = std::get<7>(scene_v);
        for (uint32_t r = 0; r < 3; ++r) {
            for (uint32_t c = 0; c < 4; ++c) {
                CHECK(wire_t.data[r * 4 + c] == t.data[r * 4 + c]);
                CHECK(scene_t.data[r * 4 + c] == t.data[r * 4 + c]);
            }
        }
    }
}

TEST_CASE("unsupported image encodings are rejected") {
    UInt8Image img;
    img.height = 1;
    img.width = 1;
    img.encoding = "bgr8";
    img.step = 3;
    img.data.resize(3);
    try {
        bridge_to_scene(BridgeValue(img));
        FAIL("expected unsupported");
    } catch (const Error& e) {
        CHECK(e.code() == errc::unsupported);
    }
}

TEST_CASE("bare matrices cannot become tf wire values") {
    CHECK_THROWS_AS(scene_to_bridge(scene_tf(Mat4::identity()), Tag::TfTransform), Error);
}
