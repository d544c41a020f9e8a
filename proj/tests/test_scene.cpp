#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <random>

#include "srb/scene.hpp"
#include "test_support.hpp"

using namespace srb;

namespace {

std::string add_transform(Scene& scene, const std::string& id, const Mat4& m = Mat4::identity()) {
    auto n = std::make_unique<TransformNode>();
    n->record.id = id;
    n->record.name = id;
    n->record.class_tag = "srbTransformNode";
    n->matrix = m;
    return scene.add_node(std::move(n));
}

} // namespace

TEST_CASE("add then get returns the same node; duplicates conflict") {
    Scene scene;
    std::string id = add_transform(scene, "a");
    CHECK(id == "a");
    CHECK(scene.get_node("a").record.name == "a");
    try {
        add_transform(scene, "a");
        FAIL("expected conflict");
    } catch (const Error& e) {
        CHECK(e.code() == errc::conflict);
    }
}

TEST_CASE("get on empty scene is not-found") {
    Scene scene;
    try {
        scene.get_node("missing");
        FAIL("expected not-found");
    } catch (const Error& e) {
        CHECK(e.code() == errc::not_found);
    }
}

TEST_CASE("auto ids are assigned when empty and stay unique") {
    Scene scene;
    std::string a = scene.add_node(std::make_unique<TransformNode>());
    std::string b = scene.add_node(std::make_unique<TransformNode>());
    CHECK(a != b);
    CHECK(scene.has_node(a));
    CHECK(scene.has_node(b));
}

TEST_CASE("removing the parent of a chain clears the child's parent reference") {
    Scene scene;
    add_transform(scene, "root", Mat4::translation({1, 0, 0}));
    add_transform(scene, "mid", Mat4::translation({0, 1, 0}));
    add_transform(scene, "leaf", Mat4::translation({0, 0, 1}));
    scene.set_parent("mid", "root");
    scene.set_parent("leaf", "mid");

    scene.remove_node("mid");
    CHECK_FALSE(scene.get_node("leaf").parent_transform_id.has_value());
    // World transform of the orphan equals its local matrix.
    CHECK(scene.world_transform("leaf").max_abs_diff(Mat4::translation({0, 0, 1})) == 0.0);
}

TEST_CASE("self-parenting and cycles are rejected, scene unchanged") {
    Scene scene;
    add_transform(scene, "a");
    add_transform(scene, "b");
    scene.set_parent("b", "a");
    CHECK_THROWS_AS(scene.set_parent("a", "a"), Error);
    try {
        scene.set_parent("a", "b");
        FAIL("expected cycle");
    } catch (const Error& e) {
        CHECK(e.code() == errc::cycle);
    }
    CHECK_FALSE(scene.get_node("a").parent_transform_id.has_value());
    CHECK(*scene.get_node("b").parent_transform_id == "a");
}

TEST_CASE("three-node translation chain composes to summed translation") {
    Scene scene;
    add_transform(scene, "a", Mat4::translation({1, 0, 0}));
    add_transform(scene, "b", Mat4::translation({1, 0, 0}));
    add_transform(scene, "c", Mat4::translation({1, 0, 0}));
    scene.set_parent("b", "a");
    scene.set_parent("c", "b");
    Vec3 t = scene.world_transform("c").translation_part();
    CHECK(t.x == doctest::Approx(3.0));
    CHECK(t.y == doctest::Approx(0.0));
    CHECK(t.z == doctest::Approx(0.0));
}

TEST_CASE("rotation parent times translation child gives rotated translation") {
    Scene scene;
    // 90 degrees about z, then translate +x: world position lands on +y.
    add_transform(scene, "rot", oracle::rodrigues({0, 0, 1}, std::asin(1.0)));
    add_transform(scene, "trans", Mat4::translation({1, 0, 0}));
    scene.set_parent("trans", "rot");
    Vec3 t = scene.world_transform("trans").translation_part();
    CHECK(std::abs(t.x) < 1e-12);
    CHECK(t.y == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("world_transform equals brute-force chain composition for random trees") {
    std::mt19937 rng(53);
    for (int trial = 0; trial < 50; ++trial) {
        Scene scene;
        std::vector<std::string> ids;
        std::vector<Mat4> locals;
        std::vector<int> parent; // index into ids, -1 for root
        std::uniform_int_distribution<int> count(2, 12);
        int n = count(rng);
        for (int i = 0; i < n; ++i) {
            Mat4 m = oracle::random_rigid_transform(rng);
            std::string id = "n" + std::to_string(i);
            add_transform(scene, id, m);
            ids.push_back(id);
            locals.push_back(m);
            if (i == 0) {
                parent.push_back(-1);
            } else {
                std::uniform_int_distribution<int> pick(0, i - 1);
                int p = pick(rng);
                parent.push_back(p);
                scene.set_parent(id, ids[static_cast<size_t>(p)]);
            }
        }
        for (int i = 0; i < n; ++i) {
            // Brute-force: collect ancestors root-first and multiply.
            std::vector<int> chain;
            for (int cur = i; cur != -1; cur = parent[static_cast<size_t>(cur)]) {
                chain.push_back(cur);
            }
            Mat4 expect = Mat4::identity();
            for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
                expect = expect * locals[static_cast<size_t>(*it)];
            }
            CHECK(scene.world_transform(ids[static_cast<size_t>(i)]).max_abs_diff(expect) < 1e-12);
        }
    }
}

TEST_CASE("reparenting preserves local matrix and changes world transform") {
    Scene scene;
    Mat4 local = Mat4::translation({0, 0, 2});
    add_transform(scene, "p1", Mat4::translation({5, 0, 0}));
    add_transform(scene, "p2", Mat4::translation({0, 7, 0}));
    add_transform(scene, "c", local);
    scene.set_parent("c", "p1");
    CHECK(scene.world_transform("c").translation_part().x == doctest::Approx(5.0));
    scene.set_parent("c", "p2");
    CHECK(scene.get_transform_node("c").matrix.max_abs_diff(local) == 0.0);
    CHECK(scene.world_transform("c").translation_part().y == doctest::Approx(7.0));
}

TEST_CASE("observer fires exactly once per mutation, in registration order") {
    Scene scene;
    add_transform(scene, "t");
    std::vector<int> order;
    scene.observe_modified("t", [&](const std::string&) { order.push_back(1); });
    scene.observe_modified("t", [&](const std::string&) { order.push_back(2); });
    scene.set_transform("t", Mat4::translation({1, 0, 0}));
    CHECK(order == std::vector<int>{1, 2});
    scene.set_transform("t", Mat4::translation({2, 0, 0}));
    CHECK(order == std::vector<int>{1, 2, 1, 2});
    CHECK(scene.get_node("t").record.modified_count == 2);
}

TEST_CASE("unobserve stops callbacks; stale handle is not-found") {
    Scene scene;
    add_transform(scene, "t");
    int calls = 0;
    ObserverHandle h = scene.observe_modified("t", [&](const std::string&) { ++calls; });
    scene.unobserve(h);
    scene.notify_modified("t");
    CHECK(calls == 0);
    CHECK_THROWS_AS(scene.unobserve(h), Error);
}

TEST_CASE("observer firing count equals mutation count") {
    Scene scene;
    add_transform(scene, "t");
    int calls = 0;
    scene.observe_modified("t", [&](const std::string&) { ++calls; });
    for (int i = 0; i < 25; ++i) scene.notify_modified("t");
    CHECK(calls == 25);
    CHECK(scene.get_node("t").record.modified_count == 25);
}

TEST_CASE("re-entrant notification inside a callback is deferred, not recursive") {
    Scene scene;
    add_transform(scene, "a");
    add_transform(scene, "b");
    std::vector<std::string> log;
    scene.observe_modified("a", [&](const std::string&) {
        log.push_back("a-begin");
        scene.notify_modified("b");
        log.push_back("a-end");
    });
    scene.observe_modified("b", [&](const std::string&) { log.push_back("b"); });
    scene.notify_modified("a");
    // "b" fires only after the "a" callback chain completes.
    CHECK(log == std::vector<std::string>{"a-begin", "a-end", "b"});
}

TEST_CASE("self-re-entrant notification terminates with bounded depth") {
    Scene scene;
    add_transform(scene, "t");
    int calls = 0;
    scene.observe_modified("t", [&](const std::string&) {
        if (++calls < 3) scene.notify_modified("t");
    });
    scene.notify_modified("t");
    CHECK(calls == 3);
    CHECK(scene.get_node("t").record.modified_count == 3);
}

TEST_CASE("callback may unobserve a later observer, which then never fires") {
    Scene scene;
    add_transform(scene, "t");
    int second_calls = 0;
    ObserverHandle second;
    scene.observe_modified("t", [&](const std::string&) { scene.unobserve(second); });
    second = scene.observe_modified("t", [&](const std::string&) { ++second_calls; });
    scene.notify_modified("t");
    CHECK(second_calls == 0);
}

TEST_CASE("model nodes hold meshes and type-checked access works") {
    Scene scene;
    auto model = std::make_unique<ModelNode>();
    model->record.id = "m";
    model->mesh = tessellate_box({1, 1, 1});
    model->color = {1.0, 0.0, 0.0};
    scene.add_node(std::move(model));
    add_transform(scene, "t", Mat4::translation({0, 0, 3}));
    scene.set_parent("m", "t");

    CHECK(scene.get_model_node("m").mesh.triangles.size() == 12);
    CHECK(scene.world_transform("m").translation_part().z == doctest::Approx(3.0));
    CHECK_THROWS_AS(scene.get_model_node("t"), Error);
    CHECK_THROWS_AS(scene.get_transform_node("m"), Error);
    // Models cannot be parents (not transform-bearing).
    CHECK_THROWS_AS(scene.set_parent("t", "m"), Error);
}
