#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "portflow/separation.hpp"

using namespace portflow;

TEST_CASE("symmetric split of a single separation")
{
    std::vector<double> d{0, 0};
    std::vector<SeparationConstraint> cons{{0, 1, 10, false}};
    auto x = project(d, cons);
    CHECK(x[0] == doctest::Approx(-5));
    CHECK(x[1] == doctest::Approx(5));
}

TEST_CASE("no constraints leaves desired positions")
{
    std::vector<double> d{3, -1, 7};
    auto x = project(d, {});
    CHECK(x == d);
}

TEST_CASE("equalities with offsets are honoured")
{
    std::vector<double> d{0, 0, 0};
    std::vector<SeparationConstraint> cons{{0, 1, 4, true}, {1, 2, -2, true}};
    auto x = project(d, cons);
    CHECK(x[1] - x[0] == doctest::Approx(4));
    CHECK(x[2] - x[1] == doctest::Approx(-2));
    CHECK(x[0] + x[1] + x[2] == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("satisfiability")
{
    CHECK_FALSE(is_satisfiable(std::vector<SeparationConstraint>{{0, 1, 5, false}, {1, 0, 5, false}}));
    CHECK(is_satisfiable(std::vector<SeparationConstraint>{{0, 1, 5, false}}));
    std::vector<SeparationConstraint> bad{{0, 1, 5, false}, {1, 2, 1, false}, {2, 0, -3, true}};
    CHECK_THROWS_AS(project(std::vector<double>{0, 0, 0}, bad), InfeasibleError);
    try {
        project(std::vector<double>{0, 0, 0}, bad);
    } catch (const InfeasibleError& e) {
        CHECK(e.cycle().size() == 3);
    }
}

TEST_CASE("projection matches exhaustive active-set enumeration")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pos(-10, 10), gap(-5, 10), w(0.5, 2);
    int compared = 0;
    for (int inst = 0; inst < 400; ++inst) {
        std::size_t n = 2 + rng() % 4, m = 1 + rng() % 6;
        std::vector<Variable> vars(n);
        for (auto& v : vars) v = {pos(rng), w(rng), 0};
        std::vector<SeparationConstraint> cons;
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t l = rng() % n, r = rng() % n;
            if (l == r) r = (r + 1) % n;
            cons.push_back({l, r, gap(rng), rng() % 7 == 0});
        }
        if (!is_satisfiable(n, cons)) {
            CHECK_THROWS_AS(project(vars, cons), InfeasibleError);
            continue;
        }
        auto x = project(vars, cons);
        auto ref = oracle::active_set_projection(vars, cons);
        REQUIRE(ref);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x[i] - (*ref)[i]) <= 1e-6);
        auto again = project(std::vector<double>(x.begin(), x.end()), cons);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(again[i] - x[i]) <= kIdempotenceTol);
        ++compared;
    }
    CHECK(compared > 200);
}

TEST_CASE("satisfiability agrees with projection on larger systems")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> gap(-5, 10);
    for (int inst = 0; inst < 300; ++inst) {
        std::vector<SeparationConstraint> cons;
        for (int i = 0; i < 12; ++i) {
            std::size_t l = rng() % 8, r = rng() % 8;
            if (l == r) r = (r + 1) % 8;
            cons.push_back({l, r, gap(rng), rng() % 10 == 0});
        }
        bool projected = true;
        try {
            project(std::vector<double>(8, 0.0), cons);
        } catch (const InfeasibleError&) {
            projected = false;
        }
        CHECK(projected == is_satisfiable(8, cons));
    }
}

TEST_CASE("non-overlap generation")
{
    std::vector<Rect> far{{{0, 0}, 10, 10}, {{100, 0}, 10, 10}};
    auto none = generate_nonoverlap(far, 5);
    CHECK(none.x.empty());
    CHECK(none.y.empty());

    std::vector<Rect> same{{{0, 0}, 10, 10}, {{0, 0}, 10, 10}};
    auto one = generate_nonoverlap(same, 5);
    REQUIRE(one.x.size() == 1);
    CHECK(one.y.empty());
    CHECK(one.x[0].gap == doctest::Approx(15));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> c(0, 60), s(5, 25);
    for (int round = 0; round < 50; ++round) {
        std::vector<Rect> rects(10);
        for (auto& r : rects) r = {{c(rng), c(rng)}, s(rng), s(rng)};
        std::vector<double> xs, ys;
        for (auto& r : rects) xs.push_back(r.centre.x), ys.push_back(r.centre.y);
        // newly generated constraints accumulate until the projected layout is clean
        AxisConstraints cons;
        for (int pass = 0; pass < 50; ++pass) {
            auto fresh = generate_nonoverlap(rects, 4);
            if (fresh.x.empty() && fresh.y.empty()) break;
            cons.append(fresh);
            auto px = project(xs, cons.x);
            auto py = project(ys, cons.y);
            for (std::size_t i = 0; i < rects.size(); ++i) rects[i].centre = {px[i], py[i]};
        }
        for (std::size_t i = 0; i < rects.size(); ++i)
            for (std::size_t j = i + 1; j < rects.size(); ++j)
                CHECK_FALSE(rects_overlap(rects[i], rects[j], 4 - 1e-6));
    }
}

TEST_CASE("cluster containment constraints")
{
    ClusterSpec one{"c", 1, 2, 3, 4, {{0, 5, 5, 5}}, {}, 5};
    auto cons = cluster_constraints(one);
    REQUIRE(cons.x.size() == 2);
    CHECK(cons.x[0].gap == 10);
    CHECK(cons.x[1].gap == 10);

    ClusterSpec empty{"e", 0, 1, 2, 3, {}, {}, 5};
    auto ec = cluster_constraints(empty);
    REQUIRE(ec.x.size() == 1);
    CHECK(ec.x[0].left == 0);
    CHECK(ec.x[0].right == 1);
    CHECK(ec.x[0].gap == 10);

    std::vector<ClusterSpec> sib{{"a", 0, 1, 2, 3, {{9, 10, 1, 1}}, {}, 1}, {"b", 4, 5, 6, 7, {{9, 10, 1, 1}}, {}, 1}};
    CHECK_THROWS_AS(check_cluster_membership(sib), GraphError);
}
