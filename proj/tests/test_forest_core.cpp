#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "enumerate.hpp"
#include "wald/embedding.hpp"
#include "wald/errors.hpp"
#include "wald/order.hpp"
#include "wald/split.hpp"
#include "wald/topology.hpp"
#include "wald/wald.hpp"

using namespace wald;

namespace {

Split sp(std::vector<int> a, std::vector<int> b) { return make_split(a, b); }

// Six-leaf forest with one four-leaf tree (leaf 2 sits at an inner vertex)
// and one cherry.
WaldTopology six_leaf_forest() {
    return WaldTopology(6, {sp({1}, {2, 3, 4}), sp({3}, {1, 2, 4}), sp({4}, {1, 2, 3}),
                            sp({1, 2}, {3, 4}), sp({5}, {6})});
}

// Five-leaf caterpillar: pendants except leaf 2 lives at an inner vertex.
WaldTopology caterpillar5() {
    return WaldTopology(5, {sp({1}, {2, 3, 4, 5}), sp({1, 2}, {3, 4, 5}),
                            sp({3}, {1, 2, 4, 5}), sp({1, 2, 3}, {4, 5}),
                            sp({1, 2, 3, 4}, {5}), sp({1, 2, 3, 5}, {4})});
}

std::set<Split> split_set(const WaldTopology& t, const std::vector<int>& idx) {
    std::set<Split> out;
    for (int i : idx) out.insert(t.splits()[static_cast<std::size_t>(i)]);
    return out;
}

std::set<Split> as_set(const std::vector<Split>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("splits canonicalize the side holding the smallest label") {
    Split e1 = sp({2, 3}, {1, 4});
    Split e2 = sp({1, 4}, {2, 3});
    CHECK(e1 == e2);
    CHECK(e1.a() == mask_from_labels({1, 4}));
    CHECK(e1.b() == mask_from_labels({2, 3}));
    CHECK(to_string(e1) == "1,4|2,3");
    CHECK(e1.support() == mask_from_labels({1, 2, 3, 4}));
    CHECK(e1.separates(1, 2));
    CHECK(e1.separates(3, 4));
    CHECK_FALSE(e1.separates(1, 4));
    CHECK_FALSE(e1.separates(1, 5));
    CHECK_THROWS_AS(Split(mask_from_labels({1, 2}), mask_from_labels({2, 3})),
                    std::invalid_argument);
    CHECK_THROWS_AS(Split(0, mask_from_labels({1})), std::invalid_argument);
}

TEST_CASE("leaf mask utilities") {
    CHECK(leaf_bit(1) == 1u);
    CHECK(leaf_bit(64) == (LeafMask{1} << 63));
    CHECK_THROWS_AS(leaf_bit(0), std::invalid_argument);
    CHECK_THROWS_AS(leaf_bit(65), std::invalid_argument);
    std::vector<int> labels = {7, 2, 64};
    auto roundtrip = labels_from_mask(mask_from_labels(labels));
    CHECK(roundtrip == std::vector<int>{2, 7, 64});
    CHECK(smallest_label(mask_from_labels({5, 3, 9})) == 3);
    CHECK_THROWS_AS(smallest_label(0), std::invalid_argument);
}

TEST_CASE("split compatibility is the empty-intersection rule") {
    CHECK(split_compatible(sp({1, 2}, {3, 4}), sp({1}, {2, 3, 4})));
    CHECK_FALSE(split_compatible(sp({1, 2}, {3, 4}), sp({1, 3}, {2, 4})));
    Split e = sp({1, 2}, {3, 4});
    CHECK(split_compatible(e, e));
    // symmetric in both arguments
    auto f = sp({2}, {1, 3, 4});
    CHECK(split_compatible(e, f) == split_compatible(f, e));
}

TEST_CASE("restrict_split keeps both sides or vanishes") {
    auto r = restrict_split(sp({1, 2}, {3, 4, 5}), mask_from_labels({2, 3}));
    REQUIRE(r.has_value());
    CHECK(*r == sp({2}, {3}));
    CHECK_FALSE(restrict_split(sp({1}, {2, 3, 4, 5}), mask_from_labels({2, 3})).has_value());
    Split e = sp({1, 2}, {3, 4});
    CHECK(restrict_split(e, e.support()) == e);
}

TEST_CASE("six-leaf forest topology: blocks, paths, separation") {
    WaldTopology t = six_leaf_forest();
    REQUIRE(t.blocks().size() == 2);
    CHECK(t.blocks()[0] == mask_from_labels({1, 2, 3, 4}));
    CHECK(t.blocks()[1] == mask_from_labels({5, 6}));
    CHECK(t.block_of(2) == mask_from_labels({1, 2, 3, 4}));
    CHECK(t.block_of(6) == mask_from_labels({5, 6}));

    auto path14 = split_set(t, t.edges_on_path(1, 4));
    CHECK(path14 == std::set<Split>{sp({1}, {2, 3, 4}), sp({4}, {1, 2, 3}), sp({1, 2}, {3, 4})});
    CHECK(t.edges_on_path(1, 5).empty());
    CHECK(t.edges_on_path(3, 3).empty());
    for (int u = 1; u <= 4; ++u)
        for (int v = u + 1; v <= 4; ++v) CHECK_FALSE(t.edges_on_path(u, v).empty());

    // dropping the pendant of leaf 1 leaves the pair (1,2) unseparated
    try {
        WaldTopology(6, {sp({3}, {1, 2, 4}), sp({4}, {1, 2, 3}), sp({1, 2}, {3, 4}), sp({5}, {6})});
        FAIL("expected SeparationViolated");
    } catch (const SeparationViolated& e) {
        CHECK(e.u == 1);
        CHECK(e.v == 2);
    }
}

TEST_CASE("topology construction rejects bad systems") {
    CHECK_THROWS_AS(WaldTopology(4, {sp({1, 2}, {3, 4}), sp({1, 3}, {2, 4})}),
                    IncompatibleSplits);
    CHECK_THROWS_AS(WaldTopology(5, {sp({1, 2}, {3, 4}), sp({4}, {5})}), OverlappingBlocks);
    CHECK_THROWS_AS(WaldTopology(4, {sp({1}, {2, 3, 4}), sp({1}, {2, 3, 4})}),
                    std::invalid_argument);
    CHECK_THROWS_AS(WaldTopology(3, {sp({1}, {2, 3, 4})}), std::invalid_argument);
    CHECK_THROWS_AS(WaldTopology(1, {}), std::invalid_argument);
}

TEST_CASE("the empty topology is the fully disconnected forest") {
    WaldTopology t = WaldTopology::forest_infinity(4);
    CHECK(t.splits().empty());
    CHECK(t.blocks().size() == 4);
    CHECK(t.id() == "-");
    Wald f = Wald::forest_infinity(4);
    CHECK(f.lambda().empty());
}

TEST_CASE("wald weights are strictly interior and aligned with splits") {
    WaldTopology t(3, {sp({1}, {2, 3}), sp({2}, {1, 3})});
    Wald w(t, {0.25, 0.5});
    CHECK(w.weight_of(sp({1}, {2, 3})) == doctest::Approx(w.lambda()[0]));
    CHECK_THROWS_AS(w.weight_of(sp({3}, {1, 2})), UnknownSplit);
    CHECK_THROWS_AS(Wald(t, {0.25}), std::invalid_argument);
    CHECK_THROWS_AS(Wald(t, {0.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(Wald(t, {0.25, 1.0}), std::invalid_argument);
}

TEST_CASE("topology ids are deterministic and order-insensitive") {
    WaldTopology t1(4, {sp({3}, {1, 2, 4}), sp({1}, {2, 3, 4}), sp({2}, {1, 3, 4})});
    WaldTopology t2(4, {sp({1}, {2, 3, 4}), sp({2}, {1, 3, 4}), sp({3}, {1, 2, 4})});
    CHECK(t1.id() == t2.id());
    CHECK(t1 == t2);
    CHECK(t1.index_of(sp({1}, {2, 3, 4})) >= 0);
    CHECK(t1.index_of(sp({1, 2}, {3, 4})) == -1);
}

TEST_CASE("partial order: caterpillar dominates the two-cherry forest") {
    WaldTopology e = caterpillar5();
    WaldTopology e1(5, {sp({2}, {3}), sp({4}, {5})});
    auto w = partial_order_compare(e1, e);
    REQUIRE(w.has_value());
    CHECK_FALSE(w->equal_topologies());
    CHECK(as_set(w->cut) == std::set<Split>{sp({1}, {2, 3, 4, 5}), sp({1, 2, 3}, {4, 5})});
    CHECK(w->disappearing.empty());
    const auto* r23 = w->r_set(sp({2}, {3}));
    REQUIRE(r23 != nullptr);
    CHECK(as_set(*r23) == std::set<Split>{sp({1, 2}, {3, 4, 5}), sp({3}, {1, 2, 4, 5})});
    const auto* r45 = w->r_set(sp({4}, {5}));
    REQUIRE(r45 != nullptr);
    CHECK(as_set(*r45) == std::set<Split>{sp({1, 2, 3, 4}, {5}), sp({1, 2, 3, 5}, {4})});
    // not comparable the other way round
    CHECK_FALSE(partial_order_compare(e, e1).has_value());
}

TEST_CASE("partial order: cut condition can fail alone") {
    WaldTopology e = caterpillar5();
    WaldTopology e2(5, {sp({2}, {5}), sp({3}, {4})});
    CHECK_FALSE(partial_order_compare(e2, e).has_value());
}

TEST_CASE("partial order: star below the resolved quartet") {
    WaldTopology e(4, {sp({1}, {2, 3, 4}), sp({2}, {1, 3, 4}), sp({3}, {1, 2, 4}),
                       sp({1, 2, 3}, {4}), sp({1, 2}, {3, 4})});
    WaldTopology star(4, {sp({1}, {2, 3, 4}), sp({2}, {1, 3, 4}), sp({3}, {1, 2, 4}),
                          sp({1, 2, 3}, {4})});
    auto w = partial_order_compare(star, e);
    REQUIRE(w.has_value());
    CHECK(as_set(w->disappearing) == std::set<Split>{sp({1, 2}, {3, 4})});
    CHECK(w->cut.empty());
    for (const Split& ep : star.splits()) {
        const auto* r = w->r_set(ep);
        REQUIRE(r != nullptr);
        CHECK(as_set(*r) == std::set<Split>{ep});
    }
}

TEST_CASE("partial order: cutting one leaf off a resolved five-leaf tree") {
    WaldTopology e(5, {sp({1}, {2, 3, 4, 5}), sp({2}, {1, 3, 4, 5}), sp({3}, {1, 2, 4, 5}),
                       sp({4}, {1, 2, 3, 5}), sp({5}, {1, 2, 3, 4}), sp({1, 2}, {3, 4, 5}),
                       sp({1, 2, 3}, {4, 5})});
    WaldTopology ep(5, {sp({1}, {2, 4, 5}), sp({2}, {1, 4, 5}), sp({4}, {1, 2, 5}),
                        sp({5}, {1, 2, 4}), sp({1, 2}, {4, 5})});
    auto w = partial_order_compare(ep, e);
    REQUIRE(w.has_value());
    CHECK(as_set(w->cut) == std::set<Split>{sp({3}, {1, 2, 4, 5})});
    CHECK(w->disappearing.empty());
    const auto* r = w->r_set(sp({1, 2}, {4, 5}));
    REQUIRE(r != nullptr);
    CHECK(as_set(*r) == std::set<Split>{sp({1, 2}, {3, 4, 5}), sp({1, 2, 3}, {4, 5})});
}

TEST_CASE("comparing a topology with itself gives the identity witness") {
    for (const WaldTopology& t : {six_leaf_forest(), caterpillar5()}) {
        auto w = partial_order_compare(t, t);
        REQUIRE(w.has_value());
        CHECK(w->equal_topologies());
        for (const Split& e : t.splits()) {
            const auto* r = w->r_set(e);
            REQUIRE(r != nullptr);
            CHECK(as_set(*r) == std::set<Split>{e});
        }
    }
}

TEST_CASE("exhaustive topology counts for small leaf sets") {
    // derived by hand: trees per block of size 1..5 are 1, 1, 4, 32, 396,
    // summed over set partitions
    CHECK(testutil::all_topologies(2).size() == 2);
    CHECK(testutil::all_topologies(3).size() == 8);
    CHECK(testutil::all_topologies(4).size() == 58);
    CHECK(testutil::all_topologies(5).size() == 662);
}

TEST_CASE("partial order is reflexive, antisymmetric, transitive for n <= 5") {
    for (int n = 3; n <= 5; ++n) {
        auto tops = testutil::all_topologies(n);
        const std::size_t m = tops.size();
        const std::size_t words = (m + 63) / 64;
        std::vector<std::vector<std::uint64_t>> leq(m, std::vector<std::uint64_t>(words, 0));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                if (partial_order_compare(tops[i], tops[j]).has_value())
                    leq[i][j / 64] |= std::uint64_t{1} << (j % 64);

        int reflexive_misses = 0, antisym_violations = 0, trans_violations = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (!(leq[i][i / 64] >> (i % 64) & 1)) ++reflexive_misses;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j || !(leq[i][j / 64] >> (j % 64) & 1)) continue;
                if (leq[j][i / 64] >> (i % 64) & 1) ++antisym_violations;
                // upper sets must nest: i <= j forces up(j) subset of up(i)
                for (std::size_t w = 0; w < words; ++w)
                    if (leq[j][w] & ~leq[i][w]) {
                        ++trans_violations;
                        break;
                    }
            }
        }
        CHECK(reflexive_misses == 0);
        CHECK(antisym_violations == 0);
        CHECK(trans_violations == 0);

        // extension: anything below the top dimension has a cover one split up
        std::vector<std::vector<std::size_t>> by_size(static_cast<std::size_t>(2 * n - 2));
        for (std::size_t i = 0; i < m; ++i) by_size[tops[i].splits().size()].push_back(i);
        int missing_extension = 0;
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t sz = tops[i].splits().size();
            if (static_cast<int>(sz) == 2 * n - 3) continue;
            bool found = false;
            for (std::size_t j : by_size[sz + 1])
                if (leq[i][j / 64] >> (j % 64) & 1) {
                    found = true;
                    break;
                }
            if (!found) ++missing_extension;
        }
        CHECK(missing_extension == 0);
    }
}

TEST_CASE("order witnesses partition the larger topology and track blocks") {
    for (int n = 3; n <= 4; ++n) {
        auto tops = testutil::all_topologies(n);
        for (const auto& ep : tops) {
            for (const auto& e : tops) {
                auto w = partial_order_compare(ep, e);
                if (!w.has_value()) continue;
                std::set<Split> parts;
                std::size_t total = 0;
                for (const auto& [eprime, r] : w->corresponding) {
                    CHECK_FALSE(r.empty());
                    for (const Split& s : r) parts.insert(s);
                    total += r.size();
                }
                for (const Split& s : w->disappearing) parts.insert(s);
                for (const Split& s : w->cut) parts.insert(s);
                total += w->disappearing.size() + w->cut.size();
                CHECK(total == e.splits().size());
                CHECK(parts == as_set(e.splits()));
                CHECK(w->corresponding.size() == ep.splits().size());

                // fewer blocks in the larger topology exactly when edges were cut
                bool merged = e.blocks().size() < ep.blocks().size();
                CHECK(merged == !w->cut.empty());

                // path correspondence: a split of E' separates u,v exactly
                // when its whole R-set lies on the E-path between them
                for (const auto& [eprime, r] : w->corresponding) {
                    LeafMask support = eprime.support();
                    for (int u : labels_from_mask(support)) {
                        for (int v : labels_from_mask(support)) {
                            if (u >= v) continue;
                            auto epath = split_set(e, e.edges_on_path(u, v));
                            bool all_in = true;
                            for (const Split& s : r)
                                if (!epath.count(s)) {
                                    all_in = false;
                                    break;
                                }
                            CHECK(eprime.separates(u, v) == all_in);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("boundary corner coordinates represent the smaller wald") {
    WaldTopology e = caterpillar5();
    WaldTopology e1(5, {sp({2}, {3}), sp({4}, {5})});
    Wald sub(e1, {0.3, 0.6});
    auto w = partial_order_compare(e1, e);
    REQUIRE(w.has_value());
    auto ls = boundary_lambda_star(sub, e, *w);
    REQUIRE(ls.size() == e.splits().size());

    auto at = [&](const Split& s) { return ls[static_cast<std::size_t>(e.index_of(s))]; };
    CHECK(at(sp({1}, {2, 3, 4, 5})) == doctest::Approx(1.0));
    CHECK(at(sp({1, 2, 3}, {4, 5})) == doctest::Approx(1.0));
    double share23 = 1.0 - std::sqrt(1.0 - 0.3);
    double share45 = 1.0 - std::sqrt(1.0 - 0.6);
    CHECK(at(sp({1, 2}, {3, 4, 5})) == doctest::Approx(share23).epsilon(1e-12));
    CHECK(at(sp({3}, {1, 2, 4, 5})) == doctest::Approx(share23).epsilon(1e-12));
    CHECK(at(sp({1, 2, 3, 4}, {5})) == doctest::Approx(share45).epsilon(1e-12));
    CHECK(at(sp({1, 2, 3, 5}, {4})) == doctest::Approx(share45).epsilon(1e-12));

    // the continued embedding at the corner reproduces the smaller wald
    SymMatrix p_corner = phi_bar(e, ls);
    SpdMatrix p_sub = phi(sub);
    CHECK((p_corner.mat() - p_sub.mat()).cwiseAbs().maxCoeff() < 1e-12);

    Wald rebuilt = sub_wald_from_boundary(e, ls);
    CHECK(rebuilt.topology() == sub.topology());
    for (std::size_t i = 0; i < rebuilt.lambda().size(); ++i)
        CHECK(rebuilt.lambda()[i] == doctest::Approx(sub.lambda()[i]).epsilon(1e-12));
}

TEST_CASE("boundary reconstruction on the three-leaf star") {
    WaldTopology star(3, {sp({1}, {2, 3}), sp({2}, {1, 3}), sp({3}, {1, 2})});
    auto idx = [&](const Split& s) { return static_cast<std::size_t>(star.index_of(s)); };

    // pendant of leaf 1 saturates: the pair 2,3 stays joined by one split
    std::vector<double> ls(3);
    ls[idx(sp({1}, {2, 3}))] = 1.0;
    ls[idx(sp({2}, {1, 3}))] = 0.25;
    ls[idx(sp({3}, {1, 2}))] = 0.5;
    Wald sub = sub_wald_from_boundary(star, ls);
    REQUIRE(sub.topology().splits().size() == 1);
    CHECK(sub.topology().splits()[0] == sp({2}, {3}));
    CHECK(sub.weight_of(sp({2}, {3})) == doctest::Approx(1.0 - 0.75 * 0.5).epsilon(1e-12));

    // two vanishing weights would leave a pair at correlation one
    std::vector<double> bad(3);
    bad[idx(sp({1}, {2, 3}))] = 0.0;
    bad[idx(sp({2}, {1, 3}))] = 0.0;
    bad[idx(sp({3}, {1, 2}))] = 0.5;
    CHECK_THROWS_AS(sub_wald_from_boundary(star, bad), NotInWaldSpace);

    // a single zero just drops that split
    std::vector<double> one_zero(3);
    one_zero[idx(sp({1}, {2, 3}))] = 0.0;
    one_zero[idx(sp({2}, {1, 3}))] = 0.25;
    one_zero[idx(sp({3}, {1, 2}))] = 0.5;
    Wald dropped = sub_wald_from_boundary(star, one_zero);
    CHECK(dropped.topology() ==
          WaldTopology(3, {sp({2}, {1, 3}), sp({3}, {1, 2})}));
    CHECK(dropped.weight_of(sp({2}, {1, 3})) == doctest::Approx(0.25));
    CHECK(dropped.weight_of(sp({3}, {1, 2})) == doctest::Approx(0.5));

    CHECK_THROWS_AS(sub_wald_from_boundary(star, {0.5, 0.5, 1.5}), DomainError);
}
