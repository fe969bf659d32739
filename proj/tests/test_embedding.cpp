#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "wald/embedding.hpp"
#include "wald/errors.hpp"
#include "wald/gen.hpp"
#include "wald/order.hpp"

using namespace wald;

namespace {

Split sp(std::vector<int> a, std::vector<int> b) { return make_split(a, b); }

WaldTopology star3() {
    return WaldTopology(3, {sp({1}, {2, 3}), sp({2}, {1, 3}), sp({3}, {1, 2})});
}

// lambda vector aligned with t.splits(), filled from explicit pairs
std::vector<double> weights_for(const WaldTopology& t,
                                const std::vector<std::pair<Split, double>>& vals) {
    std::vector<double> lam(t.splits().size(), 0.0);
    for (const auto& [s, v] : vals) {
        REQUIRE(t.index_of(s) >= 0);
        lam[t.index_of(s)] = v;
    }
    return lam;
}

bool has_violation(const CheckReport& rep, const std::string& cond) {
    for (const auto& v : rep.violations)
        if (v.condition == cond) return true;
    return false;
}

}  // namespace

TEST_CASE("phi sends the disconnected forest to the identity") {
    for (int n : {2, 3, 5, 8}) {
        SpdMatrix p = phi(Wald::forest_infinity(n));
        CHECK((p.mat() - Eigen::MatrixXd::Identity(n, n)).norm() == 0.0);
    }
    Wald two(WaldTopology(2, {sp({1}, {2})}), {0.5});
    SpdMatrix p2 = phi(two);
    CHECK(p2(0, 1) == 0.5);
    CHECK(p2(0, 0) == 1.0);
    CHECK(p2(1, 1) == 1.0);
}

TEST_CASE("phi multiplies one factor per separating split") {
    WaldTopology t = star3();
    Wald w(t, weights_for(t, {{sp({1}, {2, 3}), 0.2},
                              {sp({2}, {1, 3}), 0.3},
                              {sp({3}, {1, 2}), 0.4}}));
    SpdMatrix p = phi(w);
    CHECK(p(0, 1) == doctest::Approx(0.8 * 0.7).epsilon(1e-15));
    CHECK(p(0, 2) == doctest::Approx(0.8 * 0.6).epsilon(1e-15));
    CHECK(p(1, 2) == doctest::Approx(0.7 * 0.6).epsilon(1e-15));
    for (int i = 0; i < 3; ++i) CHECK(p(i, i) == 1.0);

    // two blocks: zero across, product within
    WaldTopology f(4, {sp({1}, {2}), sp({3}, {4})});
    Wald wf(f, {0.25, 0.75});
    SpdMatrix pf = phi(wf);
    CHECK(pf(0, 1) == 0.75);
    CHECK(pf(2, 3) == 0.25);
    CHECK(pf(0, 2) == 0.0);
    CHECK(pf(1, 3) == 0.0);
}

TEST_CASE("phi bar continues the product through the closed cube") {
    WaldTopology t = star3();
    CHECK(phi_bar(t, {0.0, 0.0, 0.0}).mat().isApprox(Eigen::MatrixXd::Ones(3, 3)));

    // one weight saturated: every entry separated by that split vanishes
    std::vector<double> lam =
        weights_for(t, {{sp({1}, {2, 3}), 1.0}, {sp({2}, {1, 3}), 0.3}, {sp({3}, {1, 2}), 0.4}});
    SymMatrix b = phi_bar(t, lam);
    CHECK(b(0, 1) == 0.0);
    CHECK(b(0, 2) == 0.0);
    CHECK(b(1, 2) == doctest::Approx(0.7 * 0.6).epsilon(1e-15));

    // corner with one zero, one half, one saturated weight
    std::vector<double> corner =
        weights_for(t, {{sp({1}, {2, 3}), 0.5}, {sp({2}, {1, 3}), 0.0}, {sp({3}, {1, 2}), 1.0}});
    SymMatrix c = phi_bar(t, corner);
    Eigen::MatrixXd expect(3, 3);
    expect << 1, 0.5, 0, 0.5, 1, 0, 0, 0, 1;
    CHECK((c.mat() - expect).norm() == 0.0);

    // interior agreement with phi
    Wald w(t, {0.2, 0.3, 0.4});
    CHECK((phi_bar(t, w.lambda()).mat() - phi(w).mat()).norm() == 0.0);
}

TEST_CASE("derivatives match central differences") {
    Rng rng(41);
    for (int rep = 0; rep < 8; ++rep) {
        Wald w = random_wald(rng.uniform_int(3, 7), rng);
        const WaldTopology& t = w.topology();
        if (t.splits().empty()) continue;
        std::vector<double> lam = w.lambda();
        const double h = 1e-5;
        for (const Split& e : t.splits()) {
            int idx = t.index_of(e);
            std::vector<double> up = lam, dn = lam;
            up[idx] += h;
            dn[idx] -= h;
            Eigen::MatrixXd fd = (phi_bar(t, up).mat() - phi_bar(t, dn).mat()) / (2 * h);
            CHECK((fd - d_phi(t, lam, e).mat()).cwiseAbs().maxCoeff() < 1e-6);
            CHECK(d2_phi(t, lam, e, e).mat().norm() == 0.0);
            // mixed second derivative via differences of the first
            for (const Split& f : t.splits()) {
                if (f == e) continue;
                int jdx = t.index_of(f);
                std::vector<double> fu = lam, fdn = lam;
                fu[jdx] += h;
                fdn[jdx] -= h;
                Eigen::MatrixXd fd2 =
                    (d_phi(t, fu, e).mat() - d_phi(t, fdn, e).mat()) / (2 * h);
                CHECK((fd2 - d2_phi(t, lam, e, f).mat()).cwiseAbs().maxCoeff() < 1e-6);
            }
        }
    }

    WaldTopology two(2, {sp({1}, {2})});
    SymMatrix d = d_phi(two, {0.5}, sp({1}, {2}));
    CHECK(d(0, 1) == -1.0);
    CHECK(d(0, 0) == 0.0);
    CHECK_THROWS_AS((void)d_phi(star3(), {0.1, 0.1, 0.1}, sp({1}, {2})), UnknownSplit);
}

TEST_CASE("embedded matrices pass the characterization check") {
    Rng rng(42);
    for (int rep = 0; rep < 200; ++rep) {
        Wald w = random_wald(rng.uniform_int(2, 8), rng);
        CheckReport rep_out = check_wald_matrix(phi(w));
        CHECK(rep_out.ok());
        CHECK(rep_out.min_eigenvalue > 0.0);
    }
}

TEST_CASE("check reports each violated condition with its margin") {
    Eigen::MatrixXd m(3, 3);
    m << 1, 0.9, 0.9, 0.9, 1, 0.5, 0.9, 0.5, 1;
    CheckReport r4 = check_wald_matrix(SymMatrix(m));
    CHECK_FALSE(r4.ok());
    CHECK(has_violation(r4, "R4"));
    CHECK(r4.r4_margin == doctest::Approx(0.5 - 0.81).epsilon(1e-12));

    Eigen::MatrixXd one(3, 3);
    one << 1, 1, 0, 1, 1, 0, 0, 0, 1;
    CHECK(has_violation(check_wald_matrix(SymMatrix(one)), "R5"));

    Eigen::MatrixXd diag(3, 3);
    diag << 1.2, 0.1, 0.1, 0.1, 1, 0.1, 0.1, 0.1, 1;
    CHECK(has_violation(check_wald_matrix(SymMatrix(diag)), "R1"));

    Eigen::MatrixXd neg(3, 3);
    neg << 1, -0.2, 0.1, -0.2, 1, 0.1, 0.1, 0.1, 1;
    CHECK(has_violation(check_wald_matrix(SymMatrix(neg)), "R3"));

    Rng rng(43);
    for (const char* cond : {"R2", "R3", "R4"}) {
        for (int rep = 0; rep < 10; ++rep) {
            int n = cond == std::string("R2") ? rng.uniform_int(4, 7) : rng.uniform_int(3, 7);
            SymMatrix bad = violating_matrix(n, rng, cond);
            CheckReport rep_out = check_wald_matrix(bad);
            REQUIRE_FALSE(rep_out.ok());
            CHECK(rep_out.violations.front().condition == cond);
        }
    }
}

TEST_CASE("recognize inverts the embedding") {
    SpdMatrix id(Eigen::MatrixXd::Identity(4, 4));
    Wald inf = recognize(id);
    CHECK(inf.topology() == WaldTopology::forest_infinity(4));

    Eigen::MatrixXd m(3, 3);
    m << 1, 0.5, 0, 0.5, 1, 0, 0, 0, 1;
    Wald w = recognize(SpdMatrix(m));
    CHECK(w.topology().splits().size() == 1);
    CHECK(w.topology().splits()[0] == sp({1}, {2}));
    CHECK(w.lambda()[0] == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(w.topology().blocks().size() == 2);
    CHECK(w.topology().blocks()[0] == mask_from_labels({1, 2}));
    CHECK(w.topology().blocks()[1] == mask_from_labels({3}));

    Eigen::MatrixXd bad(3, 3);
    bad << 1, 0.7, 0.7, 0.7, 1, 0.4, 0.7, 0.4, 1;  // positive definite, violates R4
    CHECK_THROWS_AS((void)recognize(SpdMatrix(bad)), NotAWaldMatrix);
}

TEST_CASE("recognize roundtrips fuzzed random forests") {
    Rng rng(44);
    int done = 0;
    while (done < 150) {
        Wald w = random_wald(3 + done % 6, rng);
        RecognizeDiagnostics diag;
        Wald back = recognize(phi(w), &diag);
        REQUIRE(back.topology() == w.topology());
        for (size_t i = 0; i < w.lambda().size(); ++i)
            CHECK(back.lambda()[i] == doctest::Approx(w.lambda()[i]).epsilon(1e-9));
        CHECK(diag.roundtrip_error < 1e-9);
        ++done;
    }
}

TEST_CASE("contraction slides straight toward the disconnected forest") {
    WaldTopology chain(3, {sp({1}, {2, 3}), sp({3}, {1, 2})});
    Wald w(chain, {0.3, 0.4});
    CHECK(contract_toward_infinity(w, 0.0) == w);
    CHECK(contract_toward_infinity(w, 1.0).topology() ==
          WaldTopology::forest_infinity(3));
    // a degree-two interior vertex resolves immediately once contraction
    // bends the product strictly above the chain equality
    for (double x : {0.1, 0.5, 0.9}) {
        Wald c = contract_toward_infinity(w, x);
        CHECK(c.topology().splits().size() == 3);
        CHECK(c.topology() == star3());
    }
    CHECK_THROWS_AS((void)contract_toward_infinity(w, -0.01), DomainError);
    CHECK_THROWS_AS((void)contract_toward_infinity(w, 1.01), DomainError);

    Rng rng(45);
    for (int rep = 0; rep < 20; ++rep) {
        Wald r = random_wald(rng.uniform_int(3, 7), rng);
        for (double x : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            Wald c = contract_toward_infinity(r, x);
            CHECK(c.topology().blocks() == r.topology().blocks());
        }
    }
}

TEST_CASE("derivative matrices stay independent across the grove") {
    Rng rng(46);
    for (int rep = 0; rep < 12; ++rep) {
        Wald w = random_wald(rng.uniform_int(3, 8), rng);
        const WaldTopology& t = w.topology();
        int k = static_cast<int>(t.splits().size());
        if (k == 0) continue;
        int n = t.n_leaves();
        Eigen::MatrixXd rows(k, n * n);
        for (int i = 0; i < k; ++i) {
            Eigen::MatrixXd d = d_phi(t, w.lambda(), t.splits()[i]).mat();
            rows.row(i) = Eigen::Map<Eigen::VectorXd>(d.data(), n * n).transpose();
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
        CHECK(svd.singularValues().minCoeff() > 1e-9);
    }
}

TEST_CASE("distinct forests embed to distinct matrices") {
    Rng rng(47);
    for (int rep = 0; rep < 30; ++rep) {
        int n = rng.uniform_int(3, 6);
        Wald a = random_wald(n, rng);
        Wald b = random_wald(n, rng);
        if (a == b) continue;
        CHECK((phi(a).mat() - phi(b).mat()).norm() > 1e-12);
    }
}

TEST_CASE("three leaf boundary groves decompose as expected") {
    WaldTopology t = star3();
    for (const Split& e : t.splits()) {
        // one coordinate at zero: the split drops, the other two remain
        std::vector<double> lam0(3, 0.35);
        lam0[t.index_of(e)] = 0.0;
        Wald sub0 = sub_wald_from_boundary(t, lam0);
        CHECK(sub0.topology().splits().size() == 2);
        CHECK(sub0.topology().blocks().size() == 1);

        // one coordinate at one: the pendant leaf breaks off, leaving a
        // single split on the two remaining leaves
        std::vector<double> lam1(3, 0.35);
        lam1[t.index_of(e)] = 1.0;
        Wald sub1 = sub_wald_from_boundary(t, lam1);
        CHECK(sub1.topology().splits().size() == 1);
        CHECK(sub1.topology().blocks().size() == 2);

        // the recognized continuation is the same boundary wald
        Wald rec = recognize(SpdMatrix(phi_bar(t, lam1).mat()));
        CHECK(rec.topology() == sub1.topology());
        for (size_t i = 0; i < rec.lambda().size(); ++i)
            CHECK(rec.lambda()[i] == doctest::Approx(sub1.lambda()[i]).epsilon(1e-9));
    }
}

TEST_CASE("whitney factor ties boundary derivatives together") {
    WaldTopology t = star3();

    // singleton correspondence set: identical derivative matrices, c = 1
    std::vector<double> drop =
        weights_for(t, {{sp({1}, {2, 3}), 0.5}, {sp({2}, {1, 3}), 0.0}, {sp({3}, {1, 2}), 0.4}});
    Wald sub = sub_wald_from_boundary(t, drop);
    REQUIRE(sub.topology().splits().size() == 2);
    WhitneyFactor wf = whitney_factor(sub, t, drop, sp({1}, {2, 3}));
    CHECK(wf.e == sp({1}, {2, 3}));
    CHECK(wf.c == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::MatrixXd lhs = d_phi(t, drop, wf.e).mat();
    Eigen::MatrixXd rhs = d_phi(sub.topology(), sub.lambda(), sp({1}, {2, 3})).mat();
    CHECK((lhs - wf.c * rhs).cwiseAbs().maxCoeff() < 1e-12);

    // pendant saturation: R_{2|3} = {2|13, 3|12}, c is the surviving factor
    std::vector<double> cut =
        weights_for(t, {{sp({1}, {2, 3}), 1.0}, {sp({2}, {1, 3}), 0.3}, {sp({3}, {1, 2}), 0.4}});
    Wald sub2 = sub_wald_from_boundary(t, cut);
    Split e23 = sp({2}, {3});
    REQUIRE(sub2.topology().splits().size() == 1);
    CHECK(sub2.lambda()[0] == doctest::Approx(1.0 - 0.7 * 0.6).epsilon(1e-12));
    WhitneyFactor wf2 = whitney_factor(sub2, t, cut, e23);
    Split other = wf2.e == sp({2}, {1, 3}) ? sp({3}, {1, 2}) : sp({2}, {1, 3});
    CHECK((wf2.e == sp({2}, {1, 3}) || wf2.e == sp({3}, {1, 2})));
    CHECK(wf2.c == doctest::Approx(1.0 - cut[t.index_of(other)]).epsilon(1e-12));
    Eigen::MatrixXd lhs2 = d_phi(t, cut, wf2.e).mat();
    Eigen::MatrixXd rhs2 = d_phi(sub2.topology(), sub2.lambda(), e23).mat();
    CHECK((lhs2 - wf2.c * rhs2).cwiseAbs().maxCoeff() < 1e-9);

    // disagreement between the claimed sub-wald and the corner is rejected
    Wald off(sub2.topology(), {0.9});
    CHECK_THROWS_AS((void)whitney_factor(off, t, cut, e23), PreconditionViolated);
}

TEST_CASE("whitney factor fuzzing over random boundary corners") {
    Rng rng(48);
    int done = 0, attempts = 0;
    while (done < 60 && attempts < 4000) {
        ++attempts;
        Wald w = random_wald(rng.uniform_int(3, 6), rng);
        const WaldTopology& t = w.topology();
        if (t.splits().empty()) continue;
        std::vector<double> corner = w.lambda();
        bool boundary = false;
        for (double& v : corner) {
            double u = rng.uniform();
            if (u < 0.3) {
                v = 0.0;
                boundary = true;
            } else if (u < 0.45) {
                v = 1.0;
                boundary = true;
            }
        }
        if (!boundary) corner[0] = 0.0;
        Wald sub(Wald::forest_infinity(t.n_leaves()));
        try {
            sub = sub_wald_from_boundary(t, corner);
        } catch (const NotInWaldSpace&) {
            continue;
        }
        auto witness = partial_order_compare(sub.topology(), t);
        REQUIRE(witness.has_value());
        for (const Split& e_prime : sub.topology().splits()) {
            WhitneyFactor wf = whitney_factor(sub, t, corner, e_prime);
            const std::vector<Split>* r = witness->r_set(e_prime);
            REQUIRE(r != nullptr);
            double expect_c = 1.0;
            for (const Split& other : *r)
                if (!(other == wf.e)) expect_c *= 1.0 - corner[t.index_of(other)];
            CHECK(wf.c == doctest::Approx(expect_c).epsilon(1e-9));
            Eigen::MatrixXd lhs = d_phi(t, corner, wf.e).mat();
            Eigen::MatrixXd rhs =
                d_phi(sub.topology(), sub.lambda(), e_prime).mat();
            CHECK((lhs - wf.c * rhs).cwiseAbs().maxCoeff() < 1e-9);
        }
        ++done;
    }
    CHECK(done == 60);
}
