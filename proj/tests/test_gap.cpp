#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lpm/errors.hpp"
#include "lpm/gap.hpp"
#include "support.hpp"

using namespace lpm;

TEST_CASE("centre-unstable condition by hand") {
    const GapReport r = check_cu(2.0, 0.1, 0.5, 0.2, 1.0, -1.0);
    const double lhs = 2.0 * 0.1 * (0.5 + 1.0 / 0.8 + 0.5);
    CHECK(r.lhs == doctest::Approx(lhs));
    CHECK(r.pass);
    CHECK(r.margin == doctest::Approx(1.0 - lhs));
    CHECK(r.constants.at("K_u") == doctest::Approx(2.0 * 0.1 * 0.5 / (1.0 - lhs)));
    CHECK_FALSE(check_cu(2.0, 1.0, 0.5, 0.2, 1.0, -1.0).pass);
    CHECK_THROWS_AS(check_cu(1.0, 0.1, 0.5, 0.2, 1.0, -0.1), DomainError);
}

TEST_CASE("parabolic preset certification") {
    const SpectralModel m = parabolic_preset(4, 1.0, 0.5);
    const RateParams r = test::parabolic_rates();
    for (const auto& rep : check_all(make_gap_inputs(m, 1e-3), r, 2)) {
        CAPTURE(rep.name);
        CHECK(rep.pass);
    }
    const GapReport bad = check_cu(make_gap_inputs(m, 25.0), r);
    CHECK_FALSE(bad.pass);
    CHECK(std::isinf(bad.constants.at("K_u")));
}

TEST_CASE("fixed C and ordering errors") {
    const auto m = test::demo_model();
    const GapInputs in = make_gap_inputs(*m, 0.05, 0.7);
    CHECK(in.c_of(-2.5) == 0.7);
    const GapReport r = check_cu(in, test::demo_rates());
    CHECK(r.lhs == doctest::Approx(0.05 * (0.7 + 1.0 / 0.8 + 0.5)));
    RateParams bad = test::demo_rates();
    bad.zeta = -5.0;  // below -beta
    CHECK_THROWS_AS(check_cu(in, bad), DomainError);
    bad = test::demo_rates();
    bad.eta_cs = 0.1;  // below gamma
    CHECK_THROWS_AS(check_cs_foliation(in, bad), DomainError);
    CHECK_THROWS_AS(check_cu_smooth(in, test::demo_rates(), 0), DomainError);
}

TEST_CASE("foliation conditions and the shift-term variant") {
    const auto m = test::demo_model();
    RateParams r = test::demo_rates();
    r.sigma = 0.05;
    const GapInputs in = make_gap_inputs(*m, 0.01, 0.5, false);
    const auto a = check_cs_foliation(in, r);
    REQUIRE(a.size() == 3);
    CHECK(a[0].name == "cs_foliation");
    CHECK(a[0].lhs == doctest::Approx(0.01 * (0.5 + 1.0 / 0.4 + 1.0 / 0.4)));
    CHECK(a[0].constants.at("K_s") == doctest::Approx(0.01 / (0.4 * (1.0 - a[0].lhs))));
    CHECK(a[1].lhs == doctest::Approx(0.01 * (0.5 + 1.0 / 0.35 + 1.0 / 0.45)));
    // alpha - 2 eta_cs + 2 sigma < 0 leaves the admissible range.
    CHECK(std::isinf(a[2].lhs));
    CHECK_FALSE(a[2].pass);
    GapInputs corr = in;
    corr.corrected_shift_term = true;
    const auto b = check_cs_foliation(corr, r);
    CHECK(b[2].lhs == doctest::Approx(0.01 * (0.5 + 1.0 / 0.3 + 1.0 / 0.5)));
    CHECK(b[2].pass);
    CHECK(b[2].threshold == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("smoothness, centre and intersection") {
    const auto m = test::demo_model();
    const GapInputs in = make_gap_inputs(*m, 0.01, 0.5);
    RateParams r = test::demo_rates();
    const auto cu = check_cu_smooth(in, r, 2);
    REQUIRE(cu.size() == 2);
    CHECK(cu[1].lhs == doctest::Approx(0.01 * (0.5 + 1.0 / 1.8 + 1.0 / 3.0)));
    r.eta_cs = 0.3;
    const auto cs = check_cs_smooth(in, r, 2);
    CHECK(cs[1].lhs == doctest::Approx(0.01 * (0.5 + 1.0 / 0.4 + 1.0 / 0.4)));
    const GapReport c = check_c(in, r);
    CHECK(c.lhs == doctest::Approx(0.01 * (0.5 + 1.0 / 0.1 + 1.0 / 0.7)));
    CHECK(check_intersection(0.5, 1.5).pass);
    CHECK_FALSE(check_intersection(1.0, 1.0).pass);
    const auto all = check_all(in, test::demo_rates(), 1);
    CHECK(all.front().name == "cu_manifold");
    CHECK(all.back().name == "intersection");
}
