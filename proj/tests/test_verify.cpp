#include <gtest/gtest.h>

#include "phaselab/geometry.hpp"
#include "phaselab/verify.hpp"

using namespace phaselab;

TEST(Verify, MetricSuitePasses) {
    const CriterionResult r = run_criterion(1);
    EXPECT_TRUE(r.passed) << r.measured;
    EXPECT_EQ(r.name, "metric/identity suite");
}

TEST(Verify, TamperedD2IsReported) {
    VerifyOptions opts;
    opts.d2 = [](const Vector& u, const Vector& v) { return dist_d2(u, v) * (1 + 1e-6); };
    const CriterionResult r = run_criterion(1, opts);
    EXPECT_FALSE(r.passed);
    EXPECT_NE(r.measured.find("d2 closed form vs materialized"), std::string::npos) << r.measured;
    EXPECT_EQ(format_line(r).rfind("FAIL", 0), 0u);
}

TEST(Verify, SuiteMembership) {
    EXPECT_EQ(suite_criteria(Suite::Full).size(), 11u);
    const auto fast = suite_criteria(Suite::Fast);
    EXPECT_EQ(fast.front(), 1);
    EXPECT_EQ(suite_from_string("full"), Suite::Full);
    EXPECT_FALSE(run_criterion(12).passed);
}
