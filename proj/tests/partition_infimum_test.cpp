#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "subpert/partition_infimum.hpp"

namespace subpert {
namespace {

TEST(PartitionInfimum, ZeroIsEmptyPartition) {
    const PartitionInfimum r = N_via_partition_infimum_detailed(0.0, 4, 1e-10);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_TRUE(r.lambdas.empty());
}

TEST(PartitionInfimum, SingleStepInFirstBranchRegime) {
    for (double x : {0.01, 0.1, 0.3, 0.5}) {
        const PartitionInfimum r = N_via_partition_infimum_detailed(x, 16, 1e-12);
        EXPECT_NEAR(r.value, 0.5 * std::asin(std::numbers::pi * x / 2.0), 1e-12) << x;
        EXPECT_NEAR(r.value, bound_N(x / 2.0), 1e-12) << x;
        ASSERT_EQ(r.lambdas.size(), 1u);
    }
}

TEST(PartitionInfimum, ProductConstraintHolds) {
    for (double x : {0.2, 0.62, 0.75, 0.88}) {
        const PartitionInfimum r = N_via_partition_infimum_detailed(x, 32, 1e-12);
        double prod = 1.0;
        double sum = 0.0;
        for (double l : r.lambdas) {
            EXPECT_GE(l, 0.0);
            EXPECT_LE(l, 2.0 / std::numbers::pi + 1e-15);
            prod *= 1.0 - l;
            sum += 0.5 * std::asin(std::numbers::pi * l / 2.0);
        }
        EXPECT_NEAR(prod, 1.0 - x, 1e-12);
        EXPECT_NEAR(sum, r.value, 1e-12);
    }
}

TEST(PartitionInfimum, AgreesWithClosedFormNearCap) {
    const double x = 2.0 * c_crit() * (1.0 - 1e-9);
    EXPECT_NEAR(N_via_partition_infimum(x, 64, 1e-10), bound_N(x / 2.0), 1e-3);
    EXPECT_NEAR(N_via_partition_infimum(2.0 * c_crit(), 64, 1e-10), std::numbers::pi / 2.0, 1e-9);
}

TEST(PartitionInfimum, InfeasibleAndDomainErrors) {
    // One step can reach at most lambda = 2/pi.
    try {
        N_via_partition_infimum(0.7, 1, 1e-10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InfeasibleConstraint);
    }
    EXPECT_THROW(N_via_partition_infimum(0.95, 64, 1e-10), Error);
    EXPECT_THROW(N_via_partition_infimum(-0.1, 64, 1e-10), Error);
    EXPECT_THROW(N_via_partition_infimum(0.5, 0, 1e-10), Error);
}

TEST(PartitionInfimum, NeverBelowClosedForm) {
    for (int i = 0; i <= 40; ++i) {
        const double x = 2.0 * c_crit() * i / 40.0;
        EXPECT_GE(N_via_partition_infimum(x, 12, 1e-10), bound_N(std::min(x / 2.0, c_crit())) - 1e-12) << x;
    }
}

} // namespace
} // namespace subpert
