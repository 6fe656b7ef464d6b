#include <sstream>

#include "doctest.h"
#include "splitsim/profile.hpp"
#include "splitsim/rng.hpp"
#include "splitsim/units.hpp"

using namespace splitsim;

TEST_CASE("preset carries the published per-layer numbers") {
    const ModelProfile p = resnet18_preset();
    REQUIRE(p.total_layers() == 18);

    CHECK(p.layers[0].name == "CONV1");
    CHECK(p.layers[0].fp_cum_flops() == doctest::Approx(9.8304e6).epsilon(1e-12));
    CHECK(p.layers[0].smashed_bits() == doctest::Approx(2097152.0));
    CHECK(p.layers[1].smashed_bits() == doctest::Approx(524288.0));
    // cumulative forward work after the second layer
    CHECK(p.layers[1].fp_cum_flops() == doctest::Approx(19.3331e6).epsilon(1e-12));
    // backward defaults to twice forward, gradient size to activation size
    CHECK(p.layers[4].bp_cum_flops() == doctest::Approx(2.0 * p.layers[4].fp_cum_flops()));
    CHECK(p.layers[4].grad_bits() == doctest::Approx(p.layers[4].smashed_bits()));
    // the repeated residual-block rows are kept in order
    CHECK(p.layers[3].name == "CONV4");
    CHECK(p.layers[6].name == "CONV4");
    CHECK(p.layers[3].fp_cum_mflop < p.layers[6].fp_cum_mflop);
    // last row is the classifier head
    CHECK(p.layers[17].name == "FC");
}

TEST_CASE("workload selectors split the profile at the cut") {
    ModelProfile p;
    for (int j = 0; j < 3; ++j) {
        LayerProfile l;
        l.index = j + 1;
        l.name = "L" + std::to_string(j + 1);
        l.smashed_mb = (1000.0 + j) / 8388608.0;
        l.grad_mb = (2000.0 + j) / 8388608.0;
        p.layers.push_back(l);
    }
    p.layers[0].fp_cum_mflop = 10.0;
    p.layers[1].fp_cum_mflop = 30.0;
    p.layers[2].fp_cum_mflop = 60.0;
    p.layers[0].bp_cum_mflop = 5.0;
    p.layers[1].bp_cum_mflop = 15.0;
    p.layers[2].bp_cum_mflop = 40.0;

    const CutWorkloads w1 = workloads_at_cut(p, 1);
    CHECK(w1.client_fp_flops == doctest::Approx(10e6));
    CHECK(w1.server_fp_flops == doctest::Approx(50e6));
    CHECK(w1.smashed_bits == doctest::Approx(1000.0));
    CHECK(w1.grad_bits == doctest::Approx(2000.0));

    // cut just before the last layer: no mid-stack server backward work left
    const CutWorkloads w2 = workloads_at_cut(p, 2);
    CHECK(w2.server_bp_flops == doctest::Approx(0.0));
    CHECK(w2.last_layer_bp_flops == doctest::Approx(25e6));

    CHECK_THROWS_AS(workloads_at_cut(p, 3), std::out_of_range);
    CHECK_THROWS_AS(workloads_at_cut(p, 0), std::out_of_range);

    SUBCASE("workload conservation across every cut") {
        for (int j = 1; j <= 2; ++j) {
            const CutWorkloads w = workloads_at_cut(p, j);
            CHECK(w.client_fp_flops + w.server_fp_flops ==
                  doctest::Approx(p.whole_fp_flops()).epsilon(1e-15));
            CHECK(w.client_bp_flops + w.server_bp_flops + w.last_layer_bp_flops ==
                  doctest::Approx(p.whole_bp_flops()).epsilon(1e-15));
        }
    }

    SUBCASE("preset cut 1 uplink size") {
        CHECK(workloads_at_cut(resnet18_preset(), 1).smashed_bits == doctest::Approx(2097152.0));
    }
}

TEST_CASE("profile document parsing") {
    SUBCASE("fields, defaults and comments") {
        const ModelProfile p = load_profile_string(
            "# two-layer toy profile\n"
            "CONV1, 9.8304, , 0.25\n"
            "FC, 10.0, 25.0, 0.001, 0.002, 0.5\n");
        REQUIRE(p.total_layers() == 2);
        CHECK(p.layers[0].fp_cum_flops() == doctest::Approx(9.8304e6));
        CHECK(p.layers[0].bp_cum_flops() == doctest::Approx(2 * 9.8304e6));  // default
        CHECK(p.layers[0].smashed_bits() == doctest::Approx(2097152.0));
        CHECK(p.layers[0].grad_bits() == doctest::Approx(2097152.0));  // default
        CHECK(p.layers[1].bp_cum_flops() == doctest::Approx(25e6));
        CHECK(p.layers[1].grad_bits() == doctest::Approx(mb_to_bits(0.002)));
        CHECK(p.layers[1].param_cum_bits() == doctest::Approx(mb_to_bits(0.5)));
    }

    SUBCASE("three-field rows are name, fp, smashed") {
        const ModelProfile p = load_profile_string("A, 1.0, 0.25\nB, 2.0, 0.125\n");
        CHECK(p.layers[0].smashed_bits() == doctest::Approx(2097152.0));
        CHECK(p.layers[0].bp_cum_flops() == doctest::Approx(2e6));
    }

    SUBCASE("single layer rejected") {
        CHECK_THROWS_AS(load_profile_string("A, 1.0, 0.25\n"), ProfileError);
    }

    SUBCASE("decreasing cumulative workload rejected with the row index") {
        try {
            load_profile_string("A, 2.0, 0.25\nB, 1.0, 0.25\n");
            FAIL("expected ProfileError");
        } catch (const ProfileError& e) {
            CHECK(e.row == 2);
        }
    }

    SUBCASE("non-positive sizes rejected") {
        CHECK_THROWS_AS(load_profile_string("A, 1.0, 0.0\nB, 2.0, 0.1\n"), ProfileError);
        CHECK_THROWS_AS(load_profile_string("A, -1.0, 0.1\nB, 2.0, 0.1\n"), ProfileError);
    }

    SUBCASE("malformed numbers rejected with the row index") {
        try {
            load_profile_string("A, 1.0, 0.25\nB, oops, 0.1\n");
            FAIL("expected ProfileError");
        } catch (const ProfileError& e) {
            CHECK(e.row == 2);
        }
    }
}

TEST_CASE("serialize/load round trip is bit exact") {
    // randomized profiles exercise the full field range
    Rng rng(20240811);
    for (int trial = 0; trial < 25; ++trial) {
        ModelProfile p;
        const int layers = 2 + static_cast<int>(rng.uniform_int(8));
        double fp = 0.0, bp = 0.0, param = 0.0;
        for (int j = 0; j < layers; ++j) {
            fp += rng.uniform(0.1, 20.0);
            bp += rng.uniform(0.1, 40.0);
            param += rng.uniform(0.0, 4.0);
            LayerProfile l;
            l.index = j + 1;
            l.name = "L" + std::to_string(j + 1);
            l.fp_cum_mflop = fp;
            l.bp_cum_mflop = bp;
            l.smashed_mb = rng.uniform(1e-5, 0.4);
            l.grad_mb = rng.uniform(1e-5, 0.4);
            l.param_cum_mb = param;
            p.layers.push_back(l);
        }
        const ModelProfile q = load_profile_string(serialize_profile(p));
        REQUIRE(q.total_layers() == p.total_layers());
        for (int j = 0; j < layers; ++j) {
            CHECK(q.layers[j].name == p.layers[j].name);
            CHECK(q.layers[j].fp_cum_mflop == p.layers[j].fp_cum_mflop);
            CHECK(q.layers[j].bp_cum_mflop == p.layers[j].bp_cum_mflop);
            CHECK(q.layers[j].smashed_mb == p.layers[j].smashed_mb);
            CHECK(q.layers[j].grad_mb == p.layers[j].grad_mb);
            CHECK(q.layers[j].param_cum_mb == p.layers[j].param_cum_mb);
        }
    }
}
