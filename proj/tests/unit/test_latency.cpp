#include <cmath>

#include "doctest.h"
#include "splitsim/latency.hpp"

using namespace splitsim;

namespace {

ModelProfile cut1_is_conv1() { return resnet18_preset(); }

DeviceProfile table_device(double f = 1e9) {
    DeviceProfile d;
    d.id = 0;
    d.compute_cycles_per_s = f;
    d.intensity_cycles_per_flop = 1.0 / 16.0;
    d.distance_m = 100.0;
    d.p_max_w = 1.5;
    d.data_count = 1600;
    return d;
}

Scenario tiny_scenario(int n_devices, int n_subchannels, std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.set("n_devices", std::to_string(n_devices));
    cfg.set("n_subchannels", std::to_string(n_subchannels));
    cfg.set("seed", std::to_string(seed));
    return build_scenario(cfg);
}

}  // namespace

TEST_CASE("client forward latency") {
    const ModelProfile p = cut1_is_conv1();
    const DeviceProfile dev = table_device();
    CHECK(client_fp_latency(dev, p, 1, 64) == doctest::Approx(0.0393216).epsilon(1e-12));
    CHECK_THROWS_AS(client_fp_latency(dev, p, 1, 0), std::invalid_argument);
    // doubling the compute capability halves the time
    DeviceProfile fast = dev;
    fast.compute_cycles_per_s *= 2.0;
    CHECK(client_fp_latency(fast, p, 1, 64) ==
          doctest::Approx(0.5 * client_fp_latency(dev, p, 1, 64)).epsilon(1e-12));
}

TEST_CASE("smashed-data upload latency") {
    const ModelProfile p = cut1_is_conv1();
    CHECK(smashed_tx_latency(1e8, p, 1, 64) == doctest::Approx(1.34217728).epsilon(1e-12));
    CHECK_THROWS_AS(smashed_tx_latency(0.0, p, 1, 64), UnreachableDeviceError);
    // doubling the payload doubles the time (cut 1 vs a synthetic 2x profile)
    CHECK(smashed_tx_latency(1e8, p, 1, 128) ==
          doctest::Approx(2.0 * smashed_tx_latency(1e8, p, 1, 64)).epsilon(1e-12));
}

TEST_CASE("server forward latency") {
    CHECK(server_fp_latency(5, 64, 1.0 / 32.0, 5e9, 1e6) == doctest::Approx(0.002).epsilon(1e-12));
    CHECK(server_fp_latency(0, 64, 1.0 / 32.0, 5e9, 1e6) == 0.0);
    CHECK(server_fp_latency(10, 64, 1.0 / 32.0, 5e9, 1e6) ==
          doctest::Approx(0.004).epsilon(1e-12));  // linear in the client count
}

TEST_CASE("server backward latency and the aggregation coefficient") {
    const double kappa = 1.0 / 32.0, fs = 5e9, wb = 7.0e6, wl = 3.0e5;
    SUBCASE("phi = 0.5, C = 5, b = 64: path coefficient 32 + 5*32 = 192") {
        const double expect = (192.0 * kappa * wb + 5.0 * 64.0 * kappa * wl) / fs;
        CHECK(server_bp_latency(5, 64, Ratio{1, 2}, kappa, fs, wb, wl) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("phi = 0 degenerates to the all-parallel workload") {
        const double expect = (5.0 * 64.0 * kappa * wb + 5.0 * 64.0 * kappa * wl) / fs;
        CHECK(server_bp_latency(5, 64, Ratio{0, 1}, kappa, fs, wb, wl) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("phi = 1 collapses the mid-stack coefficient to b") {
        const double expect = (64.0 * kappa * wb + 5.0 * 64.0 * kappa * wl) / fs;
        CHECK(server_bp_latency(5, 64, Ratio{1, 1}, kappa, fs, wb, wl) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("gradient broadcast latency") {
    CHECK(broadcast_latency(Ratio{1, 1}, 64, 2097152.0, 2e8) ==
          doctest::Approx(0.67108864).epsilon(1e-12));
    CHECK(broadcast_latency(Ratio{0, 1}, 64, 2097152.0, 2e8) == 0.0);
    // ceiling semantics: 3 samples at phi=0.5 broadcast 2 gradients
    CHECK(broadcast_latency(Ratio{1, 2}, 3, 1000.0, 1000.0) == doctest::Approx(2.0));
}

TEST_CASE("unaggregated gradient unicast latency") {
    CHECK(unagg_tx_latency(Ratio{1, 2}, 64, 2097152.0, 4e7) ==
          doctest::Approx(1.6777216).epsilon(1e-12));
    CHECK(unagg_tx_latency(Ratio{1, 1}, 64, 2097152.0, 4e7) == 0.0);
    CHECK(unagg_tx_latency(Ratio{0, 1}, 64, 2097152.0, 4e7) ==
          doctest::Approx(64.0 * 2097152.0 / 4e7).epsilon(1e-12));
    CHECK_THROWS_AS(unagg_tx_latency(Ratio{0, 1}, 64, 2097152.0, 0.0), UnreachableDeviceError);
}

TEST_CASE("client backward latency") {
    const ModelProfile p = cut1_is_conv1();
    const DeviceProfile dev = table_device();
    // backward work defaults to twice forward in the preset
    CHECK(client_bp_latency(dev, p, 1, 64) == doctest::Approx(2.0 * 0.0393216).epsilon(1e-12));
    CHECK_THROWS_AS(client_bp_latency(dev, p, 1, -1), std::invalid_argument);
    DeviceProfile fast = dev;
    fast.compute_cycles_per_s *= 4.0;
    CHECK(client_bp_latency(fast, p, 1, 64) ==
          doctest::Approx(0.25 * client_bp_latency(dev, p, 1, 64)).epsilon(1e-12));
}

TEST_CASE("round latency composes the seven stages") {
    const Scenario scn = tiny_scenario(3, 6, 11);
    const LinkGainTable gains = sample_gains(scn.channel, scn.devices, scn.subchannels);
    Allocation alloc;
    alloc.owner = {0, 0, 1, 1, 2, 2};
    alloc.psd.assign(6, scn.hyper.p_th_w / (6 * 10e6));
    alloc.cut = 2;
    const Ratio phi{1, 2};

    const LatencyBreakdown lb = round_latency(scn, gains, alloc, phi);

    SUBCASE("total recomposes from the stage fields") {
        CHECK(lb.total == lb.recompose());
    }

    SUBCASE("total equals stage functions evaluated independently") {
        const CutWorkloads w = workloads_at_cut(scn.profile, alloc.cut);
        double up_max = 0.0, down_max = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double ru = uplink_rate(scn.subchannels, alloc.owner, alloc.psd, gains, i,
                                          scn.channel.antenna_gain, scn.noise_psd_w_per_hz);
            const double rd = downlink_rate(scn.subchannels, alloc.owner, gains, i,
                                            scn.server.p_dl_w_per_hz, scn.channel.antenna_gain,
                                            scn.noise_psd_w_per_hz);
            up_max = std::max(up_max,
                              client_fp_latency(scn.devices[i], scn.profile, alloc.cut, 64) +
                                  smashed_tx_latency(ru, scn.profile, alloc.cut, 64, i));
            down_max = std::max(down_max,
                                unagg_tx_latency(phi, 64, w.grad_bits, rd, i) +
                                    client_bp_latency(scn.devices[i], scn.profile, alloc.cut, 64));
        }
        const double rb = broadcast_rate(scn.subchannels, gains, scn.server.p_dl_w_per_hz,
                                         scn.channel.antenna_gain, scn.noise_psd_w_per_hz);
        const double total =
            up_max +
            server_fp_latency(3, 64, scn.server.intensity_cycles_per_flop,
                              scn.server.compute_cycles_per_s, w.server_fp_flops) +
            server_bp_latency(3, 64, phi, scn.server.intensity_cycles_per_flop,
                              scn.server.compute_cycles_per_s, w.server_bp_flops,
                              w.last_layer_bp_flops) +
            broadcast_latency(phi, 64, w.grad_bits, rb) + down_max;
        CHECK(lb.total == doctest::Approx(total).epsilon(1e-15));
    }

    SUBCASE("a device with no subchannel is unreachable") {
        Allocation bad = alloc;
        bad.owner = {0, 0, 1, 1, 0, 1};
        CHECK_THROWS_AS(round_latency(scn, gains, bad, phi), UnreachableDeviceError);
    }

    SUBCASE("single device: maxes degenerate to its own sums") {
        const Scenario solo = tiny_scenario(1, 2, 5);
        const LinkGainTable g1 = sample_gains(solo.channel, solo.devices, solo.subchannels);
        Allocation a1;
        a1.owner = {0, 0};
        a1.psd.assign(2, solo.hyper.p_th_w / (2 * 10e6));
        a1.cut = 1;
        const LatencyBreakdown one = round_latency(solo, g1, a1, phi);
        CHECK(one.max_up_stage() == doctest::Approx(one.t_client_fp[0] + one.t_uplink[0]));
        CHECK(one.max_down_stage() == doctest::Approx(one.t_downlink[0] + one.t_client_bp[0]));
    }

    SUBCASE("slower twin determines both max terms") {
        Scenario twin = tiny_scenario(2, 4, 5);
        twin.devices[0].distance_m = twin.devices[1].distance_m = 80.0;
        twin.devices[0].compute_cycles_per_s = 2e9;
        twin.devices[1].compute_cycles_per_s = 1e9;
        LinkGainTable g;
        g.n_devices = 2;
        g.n_subchannels = 4;
        g.gain.assign(8, 1e-10);
        Allocation a;
        a.owner = {0, 0, 1, 1};
        a.psd.assign(4, twin.hyper.p_th_w / (4 * 10e6));
        a.cut = 1;
        const LatencyBreakdown lb2 = round_latency(twin, g, a, phi);
        CHECK(lb2.max_up_stage() == doctest::Approx(lb2.t_client_fp[1] + lb2.t_uplink[1]));
        CHECK(lb2.max_down_stage() == doctest::Approx(lb2.t_downlink[1] + lb2.t_client_bp[1]));
    }
}

TEST_CASE("round latency is monotone in bandwidth, server speed and gains") {
    Scenario scn = tiny_scenario(3, 6, 19);
    LinkGainTable gains = sample_gains(scn.channel, scn.devices, scn.subchannels);
    Allocation alloc;
    alloc.owner = {0, 0, 1, 1, 2, 2};
    alloc.psd.assign(6, scn.hyper.p_th_w / (6 * 10e6));
    alloc.cut = 3;
    const Ratio phi{1, 2};
    const double base = round_latency(scn, gains, alloc, phi).total;

    SUBCASE("wider subchannel") {
        scn.subchannels[2].bandwidth_hz *= 1.5;
        CHECK(round_latency(scn, gains, alloc, phi).total <= base);
    }
    SUBCASE("faster server") {
        scn.server.compute_cycles_per_s *= 2.0;
        CHECK(round_latency(scn, gains, alloc, phi).total < base);
    }
    SUBCASE("better link") {
        for (double& g : gains.gain) g *= 3.0;
        CHECK(round_latency(scn, gains, alloc, phi).total < base);
    }
    SUBCASE("phi moves broadcast up and unicast/server-bp down") {
        const LatencyBreakdown lo = round_latency(scn, gains, alloc, Ratio{1, 4});
        const LatencyBreakdown hi = round_latency(scn, gains, alloc, Ratio{3, 4});
        CHECK(hi.t_broadcast >= lo.t_broadcast);
        CHECK(hi.t_server_bp <= lo.t_server_bp);
        for (int i = 0; i < 3; ++i) CHECK(hi.t_downlink[i] <= lo.t_downlink[i]);
    }
}

TEST_CASE("allocation validator flags the constraint set") {
    const Scenario scn = tiny_scenario(2, 3, 3);
    Allocation good;
    good.owner = {0, 1, 1};
    good.psd.assign(3, 1e-9);  // 0.01 W per channel, well under both caps
    good.cut = 4;
    CHECK(allocation_violations(scn, good).empty());

    SUBCASE("unassigned subchannel") {
        Allocation a = good;
        a.owner[2] = -1;
        CHECK(!allocation_violations(scn, a).empty());
    }
    SUBCASE("negative psd") {
        Allocation a = good;
        a.psd[1] = -1e-9;
        CHECK(!allocation_violations(scn, a).empty());
    }
    SUBCASE("per-device power cap") {
        Allocation a = good;
        a.psd.assign(3, scn.devices[0].p_max_w / 10e6);  // one channel already at the cap
        a.owner = {1, 1, 0};
        CHECK(!allocation_violations(scn, a).empty());
    }
    SUBCASE("cut range") {
        Allocation a = good;
        a.cut = scn.profile.total_layers();
        CHECK(!allocation_violations(scn, a).empty());
    }
}
