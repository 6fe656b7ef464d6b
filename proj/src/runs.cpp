#include "splitsim/runs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "splitsim/csv.hpp"
#include "splitsim/rng.hpp"

namespace splitsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double device_uplink(const Scenario& scn, const LinkGainTable& gains, const Allocation& alloc,
                     int i) {
    return uplink_rate(scn.subchannels, alloc.owner, alloc.psd, gains, i,
                       scn.channel.antenna_gain, scn.noise_psd_w_per_hz);
}

double device_downlink(const Scenario& scn, const LinkGainTable& gains, const Allocation& alloc,
                       int i) {
    return downlink_rate(scn.subchannels, alloc.owner, gains, i, scn.server.p_dl_w_per_hz,
                         scn.channel.antenna_gain, scn.noise_psd_w_per_hz);
}

/// Client-model exchange time of split-federated averaging: every device
/// uploads its client-side model, the averaged model returns on the shared
/// broadcast channel.
double sfl_exchange_latency(const Scenario& scn, const LinkGainTable& gains,
                            const Allocation& alloc) {
    const double bits = workloads_at_cut(scn.profile, alloc.cut).client_model_bits;
    if (bits <= 0.0) return 0.0;
    double up = 0.0;
    for (int i = 0; i < scn.n_devices(); ++i) {
        const double r = device_uplink(scn, gains, alloc, i);
        if (r <= 0.0) throw UnreachableDeviceError(i, "model upload without uplink rate");
        up = std::max(up, bits / r);
    }
    const double rb = broadcast_rate(scn.subchannels, gains, scn.server.p_dl_w_per_hz,
                                     scn.channel.antenna_gain, scn.noise_psd_w_per_hz);
    return up + bits / rb;
}

/// Sequential single-device training: per device one full split round with
/// the server to itself, plus the client-model handoff to the next device.
double vanilla_round_latency(const Scenario& scn, const LinkGainTable& gains,
                             const Allocation& alloc) {
    const CutWorkloads w = workloads_at_cut(scn.profile, alloc.cut);
    const int b = scn.hyper.batch;
    const Ratio zero{0, 1};
    double total = 0.0;
    for (int i = 0; i < scn.n_devices(); ++i) {
        const DeviceProfile& dev = scn.devices[i];
        const double up = device_uplink(scn, gains, alloc, i);
        const double down = device_downlink(scn, gains, alloc, i);
        total += client_fp_latency(dev, scn.profile, alloc.cut, b);
        total += smashed_tx_latency(up, scn.profile, alloc.cut, b, i);
        total += server_fp_latency(1, b, scn.server.intensity_cycles_per_flop,
                                   scn.server.compute_cycles_per_s, w.server_fp_flops);
        total += server_bp_latency(1, b, zero, scn.server.intensity_cycles_per_flop,
                                   scn.server.compute_cycles_per_s, w.server_bp_flops,
                                   w.last_layer_bp_flops);
        total += unagg_tx_latency(zero, b, w.grad_bits, down, i);
        total += client_bp_latency(dev, scn.profile, alloc.cut, b);
    }
    // Handoff of the client-side model between consecutive devices.
    const double bits = w.client_model_bits;
    if (bits > 0.0) {
        for (int i = 0; i + 1 < scn.n_devices(); ++i) {
            const double up = device_uplink(scn, gains, alloc, i);
            const double down = device_downlink(scn, gains, alloc, i + 1);
            if (up <= 0.0) throw UnreachableDeviceError(i, "model handoff without uplink rate");
            if (down <= 0.0)
                throw UnreachableDeviceError(i + 1, "model handoff without downlink rate");
            total += bits / up + bits / down;
        }
    }
    return total;
}

}  // namespace

double framework_round_latency(const Scenario& scn, const LinkGainTable& gains,
                               const Allocation& alloc, Framework fw, const Ratio& phi) {
    switch (fw) {
        case Framework::epsl:
        case Framework::epsl_pt:
            return round_latency(scn, gains, alloc, phi).total;
        case Framework::psl:
            return round_latency(scn, gains, alloc, Ratio{0, 1}).total;
        case Framework::sfl:
            return round_latency(scn, gains, alloc, Ratio{0, 1}).total +
                   sfl_exchange_latency(scn, gains, alloc);
        case Framework::vanilla_sl:
            return vanilla_round_latency(scn, gains, alloc);
    }
    return 0.0;
}

double latency_to_target(const Scenario& scn, const LinkGainTable& gains, const Allocation& alloc,
                         Framework fw, const Ratio& phi) {
    long long total_samples = 0;
    for (const DeviceProfile& d : scn.devices) total_samples += d.data_count;
    // Rounds are a rate here, not a schedule: target_epochs passes over the
    // pooled data at C*b samples per round (fractional rounds keep the trend
    // free of per-epoch bucketing artifacts).
    const double rounds_per_epoch =
        static_cast<double>(total_samples) /
        (static_cast<double>(scn.n_devices()) * scn.hyper.batch);
    return scn.hyper.target_epochs * rounds_per_epoch *
           framework_round_latency(scn, gains, alloc, fw, phi);
}

OptimizeRecord run_optimize(const Scenario& scn) {
    OptimizeRecord rec;
    rec.seed = scn.hyper.seed;
    const LinkGainTable gains = sample_gains(scn.channel, scn.devices, scn.subchannels);
    rec.bcd = bcd_optimize(scn, gains, scn.hyper.phi, scn.hyper.epsilon_s, scn.hyper.max_iters);
    for (BaselineKind k : {BaselineKind::a, BaselineKind::b, BaselineKind::c, BaselineKind::d})
        rec.baselines.push_back(baseline_alloc(k, scn, gains, scn.hyper.phi));
    return rec;
}

std::string optimize_csv(const OptimizeRecord& rec) {
    std::string out = csv_row({"schema", "seed", "method", "objective_s", "cut", "iterations",
                               "feasible", "t_up_stage_max_s", "t_server_fp_s", "t_server_bp_s",
                               "t_broadcast_s", "t_down_stage_max_s", "trace"});
    auto emit = [&](const std::string& method, const Allocation& alloc,
                    const LatencyBreakdown& lat, bool feasible, int iters,
                    const std::vector<double>& trace) {
        std::string trace_s;
        for (std::size_t i = 0; i < trace.size(); ++i) {
            if (i) trace_s += ";";
            trace_s += csv_num(trace[i]);
        }
        out += csv_row({"opt.v1", std::to_string(rec.seed), method, csv_num(lat.total),
                        std::to_string(alloc.cut), std::to_string(iters), feasible ? "1" : "0",
                        csv_num(lat.max_up_stage()), csv_num(lat.t_server_fp),
                        csv_num(lat.t_server_bp), csv_num(lat.t_broadcast),
                        csv_num(lat.max_down_stage()), trace_s});
    };
    emit("bcd", rec.bcd.alloc, rec.bcd.latency, rec.bcd.feasible, rec.bcd.iterations,
         rec.bcd.trace);
    for (std::size_t i = 0; i < rec.baselines.size(); ++i)
        emit(baseline_name(static_cast<BaselineKind>(i)), rec.baselines[i].alloc,
             rec.baselines[i].latency, rec.baselines[i].feasible, 0, {});
    return out;
}

std::vector<TrainRow> run_training(const Scenario& scn, const std::vector<Framework>& frameworks) {
    // every emitted row carries scn.hyper.seed via training_csv
    const LinkGainTable gains = sample_gains(scn.channel, scn.devices, scn.subchannels);
    const BcdResult opt =
        bcd_optimize(scn, gains, scn.hyper.phi, scn.hyper.epsilon_s, scn.hyper.max_iters);

    const Dataset train =
        make_mixture_dataset(scn.train.train_size, scn.train.input_dim, scn.train.classes,
                             derive_seed(scn.hyper.seed, 0x7E57));
    const Dataset test =
        make_mixture_dataset(scn.train.test_size, scn.train.input_dim, scn.train.classes,
                             derive_seed(scn.hyper.seed, 0x7E58));
    const std::vector<Dataset> shards = split_dataset(train, scn.n_devices());

    int max_shard = 0;
    for (const Dataset& s : shards) max_shard = std::max(max_shard, s.size());
    const int rounds_per_epoch = (max_shard + scn.hyper.batch - 1) / scn.hyper.batch;
    const int switch_epoch =
        scn.train.switch_epoch > 0 ? scn.train.switch_epoch : scn.train.epochs / 2;

    std::vector<TrainRow> rows;
    for (Framework fw : frameworks) {
        TrainState st = make_train_state(scn, fw);
        double cum_latency = 0.0;
        int round_index = 0;
        for (int epoch = 1; epoch <= scn.train.epochs; ++epoch) {
            const Ratio phase_phi = fw == Framework::epsl_pt
                                        ? (epoch <= switch_epoch ? Ratio{1, 1} : Ratio{0, 1})
                                        : st.agg.phi;
            const double round_lat =
                framework_round_latency(scn, gains, opt.alloc, fw, phase_phi);
            double loss_sum = 0.0;
            for (int r = 0; r < rounds_per_epoch; ++r) {
                const auto batches =
                    draw_round_batches(shards, scn.hyper.batch, scn.hyper.seed, round_index++);
                const Ratio* override_phi = fw == Framework::epsl_pt ? &phase_phi : nullptr;
                loss_sum += train_round(fw, st, shards, batches, override_phi).mean_loss;
            }
            cum_latency += round_lat * rounds_per_epoch;
            const EvalResult ev = evaluate(st.model, 0, test, st.loss);
            TrainRow row;
            row.seed = scn.hyper.seed;
            row.fw = fw;
            row.epoch = epoch;
            row.rounds = rounds_per_epoch;
            row.train_loss = loss_sum / rounds_per_epoch;
            row.test_accuracy = ev.accuracy;
            row.test_loss = ev.mean_loss;
            row.epoch_latency_s = round_lat * rounds_per_epoch;
            row.cum_latency_s = cum_latency;
            rows.push_back(row);
        }
    }
    return rows;
}

std::string training_csv(const std::vector<TrainRow>& rows) {
    std::string out = csv_row({"schema", "seed", "framework", "epoch", "rounds", "train_loss",
                               "test_accuracy", "test_loss", "epoch_latency_s", "cum_latency_s"});
    for (const TrainRow& r : rows)
        out += csv_row({"train.v1", std::to_string(r.seed), framework_name(r.fw),
                        std::to_string(r.epoch), std::to_string(r.rounds), csv_num(r.train_loss),
                        csv_num(r.test_accuracy), csv_num(r.test_loss),
                        csv_num(r.epoch_latency_s), csv_num(r.cum_latency_s)});
    return out;
}

SweepAxis parse_axis(const std::string& name) {
    if (name == "n_devices") return SweepAxis::n_devices;
    if (name == "bandwidth_total") return SweepAxis::bandwidth_total;
    if (name == "f_s") return SweepAxis::f_s;
    if (name == "dataset_size") return SweepAxis::dataset_size;
    if (name == "phi") return SweepAxis::phi;
    throw std::invalid_argument("unknown sweep axis: " + name);
}

namespace {

const char* axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::n_devices: return "n_devices";
        case SweepAxis::bandwidth_total: return "bandwidth_total";
        case SweepAxis::f_s: return "f_s";
        case SweepAxis::dataset_size: return "dataset_size";
        case SweepAxis::phi: return "phi";
    }
    return "?";
}

ScenarioConfig apply_axis(const ScenarioConfig& base, SweepAxis axis, const std::string& value) {
    ScenarioConfig cfg = base;
    switch (axis) {
        case SweepAxis::n_devices:
            cfg.set("n_devices", value);
            break;
        case SweepAxis::bandwidth_total: {
            // Total MHz at fixed per-subchannel width -> subchannel count.
            const double total = std::stod(value);
            double width = 10.0;
            if (const std::string* w = base.find("subchannel_bandwidth_mhz"))
                width = std::stod(*w);
            const int m = static_cast<int>(std::llround(total / width));
            cfg.set("n_subchannels", std::to_string(m));
            break;
        }
        case SweepAxis::f_s:
            cfg.set("f_server_cycles_per_s", value);
            break;
        case SweepAxis::dataset_size:
            cfg.set("dataset_size", value);
            break;
        case SweepAxis::phi:
            cfg.set("phi", value);
            break;
    }
    return cfg;
}

struct Stats {
    double sum = 0.0, mn = kInf, mx = -kInf;
    int n = 0;
    void add(double v) {
        sum += v;
        mn = std::min(mn, v);
        mx = std::max(mx, v);
        ++n;
    }
    double mean() const { return n ? sum / n : 0.0; }
};

}  // namespace

std::string run_sweep(const ScenarioConfig& base, SweepAxis axis,
                      const std::vector<std::string>& values, int repetitions) {
    if (values.empty()) throw std::invalid_argument("run_sweep: no axis values");
    if (repetitions < 1) throw std::invalid_argument("run_sweep: repetitions must be >= 1");

    std::uint64_t base_seed = 1;
    if (const std::string* s = base.find("seed")) base_seed = std::stoull(*s);

    // Ascending axis order; ties keep the given order.
    std::vector<std::string> ordered = values;
    std::stable_sort(ordered.begin(), ordered.end(), [](const std::string& a, const std::string& b) {
        return std::stod(a) < std::stod(b);
    });

    std::string out = csv_row(
        {"schema", "seed", "axis", "value", "reps",
         "opt_mean_s", "opt_min_s", "opt_max_s",
         "base_a_mean_s", "base_a_min_s", "base_a_max_s",
         "base_b_mean_s", "base_b_min_s", "base_b_max_s",
         "base_c_mean_s", "base_c_min_s", "base_c_max_s",
         "base_d_mean_s", "base_d_min_s", "base_d_max_s",
         "fw_epsl_phi1_round_s", "fw_epsl_round_s", "fw_psl_round_s", "fw_sfl_round_s",
         "fw_vanilla_round_s",
         "fw_epsl_phi1_target_s", "fw_epsl_target_s", "fw_psl_target_s", "fw_sfl_target_s",
         "fw_vanilla_target_s"});

    for (const std::string& value : ordered) {
        Stats opt, ba, bb, bc, bd;
        Stats r_phi1, r_epsl, r_psl, r_sfl, r_van;
        Stats t_phi1, t_epsl, t_psl, t_sfl, t_van;
        for (int rep = 0; rep < repetitions; ++rep) {
            ScenarioConfig cfg = apply_axis(base, axis, value);
            cfg.set("seed", std::to_string(base_seed + static_cast<std::uint64_t>(rep)));
            const Scenario scn = build_scenario(cfg);
            const LinkGainTable gains = sample_gains(scn.channel, scn.devices, scn.subchannels);

            const BcdResult bcd =
                bcd_optimize(scn, gains, scn.hyper.phi, scn.hyper.epsilon_s, scn.hyper.max_iters);
            opt.add(bcd.latency.total);
            ba.add(baseline_alloc(BaselineKind::a, scn, gains, scn.hyper.phi).latency.total);
            bb.add(baseline_alloc(BaselineKind::b, scn, gains, scn.hyper.phi).latency.total);
            bc.add(baseline_alloc(BaselineKind::c, scn, gains, scn.hyper.phi).latency.total);
            bd.add(baseline_alloc(BaselineKind::d, scn, gains, scn.hyper.phi).latency.total);

            const Ratio one{1, 1};
            r_phi1.add(framework_round_latency(scn, gains, bcd.alloc, Framework::epsl, one));
            r_epsl.add(
                framework_round_latency(scn, gains, bcd.alloc, Framework::epsl, scn.hyper.phi));
            r_psl.add(framework_round_latency(scn, gains, bcd.alloc, Framework::psl, scn.hyper.phi));
            r_sfl.add(framework_round_latency(scn, gains, bcd.alloc, Framework::sfl, scn.hyper.phi));
            r_van.add(
                framework_round_latency(scn, gains, bcd.alloc, Framework::vanilla_sl, scn.hyper.phi));

            t_phi1.add(latency_to_target(scn, gains, bcd.alloc, Framework::epsl, one));
            t_epsl.add(latency_to_target(scn, gains, bcd.alloc, Framework::epsl, scn.hyper.phi));
            t_psl.add(latency_to_target(scn, gains, bcd.alloc, Framework::psl, scn.hyper.phi));
            t_sfl.add(latency_to_target(scn, gains, bcd.alloc, Framework::sfl, scn.hyper.phi));
            t_van.add(
                latency_to_target(scn, gains, bcd.alloc, Framework::vanilla_sl, scn.hyper.phi));
        }
        out += csv_row({"sweep.v1", std::to_string(base_seed), axis_name(axis), value,
                        std::to_string(repetitions),
                        csv_num(opt.mean()), csv_num(opt.mn), csv_num(opt.mx),
                        csv_num(ba.mean()), csv_num(ba.mn), csv_num(ba.mx),
                        csv_num(bb.mean()), csv_num(bb.mn), csv_num(bb.mx),
                        csv_num(bc.mean()), csv_num(bc.mn), csv_num(bc.mx),
                        csv_num(bd.mean()), csv_num(bd.mn), csv_num(bd.mx),
                        csv_num(r_phi1.mean()), csv_num(r_epsl.mean()), csv_num(r_psl.mean()),
                        csv_num(r_sfl.mean()), csv_num(r_van.mean()),
                        csv_num(t_phi1.mean()), csv_num(t_epsl.mean()), csv_num(t_psl.mean()),
                        csv_num(t_sfl.mean()), csv_num(t_van.mean())});
    }
    return out;
}

}  // namespace splitsim
