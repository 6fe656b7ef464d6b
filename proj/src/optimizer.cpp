#include "splitsim/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "splitsim/rng.hpp"

namespace splitsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double total_bandwidth(const Scenario& scn) {
    double b = 0.0;
    for (const SubchannelSpec& s : scn.subchannels) b += s.bandwidth_hz;
    return b;
}

/// Round latency as the descent objective; infeasible states map to +inf.
double eval_objective(const Scenario& scn, const LinkGainTable& gains,
                      const std::vector<int>& owner, const std::vector<double>& psd, int cut,
                      const Ratio& phi) {
    Allocation a{owner, psd, cut};
    try {
        return round_latency(scn, gains, a, phi).total;
    } catch (const UnreachableDeviceError&) {
        return kInf;
    }
}

double device_power(const Scenario& scn, const std::vector<int>& owner,
                    const std::vector<double>& psd, int device) {
    double p = 0.0;
    for (int k = 0; k < scn.n_subchannels(); ++k)
        if (owner[k] == device) p += psd[k] * scn.subchannels[k].bandwidth_hz;
    return p;
}

std::vector<int> rss_alloc(const Scenario& scn, const LinkGainTable& gains) {
    // Strongest received signal wins each subchannel; equal-PSD probing makes
    // that the largest link gain. Ties go to the lowest device id.
    std::vector<int> owner(scn.n_subchannels(), -1);
    for (int k = 0; k < scn.n_subchannels(); ++k) {
        int best = 0;
        for (int i = 1; i < scn.n_devices(); ++i)
            if (gains.at(i, k) > gains.at(best, k)) best = i;
        owner[k] = best;
    }
    return owner;
}

std::vector<double> uniform_psd_clipped(const Scenario& scn, const std::vector<int>& owner) {
    // Total cap spread over the whole band; devices whose per-device cap binds
    // get their subchannels scaled down proportionally.
    std::vector<double> psd(scn.n_subchannels(), scn.hyper.p_th_w / total_bandwidth(scn));
    for (int i = 0; i < scn.n_devices(); ++i) {
        const double p = device_power(scn, owner, psd, i);
        if (p > scn.devices[i].p_max_w) {
            const double scale = scn.devices[i].p_max_w / p;
            for (int k = 0; k < scn.n_subchannels(); ++k)
                if (owner[k] == i) psd[k] *= scale;
        }
    }
    return psd;
}

}  // namespace

std::vector<std::vector<int>> owned_subchannels(const std::vector<int>& owner, int n_devices) {
    std::vector<std::vector<int>> owned(n_devices);
    for (int k = 0; k < static_cast<int>(owner.size()); ++k)
        if (owner[k] >= 0 && owner[k] < n_devices) owned[owner[k]].push_back(k);
    return owned;
}

RateVars psd_to_theta(const Scenario& scn, const LinkGainTable& gains,
                      const std::vector<int>& owner, const std::vector<double>& psd) {
    RateVars rv;
    rv.theta.resize(scn.n_devices());
    const auto owned = owned_subchannels(owner, scn.n_devices());
    for (int i = 0; i < scn.n_devices(); ++i)
        for (int k : owned[i])
            rv.theta[i].push_back(link_rate(scn.subchannels[k].bandwidth_hz, psd[k], gains.at(i, k),
                                            scn.channel.antenna_gain, scn.noise_psd_w_per_hz));
    return rv;
}

std::vector<double> theta_to_psd(const Scenario& scn, const LinkGainTable& gains,
                                 const std::vector<int>& owner, const RateVars& theta) {
    std::vector<double> psd(scn.n_subchannels(), 0.0);
    const auto owned = owned_subchannels(owner, scn.n_devices());
    for (int i = 0; i < scn.n_devices(); ++i) {
        for (std::size_t x = 0; x < owned[i].size(); ++x) {
            const int k = owned[i][x];
            const double b = scn.subchannels[k].bandwidth_hz;
            psd[k] = scn.noise_psd_w_per_hz * (std::exp2(theta.theta[i][x] / b) - 1.0) /
                     (scn.channel.antenna_gain * gains.at(i, k));
        }
    }
    return psd;
}

std::vector<int> greedy_subchannel_alloc(const Scenario& scn, const LinkGainTable& gains,
                                         const std::vector<double>& psd, int cut,
                                         const Ratio& phi) {
    const int n = scn.n_devices();
    const int m = scn.n_subchannels();
    if (m < n)
        throw InfeasibleError("greedy allocation: fewer subchannels (" + std::to_string(m) +
                              ") than devices (" + std::to_string(n) + ")");

    const CutWorkloads w = workloads_at_cut(scn.profile, cut);
    const int b = scn.hyper.batch;

    std::vector<int> owner(m, -1);
    std::vector<bool> channel_free(m, true);

    // Best remaining subchannel: lowest center frequency per unit bandwidth.
    auto best_channel = [&]() {
        int best = -1;
        for (int k = 0; k < m; ++k) {
            if (!channel_free[k]) continue;
            if (best < 0 || scn.subchannels[k].center_freq_hz / scn.subchannels[k].bandwidth_hz <
                                scn.subchannels[best].center_freq_hz /
                                    scn.subchannels[best].bandwidth_hz)
                best = k;
        }
        return best;
    };

    // Phase 1: slowest device first, one subchannel each.
    std::vector<bool> unassigned(n, true);
    for (int round = 0; round < n; ++round) {
        int dev = -1;
        for (int i = 0; i < n; ++i)
            if (unassigned[i] &&
                (dev < 0 || scn.devices[i].compute_cycles_per_s <
                                scn.devices[dev].compute_cycles_per_s))
                dev = i;
        const int k = best_channel();
        owner[k] = dev;
        channel_free[k] = false;
        unassigned[dev] = false;
    }

    // Stage latencies of a device under the current assignment.
    auto up_stage = [&](int i) {
        const double rate = uplink_rate(scn.subchannels, owner, psd, gains, i,
                                        scn.channel.antenna_gain, scn.noise_psd_w_per_hz);
        const double t_fp = b * scn.devices[i].intensity_cycles_per_flop * w.client_fp_flops /
                            scn.devices[i].compute_cycles_per_s;
        return rate > 0.0 ? t_fp + b * w.smashed_bits / rate : kInf;
    };
    auto down_stage = [&](int i) {
        const double rest = static_cast<double>(b - phi.ceil_mul(b));
        const double t_bp = b * scn.devices[i].intensity_cycles_per_flop * w.client_bp_flops /
                            scn.devices[i].compute_cycles_per_s;
        if (rest == 0.0) return t_bp;
        const double rate = downlink_rate(scn.subchannels, owner, gains, i,
                                          scn.server.p_dl_w_per_hz, scn.channel.antenna_gain,
                                          scn.noise_psd_w_per_hz);
        return rate > 0.0 ? t_bp + rest * w.grad_bits / rate : kInf;
    };

    // Phase 2: feed the straggler until the band is exhausted or nobody can
    // take more power.
    std::vector<bool> candidate(n, true);
    int channels_left = m - n;
    while (channels_left > 0) {
        int n1 = -1, n2 = -1;
        double best1 = -kInf, best2 = -kInf;
        for (int i = 0; i < n; ++i) {
            if (!candidate[i]) continue;
            const double u = up_stage(i);
            const double d = down_stage(i);
            if (u > best1) best1 = u, n1 = i;
            if (d > best2) best2 = d, n2 = i;
        }
        if (n1 < 0) break;  // every device frozen out by its power cap

        // of the two stage stragglers, take the one with the larger four-term
        // sum; ties go to the lower device id
        int pick = std::min(n1, n2);
        const int other = std::max(n1, n2);
        if (other != pick &&
            up_stage(other) + down_stage(other) > up_stage(pick) + down_stage(pick))
            pick = other;

        const int k = best_channel();
        owner[k] = pick;
        if (device_power(scn, owner, psd, pick) >
            scn.devices[pick].p_max_w * (1.0 + 1e-12)) {
            owner[k] = -1;  // roll back, freeze this device out
            candidate[pick] = false;
        } else {
            channel_free[k] = false;
            --channels_left;
        }
    }
    return owner;
}

PowerSplit min_power_for_rate(double target_rate_bps, const std::vector<double>& bandwidth_hz,
                              const std::vector<double>& gain, double antenna_gain,
                              double noise_psd_w_per_hz) {
    if (target_rate_bps < 0.0) throw std::invalid_argument("min_power_for_rate: negative rate");
    if (bandwidth_hz.empty())
        throw std::invalid_argument("min_power_for_rate: device owns no subchannel");
    const std::size_t n = bandwidth_hz.size();

    PowerSplit out;
    out.theta.assign(n, 0.0);
    if (target_rate_bps == 0.0) return out;

    // theta_x(t) = B_x * max(0, t + log2(gain_x)) with t = log2(water level);
    // the total rate is piecewise linear and increasing in t.
    auto rate_at = [&](double t) {
        double s = 0.0;
        for (std::size_t x = 0; x < n; ++x)
            s += bandwidth_hz[x] * std::max(0.0, t + std::log2(gain[x]));
        return s;
    };

    double lo = -std::log2(*std::max_element(gain.begin(), gain.end()));
    double total_b = 0.0;
    for (double b : bandwidth_hz) total_b += b;
    double hi = lo + target_rate_bps / total_b + 1.0;
    while (rate_at(hi) < target_rate_bps) hi = lo + (hi - lo) * 2.0;

    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (rate_at(mid) < target_rate_bps ? lo : hi) = mid;
    }

    double sum = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        out.theta[x] = bandwidth_hz[x] * std::max(0.0, hi + std::log2(gain[x]));
        sum += out.theta[x];
    }
    // Scale out the last bisection residue so the rates add up exactly.
    if (sum > 0.0)
        for (double& t : out.theta) t *= target_rate_bps / sum;

    for (std::size_t x = 0; x < n; ++x)
        out.power_w += noise_psd_w_per_hz * bandwidth_hz[x] *
                       (std::exp2(out.theta[x] / bandwidth_hz[x]) - 1.0) / (antenna_gain * gain[x]);
    return out;
}

PowerControlResult solve_power_control(const Scenario& scn, const LinkGainTable& gains,
                                       const std::vector<int>& owner, int cut) {
    const int n = scn.n_devices();
    const int b = scn.hyper.batch;
    const CutWorkloads w = workloads_at_cut(scn.profile, cut);
    const auto owned = owned_subchannels(owner, n);

    for (int i = 0; i < n; ++i)
        if (owned[i].empty())
            throw InfeasiblePowerError("power control: device " + std::to_string(i) +
                                       " owns no subchannel");

    std::vector<std::vector<double>> bw(n), g(n);
    std::vector<double> t_fp(n);
    double t_floor = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k : owned[i]) {
            bw[i].push_back(scn.subchannels[k].bandwidth_hz);
            g[i].push_back(gains.at(i, k));
        }
        t_fp[i] = b * scn.devices[i].intensity_cycles_per_flop * w.client_fp_flops /
                  scn.devices[i].compute_cycles_per_s;
        t_floor = std::max(t_floor, t_fp[i]);
    }

    // Feasibility of a candidate stage bound t: every device needs rate
    // b*smashed/(t - t_fp); water-fill it and check both power caps.
    auto attempt = [&](double t, RateVars* rv_out) {
        double total_power = 0.0;
        RateVars rv;
        rv.theta.resize(n);
        for (int i = 0; i < n; ++i) {
            if (t <= t_fp[i]) return false;
            const double need = b * w.smashed_bits / (t - t_fp[i]);
            PowerSplit split = min_power_for_rate(need, bw[i], g[i], scn.channel.antenna_gain,
                                                  scn.noise_psd_w_per_hz);
            if (split.power_w > scn.devices[i].p_max_w * (1.0 + 1e-12)) return false;
            total_power += split.power_w;
            rv.theta[i] = std::move(split.theta);
        }
        if (total_power > scn.hyper.p_th_w * (1.0 + 1e-12)) return false;
        if (rv_out) *rv_out = std::move(rv);
        return true;
    };

    double lo = t_floor;
    double hi = t_floor + 1e-3;
    int expansions = 0;
    while (!attempt(hi, nullptr)) {
        hi = t_floor + (hi - t_floor) * 4.0;
        if (++expansions > 60)
            throw InfeasiblePowerError("power control: no stage bound satisfies the power caps");
    }
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (attempt(mid, nullptr) ? hi : lo) = mid;
    }

    PowerControlResult res;
    if (!attempt(hi, &res.theta))
        throw InfeasiblePowerError("power control: bisection endpoint infeasible");
    res.t1 = hi;
    return res;
}

CutChoice solve_cut_layer(const Scenario& scn, const LinkGainTable& gains,
                          const std::vector<int>& owner, const RateVars& theta, double t1,
                          double t2, const Ratio& phi) {
    const int n = scn.n_devices();
    const int b = scn.hyper.batch;
    const int L = scn.profile.total_layers();
    const double agg = static_cast<double>(phi.ceil_mul(b));
    const double rest = b - agg;

    std::vector<double> sum_theta(n, 0.0), r_down(n, 0.0);
    for (int i = 0; i < n; ++i) {
        sum_theta[i] = theta.device_total(i);
        r_down[i] = downlink_rate(scn.subchannels, owner, gains, i, scn.server.p_dl_w_per_hz,
                                  scn.channel.antenna_gain, scn.noise_psd_w_per_hz);
    }
    const double r_bcast = broadcast_rate(scn.subchannels, gains, scn.server.p_dl_w_per_hz,
                                          scn.channel.antenna_gain, scn.noise_psd_w_per_hz);

    CutChoice best;
    double best_obj = kInf;
    int best_viol_cut = 1;
    double best_viol = kInf;
    const double tol = 1e-12;

    for (int j = 1; j <= L - 1; ++j) {
        const CutWorkloads w = workloads_at_cut(scn.profile, j);
        double viol = 0.0;
        for (int i = 0; i < n; ++i) {
            const double kappa = scn.devices[i].intensity_cycles_per_flop;
            const double f = scn.devices[i].compute_cycles_per_s;
            const double c8 = b * kappa * w.client_fp_flops / f +
                              (sum_theta[i] > 0.0 ? b * w.smashed_bits / sum_theta[i] : kInf);
            const double c9 =
                (rest > 0.0 ? (r_down[i] > 0.0 ? rest * w.grad_bits / r_down[i] : kInf) : 0.0) +
                b * kappa * w.client_bp_flops / f;
            viol = std::max({viol, c8 - t1, c9 - t2});
        }
        const double surrogate =
            t1 +
            server_fp_latency(n, b, scn.server.intensity_cycles_per_flop,
                              scn.server.compute_cycles_per_s, w.server_fp_flops) +
            server_bp_latency(n, b, phi, scn.server.intensity_cycles_per_flop,
                              scn.server.compute_cycles_per_s, w.server_bp_flops,
                              w.last_layer_bp_flops) +
            broadcast_latency(phi, b, w.grad_bits, r_bcast) + t2;

        if (viol <= tol * std::max(1.0, t1 + t2)) {
            if (surrogate < best_obj) {  // strict: ties go to the smaller index
                best_obj = surrogate;
                best.cut = j;
                best.feasible = true;
                best.surrogate = surrogate;
            }
        } else if (viol < best_viol) {
            best_viol = viol;
            best_viol_cut = j;
        }
    }

    if (!best.feasible) {
        best.cut = best_viol_cut;
        best.surrogate = best_viol;
    }
    return best;
}

AuxBounds update_aux(const Scenario& scn, const LinkGainTable& gains,
                     const std::vector<int>& owner, const RateVars& theta, int cut,
                     const Ratio& phi) {
    const int n = scn.n_devices();
    const int b = scn.hyper.batch;
    const CutWorkloads w = workloads_at_cut(scn.profile, cut);
    const double rest = static_cast<double>(b - phi.ceil_mul(b));

    AuxBounds out;
    for (int i = 0; i < n; ++i) {
        const double kappa = scn.devices[i].intensity_cycles_per_flop;
        const double f = scn.devices[i].compute_cycles_per_s;
        const double sum_theta = theta.device_total(i);
        const double up = b * kappa * w.client_fp_flops / f +
                          (sum_theta > 0.0 ? b * w.smashed_bits / sum_theta : kInf);
        double down = b * kappa * w.client_bp_flops / f;
        if (rest > 0.0) {
            const double r = downlink_rate(scn.subchannels, owner, gains, i,
                                           scn.server.p_dl_w_per_hz, scn.channel.antenna_gain,
                                           scn.noise_psd_w_per_hz);
            down += r > 0.0 ? rest * w.grad_bits / r : kInf;
        }
        out.t1 = std::max(out.t1, up);
        out.t2 = std::max(out.t2, down);
    }
    return out;
}

BcdResult bcd_optimize(const Scenario& scn, const LinkGainTable& gains, const Ratio& phi,
                       double epsilon_s, int max_iters) {
    if (epsilon_s <= 0.0) throw std::invalid_argument("bcd_optimize: epsilon must be positive");
    const int m = scn.n_subchannels();
    const int L = scn.profile.total_layers();

    BcdResult res;

    // Multi-start initialization: sweep every cut with both assignment rules
    // (greedy under a uniform probe PSD, strongest link) and power-control
    // each candidate. Each reference strategy is a subset of this candidate
    // set, so the gated descent that follows can never end up above one.
    const std::vector<double> uniform(m, scn.hyper.p_th_w / total_bandwidth(scn));
    std::vector<int> owner;
    std::vector<double> psd;
    int cut = 1;
    double obj = kInf;

    const std::vector<int> rss_owner = rss_alloc(scn, gains);

    for (int j = 1; j <= L - 1; ++j) {
        std::vector<std::vector<int>> candidates;
        candidates.push_back(greedy_subchannel_alloc(scn, gains, uniform, j, phi));
        candidates.push_back(rss_owner);
        for (std::vector<int>& cand : candidates) {
            std::vector<std::vector<double>> psd_variants;
            psd_variants.push_back(uniform_psd_clipped(scn, cand));
            try {
                const PowerControlResult pc = solve_power_control(scn, gains, cand, j);
                psd_variants.push_back(theta_to_psd(scn, gains, cand, pc.theta));
            } catch (const InfeasiblePowerError&) {
            }
            for (std::vector<double>& cand_psd : psd_variants) {
                const double val = eval_objective(scn, gains, cand, cand_psd, j, phi);
                if (val < obj) {
                    obj = val;
                    owner = cand;
                    psd = std::move(cand_psd);
                    cut = j;
                }
            }
        }
    }
    if (owner.empty()) {
        owner.assign(m, -1);
        psd = uniform;
    }

    AuxBounds aux = update_aux(scn, gains, owner, psd_to_theta(scn, gains, owner, psd), cut, phi);
    double prev = obj;  // starting-point objective for the stopping rule

    // Every accepted iterate must stay inside the constraint set; a violation
    // here is a solver bug, not an input problem.
    auto check_accepted = [&](const char* block) {
        const auto v = allocation_violations(scn, Allocation{owner, psd, cut},
                                             /*allow_unassigned=*/true);
        if (!v.empty())
            throw std::logic_error(std::string("bcd_optimize: infeasible iterate after the ") +
                                   block + " block: " + v.front());
    };

    for (int iter = 1; iter <= max_iters; ++iter) {
        // Subchannel block (greedy at current PSD and cut).
        {
            std::vector<int> cand = greedy_subchannel_alloc(scn, gains, psd, cut, phi);
            const double j = eval_objective(scn, gains, cand, psd, cut, phi);
            if (j <= obj) {
                owner = std::move(cand);
                obj = j;
            }
            check_accepted("subchannel");
        }

        // Rate block (convex power control at fixed assignment and cut).
        try {
            PowerControlResult pc = solve_power_control(scn, gains, owner, cut);
            std::vector<double> cand_psd = theta_to_psd(scn, gains, owner, pc.theta);
            const double j = eval_objective(scn, gains, owner, cand_psd, cut, phi);
            if (j <= obj) {
                psd = std::move(cand_psd);
                obj = j;
            }
        } catch (const InfeasiblePowerError& e) {
            res.notes.push_back(std::string("iteration ") + std::to_string(iter) +
                                ": power block skipped: " + e.what());
        }
        check_accepted("rate");

        RateVars theta = psd_to_theta(scn, gains, owner, psd);

        // Cut block (exhaustive selection under the stored stage bounds).
        {
            const CutChoice choice = solve_cut_layer(scn, gains, owner, theta, aux.t1, aux.t2, phi);
            const double j = eval_objective(scn, gains, owner, psd, choice.cut, phi);
            if (j <= obj) {
                cut = choice.cut;
                obj = j;
            }
            check_accepted("cut");
        }

        // Stage-bound block: tighten to equalities.
        aux = update_aux(scn, gains, owner, theta, cut, phi);

        res.trace.push_back(obj);
        res.iterations = iter;
        if (obj > prev + 1e-12 * std::max(1.0, prev))
            throw std::logic_error("bcd_optimize: objective increased");
        const bool converged = std::isfinite(prev) && std::isfinite(obj) && prev - obj <= epsilon_s;
        prev = obj;
        if (converged) break;
    }

    res.alloc = Allocation{owner, psd, cut};
    res.theta = psd_to_theta(scn, gains, owner, psd);
    int unassigned = 0;
    for (int o : owner) unassigned += o < 0;
    if (unassigned > 0)
        res.notes.push_back(std::to_string(unassigned) +
                            " subchannel(s) left idle: every candidate device is at its power cap");
    res.feasible =
        allocation_violations(scn, res.alloc, /*allow_unassigned=*/true).empty() &&
        std::isfinite(obj);
    if (!std::isfinite(obj))
        throw InfeasibleError("bcd_optimize: no feasible allocation found");
    res.latency = round_latency(scn, gains, res.alloc, phi);
    return res;
}

const char* baseline_name(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::a: return "baseline_a";
        case BaselineKind::b: return "baseline_b";
        case BaselineKind::c: return "baseline_c";
        case BaselineKind::d: return "baseline_d";
    }
    return "?";
}

BaselineResult baseline_alloc(BaselineKind kind, const Scenario& scn, const LinkGainTable& gains,
                              const Ratio& phi) {
    const int L = scn.profile.total_layers();
    Rng rng(derive_seed(scn.hyper.seed, 0xBA5E0 + static_cast<std::uint64_t>(kind)));
    const int random_cut = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(L - 1)));

    Allocation alloc;
    alloc.cut = random_cut;

    switch (kind) {
        case BaselineKind::a: {
            alloc.owner = rss_alloc(scn, gains);
            alloc.psd = uniform_psd_clipped(scn, alloc.owner);
            break;
        }
        case BaselineKind::b: {
            const std::vector<double> probe(scn.n_subchannels(),
                                            scn.hyper.p_th_w / total_bandwidth(scn));
            alloc.owner = greedy_subchannel_alloc(scn, gains, probe, random_cut, phi);
            try {
                const PowerControlResult pc = solve_power_control(scn, gains, alloc.owner, random_cut);
                alloc.psd = theta_to_psd(scn, gains, alloc.owner, pc.theta);
            } catch (const InfeasiblePowerError&) {
                alloc.psd = uniform_psd_clipped(scn, alloc.owner);
            }
            break;
        }
        case BaselineKind::c: {
            alloc.owner = rss_alloc(scn, gains);
            double best = kInf;
            alloc.psd = uniform_psd_clipped(scn, alloc.owner);
            alloc.cut = 1;
            for (int j = 1; j <= L - 1; ++j) {
                try {
                    const PowerControlResult pc = solve_power_control(scn, gains, alloc.owner, j);
                    const std::vector<double> psd = theta_to_psd(scn, gains, alloc.owner, pc.theta);
                    const double obj = eval_objective(scn, gains, alloc.owner, psd, j, phi);
                    if (obj < best) {
                        best = obj;
                        alloc.psd = psd;
                        alloc.cut = j;
                    }
                } catch (const InfeasiblePowerError&) {
                    continue;
                }
            }
            break;
        }
        case BaselineKind::d: {
            const std::vector<double> probe(scn.n_subchannels(),
                                            scn.hyper.p_th_w / total_bandwidth(scn));
            double best = kInf;
            alloc.owner = greedy_subchannel_alloc(scn, gains, probe, 1, phi);
            alloc.psd = uniform_psd_clipped(scn, alloc.owner);
            alloc.cut = 1;
            for (int j = 1; j <= L - 1; ++j) {
                std::vector<int> owner = greedy_subchannel_alloc(scn, gains, probe, j, phi);
                std::vector<double> psd = uniform_psd_clipped(scn, owner);
                const double obj = eval_objective(scn, gains, owner, psd, j, phi);
                if (obj < best) {
                    best = obj;
                    alloc.owner = std::move(owner);
                    alloc.psd = std::move(psd);
                    alloc.cut = j;
                }
            }
            break;
        }
    }

    BaselineResult res;
    res.alloc = alloc;
    res.feasible = allocation_violations(scn, alloc, /*allow_unassigned=*/true).empty();
    try {
        res.latency = round_latency(scn, gains, alloc, phi);
    } catch (const UnreachableDeviceError&) {
        // A starved device (e.g. one device grabs every subchannel under the
        // strongest-link rule) makes the round impossible to finish.
        res.feasible = false;
        res.latency.total = kInf;
    }
    return res;
}

}  // namespace splitsim
