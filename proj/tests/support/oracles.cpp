#include "support/oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "splitsim/rng.hpp"

namespace oracle {

using splitsim::Act;
using splitsim::LayerStack;
using splitsim::Loss;
using splitsim::Matrix;
using splitsim::Rng;
using splitsim::SplitModel;
using splitsim::StackGrads;

namespace {

double ref_act(Act a, double z) {
    if (a == Act::relu) return z > 0.0 ? z : 0.0;
    if (a == Act::sigmoid) return 1.0 / (1.0 + std::exp(-z));
    return z;
}

double ref_act_deriv(Act a, double z) {
    if (a == Act::relu) return z > 0.0 ? 1.0 : 0.0;
    if (a == Act::sigmoid) {
        const double s = 1.0 / (1.0 + std::exp(-z));
        return s * (1.0 - s);
    }
    return 1.0;
}

struct RefForward {
    // pre[l][unit], act[l][unit] for one sample; layer 0 is the first client layer
    std::vector<std::vector<double>> pre, act;
};

RefForward ref_forward_sample(const std::vector<const splitsim::DenseLayer*>& layers,
                              const std::vector<double>& x) {
    RefForward f;
    std::vector<double> a = x;
    for (const splitsim::DenseLayer* l : layers) {
        std::vector<double> z(l->out_dim(), 0.0);
        for (int o = 0; o < l->out_dim(); ++o) {
            double s = l->bias[o];
            for (int i = 0; i < l->in_dim(); ++i) s += a[i] * l->weight.at(i, o);
            z[o] = s;
        }
        std::vector<double> out(l->out_dim());
        for (int o = 0; o < l->out_dim(); ++o) out[o] = ref_act(l->act, z[o]);
        f.pre.push_back(z);
        f.act.push_back(out);
        a = std::move(out);
    }
    return f;
}

std::vector<const splitsim::DenseLayer*> stacked(const LayerStack& client,
                                                 const LayerStack& server) {
    std::vector<const splitsim::DenseLayer*> layers;
    for (const auto& l : client) layers.push_back(&l);
    for (const auto& l : server) layers.push_back(&l);
    return layers;
}

}  // namespace

RefChains ref_chains(const LayerStack& client, const LayerStack& server, const Matrix& x,
                     const std::vector<int>& labels, Loss loss) {
    const auto layers = stacked(client, server);
    const int n_layers = static_cast<int>(layers.size());
    const int cut_index = static_cast<int>(client.size()) - 1;

    RefChains out;
    out.dz.assign(n_layers, {});
    for (int r = 0; r < x.rows; ++r) {
        std::vector<double> xi(x.cols);
        for (int c = 0; c < x.cols; ++c) xi[c] = x.at(r, c);
        const RefForward f = ref_forward_sample(layers, xi);

        const std::vector<double>& y = f.act.back();
        const int out_dim = static_cast<int>(y.size());
        std::vector<double> dz_last(out_dim, 0.0);
        if (loss == Loss::mse) {
            double lv = 0.0;
            for (int c = 0; c < out_dim; ++c) {
                const double d = y[c] - (labels[r] == c ? 1.0 : 0.0);
                dz_last[c] = d;  // identity output layer: pre-act == activation grad
                lv += 0.5 * d * d;
            }
            out.losses.push_back(lv);
        } else {
            double mx = y[0];
            for (double v : y) mx = std::max(mx, v);
            double sum = 0.0;
            std::vector<double> p(out_dim);
            for (int c = 0; c < out_dim; ++c) {
                p[c] = std::exp(y[c] - mx);
                sum += p[c];
            }
            for (int c = 0; c < out_dim; ++c) p[c] /= sum;
            for (int c = 0; c < out_dim; ++c) dz_last[c] = p[c] - (labels[r] == c ? 1.0 : 0.0);
            out.losses.push_back(-std::log(std::max(p[labels[r]], 1e-300)));
        }

        std::vector<double> dz = dz_last;
        for (int l = n_layers - 1; l >= 0; --l) {
            out.dz[l].push_back(dz);
            // gradient w.r.t. the previous layer's activations
            std::vector<double> da(layers[l]->in_dim(), 0.0);
            for (int i = 0; i < layers[l]->in_dim(); ++i)
                for (int o = 0; o < layers[l]->out_dim(); ++o)
                    da[i] += dz[o] * layers[l]->weight.at(i, o);
            if (l == cut_index + 1) out.dcut.push_back(da);
            if (l > 0) {
                std::vector<double> next(layers[l - 1]->out_dim());
                for (int o = 0; o < layers[l - 1]->out_dim(); ++o)
                    next[o] = da[o] * ref_act_deriv(layers[l - 1]->act, f.pre[l - 1][o]);
                dz = std::move(next);
            }
        }
    }
    return out;
}

RefRoundGrads ref_psl_grads(const SplitModel& model, const std::vector<Matrix>& batches,
                            const std::vector<std::vector<int>>& labels,
                            const std::vector<double>& lambda, Loss loss) {
    const int n_clients = model.n_clients();
    const int b = batches[0].rows;
    const double inv_b = 1.0 / b;
    const int n_client_layers = static_cast<int>(model.clients[0].size());

    RefRoundGrads g;
    g.server = splitsim::zero_grads(model.server);
    for (int i = 0; i < n_clients; ++i) g.clients.push_back(splitsim::zero_grads(model.clients[i]));

    for (int i = 0; i < n_clients; ++i) {
        const auto layers = stacked(model.clients[i], model.server);
        for (int r = 0; r < b; ++r) {
            std::vector<double> xi(batches[i].cols);
            for (int c = 0; c < batches[i].cols; ++c) xi[c] = batches[i].at(r, c);
            const RefForward f = ref_forward_sample(layers, xi);

            // per-sample dz chain, reusing ref_chains' math inline
            const std::vector<double>& y = f.act.back();
            const int out_dim = static_cast<int>(y.size());
            std::vector<double> dz(out_dim, 0.0);
            if (loss == Loss::mse) {
                for (int c = 0; c < out_dim; ++c) dz[c] = y[c] - (labels[i][r] == c ? 1.0 : 0.0);
            } else {
                double mx = y[0];
                for (double v : y) mx = std::max(mx, v);
                double sum = 0.0;
                std::vector<double> p(out_dim);
                for (int c = 0; c < out_dim; ++c) {
                    p[c] = std::exp(y[c] - mx);
                    sum += p[c];
                }
                for (int c = 0; c < out_dim; ++c) dz[c] = p[c] / sum - (labels[i][r] == c ? 1.0 : 0.0);
            }

            for (int l = static_cast<int>(layers.size()) - 1; l >= 0; --l) {
                const bool is_server = l >= n_client_layers;
                const double coeff = is_server ? lambda[i] * inv_b : inv_b;
                splitsim::LayerGrads& slot =
                    is_server ? g.server[l - n_client_layers] : g.clients[i][l];
                const std::vector<double>& prev =
                    l == 0 ? xi : f.act[l - 1];
                for (int in = 0; in < layers[l]->in_dim(); ++in)
                    for (int o = 0; o < layers[l]->out_dim(); ++o)
                        slot.d_weight.at(in, o) += coeff * prev[in] * dz[o];
                for (int o = 0; o < layers[l]->out_dim(); ++o) slot.d_bias[o] += coeff * dz[o];

                if (l > 0) {
                    std::vector<double> da(layers[l]->in_dim(), 0.0);
                    for (int in = 0; in < layers[l]->in_dim(); ++in)
                        for (int o = 0; o < layers[l]->out_dim(); ++o)
                            da[in] += dz[o] * layers[l]->weight.at(in, o);
                    std::vector<double> next(layers[l - 1]->out_dim());
                    for (int o = 0; o < layers[l - 1]->out_dim(); ++o)
                        next[o] = da[o] * ref_act_deriv(layers[l - 1]->act, f.pre[l - 1][o]);
                    dz = std::move(next);
                }
            }
        }
    }
    return g;
}

void ref_psl_round(SplitModel& model, const std::vector<Matrix>& batches,
                   const std::vector<std::vector<int>>& labels, const std::vector<double>& lambda,
                   Loss loss, double eta_client, double eta_server) {
    const RefRoundGrads g = ref_psl_grads(model, batches, labels, lambda, loss);
    splitsim::apply_update(model.server, g.server, eta_server);
    for (int i = 0; i < model.n_clients(); ++i)
        splitsim::apply_update(model.clients[i], g.clients[i], eta_client);
}

double split_power(const std::vector<double>& theta, const std::vector<double>& bandwidth_hz,
                   const std::vector<double>& gain, double antenna_gain, double noise_psd) {
    double p = 0.0;
    for (std::size_t x = 0; x < theta.size(); ++x)
        p += noise_psd * bandwidth_hz[x] * (std::exp2(theta[x] / bandwidth_hz[x]) - 1.0) /
             (antenna_gain * gain[x]);
    return p;
}

double grid_min_power(double target_rate, const std::vector<double>& bandwidth_hz,
                      const std::vector<double>& gain, double antenna_gain, double noise_psd,
                      int grid_n) {
    const std::size_t n = bandwidth_hz.size();
    if (n < 1 || n > 3) throw std::invalid_argument("grid_min_power: 1..3 subchannels only");
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](const std::vector<double>& theta) {
        best = std::min(best, split_power(theta, bandwidth_hz, gain, antenna_gain, noise_psd));
    };
    if (n == 1) {
        consider({target_rate});
    } else if (n == 2) {
        for (int a = 0; a <= grid_n; ++a) {
            const double t1 = target_rate * a / grid_n;
            consider({t1, target_rate - t1});
        }
    } else {
        for (int a = 0; a <= grid_n; ++a) {
            const double t1 = target_rate * a / grid_n;
            for (int b = 0; a + b <= grid_n; ++b) {
                const double t2 = target_rate * b / grid_n;
                consider({t1, t2, target_rate - t1 - t2});
            }
        }
    }
    return best;
}

double random_search_power_control(const PcInstance& inst, long long samples,
                                   std::uint64_t seed) {
    const int n_dev = static_cast<int>(inst.t_fp.size());
    Rng rng(seed);

    // Per-subchannel rate ceiling assuming the whole device cap on one channel.
    std::vector<std::vector<double>> theta_cap(n_dev);
    for (int i = 0; i < n_dev; ++i)
        for (std::size_t x = 0; x < inst.bandwidth_hz[i].size(); ++x) {
            const double b = inst.bandwidth_hz[i][x];
            theta_cap[i].push_back(
                b * std::log2(1.0 + inst.p_max_w[i] / b * inst.antenna_gain * inst.gain[i][x] /
                                        inst.noise_psd));
        }

    auto feasible_power = [&](const std::vector<std::vector<double>>& theta, double scale,
                              double* total_out) {
        double total = 0.0;
        for (int i = 0; i < n_dev; ++i) {
            std::vector<double> t = theta[i];
            for (double& v : t) v *= scale;
            const double p =
                split_power(t, inst.bandwidth_hz[i], inst.gain[i], inst.antenna_gain,
                            inst.noise_psd);
            if (p > inst.p_max_w[i]) return false;
            total += p;
        }
        if (total > inst.p_th_w) return false;
        if (total_out) *total_out = total;
        return true;
    };

    auto objective = [&](const std::vector<std::vector<double>>& theta, double scale) {
        double worst = 0.0;
        for (int i = 0; i < n_dev; ++i) {
            double s = 0.0;
            for (double v : theta[i]) s += v * scale;
            if (s <= 0.0) return std::numeric_limits<double>::infinity();
            worst = std::max(worst, inst.t_fp[i] + inst.bits_needed / s);
        }
        return worst;
    };

    double best = std::numeric_limits<double>::infinity();
    for (long long s = 0; s < samples; ++s) {
        std::vector<std::vector<double>> theta(n_dev);
        for (int i = 0; i < n_dev; ++i)
            for (double cap : theta_cap[i]) theta[i].push_back(rng.uniform01() * cap);

        if (s % 2 == 0) {
            // Raw point: keep if feasible.
            if (feasible_power(theta, 1.0, nullptr)) best = std::min(best, objective(theta, 1.0));
        } else {
            // Direction point: scale the draw onto the binding cap surface.
            double lo = 0.0, hi = 1.0;
            if (feasible_power(theta, 1.0, nullptr)) {
                lo = 1.0;
                hi = 2.0;
                while (feasible_power(theta, hi, nullptr) && hi < 1e6) {
                    lo = hi;
                    hi *= 2.0;
                }
            }
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (feasible_power(theta, mid, nullptr) ? lo : hi) = mid;
            }
            if (lo > 0.0) best = std::min(best, objective(theta, lo));
        }
    }
    return best;
}

}  // namespace oracle
