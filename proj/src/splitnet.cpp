#include "splitsim/splitnet.hpp"

#include <cmath>
#include <stdexcept>

namespace splitsim {

Matrix Matrix::row(int r) const {
    Matrix out(1, cols);
    for (int c = 0; c < cols; ++c) out.at(0, c) = at(r, c);
    return out;
}

void Matrix::add_scaled(const Matrix& other, double scale) {
    if (rows != other.rows || cols != other.cols)
        throw std::invalid_argument("Matrix::add_scaled: shape mismatch");
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += scale * other.data[i];
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: inner dimensions differ");
    Matrix out(a.rows, b.cols);
    for (int r = 0; r < a.rows; ++r)
        for (int k = 0; k < a.cols; ++k) {
            const double v = a.at(r, k);
            if (v == 0.0) continue;
            for (int c = 0; c < b.cols; ++c) out.at(r, c) += v * b.at(k, c);
        }
    return out;
}

Matrix matmul_transposed_b(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols) throw std::invalid_argument("matmul_transposed_b: shape mismatch");
    Matrix out(a.rows, b.rows);
    for (int r = 0; r < a.rows; ++r)
        for (int c = 0; c < b.rows; ++c) {
            double s = 0.0;
            for (int k = 0; k < a.cols; ++k) s += a.at(r, k) * b.at(c, k);
            out.at(r, c) = s;
        }
    return out;
}

Act parse_act(const std::string& name) {
    if (name == "identity") return Act::identity;
    if (name == "relu") return Act::relu;
    if (name == "sigmoid") return Act::sigmoid;
    throw std::invalid_argument("unknown activation: " + name);
}

namespace {

double act_apply(Act a, double z) {
    switch (a) {
        case Act::identity: return z;
        case Act::relu: return z > 0.0 ? z : 0.0;
        case Act::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    }
    return z;
}

double act_deriv(Act a, double z) {
    switch (a) {
        case Act::identity: return 1.0;
        case Act::relu: return z > 0.0 ? 1.0 : 0.0;
        case Act::sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-z));
            return s * (1.0 - s);
        }
    }
    return 1.0;
}

}  // namespace

StackTrace StackTrace::slice_rows(int begin, int end) const {
    auto slice = [&](const Matrix& m) {
        Matrix out(end - begin, m.cols);
        for (int r = begin; r < end; ++r)
            for (int c = 0; c < m.cols; ++c) out.at(r - begin, c) = m.at(r, c);
        return out;
    };
    StackTrace out;
    out.input = slice(input);
    for (const Matrix& m : pre) out.pre.push_back(slice(m));
    for (const Matrix& m : act) out.act.push_back(slice(m));
    return out;
}

void StackTrace::add_scaled(const StackTrace& other, double scale) {
    input.add_scaled(other.input, scale);
    for (std::size_t l = 0; l < pre.size(); ++l) {
        pre[l].add_scaled(other.pre[l], scale);
        act[l].add_scaled(other.act[l], scale);
    }
}

StackGrads zero_grads(const LayerStack& stack) {
    StackGrads g;
    for (const DenseLayer& l : stack) {
        LayerGrads lg;
        lg.d_weight = Matrix(l.weight.rows, l.weight.cols);
        lg.d_bias.assign(l.bias.size(), 0.0);
        g.push_back(std::move(lg));
    }
    return g;
}

void apply_update(LayerStack& stack, const StackGrads& grads, double learning_rate) {
    for (std::size_t l = 0; l < stack.size(); ++l) {
        stack[l].weight.add_scaled(grads[l].d_weight, -learning_rate);
        for (std::size_t j = 0; j < stack[l].bias.size(); ++j)
            stack[l].bias[j] -= learning_rate * grads[l].d_bias[j];
    }
}

Matrix forward(const LayerStack& stack, const Matrix& x, StackTrace* trace) {
    if (trace) {
        trace->input = x;
        trace->pre.clear();
        trace->act.clear();
    }
    Matrix a = x;
    for (const DenseLayer& layer : stack) {
        Matrix z = matmul(a, layer.weight);
        for (int r = 0; r < z.rows; ++r)
            for (int c = 0; c < z.cols; ++c) z.at(r, c) += layer.bias[c];
        Matrix out(z.rows, z.cols);
        for (std::size_t i = 0; i < z.data.size(); ++i)
            out.data[i] = act_apply(layer.act, z.data[i]);
        if (trace) {
            trace->pre.push_back(z);
            trace->act.push_back(out);
        }
        a = std::move(out);
    }
    return a;
}

Matrix backward(const LayerStack& stack, const StackTrace& trace, const Matrix& g_out,
                bool from_preact, const std::vector<double>& row_weights, StackGrads& accum,
                std::vector<Matrix>* capture_dz) {
    const int n = g_out.rows;
    if (static_cast<int>(row_weights.size()) != n)
        throw std::invalid_argument("backward: row_weights size mismatch");
    if (trace.n_rows() != n) throw std::invalid_argument("backward: trace/gradient row mismatch");

    if (capture_dz) capture_dz->assign(stack.size(), Matrix());
    Matrix g = g_out;  // gradient w.r.t. current layer's activations (or pre-act at entry)
    for (int l = static_cast<int>(stack.size()) - 1; l >= 0; --l) {
        const DenseLayer& layer = stack[l];
        Matrix dz(n, layer.out_dim());
        if (l == static_cast<int>(stack.size()) - 1 && from_preact) {
            dz = g;
        } else {
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < layer.out_dim(); ++c)
                    dz.at(r, c) = g.at(r, c) * act_deriv(layer.act, trace.pre[l].at(r, c));
        }
        if (capture_dz) (*capture_dz)[l] = dz;

        const Matrix& prev_act = l == 0 ? trace.input : trace.act[l - 1];
        for (int r = 0; r < n; ++r) {
            const double w = row_weights[r];
            if (w == 0.0) continue;
            for (int in = 0; in < layer.in_dim(); ++in) {
                const double a = prev_act.at(r, in);
                if (a != 0.0)
                    for (int out = 0; out < layer.out_dim(); ++out)
                        accum[l].d_weight.at(in, out) += w * a * dz.at(r, out);
            }
            for (int out = 0; out < layer.out_dim(); ++out)
                accum[l].d_bias[out] += w * dz.at(r, out);
        }

        g = matmul_transposed_b(dz, layer.weight);  // dz * W^T
    }
    return g;
}

Loss parse_loss(const std::string& name) {
    if (name == "mse") return Loss::mse;
    if (name == "softmax_ce") return Loss::softmax_ce;
    throw std::invalid_argument("unknown loss: " + name);
}

namespace {

void softmax_row(const Matrix& y, int r, std::vector<double>& p) {
    double mx = y.at(r, 0);
    for (int c = 1; c < y.cols; ++c) mx = std::max(mx, y.at(r, c));
    double sum = 0.0;
    for (int c = 0; c < y.cols; ++c) {
        p[c] = std::exp(y.at(r, c) - mx);
        sum += p[c];
    }
    for (int c = 0; c < y.cols; ++c) p[c] /= sum;
}

}  // namespace

std::vector<double> per_sample_loss(const Matrix& y_hat, const std::vector<int>& labels,
                                    Loss loss) {
    std::vector<double> out(y_hat.rows, 0.0);
    std::vector<double> p(y_hat.cols);
    for (int r = 0; r < y_hat.rows; ++r) {
        if (loss == Loss::mse) {
            double s = 0.0;
            for (int c = 0; c < y_hat.cols; ++c) {
                const double d = y_hat.at(r, c) - (labels[r] == c ? 1.0 : 0.0);
                s += d * d;
            }
            out[r] = 0.5 * s;
        } else {
            softmax_row(y_hat, r, p);
            out[r] = -std::log(std::max(p[labels[r]], 1e-300));
        }
    }
    return out;
}

Matrix last_layer_gradients(const Matrix& y_hat, const std::vector<int>& labels, Loss loss) {
    if (static_cast<int>(labels.size()) != y_hat.rows)
        throw std::invalid_argument("last_layer_gradients: label count mismatch");
    Matrix g(y_hat.rows, y_hat.cols);
    std::vector<double> p(y_hat.cols);
    for (int r = 0; r < y_hat.rows; ++r) {
        if (loss == Loss::mse) {
            for (int c = 0; c < y_hat.cols; ++c)
                g.at(r, c) = y_hat.at(r, c) - (labels[r] == c ? 1.0 : 0.0);
        } else {
            softmax_row(y_hat, r, p);
            for (int c = 0; c < y_hat.cols; ++c) g.at(r, c) = p[c] - (labels[r] == c ? 1.0 : 0.0);
        }
    }
    return g;
}

AggregatedGradients aggregate_last_layer(const std::vector<Matrix>& per_client_grads,
                                         const AggregationConfig& cfg) {
    const int n_clients = static_cast<int>(per_client_grads.size());
    if (n_clients == 0) throw std::invalid_argument("aggregate_last_layer: no clients");
    if (static_cast<int>(cfg.lambda.size()) != n_clients)
        throw std::invalid_argument("aggregate_last_layer: lambda size mismatch");
    const int b = per_client_grads[0].rows;
    const int out_dim = per_client_grads[0].cols;
    for (const Matrix& g : per_client_grads)
        if (g.rows != b || g.cols != out_dim)
            throw std::invalid_argument("aggregate_last_layer: client batch shapes differ");

    const int agg = static_cast<int>(cfg.phi.ceil_mul(b));
    AggregatedGradients out;
    out.aggregated = Matrix(agg, out_dim);
    for (int i = 0; i < n_clients; ++i)
        for (int j = 0; j < agg; ++j)
            for (int c = 0; c < out_dim; ++c)
                out.aggregated.at(j, c) += cfg.lambda[i] * per_client_grads[i].at(j, c);

    for (int i = 0; i < n_clients; ++i) {
        Matrix rest(b - agg, out_dim);
        for (int j = agg; j < b; ++j)
            for (int c = 0; c < out_dim; ++c) rest.at(j - agg, c) = per_client_grads[i].at(j, c);
        out.unaggregated.push_back(std::move(rest));
    }
    return out;
}

ServerBackwardResult server_backward(const LayerStack& server,
                                     const std::vector<StackTrace>& per_client_traces,
                                     const AggregatedGradients& grads,
                                     const AggregationConfig& cfg, int batch,
                                     std::vector<Matrix>* capture_agg_dz) {
    const int n_clients = static_cast<int>(per_client_traces.size());
    if (n_clients == 0) throw std::invalid_argument("server_backward: no traces");
    const int agg = grads.aggregated.rows;
    const double inv_b = 1.0 / static_cast<double>(batch);

    ServerBackwardResult res;
    res.grads = zero_grads(server);
    res.unaggregated_cut.resize(n_clients);

    if (agg > 0) {
        if (cfg.mode == AggBackprop::merged_trace) {
            // One pass per aggregated slot through the lambda-weighted mean of
            // the clients' traced activations.
            StackTrace merged = per_client_traces[0].slice_rows(0, agg);
            for (auto& m : merged.pre) m.data.assign(m.data.size(), 0.0);
            for (auto& m : merged.act) m.data.assign(m.data.size(), 0.0);
            merged.input.data.assign(merged.input.data.size(), 0.0);
            for (int i = 0; i < n_clients; ++i)
                merged.add_scaled(per_client_traces[i].slice_rows(0, agg), cfg.lambda[i]);
            const std::vector<double> w(agg, inv_b);
            res.aggregated_cut =
                backward(server, merged, grads.aggregated, true, w, res.grads, capture_agg_dz);
        } else {
            // Chain the same aggregated gradients through every client's own
            // trace and lambda-average both the weight and the cut gradients.
            res.aggregated_cut = Matrix(agg, server.front().in_dim());
            for (int i = 0; i < n_clients; ++i) {
                const StackTrace t = per_client_traces[i].slice_rows(0, agg);
                const std::vector<double> w(agg, cfg.lambda[i] * inv_b);
                StackGrads partial = zero_grads(server);
                const Matrix cut = backward(server, t, grads.aggregated, true, w, partial);
                for (std::size_t l = 0; l < partial.size(); ++l) {
                    res.grads[l].d_weight.add_scaled(partial[l].d_weight, 1.0);
                    for (std::size_t j = 0; j < partial[l].d_bias.size(); ++j)
                        res.grads[l].d_bias[j] += partial[l].d_bias[j];
                }
                res.aggregated_cut.add_scaled(cut, cfg.lambda[i]);
            }
        }
    } else {
        res.aggregated_cut = Matrix(0, server.front().in_dim());
    }

    for (int i = 0; i < n_clients; ++i) {
        const int rest = grads.unaggregated[i].rows;
        if (rest == 0) {
            res.unaggregated_cut[i] = Matrix(0, server.front().in_dim());
            continue;
        }
        const StackTrace t = per_client_traces[i].slice_rows(agg, agg + rest);
        const std::vector<double> w(rest, cfg.lambda[i] * inv_b);
        res.unaggregated_cut[i] =
            backward(server, t, grads.unaggregated[i], true, w, res.grads);
    }
    return res;
}

StackGrads client_backward(const LayerStack& client, const StackTrace& trace,
                           const Matrix& aggregated_cut, const Matrix& own_unaggregated_cut,
                           int batch, std::vector<Matrix>* capture_agg_dz) {
    const int agg = aggregated_cut.rows;
    const int rest = own_unaggregated_cut.rows;
    if (trace.n_rows() != batch)
        throw std::invalid_argument("client_backward: trace rows != batch");
    if (agg + rest != batch)
        throw std::invalid_argument("client_backward: gradient slots do not cover the batch");
    const double inv_b = 1.0 / static_cast<double>(batch);
    StackGrads grads = zero_grads(client);

    if (agg > 0) {
        // Broadcast gradients ride this client's own traced activations.
        const StackTrace t = trace.slice_rows(0, agg);
        const std::vector<double> w(agg, inv_b);
        backward(client, t, aggregated_cut, false, w, grads, capture_agg_dz);
    }
    if (rest > 0) {
        const StackTrace t = trace.slice_rows(agg, batch);
        const std::vector<double> w(rest, inv_b);
        backward(client, t, own_unaggregated_cut, false, w, grads);
    }
    return grads;
}

}  // namespace splitsim
