#include "splitsim/training.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "splitsim/rng.hpp"

namespace splitsim {

Framework parse_framework(const std::string& name) {
    if (name == "vanilla_sl") return Framework::vanilla_sl;
    if (name == "sfl") return Framework::sfl;
    if (name == "psl") return Framework::psl;
    if (name == "epsl") return Framework::epsl;
    if (name == "epsl_pt") return Framework::epsl_pt;
    throw std::invalid_argument("unknown framework: " + name);
}

const char* framework_name(Framework fw) {
    switch (fw) {
        case Framework::vanilla_sl: return "vanilla_sl";
        case Framework::sfl: return "sfl";
        case Framework::psl: return "psl";
        case Framework::epsl: return "epsl";
        case Framework::epsl_pt: return "epsl_pt";
    }
    return "?";
}

Dataset make_mixture_dataset(int n, int dim, int classes, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("make_mixture_dataset: empty dataset");
    Dataset d;
    d.x = Matrix(n, dim);
    d.labels.resize(n);
    Rng rng(derive_seed(seed, 0xDA7A));
    const double offset = 1.5 / std::sqrt(static_cast<double>(dim));
    for (int r = 0; r < n; ++r) {
        const int label = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(classes)));
        d.labels[r] = label;
        // Classes sit at angles around the first two axes; for 2 classes this
        // is the antipodal +-offset pair on every coordinate.
        const double sign = (label % 2 == 0) ? 1.0 : -1.0;
        const double tilt = 1.0 + label / 2 * 0.5;
        for (int c = 0; c < dim; ++c) d.x.at(r, c) = sign * tilt * offset + rng.normal();
    }
    return d;
}

std::vector<Dataset> split_dataset(const Dataset& data, int n_clients) {
    std::vector<Dataset> shards(n_clients);
    std::vector<int> counts(n_clients, 0);
    for (int r = 0; r < data.size(); ++r) counts[r % n_clients]++;
    for (int i = 0; i < n_clients; ++i) {
        shards[i].x = Matrix(counts[i], data.x.cols);
        shards[i].labels.resize(counts[i]);
    }
    std::vector<int> fill(n_clients, 0);
    for (int r = 0; r < data.size(); ++r) {
        const int i = r % n_clients;
        for (int c = 0; c < data.x.cols; ++c) shards[i].x.at(fill[i], c) = data.x.at(r, c);
        shards[i].labels[fill[i]] = data.labels[r];
        ++fill[i];
    }
    return shards;
}

namespace {

DenseLayer make_layer(int in, int out, Act act, Rng& rng) {
    DenseLayer l;
    l.weight = Matrix(in, out);
    const double s = std::sqrt(6.0 / (in + out));
    for (double& w : l.weight.data) w = rng.uniform(-s, s);
    l.bias.assign(out, 0.0);
    l.act = act;
    return l;
}

}  // namespace

SplitModel init_split_model(const TrainConfig& cfg, int n_clients, std::uint64_t seed,
                            Act hidden_act) {
    Rng rng(derive_seed(seed, 0x1417));
    SplitModel m;
    LayerStack client;
    client.push_back(make_layer(cfg.input_dim, cfg.hidden_dim, hidden_act, rng));
    client.push_back(make_layer(cfg.hidden_dim, cfg.cut_dim, hidden_act, rng));
    m.server.push_back(make_layer(cfg.cut_dim, cfg.hidden_dim, hidden_act, rng));
    m.server.push_back(make_layer(cfg.hidden_dim, cfg.classes, Act::identity, rng));
    // Every client starts from the same broadcast client-side model.
    m.clients.assign(n_clients, client);
    return m;
}

TrainState make_train_state(const Scenario& scn, Framework fw) {
    TrainState st;
    st.model = init_split_model(scn.train, scn.n_devices(), scn.hyper.seed);
    st.loss = parse_loss(scn.train.loss);
    st.eta_client = scn.train.eta_client;
    st.eta_server = scn.train.eta_server;
    st.batch = scn.hyper.batch;
    st.agg.phi = fw == Framework::psl || fw == Framework::sfl || fw == Framework::vanilla_sl
                     ? Ratio{0, 1}
                     : scn.hyper.phi;
    st.agg.mode = scn.train.agg_backprop == "per_client" ? AggBackprop::per_client_avg
                                                         : AggBackprop::merged_trace;
    long long total = 0;
    for (const DeviceProfile& d : scn.devices) total += d.data_count;
    st.agg.lambda.clear();
    for (const DeviceProfile& d : scn.devices)
        st.agg.lambda.push_back(static_cast<double>(d.data_count) / static_cast<double>(total));
    return st;
}

std::vector<std::vector<int>> draw_round_batches(const std::vector<Dataset>& shards, int batch,
                                                 std::uint64_t seed, int round_index) {
    std::vector<std::vector<int>> batches(shards.size());
    for (std::size_t i = 0; i < shards.size(); ++i) {
        Rng rng(derive_seed(seed, 0xBA7C000 + 4096ULL * round_index + i));
        const int n = shards[i].size();
        // Partial Fisher-Yates: first `batch` entries of a seeded shuffle.
        std::vector<int> idx(n);
        for (int j = 0; j < n; ++j) idx[j] = j;
        const int take = std::min(batch, n);
        for (int j = 0; j < take; ++j) {
            const int swap = j + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - j)));
            std::swap(idx[j], idx[swap]);
        }
        batches[i].assign(idx.begin(), idx.begin() + take);
        // Shards smaller than the batch recycle samples round-robin.
        while (static_cast<int>(batches[i].size()) < batch)
            batches[i].push_back(idx[batches[i].size() % take]);
    }
    return batches;
}

namespace {

Matrix gather_rows(const Dataset& d, const std::vector<int>& rows) {
    Matrix out(static_cast<int>(rows.size()), d.x.cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < d.x.cols; ++c) out.at(static_cast<int>(r), c) = d.x.at(rows[r], c);
    return out;
}

std::vector<int> gather_labels(const Dataset& d, const std::vector<int>& rows) {
    std::vector<int> out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out[r] = d.labels[rows[r]];
    return out;
}

/// One parallel split round at the given aggregation ratio (the epsl/psl/sfl
/// data path).
double parallel_round(TrainState& st, const std::vector<Dataset>& shards,
                      const std::vector<std::vector<int>>& batches, const Ratio& phi) {
    SplitModel& m = st.model;
    const int n_clients = m.n_clients();
    const int b = st.batch;

    AggregationConfig cfg = st.agg;
    cfg.phi = phi;

    // Stage 1-2: client forward, smashed data to the server.
    std::vector<StackTrace> client_traces(n_clients);
    std::vector<Matrix> smashed(n_clients);
    std::vector<std::vector<int>> labels(n_clients);
    for (int i = 0; i < n_clients; ++i) {
        const Matrix x = gather_rows(shards[i], batches[i]);
        labels[i] = gather_labels(shards[i], batches[i]);
        smashed[i] = forward(m.clients[i], x, &client_traces[i]);
    }

    // Stage 3: server forward on the concatenation (ascending client id).
    // Per-client traces are kept separate; rows align with sample slots.
    std::vector<StackTrace> server_traces(n_clients);
    std::vector<Matrix> preds(n_clients);
    double loss_sum = 0.0;
    std::vector<Matrix> last_grads(n_clients);
    for (int i = 0; i < n_clients; ++i) {
        preds[i] = forward(m.server, smashed[i], &server_traces[i]);
        const std::vector<double> losses = per_sample_loss(preds[i], labels[i], st.loss);
        for (double l : losses) loss_sum += l;
        last_grads[i] = last_layer_gradients(preds[i], labels[i], st.loss);
    }

    // Stage 4: slot-aligned aggregation, then server backward + update.
    const AggregatedGradients agg = aggregate_last_layer(last_grads, cfg);
    ServerBackwardResult sb = server_backward(m.server, server_traces, agg, cfg, b);
    apply_update(m.server, sb.grads, st.eta_server);

    // Stages 5-7: cut gradients back to the clients, client backward + update.
    for (int i = 0; i < n_clients; ++i) {
        const StackGrads g = client_backward(m.clients[i], client_traces[i], sb.aggregated_cut,
                                             sb.unaggregated_cut[i], b);
        apply_update(m.clients[i], g, st.eta_client);
    }
    return loss_sum / (static_cast<double>(n_clients) * b);
}

double vanilla_round(TrainState& st, const std::vector<Dataset>& shards,
                     const std::vector<std::vector<int>>& batches) {
    SplitModel& m = st.model;
    const int n_clients = m.n_clients();
    const int b = st.batch;
    double loss_sum = 0.0;

    // Sequential: each device trains alone on the handed-off client model.
    LayerStack current = m.clients[0];
    for (int i = 0; i < n_clients; ++i) {
        StackTrace ct;
        const Matrix x = gather_rows(shards[i], batches[i]);
        const std::vector<int> lab = gather_labels(shards[i], batches[i]);
        const Matrix s = forward(current, x, &ct);

        StackTrace strc;
        const Matrix pred = forward(m.server, s, &strc);
        for (double l : per_sample_loss(pred, lab, st.loss)) loss_sum += l;
        const Matrix lg = last_layer_gradients(pred, lab, st.loss);

        AggregationConfig solo;
        solo.phi = Ratio{0, 1};
        solo.lambda = {1.0};
        const AggregatedGradients agg = aggregate_last_layer({lg}, solo);
        ServerBackwardResult sb = server_backward(m.server, {strc}, agg, solo, b);
        apply_update(m.server, sb.grads, st.eta_server);

        const StackGrads g =
            client_backward(current, ct, sb.aggregated_cut, sb.unaggregated_cut[0], b);
        apply_update(current, g, st.eta_client);
    }
    // The final handed-off model is the one everybody would resume from.
    for (LayerStack& c : m.clients) c = current;
    return loss_sum / (static_cast<double>(n_clients) * b);
}

void federated_average_clients(SplitModel& m, const std::vector<double>& lambda) {
    LayerStack avg = m.clients[0];
    for (std::size_t l = 0; l < avg.size(); ++l) {
        avg[l].weight.data.assign(avg[l].weight.data.size(), 0.0);
        avg[l].bias.assign(avg[l].bias.size(), 0.0);
        for (int i = 0; i < m.n_clients(); ++i) {
            avg[l].weight.add_scaled(m.clients[i][l].weight, lambda[i]);
            for (std::size_t j = 0; j < avg[l].bias.size(); ++j)
                avg[l].bias[j] += lambda[i] * m.clients[i][l].bias[j];
        }
    }
    for (LayerStack& c : m.clients) c = avg;
}

}  // namespace

RoundMetrics train_round(Framework fw, TrainState& state, const std::vector<Dataset>& shards,
                         const std::vector<std::vector<int>>& batches,
                         const Ratio* phi_override) {
    RoundMetrics metrics;
    switch (fw) {
        case Framework::epsl:
        case Framework::epsl_pt:
            metrics.mean_loss = parallel_round(state, shards, batches,
                                               phi_override ? *phi_override : state.agg.phi);
            break;
        case Framework::psl:
            metrics.mean_loss = parallel_round(state, shards, batches, Ratio{0, 1});
            break;
        case Framework::sfl:
            metrics.mean_loss = parallel_round(state, shards, batches, Ratio{0, 1});
            federated_average_clients(state.model, state.agg.lambda);
            break;
        case Framework::vanilla_sl:
            metrics.mean_loss = vanilla_round(state, shards, batches);
            break;
    }
    return metrics;
}

EvalResult evaluate(const SplitModel& model, int client_index, const Dataset& data, Loss loss) {
    if (data.size() == 0) throw std::invalid_argument("evaluate: empty dataset");
    const Matrix smashed = forward(model.clients[client_index], data.x, nullptr);
    const Matrix pred = forward(model.server, smashed, nullptr);

    EvalResult res;
    const std::vector<double> losses = per_sample_loss(pred, data.labels, loss);
    int correct = 0;
    for (int r = 0; r < pred.rows; ++r) {
        res.mean_loss += losses[r];
        int arg = 0;
        for (int c = 1; c < pred.cols; ++c)
            if (pred.at(r, c) > pred.at(r, arg)) arg = c;
        if (arg == data.labels[r]) ++correct;
    }
    res.mean_loss /= data.size();
    res.accuracy = static_cast<double>(correct) / data.size();
    return res;
}

}  // namespace splitsim
