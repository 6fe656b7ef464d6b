#include "splitsim/profile.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "splitsim/units.hpp"

namespace splitsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, int row, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(field, &pos);
        if (pos != field.size()) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        throw ProfileError(row, std::string("malformed ") + what + " value '" + field + "'");
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void validate_profile(const ModelProfile& p) {
    const int n = p.total_layers();
    if (n < 2) throw ProfileError(0, "profile needs at least 2 layers, got " + std::to_string(n));
    for (int j = 0; j < n; ++j) {
        const LayerProfile& l = p.layers[j];
        const int row = l.index;
        if (l.fp_cum_mflop <= 0.0) throw ProfileError(row, "fp workload must be positive");
        if (l.bp_cum_mflop <= 0.0) throw ProfileError(row, "bp workload must be positive");
        if (j > 0) {
            if (l.fp_cum_mflop < p.layers[j - 1].fp_cum_mflop)
                throw ProfileError(row, "cumulative fp workload decreases");
            if (l.bp_cum_mflop < p.layers[j - 1].bp_cum_mflop)
                throw ProfileError(row, "cumulative bp workload decreases");
            if (l.param_cum_mb < p.layers[j - 1].param_cum_mb)
                throw ProfileError(row, "cumulative parameter size decreases");
        }
        if (j < n - 1) {  // cuttable layers must have positive wire sizes
            if (l.smashed_mb <= 0.0) throw ProfileError(row, "activation size must be positive");
            if (l.grad_mb <= 0.0) throw ProfileError(row, "gradient size must be positive");
        }
    }
}

ModelProfile load_profile(std::istream& in) {
    ModelProfile p;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(trim(field));
        if (!line.empty() && line.back() == ',') fields.push_back("");

        if (fields.size() < 3 || fields.size() > 6)
            throw ProfileError(row, "expected 3 to 6 comma-separated fields, got " +
                                        std::to_string(fields.size()));

        LayerProfile l;
        l.index = static_cast<int>(p.layers.size()) + 1;
        l.name = fields[0];
        if (l.name.empty()) throw ProfileError(row, "empty layer name");

        // Positional layout grows left to right:
        //   3 fields: name, fp, smashed
        //   4+:       name, fp, bp, smashed[, grad[, param]]
        const std::string& fp_f = fields[1];
        std::string bp_f, smashed_f, grad_f, param_f;
        if (fields.size() == 3) {
            smashed_f = fields[2];
        } else {
            bp_f = fields[2];
            smashed_f = fields[3];
            if (fields.size() >= 5) grad_f = fields[4];
            if (fields.size() == 6) param_f = fields[5];
        }

        l.fp_cum_mflop = parse_number(fp_f, row, "fp_cum_mflop");
        l.bp_cum_mflop =
            bp_f.empty() ? 2.0 * l.fp_cum_mflop : parse_number(bp_f, row, "bp_cum_mflop");
        l.smashed_mb = parse_number(smashed_f, row, "smashed_mb");
        l.grad_mb = grad_f.empty() ? l.smashed_mb : parse_number(grad_f, row, "grad_mb");
        l.param_cum_mb = param_f.empty() ? 0.0 : parse_number(param_f, row, "param_cum_mb");
        p.layers.push_back(l);
    }
    validate_profile(p);
    return p;
}

ModelProfile load_profile_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ProfileError(0, "cannot open profile file: " + path);
    return load_profile(in);
}

ModelProfile load_profile_string(const std::string& text) {
    std::istringstream in(text);
    return load_profile(in);
}

std::string serialize_profile(const ModelProfile& p) {
    std::string out;
    for (const LayerProfile& l : p.layers) {
        out += l.name;
        out += ", " + fmt(l.fp_cum_mflop);
        out += ", " + fmt(l.bp_cum_mflop);
        out += ", " + fmt(l.smashed_mb);
        out += ", " + fmt(l.grad_mb);
        out += ", " + fmt(l.param_cum_mb);
        out += "\n";
    }
    return out;
}

ModelProfile resnet18_preset() {
    // {name, forward MFLOP of this layer alone, activation MB at its output,
    //  parameter MB of this layer alone}; pools carry no parameters and the
    //  average pool's forward cost is below the profiling resolution.
    struct Row {
        const char* name;
        double fp_mflop;
        double smashed_mb;
        double param_mb;
    };
    static const Row rows[] = {
        {"CONV1", 9.8304, 0.25, 0.0364},
        {"CONV2", 9.5027, 0.0625, 0.1411},
        {"CONV3", 9.4863, 0.0625, 0.1414},
        {"CONV4", 4.7432, 0.0313, 0.2827},
        {"CONV5", 9.4618, 0.0313, 0.564},
        {"CONV6", 0.5489, 0.0313, 0.0327},
        {"CONV4", 4.7432, 0.0313, 0.2827},
        {"CONV5", 9.4618, 0.0313, 0.564},
        {"CONV6", 0.5489, 0.0313, 0.0327},
        {"CONV7", 4.7309, 0.0156, 1.1279},
        {"CONV8", 9.4495, 0.0156, 2.2529},
        {"CONV9", 0.5366, 0.0156, 0.1279},
        {"CONV10", 4.7247, 0.0078, 4.5059},
        {"CONV11", 9.4433, 0.0078, 9.0059},
        {"CONV12", 0.5304, 0.0078, 0.5059},
        {"MAXPOOL", 0.0655, 0.0625, 0.0},
        {"AVGPOOL", 0.0, 0.0020, 0.0},
        {"FC", 0.0036, 2.67e-05, 0.0137},
    };

    ModelProfile p;
    double fp_cum = 0.0, param_cum = 0.0;
    int idx = 0;
    for (const Row& r : rows) {
        fp_cum += r.fp_mflop;
        param_cum += r.param_mb;
        LayerProfile l;
        l.index = ++idx;
        l.name = r.name;
        l.fp_cum_mflop = fp_cum;
        l.bp_cum_mflop = 2.0 * fp_cum;
        l.smashed_mb = r.smashed_mb;
        l.grad_mb = r.smashed_mb;
        l.param_cum_mb = param_cum;
        p.layers.push_back(l);
    }
    validate_profile(p);
    return p;
}

CutWorkloads workloads_at_cut(const ModelProfile& profile, int cut) {
    const int L = profile.total_layers();
    if (cut < 1 || cut >= L)
        throw std::out_of_range("cut layer " + std::to_string(cut) + " outside [1, " +
                                std::to_string(L - 1) + "]");
    const LayerProfile& at = profile.layers[cut - 1];
    const LayerProfile& last = profile.layers[L - 1];
    const LayerProfile& penult = profile.layers[L - 2];

    CutWorkloads w;
    w.client_fp_flops = at.fp_cum_flops();
    w.server_fp_flops = last.fp_cum_flops() - at.fp_cum_flops();
    w.client_bp_flops = at.bp_cum_flops();
    w.server_bp_flops = penult.bp_cum_flops() - at.bp_cum_flops();
    w.last_layer_bp_flops = last.bp_cum_flops() - penult.bp_cum_flops();
    w.smashed_bits = at.smashed_bits();
    w.grad_bits = at.grad_bits();
    w.client_model_bits = at.param_cum_bits();
    return w;
}

}  // namespace splitsim
