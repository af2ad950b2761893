#include "weldcrack/neural.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "weldcrack/numfmt.hpp"
#include <limits>
#include <numeric>
#include <sstream>

namespace weldcrack {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

constexpr double kProbClamp = 1e-12;

double bce(double p, double y) {
    p = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

/// Per-sample forward pass keeping activations for backprop.
struct Activations {
    std::vector<double> a1, a2;     // post-ReLU, post-dropout
    std::vector<double> mask1, mask2;  // inverted-dropout multipliers
    double p = 0.0;
};

Activations forward_full(const Network& net, const std::vector<double>& x, ForwardMode mode,
                         Rng* rng) {
    const auto& s = net.shape;
    Activations act;
    act.a1.assign(s.h1, 0.0);
    act.mask1.assign(s.h1, 1.0);
    for (int i = 0; i < s.h1; ++i) {
        double z = net.b1[i];
        for (int j = 0; j < s.in; ++j) z += net.W1[i * s.in + j] * x[j];
        act.a1[i] = z > 0.0 ? z : 0.0;
    }
    if (mode == ForwardMode::train && net.dropout1 > 0.0) {
        const double keep = 1.0 - net.dropout1;
        for (int i = 0; i < s.h1; ++i) {
            act.mask1[i] = rng->uniform() < net.dropout1 ? 0.0 : 1.0 / keep;
            act.a1[i] *= act.mask1[i];
        }
    }
    act.a2.assign(s.h2, 0.0);
    act.mask2.assign(s.h2, 1.0);
    for (int i = 0; i < s.h2; ++i) {
        double z = net.b2[i];
        for (int j = 0; j < s.h1; ++j) z += net.W2[i * s.h1 + j] * act.a1[j];
        act.a2[i] = z > 0.0 ? z : 0.0;
    }
    if (mode == ForwardMode::train && net.dropout2 > 0.0) {
        const double keep = 1.0 - net.dropout2;
        for (int i = 0; i < s.h2; ++i) {
            act.mask2[i] = rng->uniform() < net.dropout2 ? 0.0 : 1.0 / keep;
            act.a2[i] *= act.mask2[i];
        }
    }
    double z3 = net.b3[0];
    for (int j = 0; j < s.h2; ++j) z3 += net.W3[j] * act.a2[j];
    act.p = sigmoid(z3);
    return act;
}

std::vector<double> standardize(const Network& net, const WeldParameters& p) {
    const auto a = p.as_array();
    std::vector<double> x(a.begin(), a.end());
    for (size_t i = 0; i < x.size() && i < net.mean.size(); ++i)
        x[i] = (x[i] - net.mean[i]) / net.stddev[i];
    return x;
}

}  // namespace

size_t Network::parameter_count() const {
    return W1.size() + b1.size() + W2.size() + b2.size() + W3.size() + b3.size();
}

std::vector<double> Network::flatten() const {
    std::vector<double> p;
    p.reserve(parameter_count());
    for (const auto* v : {&W1, &b1, &W2, &b2, &W3, &b3}) p.insert(p.end(), v->begin(), v->end());
    return p;
}

void Network::unflatten(const std::vector<double>& p) {
    if (p.size() != parameter_count()) throw UsageError("network unflatten: size mismatch");
    auto it = p.begin();
    for (auto* v : {&W1, &b1, &W2, &b2, &W3, &b3}) {
        std::copy_n(it, v->size(), v->begin());
        it += static_cast<long>(v->size());
    }
}

Network init_network(std::uint64_t seed, const NetworkShape& shape) {
    Network net;
    net.shape = shape;
    net.W1.resize(static_cast<size_t>(shape.h1) * shape.in);
    net.b1.assign(shape.h1, 0.0);
    net.W2.resize(static_cast<size_t>(shape.h2) * shape.h1);
    net.b2.assign(shape.h2, 0.0);
    net.W3.resize(shape.h2);
    net.b3.assign(1, 0.0);
    net.mean.assign(shape.in, 0.0);
    net.stddev.assign(shape.in, 1.0);
    Rng rng(seed);
    const double s1 = std::sqrt(2.0 / shape.in);
    const double s2 = std::sqrt(2.0 / shape.h1);
    const double s3 = std::sqrt(1.0 / shape.h2);
    for (auto& w : net.W1) w = s1 * rng.normal();
    for (auto& w : net.W2) w = s2 * rng.normal();
    for (auto& w : net.W3) w = s3 * rng.normal();
    return net;
}

Network zero_network(const NetworkShape& shape) {
    Network net = init_network(0, shape);
    for (auto* v : {&net.W1, &net.W2, &net.W3}) std::fill(v->begin(), v->end(), 0.0);
    return net;
}

double forward(const Network& net, const std::vector<double>& x, ForwardMode mode, Rng* rng) {
    if (static_cast<int>(x.size()) != net.shape.in)
        throw UsageError("forward: input dimension mismatch");
    for (double v : x)
        if (!std::isfinite(v)) throw DomainError("forward: non-finite input");
    if (mode == ForwardMode::train && !rng)
        throw UsageError("forward: train mode requires an RNG for dropout");
    return forward_full(net, x, mode, rng).p;
}

double loss_and_gradients(const Network& net, const Batch& batch, double l2,
                          std::vector<double>& gradients, ForwardMode mode, Rng* rng) {
    const size_t n = batch.x.size();
    if (n == 0) throw UsageError("loss_and_gradients: empty batch");
    if (batch.y.size() != n || batch.weight.size() != n)
        throw UsageError("loss_and_gradients: batch arrays must have equal length");
    if (mode == ForwardMode::train && !rng)
        throw UsageError("loss_and_gradients: train mode requires an RNG");

    const auto& s = net.shape;
    std::vector<double> gW1(net.W1.size(), 0.0), gb1(net.b1.size(), 0.0);
    std::vector<double> gW2(net.W2.size(), 0.0), gb2(net.b2.size(), 0.0);
    std::vector<double> gW3(net.W3.size(), 0.0), gb3(net.b3.size(), 0.0);

    const double weight_sum = std::accumulate(batch.weight.begin(), batch.weight.end(), 0.0);
    if (!(weight_sum > 0.0)) throw UsageError("loss_and_gradients: weights sum to zero");

    double data_loss = 0.0;
    std::vector<double> d2(s.h2), d1(s.h1);
    for (size_t i = 0; i < n; ++i) {
        const auto& x = batch.x[i];
        const Activations act = forward_full(net, x, mode, rng);
        const double u = batch.weight[i] / weight_sum;
        data_loss += u * bce(act.p, batch.y[i]);

        const double dz3 = u * (act.p - batch.y[i]);
        for (int j = 0; j < s.h2; ++j) gW3[j] += dz3 * act.a2[j];
        gb3[0] += dz3;

        for (int j = 0; j < s.h2; ++j) {
            double da = dz3 * net.W3[j] * act.mask2[j];
            d2[j] = act.a2[j] > 0.0 ? da : 0.0;
        }
        for (int j = 0; j < s.h2; ++j) {
            if (d2[j] == 0.0) continue;
            for (int m = 0; m < s.h1; ++m) gW2[j * s.h1 + m] += d2[j] * act.a1[m];
            gb2[j] += d2[j];
        }
        for (int m = 0; m < s.h1; ++m) {
            double da = 0.0;
            for (int j = 0; j < s.h2; ++j) da += d2[j] * net.W2[j * s.h1 + m];
            da *= act.mask1[m];
            d1[m] = act.a1[m] > 0.0 ? da : 0.0;
        }
        for (int m = 0; m < s.h1; ++m) {
            if (d1[m] == 0.0) continue;
            for (int j = 0; j < s.in; ++j) gW1[m * s.in + j] += d1[m] * x[j];
            gb1[m] += d1[m];
        }
    }

    double reg = 0.0;
    auto add_l2 = [&](const std::vector<double>& W, std::vector<double>& gW) {
        for (size_t i = 0; i < W.size(); ++i) {
            reg += W[i] * W[i];
            gW[i] += 2.0 * l2 * W[i];
        }
    };
    add_l2(net.W1, gW1);
    add_l2(net.W2, gW2);
    add_l2(net.W3, gW3);

    gradients.clear();
    gradients.reserve(net.parameter_count());
    for (const auto* v : {&gW1, &gb1, &gW2, &gb2, &gW3, &gb3})
        gradients.insert(gradients.end(), v->begin(), v->end());
    return data_loss + l2 * reg;
}

namespace {

struct Split {
    std::vector<size_t> train, val;
};

Split stratified_split(const Dataset& data, double val_fraction, Rng& rng) {
    std::vector<size_t> pos, neg;
    for (size_t i = 0; i < data.size(); ++i)
        (data[i].label == Label::cracked ? pos : neg).push_back(i);
    auto shuffle = [&](std::vector<size_t>& v) {
        for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
    };
    shuffle(pos);
    shuffle(neg);
    Split sp;
    auto partition = [&](const std::vector<size_t>& v) {
        const size_t n_val = static_cast<size_t>(std::llround(val_fraction * static_cast<double>(v.size())));
        for (size_t i = 0; i < v.size(); ++i)
            (i < n_val ? sp.val : sp.train).push_back(v[i]);
    };
    partition(pos);
    partition(neg);
    std::sort(sp.train.begin(), sp.train.end());
    std::sort(sp.val.begin(), sp.val.end());
    return sp;
}

struct EvalPair {
    double loss;
    double acc;
};

EvalPair eval_subset(const Network& net, const std::vector<std::vector<double>>& x,
                     const std::vector<double>& y, const std::vector<double>& w,
                     const std::vector<size_t>& idx) {
    double loss = 0.0, wsum = 0.0;
    long correct = 0;
    for (size_t i : idx) {
        const double p = forward(net, x[i], ForwardMode::eval);
        loss += w[i] * bce(p, y[i]);
        wsum += w[i];
        if ((p > 0.5 ? 1.0 : 0.0) == y[i]) ++correct;
    }
    return {loss / wsum, static_cast<double>(correct) / static_cast<double>(idx.size())};
}

}  // namespace

TrainResult train(Network net, const Dataset& data, const TrainConfig& cfg) {
    if (data.empty()) throw UsageError("train: empty dataset");
    if (cfg.batch_size < 1 || cfg.patience < 1)
        throw UsageError("train: batch size and patience must be >= 1");

    Rng split_rng(substream_seed(cfg.seed, 0x51, 0));
    const Split sp = stratified_split(data, cfg.validation_fraction, split_rng);
    if (sp.train.empty()) throw UsageError("train: empty training split");
    {
        bool has_pos = false, has_neg = false;
        for (size_t i : sp.train)
            (data[i].label == Label::cracked ? has_pos : has_neg) = true;
        if (!has_pos || !has_neg)
            throw UsageError("train: training split contains a single class");
    }

    // standardization stats from the training split
    const int in = net.shape.in;
    net.mean.assign(in, 0.0);
    net.stddev.assign(in, 1.0);
    for (size_t i : sp.train) {
        const auto a = data[i].params.as_array();
        for (int j = 0; j < in; ++j) net.mean[j] += a[j];
    }
    for (int j = 0; j < in; ++j) net.mean[j] /= static_cast<double>(sp.train.size());
    std::vector<double> var(in, 0.0);
    for (size_t i : sp.train) {
        const auto a = data[i].params.as_array();
        for (int j = 0; j < in; ++j) var[j] += (a[j] - net.mean[j]) * (a[j] - net.mean[j]);
    }
    for (int j = 0; j < in; ++j) {
        const double sd = std::sqrt(var[j] / static_cast<double>(sp.train.size()));
        net.stddev[j] = sd > 0.0 ? sd : 1.0;
    }

    std::vector<std::vector<double>> x(data.size());
    std::vector<double> y(data.size()), w(data.size());
    for (size_t i = 0; i < data.size(); ++i) {
        x[i] = standardize(net, data[i].params);
        y[i] = data[i].label == Label::cracked ? 1.0 : 0.0;
        w[i] = data[i].weight * (data[i].label == Label::cracked ? cfg.crack_class_weight : 1.0);
    }

    std::vector<double> adam_m(net.parameter_count(), 0.0);
    std::vector<double> adam_v(net.parameter_count(), 0.0);
    long adam_t = 0;
    std::vector<double> params = net.flatten();

    TrainResult out;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> best_params = params;
    Network best_net = net;
    int stall = 0;

    std::vector<size_t> order = sp.train;
    std::vector<double> grad;
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        const double lr = cfg.lr0 * std::pow(cfg.lr_decay, epoch);
        Rng shuffle_rng(substream_seed(cfg.seed, 0x5E, static_cast<std::uint64_t>(epoch)));
        for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);

        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const size_t end = std::min(order.size(), start + cfg.batch_size);
            Batch batch;
            for (size_t i = start; i < end; ++i) {
                batch.x.push_back(x[order[i]]);
                batch.y.push_back(y[order[i]]);
                batch.weight.push_back(w[order[i]]);
            }
            Rng drop_rng(substream_seed(cfg.seed ^ 0xD20, static_cast<std::uint64_t>(epoch),
                                        start / cfg.batch_size));
            const double fl = loss_and_gradients(net, batch, cfg.l2, grad, ForwardMode::train,
                                                 &drop_rng);
            (void)fl;
            ++adam_t;
            const double bc1 = 1.0 - std::pow(cfg.beta1, adam_t);
            const double bc2 = 1.0 - std::pow(cfg.beta2, adam_t);
            for (size_t j = 0; j < params.size(); ++j) {
                adam_m[j] = cfg.beta1 * adam_m[j] + (1.0 - cfg.beta1) * grad[j];
                adam_v[j] = cfg.beta2 * adam_v[j] + (1.0 - cfg.beta2) * grad[j] * grad[j];
                params[j] -= lr * (adam_m[j] / bc1) / (std::sqrt(adam_v[j] / bc2) + cfg.adam_eps);
            }
            net.unflatten(params);
        }

        const EvalPair tr = eval_subset(net, x, y, w, sp.train);
        const EvalPair va = sp.val.empty() ? tr : eval_subset(net, x, y, w, sp.val);
        out.history.push_back({epoch, lr, tr.loss, va.loss, tr.acc, va.acc});

        if (va.loss < best_val) {
            best_val = va.loss;
            best_params = params;
            best_net = net;
            out.best_epoch = epoch;
            stall = 0;
        } else if (++stall >= cfg.patience) {
            break;
        }
    }

    out.net = std::move(best_net);
    out.net.unflatten(best_params);
    return out;
}

Metrics evaluate(const Network& net, const Dataset& data) {
    if (data.empty()) throw UsageError("evaluate: empty dataset");
    Metrics m;
    double w_correct = 0.0, w_total = 0.0;
    long correct = 0;
    for (const auto& s : data) {
        const double p = forward(net, standardize(net, s.params), ForwardMode::eval);
        const int pred = p > 0.5 ? 1 : 0;
        const int actual = s.label == Label::cracked ? 1 : 0;
        ++m.confusion[actual][pred];
        if (pred == actual) {
            ++correct;
            w_correct += s.weight;
        }
        w_total += s.weight;
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
    m.weighted_accuracy = w_correct / w_total;
    return m;
}

double predict(const Network& net, const WeldParameters& p) {
    return forward(net, standardize(net, p), ForwardMode::eval);
}

void save_network(const std::string& path, const Network& net) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open '" + path + "' for writing");
    f << "weldcrack-network v1\n";
    f << "shape " << net.shape.in << " " << net.shape.h1 << " " << net.shape.h2 << " 1\n";
    f << "dropout " << format_full(net.dropout1) << " "
      << format_full(net.dropout2) << "\n";
    auto row = [&](const char* name, const std::vector<double>& v) {
        f << name;
        for (double x : v) f << " " << format_full(x);
        f << "\n";
    };
    row("mean", net.mean);
    row("stddev", net.stddev);
    row("W1", net.W1);
    row("b1", net.b1);
    row("W2", net.W2);
    row("b2", net.b2);
    row("W3", net.W3);
    row("b3", net.b3);
}

Network load_network(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(f, line) || line != "weldcrack-network v1")
        throw UsageError("network file: bad or missing version header");
    Network net;
    std::string tag;
    int out_dim = 0;
    f >> tag >> net.shape.in >> net.shape.h1 >> net.shape.h2 >> out_dim;
    if (tag != "shape" || out_dim != 1) throw UsageError("network file: bad shape line");
    f >> tag >> net.dropout1 >> net.dropout2;
    if (tag != "dropout") throw UsageError("network file: bad dropout line");
    const auto& s = net.shape;
    auto row = [&](const char* name, std::vector<double>& v, size_t count) {
        f >> tag;
        if (tag != name) throw UsageError(std::string("network file: expected row '") + name + "'");
        v.resize(count);
        for (auto& x : v)
            if (!(f >> x)) throw UsageError(std::string("network file: truncated row '") + name + "'");
    };
    row("mean", net.mean, s.in);
    row("stddev", net.stddev, s.in);
    row("W1", net.W1, static_cast<size_t>(s.h1) * s.in);
    row("b1", net.b1, s.h1);
    row("W2", net.W2, static_cast<size_t>(s.h2) * s.h1);
    row("b2", net.b2, s.h2);
    row("W3", net.W3, s.h2);
    row("b3", net.b3, 1);
    return net;
}

void write_history_csv(const std::string& path, const std::vector<EpochStats>& history) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open '" + path + "' for writing");
    f << "epoch,lr,train_loss,val_loss,train_acc,val_acc\n";
    for (const auto& h : history) {
        f << h.epoch << "," << format_number(h.lr) << "," << format_number(h.train_loss) << ","
          << format_number(h.val_loss) << "," << format_number(h.train_acc) << ","
          << format_number(h.val_acc) << "\n";
    }
}

}  // namespace weldcrack
