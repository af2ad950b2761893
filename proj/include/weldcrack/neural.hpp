#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "weldcrack/dataset.hpp"
#include "weldcrack/rng.hpp"
#include "weldcrack/types.hpp"

namespace weldcrack {

struct NetworkShape {
    int in = 9;
    int h1 = 64;
    int h2 = 32;
};

/// Feedforward in-h1-h2-1 binary classifier: ReLU, ReLU, sigmoid, with
/// inverted dropout after each hidden layer and z-score input standardization
/// baked into the model state.
struct Network {
    NetworkShape shape{};
    std::vector<double> W1, b1;  // h1 x in, row-major
    std::vector<double> W2, b2;  // h2 x h1
    std::vector<double> W3, b3;  // 1 x h2
    double dropout1 = 0.3;
    double dropout2 = 0.2;
    std::vector<double> mean;    // per-input standardization stats
    std::vector<double> stddev;

    size_t parameter_count() const;
    /// Flattened parameters, order W1 b1 W2 b2 W3 b3.
    std::vector<double> flatten() const;
    void unflatten(const std::vector<double>& p);
};

enum class ForwardMode { train, eval };

/// He-scaled random weights for the ReLU layers, smaller scale on the output,
/// zero biases; deterministic per seed.
Network init_network(std::uint64_t seed, const NetworkShape& shape = {});

/// All-zero weights; forward() is 0.5 everywhere. Test hook.
Network zero_network(const NetworkShape& shape = {});

/// Crack probability for one standardized input vector. Train mode applies
/// dropout from `rng` (required in that mode).
double forward(const Network& net, const std::vector<double>& x, ForwardMode mode,
               Rng* rng = nullptr);

struct Batch {
    std::vector<std::vector<double>> x;  // standardized inputs
    std::vector<double> y;               // 0/1 labels
    std::vector<double> weight;          // sample weight * class weight
};

/// Normalized weighted BCE plus L2; gradients by backprop in the flattened
/// parameter order. Train mode draws the dropout masks from `rng`.
double loss_and_gradients(const Network& net, const Batch& batch, double l2,
                          std::vector<double>& gradients, ForwardMode mode = ForwardMode::eval,
                          Rng* rng = nullptr);

struct TrainConfig {
    double lr0 = 0.001;
    double lr_decay = 0.96;     // per epoch, exponential
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    int batch_size = 512;
    int max_epochs = 200;
    int patience = 20;
    double l2 = 1e-4;
    double crack_class_weight = 1.5;
    double validation_fraction = 0.2;
    std::uint64_t seed = 0;
};

struct EpochStats {
    int epoch = 0;
    double lr = 0.0;
    double train_loss = 0.0, val_loss = 0.0;
    double train_acc = 0.0, val_acc = 0.0;
};

struct TrainResult {
    Network net;
    std::vector<EpochStats> history;
    int best_epoch = 0;
};

/// Stratified 80/20 split, Adam minibatch training with decaying lr, early
/// stopping on validation loss, best-checkpoint restore.
TrainResult train(Network net, const Dataset& data, const TrainConfig& cfg);

struct Metrics {
    double accuracy = 0.0;
    double weighted_accuracy = 0.0;
    long confusion[2][2] = {{0, 0}, {0, 0}};  // [actual][predicted]
};

Metrics evaluate(const Network& net, const Dataset& data);

/// Probability for one raw (unstandardized) weld parameter vector.
double predict(const Network& net, const WeldParameters& p);

void save_network(const std::string& path, const Network& net);
Network load_network(const std::string& path);

void write_history_csv(const std::string& path, const std::vector<EpochStats>& history);

}  // namespace weldcrack
