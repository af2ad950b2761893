#include "weldcrack/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace weldcrack {

namespace {

using nlohmann::json;

json default_json() {
    RunConfig c;
    json j;
    j["seed"] = c.seed;
    j["n_per_sample"] = c.n_per_sample;
    j["noise"]["sigma"] = c.noise.sigma;
    j["coupling"]["rho_c"] = c.coupling.rho_c;
    j["ranges"]["lo"] = c.ranges.lo;
    j["ranges"]["hi"] = c.ranges.hi;
    j["bounds"]["lo"] = c.bounds.lo;
    j["bounds"]["hi"] = c.bounds.hi;
    j["logistic"]["k"] = c.logistic.k;
    j["logistic"]["cpi_crit"] = c.logistic.cpi_crit;
    j["model"]["t5_form"] = "ratio_power";
    j["gp"] = {{"population", c.gp.population},
               {"generations", c.gp.generations},
               {"tournament_size", c.gp.tournament_size},
               {"crossover_prob", c.gp.crossover_prob},
               {"mutation_prob", c.gp.mutation_prob},
               {"elitism", c.gp.elitism},
               {"max_depth", c.gp.max_depth},
               {"max_nodes", c.gp.max_nodes},
               {"constant_leaf_prob", c.gp.constant_leaf_prob},
               {"seed_canonical", c.gp.seed_canonical},
               {"co_optimize_k", c.gp.co_optimize_k}};
    j["de"] = {{"iterations", c.de.iterations},
               {"population", c.de.population},
               {"F", c.de.F},
               {"CR", c.de.CR}};
    j["refine"] = {{"expand_lo", c.refine.expand_lo},
                   {"expand_hi", c.refine.expand_hi},
                   {"local_max_iterations", c.refine.local_max_iterations},
                   {"reversion_threshold", c.refine.reversion_threshold},
                   {"fd_step", c.refine.fd_step},
                   {"grad_tol", c.refine.grad_tol},
                   {"smooth_loss", c.refine.smooth_loss}};
    j["train"] = {{"lr0", c.train.lr0},
                  {"lr_decay", c.train.lr_decay},
                  {"beta1", c.train.beta1},
                  {"beta2", c.train.beta2},
                  {"adam_eps", c.train.adam_eps},
                  {"batch_size", c.train.batch_size},
                  {"max_epochs", c.train.max_epochs},
                  {"patience", c.train.patience},
                  {"l2", c.train.l2},
                  {"crack_class_weight", c.train.crack_class_weight},
                  {"validation_fraction", c.train.validation_fraction}};
    j["ecosystem"] = {{"w_original", c.weights.w_original},
                      {"w_augmented", c.weights.w_augmented},
                      {"w_virtual", c.weights.w_virtual},
                      {"crack_class_weight", c.weights.crack_class_weight},
                      {"k_nearest", c.sparsity.k_nearest},
                      {"pool_multiplier", c.sparsity.pool_multiplier},
                      {"target", c.sparsity.target},
                      {"uniform_fallback", c.sparsity.uniform_fallback}};
    return j;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw UsageError("config: " + path + ": " + what);
}

void reject_unknown(const json& j, const json& reference, const std::string& path) {
    if (!j.is_object()) return;
    for (const auto& [key, value] : j.items()) {
        if (!reference.contains(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
        if (value.is_object())
            reject_unknown(value, reference.at(key), path.empty() ? key : path + "." + key);
    }
}

template <typename T>
void read_field(const json& j, const char* key, T& out, const std::string& path) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(path + "." + key, "wrong type");
    }
}

template <size_t N>
void read_array(const json& j, const char* key, std::array<double, N>& out,
                const std::string& path) {
    if (!j.contains(key)) return;
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != N)
        fail(path + "." + key, "expected an array of " + std::to_string(N) + " numbers");
    for (size_t i = 0; i < N; ++i) {
        try {
            out[i] = a.at(i).get<double>();
        } catch (const json::exception&) {
            fail(path + "." + key + "[" + std::to_string(i) + "]", "not a number");
        }
    }
}

void validate(const RunConfig& c) {
    for (size_t i = 0; i < c.noise.sigma.size(); ++i)
        if (!(c.noise.sigma[i] >= 0.0)) fail("noise.sigma[" + std::to_string(i) + "]", "must be >= 0");
    if (!(c.coupling.rho_c >= 0.0 && c.coupling.rho_c <= 1.0))
        fail("coupling.rho_c", "must be in [0, 1]");
    for (int i = 0; i < WeldParameters::kDim; ++i)
        if (!(c.ranges.lo[i] < c.ranges.hi[i]))
            fail("ranges", std::string("lo must be < hi for ") + kParameterNames[i]);
    for (int i = 0; i < ModelParameters::kDim; ++i)
        if (!(c.bounds.lo[i] < c.bounds.hi[i]))
            fail("bounds", std::string("lo must be < hi for ") + kModelParameterNames[i]);
    if (!(c.logistic.k > 0.0)) fail("logistic.k", "must be > 0");
    if (c.gp.population < 2) fail("gp.population", "must be >= 2");
    if (c.gp.generations < 0) fail("gp.generations", "must be >= 0");
    if (c.gp.tournament_size < 1) fail("gp.tournament_size", "must be >= 1");
    for (auto [name, p] : {std::pair{"gp.crossover_prob", c.gp.crossover_prob},
                           std::pair{"gp.mutation_prob", c.gp.mutation_prob},
                           std::pair{"gp.constant_leaf_prob", c.gp.constant_leaf_prob}})
        if (!(p >= 0.0 && p <= 1.0)) fail(name, "must be in [0, 1]");
    if (c.gp.max_depth < 1) fail("gp.max_depth", "must be >= 1");
    if (c.de.population < 4) fail("de.population", "must be >= 4");
    if (c.de.iterations < 0) fail("de.iterations", "must be >= 0");
    if (!(c.de.F > 0.0 && c.de.F <= 2.0)) fail("de.F", "must be in (0, 2]");
    if (!(c.de.CR >= 0.0 && c.de.CR <= 1.0)) fail("de.CR", "must be in [0, 1]");
    if (!(c.refine.expand_lo < c.refine.expand_hi))
        fail("refine.expand_lo", "must be < refine.expand_hi");
    if (!(c.refine.reversion_threshold > 0.0 && c.refine.reversion_threshold < 1.0))
        fail("refine.reversion_threshold", "must be in (0, 1)");
    if (c.refine.local_max_iterations < 1) fail("refine.local_max_iterations", "must be >= 1");
    if (c.train.batch_size < 1) fail("train.batch_size", "must be >= 1");
    if (c.train.patience < 1) fail("train.patience", "must be >= 1");
    if (c.train.max_epochs < 1) fail("train.max_epochs", "must be >= 1");
    if (!(c.train.validation_fraction > 0.0 && c.train.validation_fraction < 1.0))
        fail("train.validation_fraction", "must be in (0, 1)");
    for (auto [name, w] : {std::pair{"ecosystem.w_original", c.weights.w_original},
                           std::pair{"ecosystem.w_augmented", c.weights.w_augmented},
                           std::pair{"ecosystem.w_virtual", c.weights.w_virtual},
                           std::pair{"ecosystem.crack_class_weight", c.weights.crack_class_weight}})
        if (!(w > 0.0)) fail(name, "must be > 0");
    if (c.sparsity.k_nearest < 1) fail("ecosystem.k_nearest", "must be >= 1");
    if (c.sparsity.pool_multiplier < 1) fail("ecosystem.pool_multiplier", "must be >= 1");
    if (c.sparsity.target < 1) fail("ecosystem.target", "must be >= 1");
    if (c.n_per_sample < 1) fail("n_per_sample", "must be >= 1");
}

}  // namespace

std::string default_config_json() { return default_json().dump(2) + "\n"; }

RunConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw UsageError("config: top level must be a JSON object");
    reject_unknown(j, default_json(), "");

    RunConfig c;
    read_field(j, "seed", c.seed, "");
    read_field(j, "n_per_sample", c.n_per_sample, "");
    if (j.contains("noise")) read_array(j.at("noise"), "sigma", c.noise.sigma, "noise");
    if (j.contains("coupling")) read_field(j.at("coupling"), "rho_c", c.coupling.rho_c, "coupling");
    if (j.contains("ranges")) {
        read_array(j.at("ranges"), "lo", c.ranges.lo, "ranges");
        read_array(j.at("ranges"), "hi", c.ranges.hi, "ranges");
    }
    if (j.contains("bounds")) {
        read_array(j.at("bounds"), "lo", c.bounds.lo, "bounds");
        read_array(j.at("bounds"), "hi", c.bounds.hi, "bounds");
    }
    if (j.contains("logistic")) {
        read_field(j.at("logistic"), "k", c.logistic.k, "logistic");
        read_field(j.at("logistic"), "cpi_crit", c.logistic.cpi_crit, "logistic");
    }
    if (j.contains("model")) {
        std::string form = "ratio_power";
        read_field(j.at("model"), "t5_form", form, "model");
        if (form == "ratio_power") c.term_cfg.t5_form = CoolingRateForm::ratio_power;
        else if (form == "power_over_time") c.term_cfg.t5_form = CoolingRateForm::power_over_time;
        else fail("model.t5_form", "must be 'ratio_power' or 'power_over_time'");
    }
    if (j.contains("gp")) {
        const auto& g = j.at("gp");
        read_field(g, "population", c.gp.population, "gp");
        read_field(g, "generations", c.gp.generations, "gp");
        read_field(g, "tournament_size", c.gp.tournament_size, "gp");
        read_field(g, "crossover_prob", c.gp.crossover_prob, "gp");
        read_field(g, "mutation_prob", c.gp.mutation_prob, "gp");
        read_field(g, "elitism", c.gp.elitism, "gp");
        read_field(g, "max_depth", c.gp.max_depth, "gp");
        read_field(g, "max_nodes", c.gp.max_nodes, "gp");
        read_field(g, "constant_leaf_prob", c.gp.constant_leaf_prob, "gp");
        read_field(g, "seed_canonical", c.gp.seed_canonical, "gp");
        read_field(g, "co_optimize_k", c.gp.co_optimize_k, "gp");
    }
    if (j.contains("de")) {
        const auto& d = j.at("de");
        read_field(d, "iterations", c.de.iterations, "de");
        read_field(d, "population", c.de.population, "de");
        read_field(d, "F", c.de.F, "de");
        read_field(d, "CR", c.de.CR, "de");
    }
    if (j.contains("refine")) {
        const auto& r = j.at("refine");
        read_field(r, "expand_lo", c.refine.expand_lo, "refine");
        read_field(r, "expand_hi", c.refine.expand_hi, "refine");
        read_field(r, "local_max_iterations", c.refine.local_max_iterations, "refine");
        read_field(r, "reversion_threshold", c.refine.reversion_threshold, "refine");
        read_field(r, "fd_step", c.refine.fd_step, "refine");
        read_field(r, "grad_tol", c.refine.grad_tol, "refine");
        read_field(r, "smooth_loss", c.refine.smooth_loss, "refine");
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        read_field(t, "lr0", c.train.lr0, "train");
        read_field(t, "lr_decay", c.train.lr_decay, "train");
        read_field(t, "beta1", c.train.beta1, "train");
        read_field(t, "beta2", c.train.beta2, "train");
        read_field(t, "adam_eps", c.train.adam_eps, "train");
        read_field(t, "batch_size", c.train.batch_size, "train");
        read_field(t, "max_epochs", c.train.max_epochs, "train");
        read_field(t, "patience", c.train.patience, "train");
        read_field(t, "l2", c.train.l2, "train");
        read_field(t, "crack_class_weight", c.train.crack_class_weight, "train");
        read_field(t, "validation_fraction", c.train.validation_fraction, "train");
    }
    if (j.contains("ecosystem")) {
        const auto& e = j.at("ecosystem");
        read_field(e, "w_original", c.weights.w_original, "ecosystem");
        read_field(e, "w_augmented", c.weights.w_augmented, "ecosystem");
        read_field(e, "w_virtual", c.weights.w_virtual, "ecosystem");
        read_field(e, "crack_class_weight", c.weights.crack_class_weight, "ecosystem");
        read_field(e, "k_nearest", c.sparsity.k_nearest, "ecosystem");
        read_field(e, "pool_multiplier", c.sparsity.pool_multiplier, "ecosystem");
        read_field(e, "target", c.sparsity.target, "ecosystem");
        read_field(e, "uniform_fallback", c.sparsity.uniform_fallback, "ecosystem");
    }

    c.sparsity.ranges = c.ranges;
    validate(c);
    return c;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_json(ss.str());
}

}  // namespace weldcrack
