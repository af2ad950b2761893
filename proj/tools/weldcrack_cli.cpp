#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weldcrack/config.hpp"
#include "weldcrack/dataset.hpp"
#include "weldcrack/model_io.hpp"
#include "weldcrack/numfmt.hpp"
#include "weldcrack/sweep.hpp"

using namespace weldcrack;

namespace {

struct Common {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 1;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "JSON run configuration file");
    cmd->add_option("--seed", c.seed, "seed override")->each([&](const std::string&) {
        c.seed_given = true;
    });
    cmd->add_option("--threads", c.threads, "worker threads where supported")
        ->check(CLI::PositiveNumber);
}

/// Seed precedence: --seed flag, then WELDCRACK_SEED, then the config file.
RunConfig effective_config(const Common& c) {
    RunConfig cfg = c.config_path.empty() ? RunConfig{} : load_config_file(c.config_path);
    if (const char* env = std::getenv("WELDCRACK_SEED"); env && !c.seed_given) {
        try {
            size_t used = 0;
            cfg.seed = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw UsageError("WELDCRACK_SEED must be a non-negative integer");
        }
    }
    if (c.seed_given) cfg.seed = c.seed;
    cfg.gp.threads = c.threads;
    std::cerr << "effective seed: " << cfg.seed << "\n";
    return cfg;
}

WeldParameters parse_sample(const std::vector<double>& v) {
    std::array<double, WeldParameters::kDim> a{};
    std::copy(v.begin(), v.end(), a.begin());
    return WeldParameters::from_array(a);
}

FittedModel model_from_files(const std::string& params_path, const std::string& expr_path,
                             const RunConfig& cfg) {
    FittedModel m;
    m.logistic = cfg.logistic;
    m.term_cfg = cfg.term_cfg;
    if (!params_path.empty()) m.theta = read_params_file(params_path).theta;
    if (!expr_path.empty()) m.expr = read_expression_file(expr_path);
    return m;
}

void cmd_augment(const Common& c, const std::string& in, const std::string& out) {
    const RunConfig cfg = effective_config(c);
    AugmentConfig ac;
    ac.n_per_sample = cfg.n_per_sample;
    ac.noise = cfg.noise;
    ac.coupling = cfg.coupling;
    ac.ranges = cfg.ranges;
    ac.seed = cfg.seed;
    write_csv_file(out, augment_dataset(read_csv_file(in), ac));
}

void cmd_discover(const Common& c, const std::string& validation, const std::string& original,
                  const std::string& out_expr, const std::string& out_params) {
    const RunConfig cfg = effective_config(c);
    GpConfig gp = cfg.gp;
    gp.seed = cfg.seed;
    const GpResult r = gp_search(read_csv_file(validation), read_csv_file(original), cfg.bounds,
                                 gp, cfg.de, cfg.logistic, cfg.term_cfg);
    write_expression_file(out_expr, r.best_expr);
    write_params_file(out_params, r.best_theta, cfg.bounds);
    std::cout << "expression: " << r.best_expr.to_prefix() << "\n";
    std::cout << "fitness: " << format_number(r.best_fitness.comprehensive)
              << " (validation " << format_number(r.best_fitness.acc_validation) << ", original "
              << format_number(r.best_fitness.acc_original) << ")\n";
    std::cout << "inner evaluations: " << r.inner_evaluations << "\n";
}

void cmd_refine(const Common& c, const std::string& params_path, const std::string& expr_path,
                const std::string& fit, const std::string& validation,
                const std::string& original, const std::string& out_params,
                const std::string& stage_log) {
    const RunConfig cfg = effective_config(c);
    const ParamsFile pf = read_params_file(params_path);
    RefineDatasets data;
    data.fit = fit.empty() ? read_csv_file(validation) : read_csv_file(fit);
    data.validation = read_csv_file(validation);
    data.original = read_csv_file(original);
    const Expression expr =
        expr_path.empty() ? Expression::canonical() : read_expression_file(expr_path);
    DeConfig de = cfg.de;
    RefineConfig rc = cfg.refine;
    rc.seed = cfg.seed;
    const RefineResult r =
        refine_pipeline(expr, pf.theta, pf.bounds, data, de, rc, cfg.logistic, cfg.term_cfg);
    write_params_file(out_params, r.theta, pf.bounds);
    if (!stage_log.empty()) {
        std::ofstream f(stage_log, std::ios::binary);
        if (!f) throw UsageError("cannot open '" + stage_log + "' for writing");
        f << "stage,evaluations,best_fitness\n";
        for (const auto& s : r.stages)
            f << s.stage << "," << s.evaluations << "," << format_number(s.best_fitness) << "\n";
    }
    for (const auto& s : r.stages)
        std::cout << s.stage << ": fitness " << format_number(s.best_fitness) << " after "
                  << s.evaluations << " evaluations\n";
}

void cmd_predict(const Common& c, const std::string& params_path, const std::string& expr_path,
                 const std::string& in, const std::string& out) {
    const RunConfig cfg = effective_config(c);
    const FittedModel m = model_from_files(params_path, expr_path, cfg);
    const Dataset data = read_csv_file(in);
    std::ofstream f(out, std::ios::binary);
    if (!f) throw UsageError("cannot open '" + out + "' for writing");
    f << kCsvHeader << ",p_crack\n";
    for (const auto& s : data) {
        for (double v : s.params.as_array()) f << format_number(v) << ",";
        f << static_cast<int>(s.label) << "," << to_string(s.source) << ","
          << format_number(s.weight) << "," << format_full(m.predict(s.params)) << "\n";
    }
}

void cmd_explain(const Common& c, const std::string& params_path,
                 const std::vector<double>& values) {
    const RunConfig cfg = effective_config(c);
    ModelParameters theta = default_refined_params();
    if (!params_path.empty()) theta = read_params_file(params_path).theta;
    const WeldParameters p = parse_sample(values);
    const TermValues t = compute_terms(p, theta, cfg.term_cfg);
    const MechanismBreakdown b = explain(p, theta, cfg.logistic, cfg.term_cfg);
    std::cout << "term,value\n";
    for (int i = 0; i < 6; ++i) std::cout << "T" << i + 1 << "," << format_full(t[i]) << "\n";
    std::cout << "mechanism,contribution\n";
    std::cout << "heat_input_x_accumulation," << format_full(b.m1) << "\n";
    std::cout << "geometry_x_wire_diameter," << format_full(b.m2) << "\n";
    std::cout << "thermal_stress_x_cooling," << format_full(b.m3) << "\n";
    std::cout << "cpi," << format_full(b.cpi) << "\n";
    std::cout << "p_crack," << format_full(b.p_crack) << "\n";
}

void cmd_generate(const Common& c, const std::string& params_path, const std::string& expr_path,
                  const std::string& reference, const std::string& out) {
    const RunConfig cfg = effective_config(c);
    const FittedModel m = model_from_files(params_path, expr_path, cfg);
    SparsityConfig sc = cfg.sparsity;
    sc.ranges = cfg.ranges;
    sc.seed = cfg.seed;
    write_csv_file(out, generate_virtual(m, read_csv_file(reference), sc));
}

void cmd_assemble(const Common& c, const std::string& original, const std::string& augmented,
                  const std::string& virt, const std::string& out) {
    const RunConfig cfg = effective_config(c);
    const Dataset a = original.empty() ? Dataset{} : read_csv_file(original);
    const Dataset b = augmented.empty() ? Dataset{} : read_csv_file(augmented);
    const Dataset v = virt.empty() ? Dataset{} : read_csv_file(virt);
    write_csv_file(out, assemble(a, b, v, cfg.weights));
}

void cmd_train(const Common& c, const std::string& in, const std::string& out_network,
               const std::string& history) {
    const RunConfig cfg = effective_config(c);
    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    tc.crack_class_weight = cfg.weights.crack_class_weight;
    const TrainResult r = train(init_network(cfg.seed), read_csv_file(in), tc);
    save_network(out_network, r.net);
    if (!history.empty()) write_history_csv(history, r.history);
    std::cout << "epochs: " << r.history.size() << ", best epoch: " << r.best_epoch << "\n";
    std::cout << "best validation loss: " << format_number(r.history[r.best_epoch].val_loss)
              << ", accuracy: " << format_number(r.history[r.best_epoch].val_acc) << "\n";
}

void cmd_evaluate(const Common& c, const std::string& network, const std::string& in) {
    effective_config(c);
    const Network net = load_network(network);
    const Metrics m = evaluate(net, read_csv_file(in));
    std::cout << "accuracy: " << format_number(m.accuracy) << "\n";
    std::cout << "weighted_accuracy: " << format_number(m.weighted_accuracy) << "\n";
    std::cout << "confusion (actual x predicted): [[" << m.confusion[0][0] << ", "
              << m.confusion[0][1] << "], [" << m.confusion[1][0] << ", " << m.confusion[1][1]
              << "]]\n";
}

void cmd_sweep(const Common& c, const std::string& params_path, const std::string& expr_path,
               const std::vector<double>& fixed, const std::vector<std::string>& grids,
               double ceiling, const std::string& out) {
    const RunConfig cfg = effective_config(c);
    const FittedModel m = model_from_files(params_path, expr_path, cfg);
    SweepSpec spec;
    spec.fixed = parse_sample(fixed);
    spec.probability_ceiling = ceiling;
    spec.ranges = cfg.ranges;
    for (const std::string& g : grids) {
        // name:min:max:steps
        std::array<std::string, 4> parts;
        size_t start = 0;
        for (int i = 0; i < 4; ++i) {
            const size_t colon = g.find(':', start);
            if ((colon == std::string::npos) != (i == 3))
                throw UsageError("grid spec '" + g + "' must look like name:min:max:steps");
            parts[i] = g.substr(start, colon == std::string::npos ? colon : colon - start);
            start = colon + 1;
        }
        int axis = -1;
        for (int i = 0; i < WeldParameters::kDim; ++i)
            if (parts[0] == kParameterNames[i]) axis = i;
        if (axis < 0) throw UsageError("grid spec '" + g + "': unknown parameter " + parts[0]);
        try {
            spec.grid[axis] = GridAxis{std::stod(parts[1]), std::stod(parts[2]),
                                       std::stoi(parts[3])};
        } catch (const std::exception&) {
            throw UsageError("grid spec '" + g + "': min:max:steps must be numeric");
        }
    }
    const SweepResult r = sweep(spec, m);
    std::ofstream f(out, std::ios::binary);
    if (!f) throw UsageError("cannot open '" + out + "' for writing");
    f << "I,tau,t_b,d_w,A_w,T_i,T_p,t_500,d,p_crack\n";
    for (const auto& row : r.rows) {
        for (double v : row.params.as_array()) f << format_number(v) << ",";
        f << format_full(row.p_crack) << "\n";
    }
    std::cout << "evaluated: " << r.evaluated << ", infeasible skipped: " << r.infeasible_skipped
              << ", in window: " << r.rows.size() << "\n";
    if (r.rows.empty()) std::cout << "notice: no grid point stays under the ceiling\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weldcrack: explainable weld hot-cracking prediction pipeline"};
    app.require_subcommand(0, 1);
    bool print_default_config = false;
    app.add_flag("--print-default-config", print_default_config,
                 "write the default configuration document to stdout and exit");

    Common common;
    std::string in, out, validation, original, augmented, virt, fit;
    std::string params_path, expr_path, out_params, out_expr, network, history, stage_log;
    std::vector<double> sample_values, fixed_values;
    std::vector<std::string> grid_specs;
    double ceiling = 0.10;

    auto* augment_cmd = app.add_subcommand("augment", "noise + coupling + constraint enforcement");
    add_common(augment_cmd, common);
    augment_cmd->add_option("--input", in, "parent samples CSV")->required();
    augment_cmd->add_option("--output", out, "augmented CSV")->required();

    auto* discover_cmd = app.add_subcommand("discover", "GP structure search with nested DE fit");
    add_common(discover_cmd, common);
    discover_cmd->add_option("--validation", validation, "validation CSV")->required();
    discover_cmd->add_option("--original", original, "original CSV")->required();
    discover_cmd->add_option("--out-expression", out_expr, "discovered expression file")->required();
    discover_cmd->add_option("--out-params", out_params, "fitted constants file")->required();

    auto* refine_cmd = app.add_subcommand("refine", "DE + local descent around a parameter set");
    add_common(refine_cmd, common);
    refine_cmd->add_option("--params", params_path, "initial constants + global bounds")->required();
    refine_cmd->add_option("--expression", expr_path, "expression file (default: canonical)");
    refine_cmd->add_option("--fit", fit, "fit CSV for the smooth local objective");
    refine_cmd->add_option("--validation", validation, "validation CSV")->required();
    refine_cmd->add_option("--original", original, "original CSV")->required();
    refine_cmd->add_option("--out-params", out_params, "refined constants file")->required();
    refine_cmd->add_option("--stage-log", stage_log, "per-stage fitness CSV");

    auto* predict_cmd = app.add_subcommand("predict", "crack probabilities for a sample CSV");
    add_common(predict_cmd, common);
    predict_cmd->add_option("--params", params_path, "constants file (default: shipped refined)");
    predict_cmd->add_option("--expression", expr_path, "expression file (default: canonical)");
    predict_cmd->add_option("--input", in, "samples CSV")->required();
    predict_cmd->add_option("--output", out, "probability CSV")->required();

    auto* explain_cmd = app.add_subcommand("explain", "per-mechanism breakdown of one weld");
    add_common(explain_cmd, common);
    explain_cmd->add_option("--params", params_path, "constants file (default: shipped refined)");
    explain_cmd
        ->add_option("--sample", sample_values, "nine values: I tau t_b d_w A_w T_i T_p t_500 d")
        ->expected(9)
        ->required();

    auto* generate_cmd = app.add_subcommand("generate", "sparsity-targeted virtual samples");
    add_common(generate_cmd, common);
    generate_cmd->add_option("--params", params_path, "constants file (default: shipped refined)");
    generate_cmd->add_option("--expression", expr_path, "expression file (default: canonical)");
    generate_cmd->add_option("--reference", in, "reference CSV for sparsity scoring")->required();
    generate_cmd->add_option("--output", out, "virtual samples CSV")->required();

    auto* assemble_cmd = app.add_subcommand("assemble", "three-source weighted union");
    add_common(assemble_cmd, common);
    assemble_cmd->add_option("--original", original, "original CSV");
    assemble_cmd->add_option("--augmented", augmented, "augmented CSV");
    assemble_cmd->add_option("--virtual", virt, "virtual CSV");
    assemble_cmd->add_option("--output", out, "assembled CSV")->required();

    auto* train_cmd = app.add_subcommand("train", "neural classifier on a weighted CSV");
    add_common(train_cmd, common);
    train_cmd->add_option("--input", in, "weighted training CSV")->required();
    train_cmd->add_option("--out-network", network, "network file")->required();
    train_cmd->add_option("--history", history, "epoch history CSV");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "metrics of a network on a CSV");
    add_common(evaluate_cmd, common);
    evaluate_cmd->add_option("--network", network, "network file")->required();
    evaluate_cmd->add_option("--input", in, "evaluation CSV")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "low-risk process-window scan");
    add_common(sweep_cmd, common);
    sweep_cmd->add_option("--params", params_path, "constants file (default: shipped refined)");
    sweep_cmd->add_option("--expression", expr_path, "expression file (default: canonical)");
    sweep_cmd
        ->add_option("--fixed", fixed_values, "nine baseline values: I tau t_b d_w A_w T_i T_p t_500 d")
        ->expected(9)
        ->required();
    sweep_cmd->add_option("--grid", grid_specs, "swept axis as name:min:max:steps (repeatable)");
    sweep_cmd->add_option("--ceiling", ceiling, "probability ceiling (default 0.10)");
    sweep_cmd->add_option("--output", out, "window CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (print_default_config) {
            std::cout << default_config_json();
            return 0;
        }
        if (augment_cmd->parsed()) cmd_augment(common, in, out);
        else if (discover_cmd->parsed())
            cmd_discover(common, validation, original, out_expr, out_params);
        else if (refine_cmd->parsed())
            cmd_refine(common, params_path, expr_path, fit, validation, original, out_params,
                       stage_log);
        else if (predict_cmd->parsed()) cmd_predict(common, params_path, expr_path, in, out);
        else if (explain_cmd->parsed()) cmd_explain(common, params_path, sample_values);
        else if (generate_cmd->parsed()) cmd_generate(common, params_path, expr_path, in, out);
        else if (assemble_cmd->parsed()) cmd_assemble(common, original, augmented, virt, out);
        else if (train_cmd->parsed()) cmd_train(common, in, network, history);
        else if (evaluate_cmd->parsed()) cmd_evaluate(common, network, in);
        else if (sweep_cmd->parsed())
            cmd_sweep(common, params_path, expr_path, fixed_values, grid_specs, ceiling, out);
        else {
            std::cerr << app.help();
            return 2;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ExpressionError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
