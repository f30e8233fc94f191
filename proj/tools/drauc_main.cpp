#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "drauc/dataset.hpp"
#include "drauc/errors.hpp"
#include "drauc/experiments.hpp"
#include "drauc/file_io.hpp"
#include "drauc/logging.hpp"
#include "drauc/metrics.hpp"
#include "drauc/models.hpp"
#include "drauc/pairing.hpp"

namespace {

using drauc::ConfigError;
using nlohmann::json;

void require_keys(const json& obj, const std::string& context,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(context + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (allowed.find(key) == allowed.end())
            throw ConfigError("unknown key \"" + key + "\" in " + context);
    }
}

json load_config_file(const std::string& path) {
    if (!std::filesystem::exists(path))
        throw ConfigError("config file not found: " + path);
    json config;
    try {
        config = json::parse(drauc::read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse config file " + path + ": " + e.what());
    }
    require_keys(config, "config",
                 {"data", "model", "models", "hyper", "grids", "split", "runs", "worst_k",
                  "tie_policy", "standardize", "retune_per_run", "solver", "output", "jobs",
                  "epsilon"});
    if (config.contains("data"))
        require_keys(config["data"], "config.data", {"path", "label_column", "positive_label"});
    if (config.contains("hyper")) require_keys(config["hyper"], "config.hyper", {"c", "epsilon"});
    if (config.contains("split"))
        require_keys(config["split"], "config.split", {"seed", "train_size", "k_folds"});
    if (config.contains("solver"))
        require_keys(config["solver"], "config.solver",
                     {"max_iterations", "initial_step", "relative_tolerance", "patience"});
    if (config.contains("output"))
        require_keys(config["output"], "config.output", {"model", "dir", "roc", "report"});
    if (config.contains("grids")) {
        require_keys(config["grids"], "config.grids", {"svm", "d-auc", "dr-auc-f", "dr-auc-v"});
        for (const auto& [kind, grid] : config["grids"].items())
            require_keys(grid, "config.grids." + kind, {"c", "epsilon"});
    }
    return config;
}

template <typename T>
void from_config(const json& config, const std::string& outer, const std::string& key, T& out) {
    if (outer.empty()) {
        if (config.contains(key)) out = config.at(key).get<T>();
    } else if (config.contains(outer) && config.at(outer).contains(key)) {
        out = config.at(outer).at(key).get<T>();
    }
}

/// Everything a subcommand may need, pre-merge: defaults, then config
/// file values, then explicitly provided flags.
struct Options {
    std::string config_path;
    std::string data_path, label_column, positive_label;
    std::string model;  // kind name, or model file for eval/worst-case
    std::string models_csv;
    double c = 1.0;
    double epsilon = 0.0;
    std::uint64_t seed = 42;
    int train_size = 0;  // 0 means: use every row (train command)
    int k_folds = 5;
    int runs = 100;
    int worst_k = 10;
    int jobs = 1;
    bool standardize = true;
    bool retune_per_run = false;
    std::string tie_policy = "half_credit";
    drauc::SubgradientConfig solver;
    std::string out, out_dir, roc_path;
    std::string c_grid_csv, epsilon_grid_csv;
    std::map<std::string, drauc::GridSpec> grids;

    CLI::App* cmd = nullptr;

    bool given(const std::string& flag) const {
        const CLI::Option* option = cmd->get_option_no_throw(flag);
        return option != nullptr && option->count() > 0;
    }

    void merge_config() {
        if (config_path.empty()) return;
        const json config = load_config_file(config_path);
        if (!given("--data")) from_config(config, "data", "path", data_path);
        if (!given("--label")) from_config(config, "data", "label_column", label_column);
        if (!given("--positive")) from_config(config, "data", "positive_label", positive_label);
        if (!given("--model") && config.contains("model")) model = config["model"].get<std::string>();
        if (!given("--models") && config.contains("models")) {
            models_csv.clear();
            for (const auto& k : config["models"]) {
                if (!models_csv.empty()) models_csv += ",";
                models_csv += k.get<std::string>();
            }
        }
        if (!given("--c")) from_config(config, "hyper", "c", c);
        if (!given("--epsilon")) {
            from_config(config, "hyper", "epsilon", epsilon);
            from_config(config, "", "epsilon", epsilon);
        }
        if (!given("--seed")) from_config(config, "split", "seed", seed);
        if (!given("--train-size")) from_config(config, "split", "train_size", train_size);
        if (!given("--folds")) from_config(config, "split", "k_folds", k_folds);
        if (!given("--runs")) from_config(config, "", "runs", runs);
        if (!given("--worst-k")) from_config(config, "", "worst_k", worst_k);
        if (!given("--jobs")) from_config(config, "", "jobs", jobs);
        if (!given("--standardize") && !given("--no-standardize"))
            from_config(config, "", "standardize", standardize);
        if (!given("--retune-per-run")) from_config(config, "", "retune_per_run", retune_per_run);
        if (!given("--tie-policy")) from_config(config, "", "tie_policy", tie_policy);
        if (!given("--max-iterations"))
            from_config(config, "solver", "max_iterations", solver.max_iterations);
        if (!given("--initial-step"))
            from_config(config, "solver", "initial_step", solver.initial_step);
        if (!given("--relative-tolerance"))
            from_config(config, "solver", "relative_tolerance", solver.relative_tolerance);
        if (!given("--patience")) from_config(config, "solver", "patience", solver.patience);
        if (!given("--out")) {
            from_config(config, "output", "model", out);
            from_config(config, "output", "report", out);
        }
        if (!given("--out-dir")) from_config(config, "output", "dir", out_dir);
        if (!given("--roc")) from_config(config, "output", "roc", roc_path);
        if (config.contains("grids")) {
            for (const auto& [kind, grid] : config["grids"].items()) {
                drauc::GridSpec spec;
                spec.c_values = grid.value("c", std::vector<double>{});
                spec.epsilon_values = grid.value("epsilon", std::vector<double>{0.0});
                grids[kind] = spec;
            }
        }
    }

    json data_echo() const {
        return {{"path", data_path}, {"label_column", label_column},
                {"positive_label", positive_label}};
    }

    json solver_echo() const {
        return {{"max_iterations", solver.max_iterations},
                {"initial_step", solver.initial_step},
                {"step_rule", "inverse_sqrt"},
                {"relative_tolerance", solver.relative_tolerance},
                {"patience", solver.patience}};
    }
};

void add_data_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--data", opt.data_path, "CSV dataset path");
    cmd->add_option("--label", opt.label_column, "name of the label column");
    cmd->add_option("--positive", opt.positive_label, "label value mapped to +1");
}

void add_solver_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--max-iterations", opt.solver.max_iterations, "subgradient iteration cap");
    cmd->add_option("--initial-step", opt.solver.initial_step, "subgradient step at k=1");
    cmd->add_option("--relative-tolerance", opt.solver.relative_tolerance,
                    "relative improvement that resets patience");
    cmd->add_option("--patience", opt.solver.patience, "iterations without improvement before stop");
}

void add_common_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config_path, "JSON configuration file (flags override it)");
    cmd->add_option("--tie-policy", opt.tie_policy, "count_as_success or half_credit");
    cmd->add_flag("--standardize,!--no-standardize", opt.standardize,
                  "z-score features using the training split (default on)");
}

void require_data(const Options& opt) {
    if (opt.data_path.empty()) throw ConfigError("missing --data");
    if (opt.label_column.empty()) throw ConfigError("missing --label");
    if (opt.positive_label.empty()) throw ConfigError("missing --positive");
    if (!std::filesystem::exists(opt.data_path))
        throw ConfigError("data file not found: " + opt.data_path);
}

std::vector<drauc::ModelKind> parse_kinds(const std::string& csv) {
    std::vector<drauc::ModelKind> kinds;
    std::string item;
    std::stringstream ss(csv);
    while (std::getline(ss, item, ','))
        if (!item.empty()) kinds.push_back(drauc::model_kind_from_string(item));
    if (kinds.empty()) throw ConfigError("no model kinds given");
    return kinds;
}

std::vector<double> parse_grid_values(const std::string& csv, const std::string& what) {
    std::vector<double> values;
    std::string item;
    std::stringstream ss(csv);
    while (std::getline(ss, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse " + what + " value \"" + item + "\"");
        }
    }
    return values;
}

int run_train(Options& opt) {
    opt.merge_config();
    require_data(opt);
    if (opt.model.empty()) throw ConfigError("missing --model");
    const drauc::ModelKind kind = drauc::model_kind_from_string(opt.model);
    drauc::HyperParams hyper{opt.c, opt.epsilon};
    hyper.validate(kind);
    opt.solver.validate();
    const drauc::TiePolicy policy = drauc::tie_policy_from_string(opt.tie_policy);
    if (opt.out.empty()) throw ConfigError("missing --out (model output path)");
    if (opt.train_size < 0) throw ConfigError("train_size must be nonnegative");

    drauc::LabeledDataset ds =
        drauc::load_csv(opt.data_path, opt.label_column, opt.positive_label);
    if (opt.train_size > 0)
        ds = drauc::stratified_sample(ds, opt.train_size, opt.seed).first;

    const drauc::LinearModel model =
        drauc::fit_model(kind, ds, hyper, opt.solver, opt.standardize);
    drauc::save_model(model, opt.out);

    const double auc = drauc::evaluate_auc(model, ds, policy);
    std::cout << "final objective: " << model.training_meta.final_objective << "\n";
    std::cout << "training auc (" << opt.tie_policy << "): " << auc << "\n";
    std::cout << "model written to " << opt.out << "\n";
    return 0;
}

int run_eval(Options& opt) {
    opt.merge_config();
    require_data(opt);
    if (opt.model.empty()) throw ConfigError("missing --model (model file)");
    if (!std::filesystem::exists(opt.model))
        throw ConfigError("model file not found: " + opt.model);

    const drauc::LinearModel model = drauc::load_model(opt.model);
    const drauc::LabeledDataset ds =
        drauc::load_csv(opt.data_path, opt.label_column, opt.positive_label);
    const double auc_ge = drauc::evaluate_auc(model, ds, drauc::TiePolicy::count_as_success);
    const double auc_half = drauc::evaluate_auc(model, ds, drauc::TiePolicy::half_credit);
    std::cout << "auc count_as_success: " << auc_ge << "\n";
    std::cout << "auc half_credit: " << auc_half << "\n";
    if (!opt.roc_path.empty()) {
        const Eigen::VectorXd scores = drauc::model_scores(model, ds);
        const drauc::RocCurve curve = drauc::roc_curve(scores, ds.labels);
        drauc::write_file_atomic(opt.roc_path, drauc::roc_to_csv(curve));
        std::cout << "roc written to " << opt.roc_path << "\n";
    }
    return 0;
}

int run_worst_case(Options& opt) {
    opt.merge_config();
    require_data(opt);
    if (opt.model.empty()) throw ConfigError("missing --model (model file)");
    if (!std::filesystem::exists(opt.model))
        throw ConfigError("model file not found: " + opt.model);
    if (opt.out.empty()) throw ConfigError("missing --out (analysis output path)");
    if (opt.epsilon < 0) throw ConfigError("epsilon must be nonnegative");

    const drauc::LinearModel model = drauc::load_model(opt.model);
    drauc::LabeledDataset ds =
        drauc::load_csv(opt.data_path, opt.label_column, opt.positive_label);
    if (model.standardizer) ds = model.standardizer->transform(ds);

    const drauc::AtomSet atoms = drauc::build_atoms(ds);
    if (atoms.m > drauc::kWorstCaseAtomCap)
        throw drauc::DataError("worst-case analysis supports at most " +
                               std::to_string(drauc::kWorstCaseAtomCap) + " atoms, got " +
                               std::to_string(atoms.m));
    const drauc::DistanceMatrix dist = drauc::distance_matrix(atoms);
    const auto [plan, value] =
        drauc::worst_case_distribution(model.weights, atoms, dist, opt.epsilon);
    const double risk = drauc::empirical_pair_risk(model.weights, atoms);

    json support = json::array();
    double budget = 0.0;
    for (Eigen::Index i = 0; i < atoms.m; ++i)
        for (Eigen::Index j = 0; j < atoms.m; ++j)
            budget += dist.entries(i, j) * plan.k(i, j);
    for (Eigen::Index j = 0; j < atoms.m; ++j)
        if (plan.p[j] > 1e-12)
            support.push_back({{"atom", j},
                               {"i_index", atoms.atom(j).i_index},
                               {"j_index", atoms.atom(j).j_index},
                               {"probability", plan.p[j]}});
    const json out{
        {"schema_version", 1},
        {"epsilon", opt.epsilon},
        {"atom_count", atoms.m},
        {"worst_case_expected_loss", value},
        {"empirical_risk", risk},
        {"transport_budget_used", budget},
        {"p", std::vector<double>(plan.p.data(), plan.p.data() + plan.p.size())},
        {"support", support},
        {"config_echo",
         {{"data", opt.data_echo()}, {"model", opt.model}, {"epsilon", opt.epsilon}}},
    };
    drauc::write_file_atomic(opt.out, out.dump(2) + "\n");
    std::cout << "worst-case expected loss: " << value << " (empirical " << risk << ")\n";
    std::cout << "analysis written to " << opt.out << "\n";
    return 0;
}

int run_cv(Options& opt) {
    opt.merge_config();
    require_data(opt);
    if (opt.model.empty()) throw ConfigError("missing --model");
    const drauc::ModelKind kind = drauc::model_kind_from_string(opt.model);
    opt.solver.validate();
    const drauc::TiePolicy policy = drauc::tie_policy_from_string(opt.tie_policy);

    drauc::GridSpec grid = drauc::GridSpec::default_for(kind);
    if (opt.grids.count(drauc::to_string(kind))) grid = opt.grids.at(drauc::to_string(kind));
    if (!opt.c_grid_csv.empty()) grid.c_values = parse_grid_values(opt.c_grid_csv, "--c-grid");
    if (!opt.epsilon_grid_csv.empty())
        grid.epsilon_values = parse_grid_values(opt.epsilon_grid_csv, "--epsilon-grid");
    grid.validate(kind);

    const drauc::LabeledDataset ds =
        drauc::load_csv(opt.data_path, opt.label_column, opt.positive_label);
    drauc::CvOptions cv_options;
    cv_options.standardize = opt.standardize;
    cv_options.tie_policy = policy;
    cv_options.solver = opt.solver;
    cv_options.jobs = opt.jobs;
    const drauc::CvResult result =
        drauc::cross_validate_detailed(ds, kind, grid, opt.k_folds, opt.seed, cv_options);

    std::cout << "chosen c: " << result.best.c << "\n";
    std::cout << "chosen epsilon: " << result.best.epsilon << "\n";
    std::cout << "mean validation auc: " << result.best_mean_auc << "\n";
    if (!opt.out.empty()) {
        const json out{
            {"schema_version", 1},
            {"model_kind", drauc::to_string(kind)},
            {"chosen_hyper", {{"c", result.best.c}, {"epsilon", result.best.epsilon}}},
            {"mean_validation_auc", result.best_mean_auc},
            {"config_echo",
             {{"data", opt.data_echo()},
              {"k_folds", opt.k_folds},
              {"seed", opt.seed},
              {"standardize", opt.standardize},
              {"tie_policy", opt.tie_policy},
              {"solver", opt.solver_echo()},
              {"grid", {{"c", grid.c_values}, {"epsilon", grid.epsilon_values}}}}},
        };
        drauc::write_file_atomic(opt.out, out.dump(2) + "\n");
    }
    return 0;
}

int run_benchmark_cmd(Options& opt) {
    opt.merge_config();
    require_data(opt);
    if (opt.models_csv.empty()) throw ConfigError("missing --models");
    if (opt.out_dir.empty()) throw ConfigError("missing --out-dir");
    if (opt.jobs < 1) throw ConfigError("--jobs must be at least 1");

    drauc::BenchmarkConfig config;
    config.kinds = parse_kinds(opt.models_csv);
    config.runs = opt.runs;
    config.train_size = opt.train_size > 0 ? opt.train_size : 60;
    config.base_seed = opt.seed;
    config.cv_folds = opt.k_folds;
    config.worst_k = opt.worst_k;
    config.standardize = opt.standardize;
    config.retune_per_run = opt.retune_per_run;
    config.tie_policy = drauc::tie_policy_from_string(opt.tie_policy);
    config.solver = opt.solver;
    config.grids = opt.grids;
    config.jobs = opt.jobs;
    config.dataset_name = std::filesystem::path(opt.data_path).stem().string();
    config.extra_echo = {{"data", opt.data_echo()}};
    for (drauc::ModelKind kind : config.kinds) config.grid_for(kind).validate(kind);
    config.solver.validate();

    const drauc::LabeledDataset ds =
        drauc::load_csv(opt.data_path, opt.label_column, opt.positive_label);
    const drauc::SplitSpec split{config.base_seed, config.train_size, config.cv_folds};
    split.validate(ds);
    const auto reports = drauc::run_benchmark(ds, config);

    std::vector<drauc::ExperimentReport> ordered;
    for (drauc::ModelKind kind : config.kinds) ordered.push_back(reports.at(kind));

    const std::filesystem::path dir(opt.out_dir);
    for (const auto& report : ordered) {
        const std::string path =
            (dir / ("report_" + drauc::to_string(report.kind) + ".json")).string();
        drauc::write_file_atomic(path, drauc::report_to_json(report).dump(2) + "\n");
    }
    drauc::write_file_atomic((dir / "runs.csv").string(), drauc::reports_to_csv(ordered));
    const std::string markdown = drauc::reports_to_markdown(ordered);
    drauc::write_file_atomic((dir / "summary.md").string(), markdown);
    std::cout << markdown;
    std::cout << "reports written to " << opt.out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear binary classifiers that maximize AUC, including two "
                 "distributionally robust variants over Kantorovich ambiguity balls"};
    app.require_subcommand(1);

    Options train_opt, eval_opt, wc_opt, cv_opt, bench_opt;

    CLI::App* train = app.add_subcommand("train", "train a model and write it as JSON");
    train->add_option("--model", train_opt.model, "svm, d-auc, dr-auc-f or dr-auc-v");
    train->add_option("--c", train_opt.c, "loss weight (positive)");
    train->add_option("--epsilon", train_opt.epsilon, "ambiguity radius (robust kinds only)");
    train->add_option("--seed", train_opt.seed, "seed for the optional training subsample");
    train->add_option("--train-size", train_opt.train_size,
                      "stratified subsample size (0 = use all rows)");
    train->add_option("--out", train_opt.out, "output model path");
    add_data_flags(train, train_opt);
    add_solver_flags(train, train_opt);
    add_common_flags(train, train_opt);
    train_opt.cmd = train;

    CLI::App* eval = app.add_subcommand("eval", "evaluate a trained model on a dataset");
    eval->add_option("--model", eval_opt.model, "model JSON file");
    eval->add_option("--roc", eval_opt.roc_path, "write the ROC curve as fpr,tpr CSV");
    add_data_flags(eval, eval_opt);
    add_common_flags(eval, eval_opt);
    eval_opt.cmd = eval;

    CLI::App* wc = app.add_subcommand(
        "worst-case", "exact worst-case pair distribution for a model within a budget");
    wc->add_option("--model", wc_opt.model, "model JSON file");
    wc->add_option("--epsilon", wc_opt.epsilon, "transport budget");
    wc->add_option("--out", wc_opt.out, "output JSON path");
    add_data_flags(wc, wc_opt);
    add_common_flags(wc, wc_opt);
    wc_opt.cmd = wc;

    CLI::App* cv = app.add_subcommand("cv", "grid-search cross-validation for one model kind");
    cv->add_option("--model", cv_opt.model, "svm, d-auc, dr-auc-f or dr-auc-v");
    cv->add_option("--c-grid", cv_opt.c_grid_csv, "comma-separated c candidates");
    cv->add_option("--epsilon-grid", cv_opt.epsilon_grid_csv,
                   "comma-separated epsilon candidates");
    cv->add_option("--folds", cv_opt.k_folds, "number of folds");
    cv->add_option("--seed", cv_opt.seed, "fold seed");
    cv->add_option("--jobs", cv_opt.jobs, "parallel workers");
    cv->add_option("--out", cv_opt.out, "optional JSON result path");
    add_data_flags(cv, cv_opt);
    add_solver_flags(cv, cv_opt);
    add_common_flags(cv, cv_opt);
    cv_opt.cmd = cv;

    CLI::App* bench = app.add_subcommand("benchmark", "the full small-training-set protocol");
    bench->add_option("--models", bench_opt.models_csv, "comma-separated model kinds");
    bench->add_option("--runs", bench_opt.runs, "number of repeated experiments");
    bench->add_option("--train-size", bench_opt.train_size, "training points per run");
    bench->add_option("--seed", bench_opt.seed, "base seed");
    bench->add_option("--folds", bench_opt.k_folds, "cross-validation folds");
    bench->add_option("--worst-k", bench_opt.worst_k, "worst-run count for the robustness stat");
    bench->add_option("--jobs", bench_opt.jobs, "parallel workers");
    bench->add_flag("--retune-per-run", bench_opt.retune_per_run,
                    "re-run cross-validation inside every run (default: tune once)");
    bench->add_option("--out-dir", bench_opt.out_dir, "report output directory");
    add_data_flags(bench, bench_opt);
    add_solver_flags(bench, bench_opt);
    add_common_flags(bench, bench_opt);
    bench_opt.cmd = bench;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (train->parsed()) return run_train(train_opt);
        if (eval->parsed()) return run_eval(eval_opt);
        if (wc->parsed()) return run_worst_case(wc_opt);
        if (cv->parsed()) return run_cv(cv_opt);
        if (bench->parsed()) return run_benchmark_cmd(bench_opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
