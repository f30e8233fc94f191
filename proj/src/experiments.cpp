#include "drauc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "drauc/errors.hpp"
#include "drauc/logging.hpp"
#include "drauc/parallel.hpp"

namespace drauc {

void GridSpec::validate(ModelKind kind) const {
    if (c_values.empty() || epsilon_values.empty())
        throw ConfigError("grid for " + to_string(kind) + " must be non-empty");
    if (!std::is_sorted(c_values.begin(), c_values.end()) ||
        !std::is_sorted(epsilon_values.begin(), epsilon_values.end()))
        throw ConfigError("grid values must be sorted ascending");
    for (double c : c_values)
        if (!(c > 0)) throw ConfigError("grid c values must be positive");
    for (double e : epsilon_values)
        if (e < 0) throw ConfigError("grid epsilon values must be nonnegative");
    if (!is_robust(kind) && (epsilon_values.size() != 1 || epsilon_values[0] != 0.0))
        throw ConfigError("grid for " + to_string(kind) + " must use epsilon_values == [0]");
}

GridSpec GridSpec::default_for(ModelKind kind) {
    GridSpec grid;
    if (is_robust(kind)) {
        grid.c_values = {0.1, 1, 2.5, 5, 10};
        grid.epsilon_values = {0.01, 0.1, 0.5, 1, 5, 10};
    } else {
        grid.c_values = {0.0001, 0.001, 0.01, 0.1, 1, 5, 10, 50};
        grid.epsilon_values = {0};
    }
    return grid;
}

LinearModel fit_model(ModelKind kind, const LabeledDataset& train, const HyperParams& hyper,
                      const SubgradientConfig& solver, bool standardize) {
    std::optional<Scaler> scaler;
    const LabeledDataset* input = &train;
    LabeledDataset transformed;
    if (standardize) {
        scaler = fit_standardizer(train);
        transformed = scaler->transform(train);
        input = &transformed;
    }
    LinearModel model;
    switch (kind) {
        case ModelKind::svm: model = train_svm(*input, hyper, solver); break;
        case ModelKind::d_auc: model = train_d_auc(*input, hyper, solver); break;
        case ModelKind::dr_auc_f: model = train_dr_auc_f(*input, hyper, solver); break;
        case ModelKind::dr_auc_v: model = train_dr_auc_v(*input, hyper, solver); break;
    }
    model.standardizer = std::move(scaler);
    return model;
}

double evaluate_auc(const LinearModel& model, const LabeledDataset& ds, TiePolicy policy) {
    const Eigen::VectorXd scores = model_scores(model, ds);
    std::vector<double> pos, neg;
    for (Eigen::Index i = 0; i < ds.rows(); ++i)
        (ds.labels[i] == 1 ? pos : neg).push_back(scores[i]);
    if (pos.empty() || neg.empty())
        throw DataError("AUC evaluation requires both classes");
    return auc_wmw(Eigen::Map<const Eigen::VectorXd>(pos.data(), static_cast<Eigen::Index>(pos.size())),
                   Eigen::Map<const Eigen::VectorXd>(neg.data(), static_cast<Eigen::Index>(neg.size())),
                   policy);
}

CvResult cross_validate_detailed(const LabeledDataset& ds, ModelKind kind,
                                 const GridSpec& grid, int k, std::uint64_t seed,
                                 const CvOptions& options) {
    grid.validate(kind);
    options.solver.validate();
    const auto folds = k_fold_split(ds, k, seed);

    struct Task {
        std::size_t ci, ei;
        std::size_t fold;
    };
    std::vector<Task> tasks;
    for (std::size_t ci = 0; ci < grid.c_values.size(); ++ci)
        for (std::size_t ei = 0; ei < grid.epsilon_values.size(); ++ei)
            for (std::size_t f = 0; f < folds.size(); ++f)
                tasks.push_back({ci, ei, f});

    std::vector<double> fold_auc(tasks.size());
    parallel_for(options.jobs, tasks.size(), [&](std::size_t t) {
        const Task& task = tasks[t];
        HyperParams hyper;
        hyper.c = grid.c_values[task.ci];
        hyper.epsilon = grid.epsilon_values[task.ei];
        try {
            const LinearModel model = fit_model(kind, folds[task.fold].first, hyper,
                                                options.solver, options.standardize);
            fold_auc[t] = evaluate_auc(model, folds[task.fold].second, options.tie_policy);
        } catch (const std::exception& e) {
            throw SolverError("cross-validation failed at c=" + std::to_string(hyper.c) +
                              ", epsilon=" + std::to_string(hyper.epsilon) + ", fold " +
                              std::to_string(task.fold) + ": " + e.what());
        }
    });

    CvResult result;
    bool first = true;
    std::size_t t = 0;
    for (std::size_t ci = 0; ci < grid.c_values.size(); ++ci) {
        for (std::size_t ei = 0; ei < grid.epsilon_values.size(); ++ei) {
            double mean = 0.0;
            for (std::size_t f = 0; f < folds.size(); ++f) mean += fold_auc[t++];
            mean /= static_cast<double>(folds.size());
            // Strictly-greater keeps the earliest grid point on ties,
            // which is the smallest c, then the smallest epsilon.
            if (first || mean > result.best_mean_auc) {
                first = false;
                result.best_mean_auc = mean;
                result.best.c = grid.c_values[ci];
                result.best.epsilon = grid.epsilon_values[ei];
            }
        }
    }
    return result;
}

HyperParams cross_validate(const LabeledDataset& ds, ModelKind kind, const GridSpec& grid,
                           int k, std::uint64_t seed, const CvOptions& options) {
    return cross_validate_detailed(ds, kind, grid, k, seed, options).best;
}

double worst_k_mean(const std::vector<double>& aucs, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > aucs.size())
        throw DataError("worst-k requires 1 <= k <= number of values");
    std::vector<double> sorted = aucs;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += sorted[static_cast<std::size_t>(i)];
    return sum / static_cast<double>(k);
}

double relative_difference(double auc_dr, double auc_bench) {
    if (auc_bench >= 1.0)
        throw std::domain_error("relative difference is undefined at benchmark AUC = 1");
    return (auc_dr - auc_bench) / (1.0 - auc_bench);
}

GridSpec BenchmarkConfig::grid_for(ModelKind kind) const {
    const auto it = grids.find(to_string(kind));
    return it == grids.end() ? GridSpec::default_for(kind) : it->second;
}

namespace {

double sample_std(const std::vector<double>& values, double mean) {
    if (values.size() < 2) return 0.0;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

nlohmann::json grid_to_json(const GridSpec& grid) {
    return {{"c", grid.c_values}, {"epsilon", grid.epsilon_values}};
}

nlohmann::json hyper_to_json(const HyperParams& hyper) {
    return {{"c", hyper.c}, {"epsilon", hyper.epsilon}};
}

} // namespace

std::map<ModelKind, ExperimentReport> run_benchmark(const LabeledDataset& ds,
                                                    const BenchmarkConfig& config) {
    ds.validate();
    if (config.runs < 1) throw ConfigError("runs must be at least 1");
    if (config.kinds.empty()) throw ConfigError("benchmark needs at least one model kind");
    if (config.train_size >= ds.rows())
        throw ConfigError("train_size must be smaller than the dataset");
    config.solver.validate();
    for (ModelKind kind : config.kinds) config.grid_for(kind).validate(kind);

    // The execution jobs count is deliberately not part of the echoed
    // configuration: reports must be byte-identical for any jobs value.
    nlohmann::json echo{
        {"dataset_name", config.dataset_name},
        {"runs", config.runs},
        {"train_size", config.train_size},
        {"base_seed", config.base_seed},
        {"cv_folds", config.cv_folds},
        {"worst_k", config.worst_k},
        {"standardize", config.standardize},
        {"retune_per_run", config.retune_per_run},
        {"tie_policy", to_string(config.tie_policy)},
        {"std_convention", "sample (divide by R-1)"},
        {"solver",
         {{"max_iterations", config.solver.max_iterations},
          {"initial_step", config.solver.initial_step},
          {"step_rule", "inverse_sqrt"},
          {"relative_tolerance", config.solver.relative_tolerance},
          {"patience", config.solver.patience}}},
    };
    {
        nlohmann::json kinds = nlohmann::json::array();
        nlohmann::json grids;
        for (ModelKind kind : config.kinds) {
            kinds.push_back(to_string(kind));
            grids[to_string(kind)] = grid_to_json(config.grid_for(kind));
        }
        echo["kinds"] = kinds;
        echo["grids"] = grids;
    }
    if (!config.extra_echo.is_null()) echo["cli"] = config.extra_echo;

    CvOptions cv_options;
    cv_options.standardize = config.standardize;
    cv_options.tie_policy = config.tie_policy;
    cv_options.solver = config.solver;
    cv_options.jobs = config.jobs;

    std::map<ModelKind, CvResult> tuned;
    if (!config.retune_per_run) {
        for (ModelKind kind : config.kinds) {
            log_info("cross-validating " + to_string(kind) + " on " + config.dataset_name);
            tuned[kind] = cross_validate_detailed(ds, kind, config.grid_for(kind),
                                                  config.cv_folds, config.base_seed,
                                                  cv_options);
        }
    }

    struct RunResult {
        std::vector<double> aucs;          // by kind order
        std::vector<HyperParams> hypers;   // by kind order (retune mode)
    };
    std::vector<RunResult> results(static_cast<std::size_t>(config.runs));

    CvOptions retune_options = cv_options;
    retune_options.jobs = 1;  // runs are already parallel

    parallel_for(config.jobs, static_cast<std::size_t>(config.runs), [&](std::size_t r) {
        const std::uint64_t seed = config.base_seed + 1 + r;
        try {
            const auto [train, rest] =
                stratified_sample(ds, config.train_size, seed);
            RunResult& out = results[r];
            out.aucs.resize(config.kinds.size());
            out.hypers.resize(config.kinds.size());
            for (std::size_t k = 0; k < config.kinds.size(); ++k) {
                const ModelKind kind = config.kinds[k];
                HyperParams hyper;
                if (config.retune_per_run) {
                    hyper = cross_validate(train, kind, config.grid_for(kind),
                                           config.cv_folds, seed, retune_options);
                } else {
                    hyper = tuned.at(kind).best;
                }
                out.hypers[k] = hyper;
                const LinearModel model =
                    fit_model(kind, train, hyper, config.solver, config.standardize);
                out.aucs[k] = evaluate_auc(model, rest, config.tie_policy);
            }
        } catch (const std::exception& e) {
            throw SolverError("benchmark run " + std::to_string(r + 1) + " (seed " +
                              std::to_string(seed) + ") failed: " + e.what());
        }
    });

    std::map<ModelKind, ExperimentReport> reports;
    for (std::size_t k = 0; k < config.kinds.size(); ++k) {
        const ModelKind kind = config.kinds[k];
        ExperimentReport report;
        report.dataset_name = config.dataset_name;
        report.kind = kind;
        report.base_seed = config.base_seed;
        report.cv_seed = config.base_seed;
        report.config_echo = echo;
        for (int r = 0; r < config.runs; ++r) {
            report.run_aucs.push_back(results[static_cast<std::size_t>(r)].aucs[k]);
            report.run_seeds.push_back(config.base_seed + 1 + static_cast<std::uint64_t>(r));
            if (config.retune_per_run)
                report.per_run_hyper.push_back(results[static_cast<std::size_t>(r)].hypers[k]);
        }
        if (!config.retune_per_run) {
            report.chosen_hyper = tuned.at(kind).best;
            report.cv_mean_validation_auc = tuned.at(kind).best_mean_auc;
        }
        double mean = 0.0;
        for (double a : report.run_aucs) mean += a;
        mean /= static_cast<double>(report.run_aucs.size());
        report.mean = mean;
        report.std_dev = sample_std(report.run_aucs, mean);
        report.worst_k = std::min<int>(config.worst_k, config.runs);
        report.worst_k_mean_value = worst_k_mean(report.run_aucs, report.worst_k);
        {
            std::vector<double> sorted = report.run_aucs;
            std::sort(sorted.begin(), sorted.end());
            sorted.resize(static_cast<std::size_t>(report.worst_k));
            report.worst_k_std = sample_std(sorted, report.worst_k_mean_value);
        }
        reports[kind] = std::move(report);
    }
    return reports;
}

nlohmann::json report_to_json(const ExperimentReport& report) {
    nlohmann::json j{
        {"schema_version", 1},
        {"dataset_name", report.dataset_name},
        {"model_kind", to_string(report.kind)},
        {"run_aucs", report.run_aucs},
        {"mean", report.mean},
        {"std", report.std_dev},
        {"worst_k", report.worst_k},
        {"worst_k_mean", report.worst_k_mean_value},
        {"worst_k_std", report.worst_k_std},
        {"seeds",
         {{"base_seed", report.base_seed},
          {"cv_seed", report.cv_seed},
          {"run_seeds", report.run_seeds}}},
        {"config_echo", report.config_echo},
    };
    if (report.chosen_hyper) {
        j["chosen_hyper"] = hyper_to_json(*report.chosen_hyper);
    } else {
        j["chosen_hyper"] = nullptr;
        nlohmann::json per_run = nlohmann::json::array();
        for (const HyperParams& h : report.per_run_hyper) per_run.push_back(hyper_to_json(h));
        j["per_run_hyper"] = per_run;
    }
    if (report.cv_mean_validation_auc)
        j["cv_mean_validation_auc"] = *report.cv_mean_validation_auc;
    return j;
}

namespace {

std::string format_double(double v) { return nlohmann::json(v).dump(); }

std::string format_stat(double mean, double std_dev) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f ± %.4f", mean, std_dev);
    return buf;
}

std::string format_rdiff(double dr, double bench) {
    if (bench >= 1.0) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * relative_difference(dr, bench));
    return buf;
}

} // namespace

std::string reports_to_csv(const std::vector<ExperimentReport>& reports) {
    if (reports.empty()) return "";
    std::ostringstream out;
    out << "run,seed";
    for (const auto& r : reports) out << ",auc_" << to_string(r.kind);
    out << "\n";
    const std::size_t runs = reports.front().run_aucs.size();
    for (std::size_t i = 0; i < runs; ++i) {
        out << (i + 1) << "," << reports.front().run_seeds[i];
        for (const auto& r : reports) out << "," << format_double(r.run_aucs[i]);
        out << "\n";
    }
    return out.str();
}

std::string reports_to_markdown(const std::vector<ExperimentReport>& reports) {
    if (reports.empty()) return "";
    const std::string dataset = reports.front().dataset_name;
    std::vector<const ExperimentReport*> robust, bench;
    for (const auto& r : reports)
        (is_robust(r.kind) ? robust : bench).push_back(&r);

    std::ostringstream out;
    out << "# Benchmark: " << dataset << "\n\n";
    out << "## Worst-" << reports.front().worst_k << " mean AUC\n\n";
    out << "| dataset |";
    for (const auto& r : reports) out << " " << to_string(r.kind) << " |";
    for (const auto* dr : robust)
        for (const auto* b : bench)
            out << " " << to_string(dr->kind) << " R.Diff vs " << to_string(b->kind) << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < reports.size() + robust.size() * bench.size(); ++i) out << "---|";
    out << "\n| " << dataset << " |";
    for (const auto& r : reports)
        out << " " << format_stat(r.worst_k_mean_value, r.worst_k_std) << " |";
    for (const auto* dr : robust)
        for (const auto* b : bench)
            out << " " << format_rdiff(dr->worst_k_mean_value, b->worst_k_mean_value) << " |";
    out << "\n\n## Overall mean AUC (" << reports.front().run_aucs.size() << " runs)\n\n";
    out << "| dataset |";
    for (const auto& r : reports) out << " " << to_string(r.kind) << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < reports.size(); ++i) out << "---|";
    out << "\n| " << dataset << " |";
    for (const auto& r : reports) out << " " << format_stat(r.mean, r.std_dev) << " |";
    out << "\n";
    return out.str();
}

} // namespace drauc
