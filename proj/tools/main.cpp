// thetafit command line: simulate -> train -> forecast -> evaluate -> plot.
// Every command is deterministic given its inputs and --seed; artifacts are
// byte-identical across reruns.

#include "thetafit/evaluate.hpp"
#include "thetafit/forecast.hpp"
#include "thetafit/io.hpp"
#include "thetafit/likelihood.hpp"
#include "thetafit/models.hpp"
#include "thetafit/simulate.hpp"
#include "thetafit/svg.hpp"
#include "thetafit/train.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace thetafit;

constexpr const char* kColorTrue = "#1f77b4";
constexpr const char* kColorFit = "#d62728";
constexpr const char* kColorBand95 = "#9ecae1";
constexpr const char* kColorBand68 = "#4292c6";

std::vector<int> parse_widths(const std::string& text) {
    std::vector<int> widths;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            widths.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw ConfigError("bad layer width '" + tok + "' in --widths");
        }
    }
    return widths;
}

MlpSpec make_network_spec(const std::string& widths_flag, const std::vector<HeadKind>& heads) {
    MlpSpec spec;
    if (widths_flag.empty()) {
        spec.layer_widths = {1, 32, 32, 32, static_cast<int>(heads.size())};
    } else {
        spec.layer_widths = parse_widths(widths_flag);
    }
    spec.heads = heads;
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
    std::string model;
    std::string case_name;
    std::string out;
    std::uint64_t seed = 0;
    std::size_t n = 0;  // 0 = model default
    double x0 = std::numeric_limits<double>::quiet_NaN();
    double horizon = 0.0;
};

void cmd_simulate(const SimulateOptions& opt) {
    if (!opt.model.empty()) {
        SdeModelSpec model = builtin_sde(opt.model);
        const double x0 = std::isnan(opt.x0) ? model.x0 : opt.x0;
        const double horizon = opt.horizon > 0.0 ? opt.horizon : model.horizon;
        const std::size_t n = opt.n > 0 ? opt.n : model.grid_steps();
        Rng rng(opt.seed);
        const Trajectory traj = euler_path(model, true_theta_fn(model), x0, horizon, n, rng);
        write_trajectory_csv(opt.out, traj);
        std::cout << "model=" << model.name << " n=" << n << " h=" << format_double(traj.step)
                  << " T=" << format_double(horizon) << " -> " << opt.out << "\n";
    } else {
        RegressionCaseSpec spec = builtin_regression(opt.case_name);
        if (opt.n > 0) spec.n = opt.n;
        Rng rng(opt.seed);
        const RegressionDataset data = regression_sample(spec, rng);
        write_dataset_csv(opt.out, data);
        std::cout << "case=" << spec.name << " n=" << spec.n << " t in [0, 2*pi) -> " << opt.out
                  << "\n";
    }
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
    std::string model;
    std::string case_name;
    std::string data;
    std::string weights_out;
    std::string loss_out;
    std::string widths;
    std::uint64_t seed = 0;
    std::size_t epochs = 100;
    std::size_t batch_size = 64;
    std::size_t stride = 1;
    std::size_t checkpoint_every = 0;
    std::string checkpoint_prefix;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    bool no_shuffle = false;
};

TrainConfig to_train_config(const TrainOptions& opt) {
    TrainConfig cfg;
    cfg.batch_size = opt.batch_size;
    cfg.epochs = opt.epochs;
    cfg.learning_rate = opt.learning_rate;
    cfg.beta1 = opt.beta1;
    cfg.beta2 = opt.beta2;
    cfg.eps = opt.eps;
    cfg.seed = opt.seed;
    cfg.shuffle = !opt.no_shuffle;
    return cfg;
}

EpochCallback checkpoint_callback(const TrainOptions& opt, const MlpSpec& spec) {
    if (opt.checkpoint_every == 0) return {};
    const std::string prefix =
        opt.checkpoint_prefix.empty() ? opt.weights_out : opt.checkpoint_prefix;
    return [&opt, spec, prefix](std::size_t epoch, double loss, const Weights& w) {
        if (epoch % opt.checkpoint_every != 0) return;
        const std::string path = prefix + ".epoch" + std::to_string(epoch);
        write_weights_file(path, spec, w, CheckpointMeta{epoch, loss});
    };
}

void note_overparameterized(const MlpSpec& spec, std::size_t n_terms) {
    if (spec.weight_count() >= n_terms) {
        std::cerr << "note: " << spec.weight_count() << " weights vs " << n_terms
                  << " loss terms; the fit is over-parameterized\n";
    }
}

void cmd_train(const TrainOptions& opt) {
    const TrainConfig cfg = to_train_config(opt);
    FitResult result;
    MlpSpec spec;

    if (!opt.model.empty()) {
        const SdeModelSpec model = builtin_sde(opt.model);
        Trajectory traj = read_trajectory_csv(opt.data);
        if (opt.stride > 1) traj = subsample(traj, opt.stride);
        spec = make_network_spec(opt.widths, model.heads);
        note_overparameterized(spec, traj.transitions());

        const LossBuilder builder = [&](Tape& tape, std::span<const Expr> w,
                                        std::span<const std::size_t> batch) {
            const ThetaNodeFn theta = [&](Tape& t, double time) {
                const std::vector<Expr> raw = mlp_forward(spec, t, w, time);
                return apply_heads(raw, spec.heads);
            };
            return sde_quasi_nll(tape, model, theta, traj, batch);
        };
        result = fit(cfg, builder, traj.transitions(), mlp_init(spec, opt.seed),
                     checkpoint_callback(opt, spec));
    } else {
        const RegressionDataset data = read_dataset_csv(opt.data);
        const std::vector<HeadKind> heads = RegressionCaseSpec::heads();
        spec = make_network_spec(opt.widths, heads);
        note_overparameterized(spec, data.size());

        const LossBuilder builder = [&](Tape& tape, std::span<const Expr> w,
                                        std::span<const std::size_t> batch) {
            const ThetaNodeFn theta = [&](Tape& t, double time) {
                const std::vector<Expr> raw = mlp_forward(spec, t, w, time);
                return apply_heads(raw, spec.heads);
            };
            return regression_nll_2d(tape, theta, data, batch);
        };
        result = fit(cfg, builder, data.size(), mlp_init(spec, opt.seed),
                     checkpoint_callback(opt, spec));
    }

    write_weights_file(opt.weights_out, spec, result.weights);
    if (!opt.loss_out.empty()) write_loss_csv(opt.loss_out, result.loss_history);
    std::cout << "epochs=" << result.epochs_run
              << " final_loss=" << format_double(result.loss_history.back())
              << " weights=" << opt.weights_out << "\n";
}

// ---------------------------------------------------------------------------
// forecast

struct ForecastOptions {
    std::string model;
    std::string weights;
    std::string data;
    std::string out;
    std::uint64_t seed = 0;
    std::size_t steps = 500;
    std::size_t carrier_paths = 1;
    double alpha = 0.95;
    bool in_sample = false;
};

void cmd_forecast(const ForecastOptions& opt) {
    const SdeModelSpec model = builtin_sde(opt.model);
    const WeightsFile wf = read_weights_file(opt.weights);
    if (wf.spec.heads != model.heads) {
        throw ConfigError("weights file heads do not match model '" + model.name + "'");
    }
    const Trajectory traj = read_trajectory_csv(opt.data);

    const double x_start = opt.in_sample ? traj.values.front() : traj.values.back();
    const double t_start = opt.in_sample ? traj.times.front() : traj.times.back();
    std::size_t steps = opt.steps;
    if (opt.in_sample) steps = std::min(steps, traj.transitions());

    Rng rng(opt.seed);
    const Forecast fc = mc_forecast(model, mlp_theta_fn(wf.spec, wf.weights), x_start, steps,
                                    traj.step, opt.alpha, rng, t_start, opt.carrier_paths);
    write_forecast_csv(opt.out, fc);
    std::cout << "forecast steps=" << steps << " alpha=" << opt.alpha << " from t="
              << format_double(t_start) << " -> " << opt.out << "\n";
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOptions {
    std::string model;
    std::string case_name;
    std::string weights;
    std::string out;
    std::string qq_out;
    std::string endpoints_out;
    std::uint64_t seed = 0;
    std::size_t paths = 500;
    std::size_t n = 0;
    bool use_true_theta = false;
};

std::vector<double> theta_table(const SdeModelSpec& model, const ThetaFn& fn,
                                const std::vector<double>& times) {
    std::vector<double> table(times.size() * static_cast<std::size_t>(model.theta_dim));
    std::vector<double> row(static_cast<std::size_t>(model.theta_dim));
    for (std::size_t k = 0; k < times.size(); ++k) {
        fn(times[k], row);
        for (int j = 0; j < model.theta_dim; ++j) {
            table[k * static_cast<std::size_t>(model.theta_dim) + static_cast<std::size_t>(j)] =
                row[static_cast<std::size_t>(j)];
        }
    }
    return table;
}

void cmd_evaluate_sde(const EvaluateOptions& opt) {
    const SdeModelSpec model = builtin_sde(opt.model);
    const std::size_t n = opt.n > 0 ? opt.n : model.grid_steps();
    const double h = model.horizon / static_cast<double>(n);

    ThetaFn fitted;
    MlpSpec spec;
    if (opt.use_true_theta) {
        fitted = true_theta_fn(model);
    } else {
        const WeightsFile wf = read_weights_file(opt.weights);
        if (wf.spec.heads != model.heads) {
            throw ConfigError("weights file heads do not match model '" + model.name + "'");
        }
        spec = wf.spec;
        fitted = mlp_theta_fn(wf.spec, wf.weights);
    }

    std::vector<double> times(n + 1);
    for (std::size_t k = 0; k <= n; ++k) times[k] = static_cast<double>(k) * h;
    const std::vector<double> table_true = theta_table(model, true_theta_fn(model), times);
    const std::vector<double> table_fit = theta_table(model, fitted, times);

    Report report;
    report.add("model", model.name);
    report.add("paths", static_cast<double>(opt.paths));
    report.add("grid_n", static_cast<double>(n));

    const auto dim = static_cast<std::size_t>(model.theta_dim);
    std::vector<double> col_true(times.size());
    std::vector<double> col_fit(times.size());
    std::vector<double> sigma_true;
    std::vector<double> sigma_fit;
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t k = 0; k < times.size(); ++k) {
            col_true[k] = table_true[k * dim + j];
            col_fit[k] = table_fit[k * dim + j];
        }
        report.add("mse_theta" + std::to_string(j), mse(col_true, col_fit));
        report.add("r2_theta" + std::to_string(j), r2(col_true, col_fit));
        if (sigma_true.empty() && model.heads[j] == HeadKind::abs_square) {
            sigma_true = col_true;
            sigma_fit = col_fit;
        }
    }

    // Coupled ensembles: same seed, so trajectory i of each run shares its
    // noise stream and endpoint differences isolate the parameter gap.
    const auto paths_true =
        ensemble(model, grid_theta_fn(table_true, model.theta_dim, 0.0, h), model.x0,
                 model.horizon, n, opt.paths, opt.seed);
    const auto paths_fit =
        ensemble(model, grid_theta_fn(table_fit, model.theta_dim, 0.0, h), model.x0,
                 model.horizon, n, opt.paths, opt.seed);
    const std::vector<double> end_true = endpoints(paths_true);
    const std::vector<double> end_fit = endpoints(paths_fit);

    const KsResult ks = ks_two_sample(end_true, end_fit);
    report.add("ks_d", ks.d);
    report.add("ks_p", ks.p);
    const Moments m_true = empirical_moments(end_true);
    const Moments m_fit = empirical_moments(end_fit);
    report.add("mean_true", m_true.mean);
    report.add("std_true", m_true.stddev);
    report.add("mean_fit", m_fit.mean);
    report.add("std_fit", m_fit.stddev);

    if (!sigma_true.empty()) {
        const TheoremConstants tc = theorem_constants(end_true, end_fit, sigma_true, sigma_fit);
        report.add("l_emp", tc.l_emp);
        report.add("r_emp", tc.r_emp);
        if (tc.c_emp) {
            report.add("c_emp", *tc.c_emp);
        } else {
            report.add("c_emp", std::string("undefined"));
        }
    }

    write_report_file(opt.out, report);
    if (!opt.qq_out.empty()) {
        write_pairs_csv(opt.qq_out, "true,fitted", qq_points(end_true, end_fit));
    }
    if (!opt.endpoints_out.empty()) {
        std::vector<std::array<double, 2>> rows(end_true.size());
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = {end_true[i], end_fit[i]};
        write_pairs_csv(opt.endpoints_out, "true,fitted", rows);
    }
    std::cout << "report -> " << opt.out << " (ks_d=" << format_double(ks.d)
              << ", ks_p=" << format_double(ks.p) << ")\n";
}

void cmd_evaluate_regression(const EvaluateOptions& opt) {
    const RegressionCaseSpec spec = builtin_regression(opt.case_name);
    const std::vector<HeadKind> heads = RegressionCaseSpec::heads();

    MlpSpec net;
    Weights weights;
    if (!opt.use_true_theta) {
        const WeightsFile wf = read_weights_file(opt.weights);
        if (wf.spec.heads != heads) {
            throw ConfigError("weights file heads do not match the regression parameterization");
        }
        net = wf.spec;
        weights = wf.weights;
    }

    // True components [mu1, mu2, sigma1, sigma2, rho] on the case grid.
    const std::size_t n = opt.n > 0 ? opt.n : spec.n;
    std::vector<std::vector<double>> truth(5, std::vector<double>(n));
    std::vector<std::vector<double>> fit(5, std::vector<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const double t = spec.time_at(k);
        const Cov2 cov = spec.covariance(t);
        const double s1 = std::sqrt(cov.var1);
        const double s2 = std::sqrt(cov.var2);
        truth[0][k] = spec.mu1(t);
        truth[1][k] = spec.mu2(t);
        truth[2][k] = s1;
        truth[3][k] = s2;
        truth[4][k] = (s1 > 0.0 && s2 > 0.0) ? cov.cov / (s1 * s2) : 0.0;
        const std::vector<double> theta =
            opt.use_true_theta
                ? std::vector<double>{truth[0][k], truth[1][k], truth[2][k], truth[3][k],
                                      truth[4][k]}
                : reported_theta(mlp_forward(net, weights.values, t), heads);
        for (std::size_t j = 0; j < 5; ++j) fit[j][k] = theta[j];
    }

    Report report;
    report.add("case", spec.name);
    report.add("grid_n", static_cast<double>(n));
    static const char* kNames[5] = {"mu1", "mu2", "sigma1", "sigma2", "rho"};
    for (std::size_t j = 0; j < 5; ++j) {
        report.add(std::string("mse_") + kNames[j], mse(truth[j], fit[j]));
        report.add(std::string("r2_") + kNames[j], r2(truth[j], fit[j]));
    }
    write_report_file(opt.out, report);
    std::cout << "report -> " << opt.out << "\n";
}

void cmd_evaluate(const EvaluateOptions& opt) {
    if (!opt.model.empty()) {
        cmd_evaluate_sde(opt);
    } else {
        cmd_evaluate_regression(opt);
    }
}

// ---------------------------------------------------------------------------
// plot

struct PlotOptions {
    std::string kind;
    std::string out;
    std::string model;
    std::string case_name;
    std::string weights;
    std::string data;
    std::string forecast;
    std::string input;
    std::size_t points = 401;
    int bins = 30;
};

void plot_theta(const PlotOptions& opt) {
    std::vector<std::string> names;
    std::vector<std::vector<std::array<double, 2>>> truth;
    std::vector<std::vector<std::array<double, 2>>> fitted;

    if (!opt.model.empty()) {
        const SdeModelSpec model = builtin_sde(opt.model);
        const WeightsFile wf = read_weights_file(opt.weights);
        if (wf.spec.heads != model.heads) {
            throw ConfigError("weights file heads do not match model '" + model.name + "'");
        }
        const auto dim = static_cast<std::size_t>(model.theta_dim);
        names.resize(dim);
        truth.resize(dim);
        fitted.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) names[j] = "theta" + std::to_string(j);
        for (std::size_t k = 0; k < opt.points; ++k) {
            const double t =
                model.horizon * static_cast<double>(k) / static_cast<double>(opt.points - 1);
            const std::vector<double> tv = model.true_theta(t);
            const std::vector<double> fv =
                reported_theta(mlp_forward(wf.spec, wf.weights.values, t), wf.spec.heads);
            for (std::size_t j = 0; j < dim; ++j) {
                truth[j].push_back({t, tv[j]});
                fitted[j].push_back({t, fv[j]});
            }
        }
    } else {
        const RegressionCaseSpec spec = builtin_regression(opt.case_name);
        const std::vector<HeadKind> heads = RegressionCaseSpec::heads();
        const WeightsFile wf = read_weights_file(opt.weights);
        if (wf.spec.heads != heads) {
            throw ConfigError("weights file heads do not match the regression parameterization");
        }
        names = {"mu1", "mu2", "sigma1", "sigma2", "rho"};
        truth.resize(5);
        fitted.resize(5);
        for (std::size_t k = 0; k < opt.points; ++k) {
            const double t = 2.0 * std::numbers::pi * static_cast<double>(k) /
                             static_cast<double>(opt.points);
            const Cov2 cov = spec.covariance(t);
            const double s1 = std::sqrt(cov.var1);
            const double s2 = std::sqrt(cov.var2);
            const double truth_row[5] = {spec.mu1(t), spec.mu2(t), s1, s2,
                                         (s1 > 0.0 && s2 > 0.0) ? cov.cov / (s1 * s2) : 0.0};
            const std::vector<double> fv =
                reported_theta(mlp_forward(wf.spec, wf.weights.values, t), heads);
            for (std::size_t j = 0; j < 5; ++j) {
                truth[j].push_back({t, truth_row[j]});
                fitted[j].push_back({t, fv[j]});
            }
        }
    }

    SvgChart chart("Parameter functions: true vs fitted", "t", "theta(t)");
    for (std::size_t j = 0; j < truth.size(); ++j) {
        chart.add_line(names[j] + " true", std::move(truth[j]), kColorTrue, 1.8);
        chart.add_line(names[j] + " fitted", std::move(fitted[j]), kColorFit, 1.8, "6,3");
    }
    chart.write(opt.out);
}

void plot_trajectory(const PlotOptions& opt) {
    const Trajectory traj = read_trajectory_csv(opt.data);
    SvgChart chart("Trajectory with prediction intervals", "t", "x(t)");

    if (!opt.forecast.empty()) {
        const Forecast fc = read_forecast_csv(opt.forecast);
        const double q95 = normal_quantile(0.5 * (1.0 + 0.95));
        const double q68 = normal_quantile(0.5 * (1.0 + 0.68));
        std::vector<std::array<double, 2>> lo95;
        std::vector<std::array<double, 2>> hi95;
        std::vector<std::array<double, 2>> lo68;
        std::vector<std::array<double, 2>> hi68;
        std::vector<std::array<double, 2>> center;
        for (std::size_t k = 0; k < fc.times.size(); ++k) {
            const double t = fc.times[k];
            lo95.push_back({t, fc.centers[k] - q95 * fc.scales[k]});
            hi95.push_back({t, fc.centers[k] + q95 * fc.scales[k]});
            lo68.push_back({t, fc.centers[k] - q68 * fc.scales[k]});
            hi68.push_back({t, fc.centers[k] + q68 * fc.scales[k]});
            center.push_back({t, fc.centers[k]});
        }
        chart.add_band("95% interval", std::move(lo95), std::move(hi95), kColorBand95, 0.45);
        chart.add_band("68% interval", std::move(lo68), std::move(hi68), kColorBand68, 0.45);
        chart.add_line("prediction", std::move(center), kColorFit, 1.4);
    }

    std::vector<std::array<double, 2>> points(traj.values.size());
    for (std::size_t k = 0; k < traj.values.size(); ++k) {
        points[k] = {traj.times[k], traj.values[k]};
    }
    chart.add_line("observed", std::move(points), kColorTrue, 1.2);
    chart.write(opt.out);
}

void plot_histogram(const PlotOptions& opt) {
    const auto rows = read_pairs_csv(opt.input);
    std::vector<double> s1(rows.size());
    std::vector<double> s2(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        s1[i] = rows[i][0];
        s2[i] = rows[i][1];
    }
    const HistogramBins bins = histogram_bins(s1, s2, opt.bins);
    SvgChart chart("Endpoint distributions", "x(T)", "count");
    chart.add_bars("true", bins.edges, bins.counts1, kColorTrue, 0.55);
    chart.add_bars("fitted", bins.edges, bins.counts2, kColorFit, 0.55);
    chart.write(opt.out);
}

void plot_qq(const PlotOptions& opt) {
    const auto rows = read_pairs_csv(opt.input);
    double lo = rows.front()[0];
    double hi = rows.front()[0];
    for (const auto& row : rows) {
        lo = std::min({lo, row[0], row[1]});
        hi = std::max({hi, row[0], row[1]});
    }
    SvgChart chart("QQ plot", "true quantiles", "fitted quantiles");
    chart.add_line("", {{lo, lo}, {hi, hi}}, "#888888", 1.0, "4,4");
    chart.add_scatter("quantile pairs", std::vector<std::array<double, 2>>(rows.begin(), rows.end()),
                      kColorTrue, 2.2);
    chart.write(opt.out);
}

void cmd_plot(const PlotOptions& opt) {
    if (opt.kind == "theta") {
        plot_theta(opt);
    } else if (opt.kind == "trajectory") {
        plot_trajectory(opt);
    } else if (opt.kind == "histogram") {
        plot_histogram(opt);
    } else if (opt.kind == "qq") {
        plot_qq(opt);
    } else {
        throw ConfigError("unknown plot kind '" + opt.kind +
                          "' (theta, trajectory, histogram, qq)");
    }
    std::cout << "plot -> " << opt.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thetafit: calibration of time-dependent parameters in Markov models"};
    app.require_subcommand(1);

    SimulateOptions sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Generate a trajectory or dataset");
    simulate->set_config("--config");
    auto* sim_model = simulate->add_option("--model", sim.model, "Built-in SDE (ex1..ex4_log)");
    auto* sim_case = simulate->add_option("--case", sim.case_name, "Built-in regression case");
    sim_model->excludes(sim_case);
    simulate->add_option("--seed", sim.seed, "RNG seed")->required();
    simulate->add_option("--out", sim.out, "Output CSV path")->required();
    simulate->add_option("--n", sim.n, "Override step/sample count");
    simulate->add_option("--x0", sim.x0, "Override initial state");
    simulate->add_option("--horizon", sim.horizon, "Override horizon T");

    TrainOptions tr;
    CLI::App* train = app.add_subcommand("train", "Fit the parameter network to data");
    train->set_config("--config");
    auto* tr_model = train->add_option("--model", tr.model, "Built-in SDE (ex1..ex4_log)");
    auto* tr_case = train->add_option("--case", tr.case_name, "Built-in regression case");
    tr_model->excludes(tr_case);
    train->add_option("--data", tr.data, "Input trajectory/dataset CSV")->required();
    train->add_option("--seed", tr.seed, "RNG seed (init + shuffling)")->required();
    train->add_option("--weights-out", tr.weights_out, "Weights file path")->required();
    train->add_option("--loss-out", tr.loss_out, "Per-epoch loss CSV path");
    train->add_option("--widths", tr.widths, "Layer widths, e.g. 1,32,32,32,1");
    train->add_option("--epochs", tr.epochs, "Training epochs");
    train->add_option("--batch-size", tr.batch_size, "Minibatch size");
    train->add_option("--lr", tr.learning_rate, "Adam learning rate");
    train->add_option("--beta1", tr.beta1, "Adam beta1");
    train->add_option("--beta2", tr.beta2, "Adam beta2");
    train->add_option("--eps", tr.eps, "Adam epsilon");
    train->add_option("--stride", tr.stride, "Subsample the input by this stride");
    train->add_flag("--no-shuffle", tr.no_shuffle, "Keep the term order fixed");
    train->add_option("--checkpoint-every", tr.checkpoint_every,
                      "Write a checkpoint every K epochs (0 = off)");
    train->add_option("--checkpoint-prefix", tr.checkpoint_prefix,
                      "Checkpoint path prefix (default: --weights-out)");

    ForecastOptions fc;
    CLI::App* forecast = app.add_subcommand("forecast", "Monte Carlo prediction intervals");
    forecast->set_config("--config");
    forecast->add_option("--model", fc.model, "Built-in SDE")->required();
    forecast->add_option("--weights", fc.weights, "Fitted weights file")->required();
    forecast->add_option("--data", fc.data, "Trajectory CSV the forecast continues")->required();
    forecast->add_option("--seed", fc.seed, "RNG seed")->required();
    forecast->add_option("--out", fc.out, "Forecast CSV path")->required();
    forecast->add_option("--steps", fc.steps, "Forecast steps");
    forecast->add_option("--alpha", fc.alpha, "Interval coverage level");
    forecast->add_option("--carrier-paths", fc.carrier_paths,
                         "Average centers/scales over this many carrier paths");
    forecast->add_flag("--in-sample", fc.in_sample,
                       "Forecast over the observed window instead of beyond it");

    EvaluateOptions ev;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Fit metrics and distribution tests");
    evaluate->set_config("--config");
    auto* ev_model = evaluate->add_option("--model", ev.model, "Built-in SDE");
    auto* ev_case = evaluate->add_option("--case", ev.case_name, "Built-in regression case");
    ev_model->excludes(ev_case);
    evaluate->add_option("--weights", ev.weights, "Fitted weights file");
    evaluate->add_flag("--use-true-theta", ev.use_true_theta,
                       "Evaluate the true parameters against themselves (noise floor)");
    evaluate->add_option("--seed", ev.seed, "RNG seed")->required();
    evaluate->add_option("--out", ev.out, "Report path")->required();
    evaluate->add_option("--paths", ev.paths, "Ensemble size");
    evaluate->add_option("--n", ev.n, "Override grid steps");
    evaluate->add_option("--qq-out", ev.qq_out, "QQ points CSV path");
    evaluate->add_option("--endpoints-out", ev.endpoints_out, "Endpoint pairs CSV path");

    PlotOptions pl;
    CLI::App* plot = app.add_subcommand("plot", "Render SVG figures");
    plot->set_config("--config");
    plot->add_option("--kind", pl.kind, "theta | trajectory | histogram | qq")->required();
    plot->add_option("--out", pl.out, "Output SVG path")->required();
    auto* pl_model = plot->add_option("--model", pl.model, "Built-in SDE");
    auto* pl_case = plot->add_option("--case", pl.case_name, "Built-in regression case");
    pl_model->excludes(pl_case);
    plot->add_option("--weights", pl.weights, "Fitted weights file");
    plot->add_option("--data", pl.data, "Trajectory CSV");
    plot->add_option("--forecast", pl.forecast, "Forecast CSV (interval bands)");
    plot->add_option("--in", pl.input, "Two-column CSV input");
    plot->add_option("--points", pl.points, "Curve sampling points");
    plot->add_option("--bins", pl.bins, "Histogram bins");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) {
            if (sim.model.empty() && sim.case_name.empty()) {
                throw ConfigError("simulate needs --model or --case");
            }
            cmd_simulate(sim);
        } else if (train->parsed()) {
            if (tr.model.empty() && tr.case_name.empty()) {
                throw ConfigError("train needs --model or --case");
            }
            cmd_train(tr);
        } else if (forecast->parsed()) {
            cmd_forecast(fc);
        } else if (evaluate->parsed()) {
            if (ev.model.empty() && ev.case_name.empty()) {
                throw ConfigError("evaluate needs --model or --case");
            }
            if (!ev.use_true_theta && ev.weights.empty()) {
                throw ConfigError("evaluate needs --weights (or --use-true-theta)");
            }
            cmd_evaluate(ev);
        } else if (plot->parsed()) {
            cmd_plot(pl);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const TrainingError& e) {
        std::cerr << "training error: " << e.what() << "\n";
        return 4;
    } catch (const SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
