#pragma once

#include "thetafit/evaluate.hpp"
#include "thetafit/forecast.hpp"
#include "thetafit/neuralnet.hpp"
#include "thetafit/simulate.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace thetafit {

/// All writers print doubles with 17 significant digits, which round-trips
/// IEEE doubles exactly and makes repeated runs byte-identical.
std::string format_double(double v);

/// Trajectory CSV: header `t,x1`, one row per grid point.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// Regression dataset CSV: header `t,x1,x2`.
void write_dataset_csv(const std::filesystem::path& path, const RegressionDataset& data);
RegressionDataset read_dataset_csv(const std::filesystem::path& path);

struct CheckpointMeta {
    std::size_t epoch = 0;
    double loss = 0.0;
};

/// Weights file:
///   format=1
///   layers=1,32,32,32,1
///   heads=abs_square
///   meta=epoch:120,loss:-1.25        (optional, checkpoints only)
///   <one weight per line, layer layout order>
void write_weights_file(const std::filesystem::path& path, const MlpSpec& spec, const Weights& w,
                        const std::optional<CheckpointMeta>& meta = std::nullopt);

struct WeightsFile {
    MlpSpec spec;
    Weights weights;
    std::optional<CheckpointMeta> meta;
};
WeightsFile read_weights_file(const std::filesystem::path& path);

/// Loss history CSV: header `epoch,mean_loss`, one row per epoch.
void write_loss_csv(const std::filesystem::path& path, std::span<const double> losses);

/// Forecast CSV: header `k,t,prediction,lower,upper,center,scale`.
void write_forecast_csv(const std::filesystem::path& path, const Forecast& fc);
Forecast read_forecast_csv(const std::filesystem::path& path);

/// Two-column CSV used for QQ points and endpoint pairs.
void write_pairs_csv(const std::filesystem::path& path, const std::string& header,
                     std::span<const std::array<double, 2>> rows);
std::vector<std::array<double, 2>> read_pairs_csv(const std::filesystem::path& path);

/// Flat key=value report, one metric per line, insertion order preserved.
class Report {
public:
    void add(const std::string& key, double value);
    void add(const std::string& key, const std::string& value);
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

void write_report_file(const std::filesystem::path& path, const Report& report);

}  // namespace thetafit
