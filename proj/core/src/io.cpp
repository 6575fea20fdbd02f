#include "thetafit/io.hpp"

#include "thetafit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace thetafit {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "' for reading");
    return in;
}

double parse_double(const std::string& token, const std::filesystem::path& path) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value '" + token + "' in " + path.string());
    }
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

// key=value line; returns value or nullopt if the key does not match.
std::optional<std::string> match_key(const std::string& line, const std::string& key) {
    const std::string prefix = key + "=";
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
    return std::nullopt;
}

std::vector<std::vector<double>> read_csv_columns(const std::filesystem::path& path,
                                                  const std::string& expected_header) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty file " + path.string());
    if (line != expected_header) {
        throw ConfigError("bad header in " + path.string() + ": expected '" + expected_header +
                          "', found '" + line + "'");
    }
    const std::size_t n_cols = split(expected_header, ',').size();
    std::vector<std::vector<double>> columns(n_cols);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> cells = split(line, ',');
        if (cells.size() != n_cols) {
            throw ConfigError("expected " + std::to_string(n_cols) + " columns in " +
                              path.string() + ", found " + std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < n_cols; ++c) {
            columns[c].push_back(parse_double(cells[c], path));
        }
    }
    if (columns[0].empty()) throw ConfigError("no data rows in " + path.string());
    return columns;
}

double infer_step(const std::vector<double>& times, const std::filesystem::path& path) {
    if (times.size() < 2) throw ConfigError("need at least two rows in " + path.string());
    const double h = times[1] - times[0];
    if (!(h > 0.0)) throw ConfigError("times not increasing in " + path.string());
    for (std::size_t k = 1; k + 1 < times.size(); ++k) {
        const double dk = times[k + 1] - times[k];
        if (std::fabs(dk - h) > 1e-9 * std::max(1.0, std::fabs(h))) {
            throw ConfigError("non-uniform time grid in " + path.string() + " near row " +
                              std::to_string(k + 1));
        }
    }
    return h;
}

}  // namespace

std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out = open_out(path);
    out << "t,x1\n";
    for (std::size_t k = 0; k < traj.values.size(); ++k) {
        out << format_double(traj.times[k]) << ',' << format_double(traj.values[k]) << '\n';
    }
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    const auto columns = read_csv_columns(path, "t,x1");
    Trajectory traj;
    traj.times = columns[0];
    traj.values = columns[1];
    traj.step = infer_step(traj.times, path);
    return traj;
}

void write_dataset_csv(const std::filesystem::path& path, const RegressionDataset& data) {
    std::ofstream out = open_out(path);
    out << "t,x1,x2\n";
    for (std::size_t k = 0; k < data.size(); ++k) {
        out << format_double(data.times[k]) << ',' << format_double(data.observations[k][0])
            << ',' << format_double(data.observations[k][1]) << '\n';
    }
}

RegressionDataset read_dataset_csv(const std::filesystem::path& path) {
    const auto columns = read_csv_columns(path, "t,x1,x2");
    RegressionDataset data;
    data.times = columns[0];
    data.observations.resize(columns[0].size());
    for (std::size_t k = 0; k < data.observations.size(); ++k) {
        data.observations[k] = {columns[1][k], columns[2][k]};
    }
    return data;
}

void write_weights_file(const std::filesystem::path& path, const MlpSpec& spec, const Weights& w,
                        const std::optional<CheckpointMeta>& meta) {
    spec.validate();
    if (w.values.size() != spec.weight_count()) {
        throw ConfigError("weight vector length " + std::to_string(w.values.size()) +
                          " does not match the architecture (" +
                          std::to_string(spec.weight_count()) + ")");
    }
    std::ofstream out = open_out(path);
    out << "format=1\n";
    out << "layers=";
    for (std::size_t i = 0; i < spec.layer_widths.size(); ++i) {
        out << (i ? "," : "") << spec.layer_widths[i];
    }
    out << "\nheads=";
    for (std::size_t i = 0; i < spec.heads.size(); ++i) {
        out << (i ? "," : "") << head_name(spec.heads[i]);
    }
    out << '\n';
    if (meta) {
        out << "meta=epoch:" << meta->epoch << ",loss:" << format_double(meta->loss) << '\n';
    }
    for (double v : w.values) out << format_double(v) << '\n';
}

WeightsFile read_weights_file(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;

    if (!std::getline(in, line) || line != "format=1") {
        throw ConfigError("weights file " + path.string() +
                          ": missing or unsupported format line (expected 'format=1')");
    }
    if (!std::getline(in, line)) throw ConfigError("weights file " + path.string() + " truncated");
    const auto layers_value = match_key(line, "layers");
    if (!layers_value) {
        throw ConfigError("weights file " + path.string() + ": expected 'layers=...', found '" +
                          line + "'");
    }
    WeightsFile file;
    for (const std::string& tok : split(*layers_value, ',')) {
        try {
            file.spec.layer_widths.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw ConfigError("weights file " + path.string() + ": bad layer width '" + tok + "'");
        }
    }

    if (!std::getline(in, line)) throw ConfigError("weights file " + path.string() + " truncated");
    const auto heads_value = match_key(line, "heads");
    if (!heads_value) {
        throw ConfigError("weights file " + path.string() + ": expected 'heads=...', found '" +
                          line + "'");
    }
    for (const std::string& tok : split(*heads_value, ',')) {
        file.spec.heads.push_back(parse_head(tok));
    }
    file.spec.validate();

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (const auto meta_value = match_key(line, "meta")) {
            CheckpointMeta meta;
            const auto fields = split(*meta_value, ',');
            for (const std::string& field : fields) {
                if (field.rfind("epoch:", 0) == 0) {
                    meta.epoch = static_cast<std::size_t>(std::stoull(field.substr(6)));
                } else if (field.rfind("loss:", 0) == 0) {
                    meta.loss = parse_double(field.substr(5), path);
                }
            }
            file.meta = meta;
            continue;
        }
        file.weights.values.push_back(parse_double(line, path));
    }
    if (file.weights.values.size() != file.spec.weight_count()) {
        throw ConfigError("weights file " + path.string() + ": " +
                          std::to_string(file.weights.values.size()) + " values, architecture needs " +
                          std::to_string(file.spec.weight_count()));
    }
    return file;
}

void write_loss_csv(const std::filesystem::path& path, std::span<const double> losses) {
    std::ofstream out = open_out(path);
    out << "epoch,mean_loss\n";
    for (std::size_t e = 0; e < losses.size(); ++e) {
        out << (e + 1) << ',' << format_double(losses[e]) << '\n';
    }
}

void write_forecast_csv(const std::filesystem::path& path, const Forecast& fc) {
    std::ofstream out = open_out(path);
    out << "k,t,prediction,lower,upper,center,scale\n";
    for (std::size_t k = 0; k < fc.times.size(); ++k) {
        out << (k + 1) << ',' << format_double(fc.times[k]) << ','
            << format_double(fc.predictions[k]) << ',' << format_double(fc.lower[k]) << ','
            << format_double(fc.upper[k]) << ',' << format_double(fc.centers[k]) << ','
            << format_double(fc.scales[k]) << '\n';
    }
}

Forecast read_forecast_csv(const std::filesystem::path& path) {
    const auto columns = read_csv_columns(path, "k,t,prediction,lower,upper,center,scale");
    Forecast fc;
    fc.times = columns[1];
    fc.predictions = columns[2];
    fc.lower = columns[3];
    fc.upper = columns[4];
    fc.centers = columns[5];
    fc.scales = columns[6];
    fc.step = fc.times.size() > 1 ? fc.times[1] - fc.times[0] : 0.0;
    return fc;
}

void write_pairs_csv(const std::filesystem::path& path, const std::string& header,
                     std::span<const std::array<double, 2>> rows) {
    std::ofstream out = open_out(path);
    out << header << '\n';
    for (const auto& row : rows) {
        out << format_double(row[0]) << ',' << format_double(row[1]) << '\n';
    }
}

std::vector<std::array<double, 2>> read_pairs_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty file " + path.string());
    if (split(line, ',').size() != 2) {
        throw ConfigError("expected a two-column header in " + path.string());
    }
    std::vector<std::array<double, 2>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 2) {
            throw ConfigError("expected two columns in " + path.string());
        }
        rows.push_back({parse_double(cells[0], path), parse_double(cells[1], path)});
    }
    if (rows.empty()) throw ConfigError("no data rows in " + path.string());
    return rows;
}

void Report::add(const std::string& key, double value) {
    entries_.emplace_back(key, format_double(value));
}

void Report::add(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}

void write_report_file(const std::filesystem::path& path, const Report& report) {
    std::ofstream out = open_out(path);
    for (const auto& [key, value] : report.entries()) {
        out << key << '=' << value << '\n';
    }
}

}  // namespace thetafit
