#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace thetafit {

/// Bad configuration or malformed input (unknown model name, inconsistent
/// dimensions, unparseable file). Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid data fed to a numeric routine (non-positive-definite covariance,
/// zero-variance targets, length mismatch).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Argument outside the mathematical domain of an operation. Carries the
/// offending value; raised e.g. for ln/sqrt of a non-positive number, which
/// during calibration signals a degenerate diffusion or covariance.
class DomainError : public std::runtime_error {
public:
    DomainError(const std::string& msg, double value)
        : std::runtime_error(msg + " (value " + std::to_string(value) + ")"),
          value_(value) {}

    double value() const noexcept { return value_; }

private:
    double value_;
};

/// Trajectory generation failure (state overflow, singular diffusion).
/// Carries the step index at which the recursion broke. Exit code 3.
class SimulationError : public std::runtime_error {
public:
    SimulationError(const std::string& msg, std::size_t step)
        : std::runtime_error(msg + " at step " + std::to_string(step)),
          step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Optimization aborted; wraps the underlying failure with epoch/batch
/// context. Exit code 4.
class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& msg, std::size_t epoch, std::size_t batch)
        : std::runtime_error("epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batch) + ": " + msg),
          epoch_(epoch),
          batch_(batch) {}

    std::size_t epoch() const noexcept { return epoch_; }
    std::size_t batch() const noexcept { return batch_; }

private:
    std::size_t epoch_;
    std::size_t batch_;
};

}  // namespace thetafit
