#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ktd/config.hpp"
#include "ktd/unscented.hpp"

namespace ktd {

/// |theta - theta_star| / |theta_star|. Throws UndefinedMetric if theta_star = 0.
double normalized_param_error(const Vector& theta, const Vector& theta_star);

/// Rounds to the 12 significant digits used in CSV output.
double quantize(double x);

/// One metric per (checkpoint, trial). Values are stored quantized so the CSV
/// form reproduces them exactly.
class MetricSeries {
public:
    MetricSeries() = default;
    MetricSeries(std::vector<long long> checkpoints, Index trials);

    const std::vector<long long>& checkpoints() const { return checkpoints_; }
    Index checkpoint_count() const { return values_.rows(); }
    Index trial_count() const { return values_.cols(); }

    void set(Index checkpoint_row, Index trial, double value);
    double value(Index checkpoint_row, Index trial) const { return values_(checkpoint_row, trial); }
    /// Column t holds trial t.
    void set_trial(Index trial, const Vector& values);
    const Matrix& values() const { return values_; }

    /// Row index of a checkpoint label; throws ContractViolation if absent.
    Index row_of(long long checkpoint) const;

    Vector mean() const;
    /// Sample standard deviation over trials divided by sqrt(trials); 0 for one trial.
    Vector standard_error() const;

    bool operator==(const MetricSeries& other) const;

private:
    std::vector<long long> checkpoints_;
    Matrix values_;
};

/// "#"-prefixed config lines, the "checkpoint,trial,metric" header, trial rows
/// and then "mean" and "stderr" rows for each checkpoint.
std::string format_csv(const MetricSeries& series, const Config& config);
void write_csv(const std::string& path, const MetricSeries& series, const Config& config);

struct CsvContents {
    Config config;
    MetricSeries series;
};

/// Inverse of format_csv. Aggregate rows are skipped.
CsvContents parse_csv(std::string_view text);
CsvContents read_csv(const std::string& path);

}  // namespace ktd
