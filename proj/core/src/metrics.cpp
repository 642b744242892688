#include "ktd/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "ktd/error.hpp"

namespace ktd {

double normalized_param_error(const Vector& theta, const Vector& theta_star) {
    if (theta.size() != theta_star.size()) throw ContractViolation("parameter length mismatch");
    const double scale = theta_star.norm();
    if (!(scale > 0.0)) throw UndefinedMetric("normalized error needs a nonzero reference");
    return (theta - theta_star).norm() / scale;
}

namespace {

std::string format12(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace

double quantize(double x) {
    if (!std::isfinite(x)) return x;
    return std::strtod(format12(x).c_str(), nullptr);
}

MetricSeries::MetricSeries(std::vector<long long> checkpoints, Index trials)
    : checkpoints_(std::move(checkpoints)),
      values_(Matrix::Zero(static_cast<Index>(checkpoints_.size()), trials)) {
    if (trials <= 0) throw ContractViolation("a metric series needs at least one trial");
}

void MetricSeries::set(Index checkpoint_row, Index trial, double value) {
    values_(checkpoint_row, trial) = quantize(value);
}

void MetricSeries::set_trial(Index trial, const Vector& values) {
    if (values.size() != values_.rows()) throw ContractViolation("trial series length mismatch");
    for (Index i = 0; i < values.size(); ++i) set(i, trial, values(i));
}

Index MetricSeries::row_of(long long checkpoint) const {
    for (std::size_t i = 0; i < checkpoints_.size(); ++i) {
        if (checkpoints_[i] == checkpoint) return static_cast<Index>(i);
    }
    throw ContractViolation("no checkpoint " + std::to_string(checkpoint));
}

Vector MetricSeries::mean() const { return values_.rowwise().mean(); }

Vector MetricSeries::standard_error() const {
    const Index t = values_.cols();
    if (t < 2) return Vector::Zero(values_.rows());
    const Vector m = mean();
    const Vector ss = (values_.colwise() - m).rowwise().squaredNorm();
    return (ss / static_cast<double>(t - 1)).cwiseSqrt() / std::sqrt(static_cast<double>(t));
}

bool MetricSeries::operator==(const MetricSeries& other) const {
    return checkpoints_ == other.checkpoints_ && values_.rows() == other.values_.rows() &&
           values_.cols() == other.values_.cols() && values_ == other.values_;
}

std::string format_csv(const MetricSeries& series, const Config& config) {
    std::string out;
    std::istringstream lines(config.to_text());
    for (std::string line; std::getline(lines, line);) out += "# " + line + "\n";
    out += "checkpoint,trial,metric\n";
    const Vector mean = series.mean();
    const Vector se = series.standard_error();
    for (Index i = 0; i < series.checkpoint_count(); ++i) {
        const std::string label = std::to_string(series.checkpoints()[static_cast<std::size_t>(i)]);
        for (Index t = 0; t < series.trial_count(); ++t) {
            out += label + "," + std::to_string(t) + "," + format12(series.value(i, t)) + "\n";
        }
        out += label + ",mean," + format12(mean(i)) + "\n";
        out += label + ",stderr," + format12(se(i)) + "\n";
    }
    return out;
}

void write_csv(const std::string& path, const MetricSeries& series, const Config& config) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << format_csv(series, config);
    if (!out) throw Error("failed writing '" + path + "'");
}

CsvContents parse_csv(std::string_view text) {
    std::string config_text;
    std::vector<long long> checkpoints;
    std::map<long long, std::map<long long, double>> cells;
    bool header_seen = false;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            config_text += line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1) + "\n";
            continue;
        }
        if (!header_seen) {
            if (line != "checkpoint,trial,metric") throw ConfigError("unexpected CSV header '" + line + "'");
            header_seen = true;
            continue;
        }
        const std::size_t a = line.find(',');
        const std::size_t b = line.find(',', a + 1);
        if (a == std::string::npos || b == std::string::npos) throw ConfigError("bad CSV row '" + line + "'");
        const std::string trial = line.substr(a + 1, b - a - 1);
        if (trial == "mean" || trial == "stderr") continue;
        const long long checkpoint = std::stoll(line.substr(0, a));
        if (checkpoints.empty() || checkpoints.back() != checkpoint) checkpoints.push_back(checkpoint);
        cells[checkpoint][std::stoll(trial)] = std::strtod(line.c_str() + b + 1, nullptr);
    }
    if (!header_seen) throw ConfigError("CSV has no header row");
    const Index trials = cells.empty() ? 0 : static_cast<Index>(cells.begin()->second.size());
    CsvContents result{Config::parse(config_text), MetricSeries(checkpoints, std::max<Index>(trials, 1))};
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        const auto& row = cells.at(checkpoints[i]);
        if (static_cast<Index>(row.size()) != trials) throw ConfigError("ragged CSV trial rows");
        for (const auto& [t, v] : row) result.series.set(static_cast<Index>(i), static_cast<Index>(t), v);
    }
    return result;
}

CsvContents read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

}  // namespace ktd
