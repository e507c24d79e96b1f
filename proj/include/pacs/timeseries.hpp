#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pacs {

/// Piecewise-linear time series over strictly increasing sample times.
/// Evaluation outside the sampled span throws CoverageError.
class TimeSeries {
public:
    TimeSeries() = default;
    TimeSeries(std::vector<double> t, std::vector<double> v);

    double operator()(double t) const;

    bool empty() const { return t_.empty(); }
    bool covers(double t0, double t1) const;
    double t_front() const { return t_.front(); }
    double t_back() const { return t_.back(); }
    const std::vector<double>& times() const { return t_; }
    const std::vector<double>& values() const { return v_; }

    static TimeSeries sample(const std::function<double(double)>& fn, double t0, double t1, int n_samples);

private:
    std::vector<double> t_;
    std::vector<double> v_;
};

/// CSV with header "t,<value_col>"; rows must be strictly increasing in t.
TimeSeries load_series_csv(const std::string& path, const std::string& value_col);

/// Shortest round-trip decimal formatting, so save/load/save is byte-stable.
void save_series_csv(const std::string& path, const TimeSeries& series, const std::string& value_col);

}  // namespace pacs
