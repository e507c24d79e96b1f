#include "pacs/timeseries.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "pacs/errors.hpp"
#include "pacs/util.hpp"

namespace pacs {

TimeSeries::TimeSeries(std::vector<double> t, std::vector<double> v) : t_(std::move(t)), v_(std::move(v)) {
    if (t_.size() != v_.size()) throw InvalidParams("time series: t and v lengths differ");
    if (t_.empty()) throw InvalidParams("time series: empty");
    for (size_t k = 1; k < t_.size(); ++k) {
        if (!(t_[k] > t_[k - 1]))
            throw InvalidParams("time series: sample times not strictly increasing at index " +
                                std::to_string(k));
    }
}

double TimeSeries::operator()(double t) const {
    if (t_.empty()) throw CoverageError("time series: empty");
    if (t < t_.front() || t > t_.back())
        throw CoverageError("time series: t=" + format_double(t) + " outside [" +
                            format_double(t_.front()) + ", " + format_double(t_.back()) + "]");
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    if (it == t_.begin()) return v_.front();
    if (it == t_.end()) return v_.back();
    const size_t k = static_cast<size_t>(it - t_.begin());
    const double frac = (t - t_[k - 1]) / (t_[k] - t_[k - 1]);
    return v_[k - 1] + frac * (v_[k] - v_[k - 1]);
}

bool TimeSeries::covers(double t0, double t1) const {
    return !t_.empty() && t_.front() <= t0 && t_.back() >= t1;
}

TimeSeries TimeSeries::sample(const std::function<double(double)>& fn, double t0, double t1,
                              int n_samples) {
    if (n_samples < 2) throw InvalidParams("time series sampling needs at least 2 points");
    std::vector<double> t(static_cast<size_t>(n_samples)), v(static_cast<size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k) {
        t[static_cast<size_t>(k)] = t0 + (t1 - t0) * k / (n_samples - 1);
        v[static_cast<size_t>(k)] = fn(t[static_cast<size_t>(k)]);
    }
    return TimeSeries(std::move(t), std::move(v));
}

TimeSeries load_series_csv(const std::string& path, const std::string& value_col) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string expect = "t," + value_col;
    if (line != expect) throw ParseError(path + ": header must be '" + expect + "', got '" + line + "'");

    std::vector<double> t, v;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError(path + ": row " + std::to_string(row) + ": missing comma");
        try {
            size_t used = 0;
            const double tv = std::stod(line.substr(0, comma), &used);
            if (used != comma) throw std::invalid_argument("trailing");
            const std::string rest = line.substr(comma + 1);
            const double vv = std::stod(rest, &used);
            if (used != rest.size()) throw std::invalid_argument("trailing");
            t.push_back(tv);
            v.push_back(vv);
        } catch (const std::exception&) {
            throw ParseError(path + ": row " + std::to_string(row) + ": malformed number");
        }
        if (t.size() >= 2 && !(t[t.size() - 1] > t[t.size() - 2]))
            throw ParseError(path + ": row " + std::to_string(row) + ": t not strictly increasing");
    }
    if (t.empty()) throw ParseError(path + ": no data rows");
    return TimeSeries(std::move(t), std::move(v));
}

void save_series_csv(const std::string& path, const TimeSeries& series, const std::string& value_col) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << "t," << value_col << "\n";
    const auto& t = series.times();
    const auto& v = series.values();
    for (size_t k = 0; k < t.size(); ++k) out << format_double(t[k]) << "," << format_double(v[k]) << "\n";
}

}  // namespace pacs
