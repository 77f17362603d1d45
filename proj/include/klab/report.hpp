#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace klab {

// Diagnostic record for one experiment: the computed sum, the parameters it
// was run with, and each predicted envelope with its |sum|/envelope ratio.
struct BoundReport {
    std::string experiment;
    std::complex<double> sum_value{0.0, 0.0};
    std::vector<std::pair<std::string, double>> params;     // insertion-ordered
    std::vector<std::pair<std::string, double>> envelopes;  // name -> value

    void param(const std::string& k, double v) { params.emplace_back(k, v); }
    void envelope(const std::string& k, double v) { envelopes.emplace_back(k, v); }

    double magnitude() const { return std::abs(sum_value); }
    double ratio(std::size_t i) const { return magnitude() / envelopes.at(i).second; }
    double ratio(const std::string& name) const {
        for (std::size_t i = 0; i < envelopes.size(); ++i)
            if (envelopes[i].first == name) return ratio(i);
        return -1.0;
    }
    double min_ratio() const {
        double r = -1.0;
        for (std::size_t i = 0; i < envelopes.size(); ++i)
            if (r < 0 || ratio(i) < r) r = ratio(i);
        return r;
    }
};

}  // namespace klab
