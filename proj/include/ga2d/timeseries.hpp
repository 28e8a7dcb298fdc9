#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ga2d {

/// Observables sampled during an evolution.
struct TimeSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> atom_populations;   // [atom][sample]
    std::vector<std::string> region_names;
    std::vector<std::vector<double>> region_populations;  // [region][sample]
    std::vector<double> bath_norm;

    std::size_t samples() const { return times.size(); }

    const std::vector<double>& region(const std::string& name) const {
        for (std::size_t r = 0; r < region_names.size(); ++r)
            if (region_names[r] == name) return region_populations[r];
        throw std::out_of_range("time series: no region named " + name);
    }
};

}  // namespace ga2d
