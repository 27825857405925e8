#include "unicp/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "unicp/errors.hpp"

namespace unicp {

ObservationSeries ObservationSeries::regular(std::vector<double> values, double horizon) {
    ObservationSeries s;
    const std::size_t n = values.size();
    s.values = std::move(values);
    s.horizon = horizon > 0.0 ? horizon : static_cast<double>(n);
    s.event_times.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        s.event_times[j] = static_cast<double>(j + 1) * s.horizon / static_cast<double>(n);
    }
    s.validate();
    return s;
}

ObservationSeries ObservationSeries::with_times(std::vector<double> values,
                                                std::vector<double> event_times,
                                                double horizon) {
    ObservationSeries s;
    s.values = std::move(values);
    s.event_times = std::move(event_times);
    s.horizon = horizon;
    s.validate();
    return s;
}

void ObservationSeries::validate() const {
    if (values.empty()) throw input_error("observation series is empty");
    if (values.size() != event_times.size()) {
        throw input_error("values and event_times differ in length");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw input_error("horizon must be a positive finite real");
    }
    double prev = 0.0;
    for (std::size_t j = 0; j < event_times.size(); ++j) {
        const double t = event_times[j];
        if (!std::isfinite(t) || t <= prev) {
            throw input_error("event_times must be strictly increasing and positive (index " +
                              std::to_string(j) + ")");
        }
        prev = t;
    }
    if (event_times.back() > horizon) {
        throw input_error("event_times exceed the horizon");
    }
}

std::size_t ObservationSeries::count_at_or_before(double t) const {
    auto it = std::upper_bound(event_times.begin(), event_times.end(), t);
    return static_cast<std::size_t>(it - event_times.begin());
}

}  // namespace unicp
