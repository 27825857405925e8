#ifndef UNICP_SERIES_HPP
#define UNICP_SERIES_HPP

#include <cstddef>
#include <vector>

namespace unicp {

/// A sequence of values with attached event times on (0, horizon].
///
/// The times carry no information of their own: they exist so that
/// changepoints can be simulated in continuous time and backtracked to
/// serial indices. The default (regular) placement puts observation j at
/// j * horizon / n.
struct ObservationSeries {
    std::vector<double> values;
    std::vector<double> event_times;  // strictly increasing, within (0, horizon]
    double horizon = 0.0;

    std::size_t size() const { return values.size(); }

    /// Regular placement t_j = j * horizon / n. A nonpositive horizon
    /// defaults to n, so event times coincide with serial indices.
    static ObservationSeries regular(std::vector<double> values, double horizon = -1.0);

    /// Explicit times; validates ordering and bounds.
    static ObservationSeries with_times(std::vector<double> values,
                                        std::vector<double> event_times,
                                        double horizon);

    /// Throws input_error on any invariant violation.
    void validate() const;

    /// Number of observations with event time <= t (closed-right block rule).
    std::size_t count_at_or_before(double t) const;
};

}  // namespace unicp

#endif
