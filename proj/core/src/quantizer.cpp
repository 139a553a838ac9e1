#include "nrcid/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nrcid/errors.hpp"
#include "nrcid/text.hpp"

namespace nrcid {

void validate(const QuantizerSpec& spec) {
    if (spec.alphabet_size < 2 || spec.alphabet_size > kMaxAlphabetSize)
        fail(ErrorKind::InvalidSpec,
             "alphabet size must lie in [2, " + std::to_string(kMaxAlphabetSize) + "], got " +
                 std::to_string(spec.alphabet_size));
    if (spec.max_iterations < 1)
        fail(ErrorKind::InvalidSpec, "max_iterations must be positive");
    if (!(spec.tolerance > 0.0))
        fail(ErrorKind::InvalidSpec, "tolerance must be positive");
}

void validate(const Codebook& codebook) {
    const std::size_t levels = codebook.levels.size();
    if (levels < 2 || levels > static_cast<std::size_t>(kMaxAlphabetSize))
        fail(ErrorKind::InvalidSpec, "codebook must have between 2 and 26 levels");
    if (codebook.breakpoints.size() != levels - 1)
        fail(ErrorKind::InvalidSpec, "codebook needs exactly L-1 breakpoints");
    for (std::size_t i = 0; i + 1 < codebook.breakpoints.size(); ++i)
        if (!(codebook.breakpoints[i] < codebook.breakpoints[i + 1]))
            fail(ErrorKind::InvalidSpec, "breakpoints not strictly increasing");
    for (std::size_t i = 0; i + 1 < codebook.levels.size(); ++i)
        if (!(codebook.levels[i] < codebook.levels[i + 1]))
            fail(ErrorKind::InvalidSpec, "levels not strictly increasing");
    for (std::size_t i = 0; i < codebook.breakpoints.size(); ++i) {
        if (!(codebook.levels[i] <= codebook.breakpoints[i] &&
              codebook.breakpoints[i] <= codebook.levels[i + 1]))
            fail(ErrorKind::InvalidSpec, "level outside its cell");
    }
    for (double v : codebook.breakpoints)
        if (!std::isfinite(v)) fail(ErrorKind::InvalidSpec, "non-finite breakpoint");
    for (double v : codebook.levels)
        if (!std::isfinite(v)) fail(ErrorKind::InvalidSpec, "non-finite level");
}

namespace {

// Sorted-data view with prefix sums; turns each Lloyd iteration into
// O(L log n) boundary searches.
struct SortedData {
    std::vector<double> values;
    std::vector<double> prefix_sum;     // prefix_sum[i] = sum of values[0..i)
    std::vector<double> prefix_square;  // same for squares

    explicit SortedData(std::span<const double> data)
        : values(data.begin(), data.end()) {
        std::sort(values.begin(), values.end());
        prefix_sum.resize(values.size() + 1, 0.0);
        prefix_square.resize(values.size() + 1, 0.0);
        for (std::size_t i = 0; i < values.size(); ++i) {
            prefix_sum[i + 1] = prefix_sum[i] + values[i];
            prefix_square[i + 1] = prefix_square[i] + values[i] * values[i];
        }
    }

    std::size_t count_below(double bound) const {
        return static_cast<std::size_t>(
            std::lower_bound(values.begin(), values.end(), bound) - values.begin());
    }

    // Interpolated empirical quantile (linear between order statistics).
    double quantile(double p) const {
        const double pos = p * static_cast<double>(values.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] * (1.0 - frac) + values[hi] * frac;
    }
};

std::vector<double> midpoints(const std::vector<double>& levels) {
    std::vector<double> bp(levels.size() - 1);
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
        bp[i] = 0.5 * (levels[i] + levels[i + 1]);
    return bp;
}

}  // namespace

LloydTrainResult train_lloyd_max_traced(std::span<const double> data, const QuantizerSpec& spec) {
    validate(spec);
    if (data.empty()) fail(ErrorKind::InvalidInput, "cannot train a quantizer on empty data");
    for (double v : data)
        if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, "non-finite training value");

    const int L = spec.alphabet_size;
    const SortedData sorted(data);

    std::size_t distinct = 1;
    for (std::size_t i = 1; i < sorted.values.size(); ++i)
        if (sorted.values[i] != sorted.values[i - 1]) ++distinct;
    if (distinct < static_cast<std::size_t>(L))
        fail(ErrorKind::DegenerateData, "need at least " + std::to_string(L) +
                                            " distinct values, got " + std::to_string(distinct));

    std::vector<double> levels(L);
    for (int i = 0; i < L; ++i)
        levels[i] = sorted.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(L));
    // Quantiles of heavily repeated data may coincide; nudge apart so every
    // level starts distinct.
    for (int i = 1; i < L; ++i)
        if (!(levels[i] > levels[i - 1]))
            levels[i] = std::nextafter(levels[i - 1], std::numeric_limits<double>::infinity());

    LloydTrainResult result;
    double previous_mse = std::numeric_limits<double>::infinity();

    std::vector<double> breakpoints;
    for (int iteration = 0; iteration < spec.max_iterations; ++iteration) {
        breakpoints = midpoints(levels);

        // Cell i covers sorted indices [bounds[i], bounds[i+1]); a value
        // equal to a breakpoint goes to the upper cell, which lower_bound's
        // first-not-less split realizes.
        std::vector<std::size_t> bounds(static_cast<std::size_t>(L) + 1);
        bounds[0] = 0;
        bounds[static_cast<std::size_t>(L)] = sorted.values.size();
        for (int i = 0; i < L - 1; ++i)
            bounds[static_cast<std::size_t>(i) + 1] = sorted.count_below(breakpoints[static_cast<std::size_t>(i)]);

        std::size_t largest_cell = 0;
        std::size_t largest_count = 0;
        for (int i = 0; i < L; ++i) {
            const std::size_t count = bounds[i + 1] - bounds[i];
            if (count > largest_count) {
                largest_count = count;
                largest_cell = static_cast<std::size_t>(i);
            }
        }

        double mse = 0.0;
        bool reseeded = false;
        for (int i = 0; i < L; ++i) {
            const std::size_t lo = bounds[i];
            const std::size_t hi = bounds[i + 1];
            if (hi > lo) {
                const double count = static_cast<double>(hi - lo);
                const double sum = sorted.prefix_sum[hi] - sorted.prefix_sum[lo];
                const double sum_sq = sorted.prefix_square[hi] - sorted.prefix_square[lo];
                levels[i] = sum / count;
                mse += sum_sq - 2.0 * levels[i] * sum + count * levels[i] * levels[i];
            } else {
                // Empty cell: reseed at the midpoint of the most populated
                // cell so the level re-enters a region with mass.
                const double lo_edge = largest_cell == 0
                                           ? sorted.values.front()
                                           : breakpoints[largest_cell - 1];
                const double hi_edge = largest_cell + 1 == static_cast<std::size_t>(L)
                                           ? sorted.values.back()
                                           : breakpoints[largest_cell];
                levels[i] = 0.5 * (lo_edge + hi_edge);
                reseeded = true;
            }
        }
        mse /= static_cast<double>(sorted.values.size());

        if (reseeded) {
            std::sort(levels.begin(), levels.end());
            for (int i = 1; i < L; ++i)
                if (!(levels[i] > levels[i - 1]))
                    levels[i] = std::nextafter(levels[i - 1], std::numeric_limits<double>::infinity());
        }

        result.mse_history.push_back(mse);
        const double change = std::abs(previous_mse - mse);
        if (mse == 0.0 || (std::isfinite(previous_mse) && change < spec.tolerance * std::max(previous_mse, 1e-300)))
            break;
        previous_mse = mse;
    }

    result.codebook.levels = std::move(levels);
    result.codebook.breakpoints = midpoints(result.codebook.levels);
    validate(result.codebook);
    return result;
}

Codebook train_lloyd_max(std::span<const double> data, const QuantizerSpec& spec) {
    return train_lloyd_max_traced(data, spec).codebook;
}

int cell_index(const Codebook& codebook, double value) {
    // Number of breakpoints <= value; ties go to the upper cell.
    return static_cast<int>(std::upper_bound(codebook.breakpoints.begin(),
                                             codebook.breakpoints.end(), value) -
                            codebook.breakpoints.begin());
}

SymbolString quantize(const Codebook& codebook, std::span<const double> values) {
    SymbolString out;
    out.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = symbol_for_index(cell_index(codebook, values[i]));
    return out;
}

double distortion(const Codebook& codebook, std::span<const double> data) {
    if (data.empty()) fail(ErrorKind::InvalidInput, "distortion of empty data is undefined");
    double sum = 0.0;
    for (double v : data) {
        const double level = codebook.levels[static_cast<std::size_t>(cell_index(codebook, v))];
        const double err = v - level;
        sum += err * err;
    }
    return sum / static_cast<double>(data.size());
}

}  // namespace nrcid
