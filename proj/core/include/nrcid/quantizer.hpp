#ifndef NRCID_QUANTIZER_HPP
#define NRCID_QUANTIZER_HPP

#include <span>
#include <string>
#include <vector>

namespace nrcid {

// Symbols are consecutive letters starting at 'A'; index i maps to 'A' + i.
using SymbolString = std::string;

constexpr int kMaxAlphabetSize = 26;

inline char symbol_for_index(int index) { return static_cast<char>('A' + index); }
inline int index_for_symbol(char symbol) { return symbol - 'A'; }

struct QuantizerSpec {
    int alphabet_size = 17;
    int max_iterations = 200;
    double tolerance = 1e-9;  // relative MSE change between iterations
};

void validate(const QuantizerSpec& spec);

// Scalar quantizer: cell i is [breakpoints[i-1], breakpoints[i]) with open
// outer ends; a value equal to a breakpoint belongs to the upper cell.
struct Codebook {
    std::vector<double> breakpoints;  // L-1, strictly increasing
    std::vector<double> levels;       // L, strictly increasing

    int alphabet_size() const { return static_cast<int>(levels.size()); }
};

void validate(const Codebook& codebook);

struct LloydTrainResult {
    Codebook codebook;
    std::vector<double> mse_history;  // one entry per completed iteration
};

// Empirical Lloyd iteration on the data: breakpoints at midpoints of
// adjacent levels, levels at cell means. Initial levels are the empirical
// quantiles at probabilities (i - 0.5) / L; an empty cell is reseeded at the
// midpoint of the most populated cell.
LloydTrainResult train_lloyd_max_traced(std::span<const double> data, const QuantizerSpec& spec);
Codebook train_lloyd_max(std::span<const double> data, const QuantizerSpec& spec);

int cell_index(const Codebook& codebook, double value);
SymbolString quantize(const Codebook& codebook, std::span<const double> values);

// Mean squared error between each value and its cell's level.
double distortion(const Codebook& codebook, std::span<const double> data);

}  // namespace nrcid

#endif
