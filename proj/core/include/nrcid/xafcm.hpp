#ifndef NRCID_XAFCM_HPP
#define NRCID_XAFCM_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>

#include "nrcid/quantizer.hpp"

namespace nrcid {

// Smoothing pseudo-count; auto resolves to one pseudo-event of total mass
// spread uniformly over the extended alphabet (1 / |A|^d).
struct AlphaMode {
    bool is_auto = true;
    double value = 0.0;

    static AlphaMode automatic() { return {true, 0.0}; }
    static AlphaMode fixed(double v) { return {false, v}; }

    bool operator==(const AlphaMode&) const = default;
};

std::string format_alpha(const AlphaMode& alpha);
AlphaMode parse_alpha(std::string_view text);

struct ModelParams {
    int context_order = 38;  // symbols of past conditioning the estimate
    int block_depth = 2;     // symbols predicted jointly per block
    int alphabet_size = 17;
    AlphaMode alpha = AlphaMode::automatic();

    bool operator==(const ModelParams&) const = default;
};

// Also enforces the capacity bound: |A|^d must stay exactly representable
// so probability denominators cannot overflow.
void validate(const ModelParams& params);

// |A|^d as an exactly-representable double.
double extended_alphabet_size(const ModelParams& params);

// The alpha_resolve operation: fixed value, or 1/|A|^d on auto.
double resolve_alpha(const ModelParams& params);

struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
        return std::hash<std::string_view>{}(s);
    }
};

struct ContextCounts {
    std::uint64_t total = 0;  // sum of event counts within this context
    std::unordered_map<std::string, std::uint64_t, StringHash, std::equal_to<>> events;
};

struct CompressResult {
    double bits = 0.0;
    std::uint64_t coded_symbols = 0;
    // coded_symbols * log2(|A|), accumulated block by block in the same
    // order as `bits` so the uniform-model ratio is exactly 1.
    double uniform_bits = 0.0;
};

// Extended-alphabet finite-context model: order-k counts over depth-d event
// words, learned symbol by symbol on circular input.
class XaModel {
public:
    explicit XaModel(ModelParams params);

    const ModelParams& params() const { return params_; }
    std::uint64_t trained_symbols() const { return trained_symbols_; }
    std::size_t context_count() const { return counts_.size(); }
    std::uint64_t total_events() const;

    // One count increment per position of the training string, context and
    // event windows wrapping circularly at both ends.
    void learn(const SymbolString& training);

    std::uint64_t event_count(std::string_view context, std::string_view event) const;
    std::uint64_t context_total(std::string_view context) const;

    // (v(event|context) + alpha) / (v(context) + alpha * |A|^d)
    double estimate_probability(std::string_view context, std::string_view event) const;

    // -log2 of estimate_probability, never negative.
    double block_bits(std::string_view context, std::string_view event) const;

    // Bits to represent the query in consecutive depth-d blocks against the
    // frozen counts; the first blocks' contexts wrap into the end of the
    // query. Trailing symbols that do not fill a block are not coded.
    CompressResult compress_bits(const SymbolString& query) const;

    // Versioned, checksummed text block; contexts and events in sorted
    // order so output is byte-stable.
    void serialize(std::ostream& out) const;
    static XaModel deserialize(std::istream& in);

    // Sorted copy of the table, for inspection and tests.
    std::map<std::string, std::map<std::string, std::uint64_t>> counts_snapshot() const;

    bool same_counts(const XaModel& other) const;

private:
    void check_symbols(const SymbolString& text) const;
    double correction_bits(std::string_view context, std::string_view event) const;

    ModelParams params_;
    double alpha_ = 0.0;            // resolved smoothing mass
    double alpha_extended_ = 0.0;   // alpha * |A|^d (exactly 1 on auto)
    double extended_size_ = 0.0;    // |A|^d
    double log2_alphabet_ = 0.0;
    std::uint64_t trained_symbols_ = 0;
    std::unordered_map<std::string, ContextCounts, StringHash, std::equal_to<>> counts_;
};

}  // namespace nrcid

#endif
