#ifndef NRCID_SIGNAL_HPP
#define NRCID_SIGNAL_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace nrcid {

// One session of samples for one participant.
struct RawRecording {
    std::string participant_id;
    std::string session_id;
    double sample_rate_hz = 0.0;
    std::vector<double> samples;
};

void validate(const RawRecording& recording);

struct FilterSpec {
    int order = 5;
    double cutoff_hz = 30.0;
    double sample_rate_hz = 0.0;
    // Forward-backward application by default; false selects the single-pass
    // causal mode.
    bool zero_phase = true;
};

void validate(const FilterSpec& spec);

// One second-order section; the leading feedback coefficient is normalized
// to 1 and omitted. First-order sections carry b2 = a2 = 0.
struct BiquadSection {
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;

    bool is_stable() const;
    double dc_gain() const;
};

struct FilterCoefficients {
    std::vector<BiquadSection> sections;

    int effective_order() const;  // sum of section orders
    double dc_gain() const;
};

void validate(const FilterCoefficients& coeffs);

// Order-`order` Butterworth low-pass realized as cascaded second-order
// sections via the bilinear transform, cutoff prewarped so the discrete
// -3.01 dB point lands at cutoff_hz. Each section is normalized to unit DC
// gain.
FilterCoefficients design_butterworth_lowpass(const FilterSpec& spec);

std::complex<double> frequency_response(const FilterCoefficients& coeffs,
                                        double freq_hz, double sample_rate_hz);

// Single causal pass through the cascade, steady-state initialized for the
// first input value (a constant input passes through unchanged).
std::vector<double> filter_single_pass(const FilterCoefficients& coeffs,
                                       std::span<const double> samples);

// Forward-backward filtering with odd-reflected edge padding of length
// 3*(2*effective_order+1), capped at len-1 for short inputs. Output has zero
// phase and the squared magnitude response of the cascade.
std::vector<double> filter_zero_phase(const FilterCoefficients& coeffs,
                                      std::span<const double> samples);

// Dispatches on spec.zero_phase.
std::vector<double> apply_filter(const FilterCoefficients& coeffs, const FilterSpec& spec,
                                 std::span<const double> samples);

struct DerivativeSeries {
    std::vector<double> values;     // values[i] = samples[i+1] - samples[i]
    std::size_t source_length = 0;
};

DerivativeSeries differentiate(std::span<const double> samples);

// Consecutive non-overlapping windows of floor(seconds * sample_rate_hz)
// samples; a trailing remainder shorter than one window is discarded.
std::vector<std::vector<double>> segment(std::span<const double> samples,
                                         double seconds, double sample_rate_hz);

std::size_t segment_window_length(double seconds, double sample_rate_hz);

}  // namespace nrcid

#endif
