#include "nrcid/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nrcid/errors.hpp"
#include "nrcid/text.hpp"

namespace nrcid {

void validate(const RawRecording& recording) {
    if (!(recording.sample_rate_hz > 0.0))
        fail(ErrorKind::InvalidInput, "recording '" + recording.participant_id + "/" +
                                          recording.session_id + "' has non-positive sample rate");
    if (recording.samples.size() < 2)
        fail(ErrorKind::InvalidInput, "recording '" + recording.participant_id + "/" +
                                          recording.session_id + "' has fewer than 2 samples");
}

void validate(const FilterSpec& spec) {
    if (spec.order < 1)
        fail(ErrorKind::InvalidSpec, "filter order must be >= 1, got " + std::to_string(spec.order));
    if (!(spec.sample_rate_hz > 0.0))
        fail(ErrorKind::InvalidSpec, "filter sample rate must be positive");
    if (!(spec.cutoff_hz > 0.0) || spec.cutoff_hz >= spec.sample_rate_hz / 2.0)
        fail(ErrorKind::InvalidSpec,
             "cutoff " + format_double(spec.cutoff_hz) + " Hz must lie in (0, " +
                 format_double(spec.sample_rate_hz / 2.0) + ") for rate " +
                 format_double(spec.sample_rate_hz) + " Hz");
}

bool BiquadSection::is_stable() const {
    // Both roots of z^2 + a1 z + a2 inside the unit circle.
    return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2;
}

double BiquadSection::dc_gain() const {
    return (b0 + b1 + b2) / (1.0 + a1 + a2);
}

int FilterCoefficients::effective_order() const {
    int order = 0;
    for (const auto& s : sections) order += (s.a2 != 0.0 || s.b2 != 0.0) ? 2 : 1;
    return order;
}

double FilterCoefficients::dc_gain() const {
    double gain = 1.0;
    for (const auto& s : sections) gain *= s.dc_gain();
    return gain;
}

void validate(const FilterCoefficients& coeffs) {
    if (coeffs.sections.empty()) fail(ErrorKind::InvalidSpec, "filter has no sections");
    for (const auto& s : coeffs.sections)
        if (!s.is_stable()) fail(ErrorKind::InvalidSpec, "unstable filter section");
    if (std::abs(coeffs.dc_gain() - 1.0) > 1e-9)
        fail(ErrorKind::InvalidSpec, "cascade DC gain " + format_double(coeffs.dc_gain()) + " != 1");
}

FilterCoefficients design_butterworth_lowpass(const FilterSpec& spec) {
    validate(spec);
    const int n = spec.order;
    const double fs = spec.sample_rate_hz;
    // Prewarp so the bilinear transform lands the analog -3.01 dB point on
    // the requested discrete frequency.
    const double warped = 2.0 * fs * std::tan(std::numbers::pi * spec.cutoff_hz / fs);

    FilterCoefficients coeffs;
    coeffs.sections.reserve(static_cast<std::size_t>((n + 1) / 2));

    auto bilinear = [fs](std::complex<double> s) {
        return (2.0 * fs + s) / (2.0 * fs - s);
    };

    // Analog prototype poles sit on the left half of the circle of radius
    // `warped`; m and n-1-m are conjugate partners, the middle one (odd n)
    // is real.
    for (int m = 0; m < (n + 1) / 2; ++m) {
        const double angle = std::numbers::pi * (2.0 * m + n + 1.0) / (2.0 * n);
        const std::complex<double> pole_s = warped * std::complex<double>(std::cos(angle), std::sin(angle));
        const std::complex<double> pole_z = bilinear(pole_s);

        BiquadSection section;
        const bool real_pole = (2 * m + 1 == n);
        if (real_pole) {
            section.a1 = -pole_z.real();
            section.a2 = 0.0;
            const double scale = (1.0 + section.a1) / 2.0;
            section.b0 = scale;
            section.b1 = scale;
            section.b2 = 0.0;
        } else {
            section.a1 = -2.0 * pole_z.real();
            section.a2 = std::norm(pole_z);
            const double scale = (1.0 + section.a1 + section.a2) / 4.0;
            section.b0 = scale;
            section.b1 = 2.0 * scale;
            section.b2 = scale;
        }
        coeffs.sections.push_back(section);
    }

    validate(coeffs);
    return coeffs;
}

std::complex<double> frequency_response(const FilterCoefficients& coeffs,
                                        double freq_hz, double sample_rate_hz) {
    const double omega = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
    const std::complex<double> z1 = std::polar(1.0, -omega);
    const std::complex<double> z2 = z1 * z1;
    std::complex<double> h{1.0, 0.0};
    for (const auto& s : coeffs.sections)
        h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
    return h;
}

namespace {

// Steady-state direct-form-II-transposed state for a unit constant input.
struct SectionState {
    double s1 = 0.0, s2 = 0.0;
};

std::vector<SectionState> step_steady_state(const FilterCoefficients& coeffs) {
    std::vector<SectionState> zi(coeffs.sections.size());
    double input = 1.0;  // cascades each section's DC gain
    for (std::size_t i = 0; i < coeffs.sections.size(); ++i) {
        const auto& s = coeffs.sections[i];
        const double output = s.dc_gain() * input;
        zi[i].s2 = s.b2 * input - s.a2 * output;
        zi[i].s1 = s.b1 * input - s.a1 * output + zi[i].s2;
        input = output;
    }
    return zi;
}

std::vector<double> run_cascade(const FilterCoefficients& coeffs,
                                std::span<const double> samples, double state_scale) {
    std::vector<SectionState> state = step_steady_state(coeffs);
    for (auto& st : state) {
        st.s1 *= state_scale;
        st.s2 *= state_scale;
    }
    std::vector<double> out(samples.begin(), samples.end());
    for (std::size_t si = 0; si < coeffs.sections.size(); ++si) {
        const auto& c = coeffs.sections[si];
        auto& st = state[si];
        for (double& sample : out) {
            const double x = sample;
            const double y = c.b0 * x + st.s1;
            st.s1 = c.b1 * x - c.a1 * y + st.s2;
            st.s2 = c.b2 * x - c.a2 * y;
            sample = y;
        }
    }
    return out;
}

}  // namespace

std::vector<double> filter_single_pass(const FilterCoefficients& coeffs,
                                       std::span<const double> samples) {
    validate(coeffs);
    if (samples.empty()) return {};
    return run_cascade(coeffs, samples, samples.front());
}

std::vector<double> filter_zero_phase(const FilterCoefficients& coeffs,
                                      std::span<const double> samples) {
    validate(coeffs);
    const std::size_t n = samples.size();
    const std::size_t min_len = static_cast<std::size_t>(3 * coeffs.effective_order());
    if (n <= min_len)
        fail(ErrorKind::InvalidInput, "zero-phase filtering needs more than " +
                                          std::to_string(min_len) + " samples, got " + std::to_string(n));

    const std::size_t pad = std::min<std::size_t>(3 * (2 * coeffs.effective_order() + 1), n - 1);

    // Odd reflection about the first/last sample keeps the extension
    // continuous in value and slope.
    std::vector<double> extended;
    extended.reserve(n + 2 * pad);
    for (std::size_t i = 0; i < pad; ++i) extended.push_back(2.0 * samples[0] - samples[pad - i]);
    extended.insert(extended.end(), samples.begin(), samples.end());
    for (std::size_t i = 0; i < pad; ++i) extended.push_back(2.0 * samples[n - 1] - samples[n - 2 - i]);

    std::vector<double> forward = run_cascade(coeffs, extended, extended.front());
    std::reverse(forward.begin(), forward.end());
    std::vector<double> backward = run_cascade(coeffs, forward, forward.front());
    std::reverse(backward.begin(), backward.end());

    return std::vector<double>(backward.begin() + static_cast<std::ptrdiff_t>(pad),
                               backward.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

std::vector<double> apply_filter(const FilterCoefficients& coeffs, const FilterSpec& spec,
                                 std::span<const double> samples) {
    return spec.zero_phase ? filter_zero_phase(coeffs, samples)
                           : filter_single_pass(coeffs, samples);
}

DerivativeSeries differentiate(std::span<const double> samples) {
    if (samples.size() < 2)
        fail(ErrorKind::InvalidInput, "differentiation needs at least 2 samples, got " +
                                          std::to_string(samples.size()));
    DerivativeSeries series;
    series.source_length = samples.size();
    series.values.resize(samples.size() - 1);
    for (std::size_t i = 0; i + 1 < samples.size(); ++i)
        series.values[i] = samples[i + 1] - samples[i];
    return series;
}

std::size_t segment_window_length(double seconds, double sample_rate_hz) {
    if (!(seconds > 0.0) || !(sample_rate_hz > 0.0))
        fail(ErrorKind::InvalidInput, "segment window needs positive seconds and sample rate");
    const double window = std::floor(seconds * sample_rate_hz);
    if (!(window >= 1.0))
        fail(ErrorKind::InvalidInput, "segment window shorter than one sample (" +
                                          format_double(seconds) + " s at " +
                                          format_double(sample_rate_hz) + " Hz)");
    return static_cast<std::size_t>(window);
}

std::vector<std::vector<double>> segment(std::span<const double> samples,
                                         double seconds, double sample_rate_hz) {
    const std::size_t window = segment_window_length(seconds, sample_rate_hz);
    std::vector<std::vector<double>> out;
    out.reserve(samples.size() / window);
    for (std::size_t start = 0; start + window <= samples.size(); start += window)
        out.emplace_back(samples.begin() + static_cast<std::ptrdiff_t>(start),
                         samples.begin() + static_cast<std::ptrdiff_t>(start + window));
    return out;
}

}  // namespace nrcid
