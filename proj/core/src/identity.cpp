#include "nrcid/identity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nrcid/dataset.hpp"
#include "nrcid/errors.hpp"
#include "nrcid/parallel.hpp"
#include "nrcid/text.hpp"

namespace nrcid {

namespace fs = std::filesystem;

const char* const kModelFileExtension = ".model";

EnrollmentBase prepare_enrollment(const std::string& participant_id,
                                  std::span<const RawRecording> recordings,
                                  const FilterSpec& filter, const QuantizerSpec& qspec) {
    validate_participant_id(participant_id);
    validate(qspec);
    if (recordings.empty())
        fail(ErrorKind::InvalidDataset, "no training recordings for participant " + participant_id);
    for (const RawRecording& r : recordings) {
        validate(r);
        if (r.sample_rate_hz != filter.sample_rate_hz)
            fail(ErrorKind::InvalidDataset,
                 "recording " + r.participant_id + "/" + r.session_id + " sampled at " +
                     format_double(r.sample_rate_hz) + " Hz but the pipeline expects " +
                     format_double(filter.sample_rate_hz) + " Hz (no resampling)");
    }

    const FilterCoefficients coeffs = design_butterworth_lowpass(filter);

    EnrollmentBase base;
    base.participant_id = participant_id;

    std::vector<double> derivatives;
    for (const RawRecording& r : recordings) {
        const std::vector<double> filtered = apply_filter(coeffs, filter, r.samples);
        DerivativeSeries series = differentiate(filtered);
        base.provenance.push_back({r.session_id, series.values.size()});
        derivatives.insert(derivatives.end(), series.values.begin(), series.values.end());
    }

    base.codebook = train_lloyd_max(derivatives, qspec);
    base.training_symbols = quantize(base.codebook, derivatives);
    return base;
}

ParticipantModel build_participant_model(const EnrollmentBase& base, const ModelParams& params) {
    validate(params);
    if (params.alphabet_size != base.codebook.alphabet_size())
        fail(ErrorKind::InvalidSpec, "model alphabet " + std::to_string(params.alphabet_size) +
                                         " != codebook alphabet " +
                                         std::to_string(base.codebook.alphabet_size()));
    const std::size_t needed =
        static_cast<std::size_t>(std::max(params.context_order, params.block_depth));
    if (base.training_symbols.size() < needed)
        fail(ErrorKind::InvalidInput, "training derivative length " +
                                          std::to_string(base.training_symbols.size()) +
                                          " shorter than max(k, d) = " + std::to_string(needed));

    ParticipantModel pm{base.participant_id, base.codebook, XaModel(params), base.provenance};
    pm.model.learn(base.training_symbols);
    return pm;
}

ParticipantModel enroll(const std::string& participant_id,
                        std::span<const RawRecording> recordings, const ModelParams& params,
                        const FilterSpec& filter, const QuantizerSpec& qspec) {
    return build_participant_model(prepare_enrollment(participant_id, recordings, filter, qspec),
                                   params);
}

NrcScore nrc_of_derivative(const ParticipantModel& pm, std::span<const double> derivative) {
    const SymbolString symbols = quantize(pm.codebook, derivative);
    const CompressResult compressed = pm.model.compress_bits(symbols);
    return {compressed.bits / compressed.uniform_bits, compressed.coded_symbols};
}

NrcScore nrc(const ParticipantModel& pm, std::span<const double> segment, const FilterSpec& filter) {
    const FilterCoefficients coeffs = design_butterworth_lowpass(filter);
    const std::vector<double> filtered = apply_filter(coeffs, filter, segment);
    const DerivativeSeries series = differentiate(filtered);
    return nrc_of_derivative(pm, series.values);
}

void Registry::add(ParticipantModel model) {
    validate_participant_id(model.participant_id);
    if (model.codebook.alphabet_size() != model.model.params().alphabet_size)
        fail(ErrorKind::InvalidState, "model " + model.participant_id +
                                          ": codebook and count-table alphabets disagree");
    if (!models_.empty() && !(models_.front().model.params() == model.model.params()))
        fail(ErrorKind::InvalidState, "model " + model.participant_id +
                                          " has different (k, d, alphabet, alpha) than the registry");
    auto pos = std::lower_bound(models_.begin(), models_.end(), model.participant_id,
                                [](const ParticipantModel& m, const std::string& id) {
                                    return m.participant_id < id;
                                });
    if (pos != models_.end() && pos->participant_id == model.participant_id)
        fail(ErrorKind::InvalidState, "duplicate participant id " + model.participant_id);
    models_.insert(pos, std::move(model));
}

const ModelParams& Registry::shared_params() const {
    if (models_.empty()) fail(ErrorKind::InvalidState, "registry is empty");
    return models_.front().model.params();
}

IdentificationResult identify(const Registry& registry, std::span<const double> segment,
                              const FilterSpec& filter, unsigned threads) {
    if (registry.empty()) fail(ErrorKind::InvalidState, "cannot identify against an empty registry");

    // Filter and differentiate once; quantization stays per-model.
    const FilterCoefficients coeffs = design_butterworth_lowpass(filter);
    const std::vector<double> filtered = apply_filter(coeffs, filter, segment);
    const DerivativeSeries series = differentiate(filtered);

    const auto& models = registry.models();
    std::vector<NrcScore> slots(models.size());
    parallel_for(models.size(), threads == 0 ? 1 : threads,
                 [&](std::size_t i) { slots[i] = nrc_of_derivative(models[i], series.values); });

    IdentificationResult result;
    result.coded_symbols = slots.front().coded_symbols;
    result.scores.reserve(models.size());
    for (std::size_t i = 0; i < models.size(); ++i) {
        if (slots[i].coded_symbols != result.coded_symbols)
            fail(ErrorKind::Internal, "coded length differs across registry models");
        result.scores.emplace_back(models[i].participant_id, slots[i].nrc);
    }
    std::sort(result.scores.begin(), result.scores.end(),
              [](const auto& a, const auto& b) {
                  return a.second != b.second ? a.second < b.second : a.first < b.first;
              });
    result.predicted = result.scores.front().first;
    return result;
}

namespace {

constexpr std::string_view kModelFileVersionLine = "nrcid-model/1";

std::string format_provenance(const std::vector<SessionProvenance>& provenance) {
    std::string out;
    for (std::size_t i = 0; i < provenance.size(); ++i) {
        if (i) out += ',';
        out += provenance[i].session_id + ":" + std::to_string(provenance[i].symbol_count);
    }
    return out;
}

std::vector<SessionProvenance> parse_provenance(std::string_view text) {
    std::vector<SessionProvenance> out;
    if (trim(text).empty()) return out;
    for (std::string_view item : split(text, ',')) {
        const std::size_t colon = item.rfind(':');
        if (colon == std::string_view::npos)
            fail(ErrorKind::DecodeParse, "bad provenance entry '" + std::string(item) + "'");
        out.push_back({std::string(item.substr(0, colon)),
                       static_cast<std::uint64_t>(parse_int(item.substr(colon + 1), "symbol count"))});
    }
    return out;
}

std::string format_real_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_double(values[i]);
    }
    return out;
}

std::vector<double> parse_real_list(std::string_view text, std::string_view what) {
    std::vector<double> out;
    for (std::string_view item : split(text, ',')) out.push_back(parse_double(item, what));
    return out;
}

}  // namespace

void save_participant_model(const ParticipantModel& pm, const FilterSpec& filter,
                            const fs::path& path) {
    std::ostringstream out;
    out << kModelFileVersionLine << "\n";
    out << "[meta]\n";
    out << "participant=" << pm.participant_id << "\n";
    out << "filter_order=" << filter.order << "\n";
    out << "cutoff_hz=" << format_double(filter.cutoff_hz) << "\n";
    out << "sample_rate_hz=" << format_double(filter.sample_rate_hz) << "\n";
    out << "zero_phase=" << (filter.zero_phase ? 1 : 0) << "\n";
    out << "provenance=" << format_provenance(pm.provenance) << "\n";
    out << "[codebook]\n";
    out << "L=" << pm.codebook.alphabet_size() << "\n";
    out << "breakpoints=" << format_real_list(pm.codebook.breakpoints) << "\n";
    out << "levels=" << format_real_list(pm.codebook.levels) << "\n";
    out << "[model]\n";
    pm.model.serialize(out);
    atomic_write_file(path, out.str());
}

LoadedModel load_participant_model(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open model file " + path.string());

    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&](std::string_view what) -> std::string& {
        if (!std::getline(in, line))
            fail(ErrorKind::DecodeTruncated, path.string() + ": ended before " + std::string(what) +
                                                 " (line " + std::to_string(line_no + 1) + ")");
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };
    auto key_value = [&](std::string_view key) -> std::string_view {
        const std::string& text = next_line(key);
        const std::string_view view(text);
        if (!view.starts_with(key) || view.size() <= key.size() || view[key.size()] != '=')
            fail(ErrorKind::DecodeParse, path.string() + ":" + std::to_string(line_no) +
                                             ": expected '" + std::string(key) + "='");
        return view.substr(key.size() + 1);
    };
    auto expect = [&](std::string_view literal) {
        if (next_line(literal) != literal)
            fail(ErrorKind::DecodeParse, path.string() + ":" + std::to_string(line_no) +
                                             ": expected '" + std::string(literal) + "'");
    };

    if (next_line("version line") != kModelFileVersionLine)
        fail(ErrorKind::DecodeVersion,
             path.string() + ": unsupported format version '" + line + "'");

    expect("[meta]");
    LoadedModel loaded{{std::string(), Codebook{}, XaModel(ModelParams{}), {}}, FilterSpec{}};
    loaded.model.participant_id = std::string(key_value("participant"));
    loaded.filter.order = static_cast<int>(parse_int(key_value("filter_order"), "filter_order"));
    loaded.filter.cutoff_hz = parse_double(key_value("cutoff_hz"), "cutoff_hz");
    loaded.filter.sample_rate_hz = parse_double(key_value("sample_rate_hz"), "sample_rate_hz");
    loaded.filter.zero_phase = parse_int(key_value("zero_phase"), "zero_phase") != 0;
    loaded.model.provenance = parse_provenance(key_value("provenance"));

    expect("[codebook]");
    const int L = static_cast<int>(parse_int(key_value("L"), "L"));
    loaded.model.codebook.breakpoints = parse_real_list(key_value("breakpoints"), "breakpoint");
    loaded.model.codebook.levels = parse_real_list(key_value("levels"), "level");
    try {
        validate(loaded.model.codebook);
    } catch (const Error& e) {
        fail(ErrorKind::DecodeParse, path.string() + ": bad codebook: " + e.what());
    }
    if (loaded.model.codebook.alphabet_size() != L)
        fail(ErrorKind::DecodeParse, path.string() + ": L=" + std::to_string(L) +
                                         " disagrees with level count");

    expect("[model]");
    try {
        loaded.model.model = XaModel::deserialize(in);
    } catch (const Error& e) {
        if (is_decode_error(e.kind()))
            throw Error(e.kind(), path.string() + " [model] block: " + e.what());
        throw;
    }
    if (loaded.model.model.params().alphabet_size != L)
        fail(ErrorKind::DecodeParse,
             path.string() + ": codebook and count-table alphabets disagree");

    try {
        validate(loaded.filter);
        validate_participant_id(loaded.model.participant_id);
    } catch (const Error& e) {
        fail(ErrorKind::DecodeParse, path.string() + ": " + e.what());
    }
    return loaded;
}

LoadedRegistry load_registry(const fs::path& store_dir) {
    if (!fs::is_directory(store_dir))
        fail(ErrorKind::InvalidState, "model store " + store_dir.string() + " is not a directory");

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(store_dir))
        if (entry.is_regular_file() && entry.path().extension() == kModelFileExtension)
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        fail(ErrorKind::InvalidState, "model store " + store_dir.string() + " contains no models");

    LoadedRegistry result;
    bool first = true;
    for (const fs::path& file : files) {
        LoadedModel loaded = load_participant_model(file);
        if (first) {
            result.filter = loaded.filter;
            first = false;
        } else if (loaded.filter.order != result.filter.order ||
                   loaded.filter.cutoff_hz != result.filter.cutoff_hz ||
                   loaded.filter.sample_rate_hz != result.filter.sample_rate_hz ||
                   loaded.filter.zero_phase != result.filter.zero_phase) {
            fail(ErrorKind::InvalidState,
                 "model store " + store_dir.string() + ": filter parameters differ across models");
        }
        result.registry.add(std::move(loaded.model));
    }
    return result;
}

}  // namespace nrcid
