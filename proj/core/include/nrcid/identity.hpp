#ifndef NRCID_IDENTITY_HPP
#define NRCID_IDENTITY_HPP

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nrcid/quantizer.hpp"
#include "nrcid/signal.hpp"
#include "nrcid/xafcm.hpp"

namespace nrcid {

struct SessionProvenance {
    std::string session_id;
    std::uint64_t symbol_count = 0;

    bool operator==(const SessionProvenance&) const = default;
};

struct ParticipantModel {
    std::string participant_id;
    Codebook codebook;
    XaModel model;
    std::vector<SessionProvenance> provenance;
};

// The (k, d)-independent part of enrollment: filtered derivatives feed the
// codebook, then the whole concatenated training string is symbolized once.
// Sweeps reuse this and rebuild only the count tables.
struct EnrollmentBase {
    std::string participant_id;
    Codebook codebook;
    SymbolString training_symbols;
    std::vector<SessionProvenance> provenance;
};

EnrollmentBase prepare_enrollment(const std::string& participant_id,
                                  std::span<const RawRecording> recordings,
                                  const FilterSpec& filter, const QuantizerSpec& qspec);

ParticipantModel build_participant_model(const EnrollmentBase& base, const ModelParams& params);

// filter -> differentiate -> concatenate sessions -> train quantizer ->
// quantize -> learn counts; the returned model is frozen.
ParticipantModel enroll(const std::string& participant_id,
                        std::span<const RawRecording> recordings, const ModelParams& params,
                        const FilterSpec& filter, const QuantizerSpec& qspec);

struct NrcScore {
    double nrc = 0.0;
    std::uint64_t coded_symbols = 0;
};

// Quantizes the segment's filtered derivative with this model's codebook and
// normalizes the cross-compression bits by the coded length at log2|A| bits
// per symbol.
NrcScore nrc(const ParticipantModel& pm, std::span<const double> segment, const FilterSpec& filter);

// Same scoring applied to an already-differenced segment.
NrcScore nrc_of_derivative(const ParticipantModel& pm, std::span<const double> derivative);

class Registry {
public:
    // Keeps models sorted by participant id; rejects duplicate ids and
    // mismatched (k, d, alphabet, alpha) parameters.
    void add(ParticipantModel model);

    const std::vector<ParticipantModel>& models() const { return models_; }
    bool empty() const { return models_.empty(); }
    std::size_t size() const { return models_.size(); }
    const ModelParams& shared_params() const;

private:
    std::vector<ParticipantModel> models_;
};

struct IdentificationResult {
    std::string predicted;
    std::vector<std::pair<std::string, double>> scores;  // ascending nrc, ties by id
    std::uint64_t coded_symbols = 0;
};

IdentificationResult identify(const Registry& registry, std::span<const double> segment,
                              const FilterSpec& filter, unsigned threads = 1);

// Participant-model file: '[meta]' (ids, parameters), '[codebook]',
// '[model]' sections. A registry is a directory of <participant>.model
// files sharing one parameter set.
extern const char* const kModelFileExtension;

void save_participant_model(const ParticipantModel& pm, const FilterSpec& filter,
                            const std::filesystem::path& path);

struct LoadedModel {
    ParticipantModel model;
    FilterSpec filter;
};

LoadedModel load_participant_model(const std::filesystem::path& path);

struct LoadedRegistry {
    Registry registry;
    FilterSpec filter;
};

LoadedRegistry load_registry(const std::filesystem::path& store_dir);

}  // namespace nrcid

#endif
