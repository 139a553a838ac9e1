#ifndef NRCID_DATASET_HPP
#define NRCID_DATASET_HPP

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nrcid/signal.hpp"

namespace nrcid {

// Recording CSV: one real-valued sample per line, optionally preceded by
// '# participant=<id> session=<id> rate_hz=<real>'. Defaults fill whatever
// the header omits.
RawRecording read_recording_csv(const std::filesystem::path& path,
                                std::string_view default_participant = {},
                                std::string_view default_session = {},
                                double default_rate_hz = 0.0);

void write_recording_csv(const RawRecording& recording, const std::filesystem::path& path,
                         bool with_header = true);

// Dataset directory layout: <root>/<participant>/<session>.csv plus a
// per-root manifest holding 'rate_hz=<real>'.
extern const char* const kManifestFileName;

double read_manifest_rate(const std::filesystem::path& root);
void write_manifest(const std::filesystem::path& root, double rate_hz);

struct DatasetInventory {
    std::filesystem::path root;
    double rate_hz = 0.0;
    // participant -> session -> file
    std::map<std::string, std::map<std::string, std::filesystem::path>> files;

    std::size_t recording_count() const;
};

DatasetInventory scan_dataset(const std::filesystem::path& root);
std::vector<RawRecording> load_dataset(const std::filesystem::path& root);

// Write-temp-then-rename; an interrupted run never leaves a partial file.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// Participant ids become file names; restrict to a safe set.
void validate_participant_id(std::string_view id);

}  // namespace nrcid

#endif
