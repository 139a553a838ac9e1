#include "nrcid/dataset.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "nrcid/errors.hpp"
#include "nrcid/text.hpp"

namespace nrcid {

namespace fs = std::filesystem;

const char* const kManifestFileName = "manifest.txt";

namespace {

// Parses '# key=value key=value ...' headers.
void apply_header(std::string_view line, RawRecording& recording) {
    line.remove_prefix(1);  // '#'
    for (std::string_view field : split(line, ' ')) {
        field = trim(field);
        if (field.empty()) continue;
        const auto kv = split(field, '=');
        if (kv.size() != 2)
            fail(ErrorKind::DecodeParse, "bad header field '" + std::string(field) + "'");
        if (kv[0] == "participant")
            recording.participant_id = std::string(kv[1]);
        else if (kv[0] == "session")
            recording.session_id = std::string(kv[1]);
        else if (kv[0] == "rate_hz")
            recording.sample_rate_hz = parse_double(kv[1], "rate_hz");
        else
            fail(ErrorKind::DecodeParse, "unknown header field '" + std::string(kv[0]) + "'");
    }
}

}  // namespace

RawRecording read_recording_csv(const fs::path& path, std::string_view default_participant,
                                std::string_view default_session, double default_rate_hz) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open recording file " + path.string());

    RawRecording recording;
    recording.participant_id = std::string(default_participant);
    recording.session_id = std::string(default_session);
    recording.sample_rate_hz = default_rate_hz;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string_view text = trim(line);
        if (text.empty()) continue;
        if (text.front() == '#') {
            if (line_no == 1) {
                apply_header(text, recording);
                continue;
            }
            fail(ErrorKind::DecodeParse,
                 path.string() + ":" + std::to_string(line_no) + ": header allowed only on line 1");
        }
        try {
            recording.samples.push_back(parse_double(text, "sample"));
        } catch (const Error&) {
            fail(ErrorKind::DecodeParse,
                 path.string() + ":" + std::to_string(line_no) + ": bad sample value '" + std::string(text) + "'");
        }
    }
    if (recording.samples.empty())
        fail(ErrorKind::InvalidDataset, "recording file " + path.string() + " has no samples");
    if (!(recording.sample_rate_hz > 0.0))
        fail(ErrorKind::InvalidDataset,
             "no sample rate for " + path.string() + " (missing header and manifest)");
    return recording;
}

void write_recording_csv(const RawRecording& recording, const fs::path& path, bool with_header) {
    std::ostringstream out;
    if (with_header)
        out << "# participant=" << recording.participant_id << " session=" << recording.session_id
            << " rate_hz=" << format_double(recording.sample_rate_hz) << "\n";
    for (double v : recording.samples) out << format_double(v) << "\n";
    atomic_write_file(path, out.str());
}

double read_manifest_rate(const fs::path& root) {
    const fs::path manifest = root / kManifestFileName;
    std::ifstream in(manifest);
    if (!in) fail(ErrorKind::InvalidDataset, "missing dataset manifest " + manifest.string());
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto kv = split(text, '=');
        if (kv.size() == 2 && kv[0] == "rate_hz") {
            const double rate = parse_double(kv[1], "rate_hz");
            if (!(rate > 0.0)) fail(ErrorKind::InvalidDataset, "manifest rate_hz must be positive");
            return rate;
        }
    }
    fail(ErrorKind::InvalidDataset, "manifest " + manifest.string() + " has no rate_hz line");
}

void write_manifest(const fs::path& root, double rate_hz) {
    atomic_write_file(root / kManifestFileName, "rate_hz=" + format_double(rate_hz) + "\n");
}

std::size_t DatasetInventory::recording_count() const {
    std::size_t count = 0;
    for (const auto& [participant, sessions] : files) count += sessions.size();
    return count;
}

DatasetInventory scan_dataset(const fs::path& root) {
    if (!fs::is_directory(root))
        fail(ErrorKind::InvalidDataset, "dataset root " + root.string() + " is not a directory");

    DatasetInventory inventory;
    inventory.root = root;
    inventory.rate_hz = read_manifest_rate(root);

    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        const std::string participant = entry.path().filename().string();
        for (const auto& file : fs::directory_iterator(entry.path())) {
            if (!file.is_regular_file() || file.path().extension() != ".csv") continue;
            const std::string session = file.path().stem().string();
            inventory.files[participant][session] = file.path();
        }
    }
    if (inventory.files.empty())
        fail(ErrorKind::InvalidDataset, "dataset root " + root.string() + " contains no recordings");
    return inventory;
}

std::vector<RawRecording> load_dataset(const fs::path& root) {
    const DatasetInventory inventory = scan_dataset(root);
    std::vector<RawRecording> recordings;
    recordings.reserve(inventory.recording_count());
    for (const auto& [participant, sessions] : inventory.files) {
        for (const auto& [session, path] : sessions) {
            RawRecording recording = read_recording_csv(path, participant, session, inventory.rate_hz);
            if (recording.participant_id != participant || recording.session_id != session)
                fail(ErrorKind::InvalidDataset,
                     path.string() + ": header ids disagree with directory layout");
            if (recording.sample_rate_hz != inventory.rate_hz)
                fail(ErrorKind::InvalidDataset,
                     path.string() + ": header rate disagrees with manifest");
            validate(recording);
            recordings.push_back(std::move(recording));
        }
    }
    return recordings;
}

void atomic_write_file(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) fail(ErrorKind::Io, "cannot create directory " + path.parent_path().string());
    }
    const fs::path temp = path.string() + ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::Io, "cannot open " + temp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) fail(ErrorKind::Io, "short write to " + temp.string());
    }
    std::error_code ec;
    fs::rename(temp, path, ec);
    if (ec) fail(ErrorKind::Io, "cannot rename " + temp.string() + " to " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void validate_participant_id(std::string_view id) {
    if (id.empty()) fail(ErrorKind::InvalidInput, "participant id must not be empty");
    for (char c : id)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
            fail(ErrorKind::InvalidInput,
                 "participant id '" + std::string(id) + "' contains unsupported character '" + c + "'");
}

}  // namespace nrcid
