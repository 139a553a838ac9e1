#include "nrcid/xafcm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "nrcid/errors.hpp"
#include "nrcid/text.hpp"

namespace nrcid {

namespace {

constexpr double kMaxExactCount = 9007199254740992.0;  // 2^53

constexpr std::string_view kModelVersionLine = "xafcm/1";

}  // namespace

std::string format_alpha(const AlphaMode& alpha) {
    return alpha.is_auto ? "auto" : format_double(alpha.value);
}

AlphaMode parse_alpha(std::string_view text) {
    text = trim(text);
    if (text == "auto") return AlphaMode::automatic();
    return AlphaMode::fixed(parse_double(text, "alpha"));
}

void validate(const ModelParams& params) {
    if (params.context_order < 1)
        fail(ErrorKind::InvalidSpec, "context order must be >= 1, got " + std::to_string(params.context_order));
    if (params.block_depth < 1)
        fail(ErrorKind::InvalidSpec, "block depth must be >= 1, got " + std::to_string(params.block_depth));
    if (params.alphabet_size < 2 || params.alphabet_size > kMaxAlphabetSize)
        fail(ErrorKind::InvalidSpec, "alphabet size must lie in [2, 26], got " + std::to_string(params.alphabet_size));
    if (!params.alpha.is_auto && !(params.alpha.value > 0.0 && std::isfinite(params.alpha.value)))
        fail(ErrorKind::InvalidSpec, "fixed alpha must be a positive finite real");

    double extended = 1.0;
    for (int i = 0; i < params.block_depth; ++i) {
        extended *= static_cast<double>(params.alphabet_size);
        if (extended > kMaxExactCount)
            fail(ErrorKind::Capacity, "|A|^d = " + std::to_string(params.alphabet_size) + "^" +
                                          std::to_string(params.block_depth) +
                                          " exceeds exact count arithmetic");
    }
    if (!params.alpha.is_auto && !std::isfinite(params.alpha.value * extended))
        fail(ErrorKind::Capacity, "alpha * |A|^d is not finite");
}

double extended_alphabet_size(const ModelParams& params) {
    double extended = 1.0;
    for (int i = 0; i < params.block_depth; ++i)
        extended *= static_cast<double>(params.alphabet_size);
    return extended;
}

double resolve_alpha(const ModelParams& params) {
    if (!params.alpha.is_auto) return params.alpha.value;
    return 1.0 / extended_alphabet_size(params);
}

XaModel::XaModel(ModelParams params) : params_(params) {
    validate(params_);
    extended_size_ = extended_alphabet_size(params_);
    alpha_ = resolve_alpha(params_);
    // On auto, alpha * |A|^d is exactly one pseudo-event by definition.
    alpha_extended_ = params_.alpha.is_auto ? 1.0 : params_.alpha.value * extended_size_;
    log2_alphabet_ = std::log2(static_cast<double>(params_.alphabet_size));
}

std::uint64_t XaModel::total_events() const {
    std::uint64_t total = 0;
    for (const auto& [ctx, entry] : counts_) total += entry.total;
    return total;
}

void XaModel::check_symbols(const SymbolString& text) const {
    for (char c : text) {
        const int idx = index_for_symbol(c);
        if (idx < 0 || idx >= params_.alphabet_size)
            fail(ErrorKind::InvalidSymbol, std::string("symbol '") + c + "' outside alphabet of size " +
                                               std::to_string(params_.alphabet_size));
    }
}

void XaModel::learn(const SymbolString& training) {
    if (training.empty()) fail(ErrorKind::InvalidInput, "cannot learn from an empty string");
    check_symbols(training);

    const std::size_t n = training.size();
    const std::size_t k = static_cast<std::size_t>(params_.context_order);
    const std::size_t d = static_cast<std::size_t>(params_.block_depth);

    // Circular view: buffer position j holds training[(j - k) mod n], so the
    // context of training position i is buffer[i .. i+k) and its event is
    // buffer[i+k .. i+k+d). The offset keeps the index nonnegative even when
    // k wraps the string several times.
    const std::size_t wrap_offset = n * ((k + n - 1) / n);
    std::string buffer(k + n + d, '\0');
    for (std::size_t j = 0; j < buffer.size(); ++j)
        buffer[j] = training[(j + wrap_offset - k) % n];

    const std::string_view view(buffer);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string_view context = view.substr(i, k);
        const std::string_view event = view.substr(i + k, d);

        auto ctx_it = counts_.find(context);
        if (ctx_it == counts_.end())
            ctx_it = counts_.emplace(std::string(context), ContextCounts{}).first;
        ContextCounts& entry = ctx_it->second;
        entry.total += 1;

        auto ev_it = entry.events.find(event);
        if (ev_it == entry.events.end())
            entry.events.emplace(std::string(event), 1);
        else
            ev_it->second += 1;
    }
    trained_symbols_ += n;
}

std::uint64_t XaModel::event_count(std::string_view context, std::string_view event) const {
    const auto ctx_it = counts_.find(context);
    if (ctx_it == counts_.end()) return 0;
    const auto ev_it = ctx_it->second.events.find(event);
    return ev_it == ctx_it->second.events.end() ? 0 : ev_it->second;
}

std::uint64_t XaModel::context_total(std::string_view context) const {
    const auto ctx_it = counts_.find(context);
    return ctx_it == counts_.end() ? 0 : ctx_it->second.total;
}

double XaModel::estimate_probability(std::string_view context, std::string_view event) const {
    if (context.size() != static_cast<std::size_t>(params_.context_order))
        fail(ErrorKind::InvalidInput, "context length != k");
    if (event.size() != static_cast<std::size_t>(params_.block_depth))
        fail(ErrorKind::InvalidInput, "event length != d");
    const double v = static_cast<double>(event_count(context, event));
    const double total = static_cast<double>(context_total(context));
    return (v + alpha_) / (total + alpha_extended_);
}

// log2((total/|A|^d + alpha) / (v + alpha)); adding d*log2|A| gives
// -log2(P). Splitting out the uniform term makes an untrained context cost
// exactly d*log2|A| bits, so the uniform-model NRC limit is exactly 1.
double XaModel::correction_bits(std::string_view context, std::string_view event) const {
    const double v = static_cast<double>(event_count(context, event));
    const double total = static_cast<double>(context_total(context));
    return std::log2(total / extended_size_ + alpha_) - std::log2(v + alpha_);
}

double XaModel::block_bits(std::string_view context, std::string_view event) const {
    if (context.size() != static_cast<std::size_t>(params_.context_order))
        fail(ErrorKind::InvalidInput, "context length != k");
    if (event.size() != static_cast<std::size_t>(params_.block_depth))
        fail(ErrorKind::InvalidInput, "event length != d");
    const double uniform = static_cast<double>(params_.block_depth) * log2_alphabet_;
    return std::max(0.0, uniform + correction_bits(context, event));
}

CompressResult XaModel::compress_bits(const SymbolString& query) const {
    const std::size_t k = static_cast<std::size_t>(params_.context_order);
    const std::size_t d = static_cast<std::size_t>(params_.block_depth);
    const std::size_t n = query.size();
    if (n < std::max(k, d))
        fail(ErrorKind::InvalidInput, "query of length " + std::to_string(n) +
                                          " shorter than max(k, d) = " + std::to_string(std::max(k, d)));
    check_symbols(query);

    // Contexts of the first blocks wrap into the end of the query; n >= k
    // guarantees a single wrap suffices.
    std::string buffer;
    buffer.reserve(k + n);
    buffer.append(query, n - k, k);
    buffer.append(query);
    const std::string_view view(buffer);

    const double uniform_block = static_cast<double>(params_.block_depth) * log2_alphabet_;
    const std::size_t blocks = n / d;

    CompressResult result;
    result.coded_symbols = static_cast<std::uint64_t>(blocks * d);
    for (std::size_t i = 0; i < blocks; ++i) {
        const std::size_t start = i * d;
        const std::string_view context = view.substr(start, k);
        const std::string_view event = view.substr(start + k, d);
        result.bits += std::max(0.0, uniform_block + correction_bits(context, event));
        result.uniform_bits += uniform_block;
    }
    return result;
}

std::map<std::string, std::map<std::string, std::uint64_t>> XaModel::counts_snapshot() const {
    std::map<std::string, std::map<std::string, std::uint64_t>> snapshot;
    for (const auto& [context, entry] : counts_) {
        auto& events = snapshot[context];
        for (const auto& [event, count] : entry.events) events[event] = count;
    }
    return snapshot;
}

bool XaModel::same_counts(const XaModel& other) const {
    if (counts_.size() != other.counts_.size()) return false;
    for (const auto& [context, entry] : counts_) {
        const auto other_it = other.counts_.find(context);
        if (other_it == other.counts_.end()) return false;
        if (other_it->second.total != entry.total) return false;
        if (other_it->second.events.size() != entry.events.size()) return false;
        for (const auto& [event, count] : entry.events) {
            const auto ev_it = other_it->second.events.find(event);
            if (ev_it == other_it->second.events.end() || ev_it->second != count) return false;
        }
    }
    return true;
}

void XaModel::serialize(std::ostream& out) const {
    std::ostringstream body;
    body << kModelVersionLine << "\n";
    body << "params k=" << params_.context_order << " d=" << params_.block_depth
         << " alphabet=" << params_.alphabet_size << " alpha=" << format_alpha(params_.alpha)
         << " trained=" << trained_symbols_ << "\n";
    body << "contexts=" << counts_.size() << "\n";

    std::vector<std::string_view> contexts;
    contexts.reserve(counts_.size());
    for (const auto& [context, entry] : counts_) contexts.push_back(context);
    std::sort(contexts.begin(), contexts.end());

    std::vector<std::pair<std::string_view, std::uint64_t>> events;
    for (const std::string_view context : contexts) {
        const ContextCounts& entry = counts_.find(context)->second;
        events.assign(entry.events.begin(), entry.events.end());
        std::sort(events.begin(), events.end());
        body << context << ':';
        for (std::size_t i = 0; i < events.size(); ++i) {
            if (i) body << ',';
            body << events[i].first << '=' << events[i].second;
        }
        body << "\n";
    }

    const std::string text = body.str();
    out << text << "checksum=" << fnv1a64_hex(text) << "\n";
}

XaModel XaModel::deserialize(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&](std::string_view what) -> std::string& {
        if (!std::getline(in, line))
            fail(ErrorKind::DecodeTruncated, "stream ended before " + std::string(what) +
                                                 " (after line " + std::to_string(line_no) + ")");
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };

    std::ostringstream body;

    const std::string& version = next_line("version line");
    if (version != kModelVersionLine)
        fail(ErrorKind::DecodeVersion, "expected '" + std::string(kModelVersionLine) + "', got '" + version + "'");
    body << version << "\n";

    const std::string params_line = next_line("params line");
    body << params_line << "\n";
    ModelParams params;
    std::uint64_t trained = 0;
    {
        const auto fields = split(params_line, ' ');
        if (fields.size() != 6 || fields[0] != "params")
            fail(ErrorKind::DecodeParse, "bad params line at line " + std::to_string(line_no));
        auto field_value = [&](std::size_t idx, std::string_view key) -> std::string_view {
            const auto kv = split(fields[idx], '=');
            if (kv.size() != 2 || kv[0] != key)
                fail(ErrorKind::DecodeParse, "expected '" + std::string(key) + "=' at line " + std::to_string(line_no));
            return kv[1];
        };
        params.context_order = static_cast<int>(parse_int(field_value(1, "k"), "k"));
        params.block_depth = static_cast<int>(parse_int(field_value(2, "d"), "d"));
        params.alphabet_size = static_cast<int>(parse_int(field_value(3, "alphabet"), "alphabet"));
        params.alpha = parse_alpha(field_value(4, "alpha"));
        trained = static_cast<std::uint64_t>(parse_int(field_value(5, "trained"), "trained"));
    }

    const std::string contexts_line = next_line("contexts line");
    body << contexts_line << "\n";
    if (!contexts_line.starts_with("contexts="))
        fail(ErrorKind::DecodeParse, "expected 'contexts=' at line " + std::to_string(line_no));
    const long long declared = parse_int(std::string_view(contexts_line).substr(9), "contexts");
    if (declared < 0) fail(ErrorKind::DecodeParse, "negative context count");

    XaModel model(params);
    const std::size_t k = static_cast<std::size_t>(params.context_order);
    const std::size_t d = static_cast<std::size_t>(params.block_depth);

    for (long long c = 0; c < declared; ++c) {
        const std::string& entry_line = next_line("context entry");
        body << entry_line << "\n";
        const std::size_t colon = entry_line.find(':');
        if (colon == std::string::npos)
            fail(ErrorKind::DecodeParse, "missing ':' in context entry at line " + std::to_string(line_no));
        const std::string_view context = std::string_view(entry_line).substr(0, colon);
        if (context.size() != k)
            fail(ErrorKind::DecodeParse, "context length != k at line " + std::to_string(line_no));

        ContextCounts entry;
        for (const std::string_view item : split(std::string_view(entry_line).substr(colon + 1), ',')) {
            const auto kv = split(item, '=');
            if (kv.size() != 2 || kv[0].size() != d)
                fail(ErrorKind::DecodeParse, "bad event entry at line " + std::to_string(line_no));
            const long long count = parse_int(kv[1], "event count");
            if (count < 1)
                fail(ErrorKind::DecodeParse, "event count < 1 at line " + std::to_string(line_no));
            if (!entry.events.emplace(std::string(kv[0]), static_cast<std::uint64_t>(count)).second)
                fail(ErrorKind::DecodeParse, "duplicate event at line " + std::to_string(line_no));
            entry.total += static_cast<std::uint64_t>(count);
        }
        if (entry.events.empty())
            fail(ErrorKind::DecodeParse, "context with no events at line " + std::to_string(line_no));
        // Alphabet membership for stored words.
        for (const auto& [event, count] : entry.events)
            for (char ch : std::string(context) + event) {
                const int idx = index_for_symbol(ch);
                if (idx < 0 || idx >= params.alphabet_size)
                    fail(ErrorKind::DecodeParse, "symbol outside alphabet at line " + std::to_string(line_no));
            }
        if (!model.counts_.emplace(std::string(context), std::move(entry)).second)
            fail(ErrorKind::DecodeParse, "duplicate context at line " + std::to_string(line_no));
    }

    const std::string& checksum_line = next_line("checksum line");
    if (!checksum_line.starts_with("checksum="))
        fail(ErrorKind::DecodeTruncated, "missing checksum line at line " + std::to_string(line_no));
    const std::string expected = fnv1a64_hex(body.str());
    if (std::string_view(checksum_line).substr(9) != expected)
        fail(ErrorKind::DecodeChecksum, "model block checksum mismatch at line " + std::to_string(line_no));

    model.trained_symbols_ = trained;
    return model;
}

}  // namespace nrcid
