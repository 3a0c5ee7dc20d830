#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace svp {

// Stamped into every artifact; bump on any schema change.
inline constexpr int artifact_version = 1;

std::uint64_t fnv1a64(std::string_view s) noexcept;

// The merged effective configuration of one command run, as flat string
// key/value pairs. The hash identifies the experiment, so run-identity keys
// are excluded from the canonical form: the seed is carried next to the
// hash in the artifact name, and neither the output directory nor the
// worker count is allowed to change results.
class config_echo {
public:
    void put(const std::string& key, std::string value);
    void put(const std::string& key, const char* value);
    void put(const std::string& key, double value);  // exact decimal form
    void put(const std::string& key, int value);
    void put(const std::string& key, long value);
    void put(const std::string& key, std::uint64_t value);
    void put(const std::string& key, bool value);  // true / false

    const std::map<std::string, std::string>& items() const noexcept { return items_; }

    // "key=value\n" lines in key order, hash-excluded keys skipped.
    std::string canonical() const;
    std::string hash() const;  // 16 hex digits of fnv1a64(canonical())

private:
    std::map<std::string, std::string> items_;
};

// "artifact_version=... config_hash=... seed=..." — the provenance fields
// every artifact embeds (CSV/JSON writers add their own framing).
std::string provenance(const config_echo& cfg, std::uint64_t seed);

// {command}-{confighash}-{seed}, extension added by the writer.
std::string artifact_stem(const std::string& command, const config_echo& cfg,
                          std::uint64_t seed);

// Deterministic CSV: one provenance comment line, a header row, data rows,
// "\n" endings throughout. Cells are written verbatim, so doubles must come
// through cell() / format_double to stay exact.
class csv_file {
public:
    explicit csv_file(std::vector<std::string> columns);

    void add_row(std::vector<std::string> cells);  // LengthMismatch on width

    std::string text(const config_echo& cfg, std::uint64_t seed) const;
    void write(const std::string& path, const config_echo& cfg, std::uint64_t seed) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

void write_text_file(const std::string& path, const std::string& content);

// CSV cell formatting: exact decimal doubles, plain integers, 1/0 booleans.
std::string cell(double v);
std::string cell(int v);
std::string cell(long v);
std::string cell(long long v);
std::string cell(std::uint64_t v);
std::string cell(bool v);

} // namespace svp
