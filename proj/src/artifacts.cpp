#include "svp/artifacts.hpp"

#include <cstdio>
#include <fstream>

#include "svp/error.hpp"
#include "svp/matrix.hpp"

namespace svp {

std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void config_echo::put(const std::string& key, std::string value) {
    require(!key.empty(), errc::bad_spec, "config key must be nonempty");
    items_[key] = std::move(value);
}

void config_echo::put(const std::string& key, const char* value) {
    put(key, std::string(value));
}

void config_echo::put(const std::string& key, double value) { put(key, format_double(value)); }
void config_echo::put(const std::string& key, int value) { put(key, std::to_string(value)); }
void config_echo::put(const std::string& key, long value) { put(key, std::to_string(value)); }
void config_echo::put(const std::string& key, std::uint64_t value) {
    put(key, std::to_string(value));
}
void config_echo::put(const std::string& key, bool value) {
    put(key, std::string(value ? "true" : "false"));
}

std::string config_echo::canonical() const {
    std::string out;
    for (const auto& [k, v] : items_) {
        if (k == "seed" || k == "out" || k == "threads") continue;
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::string config_echo::hash() const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical())));
    return buf;
}

std::string artifact_stem(const std::string& command, const config_echo& cfg,
                          std::uint64_t seed) {
    return command + "-" + cfg.hash() + "-" + std::to_string(seed);
}

csv_file::csv_file(std::vector<std::string> columns) : columns_(std::move(columns)) {
    require(!columns_.empty(), errc::bad_spec, "a CSV needs at least one column");
}

void csv_file::add_row(std::vector<std::string> cells) {
    require(cells.size() == columns_.size(), errc::length_mismatch,
            "row has " + std::to_string(cells.size()) + " cells, header has " +
                std::to_string(columns_.size()));
    rows_.push_back(std::move(cells));
}

std::string provenance(const config_echo& cfg, std::uint64_t seed) {
    return "artifact_version=" + std::to_string(artifact_version) + " config_hash=" + cfg.hash() +
           " seed=" + std::to_string(seed);
}

std::string csv_file::text(const config_echo& cfg, std::uint64_t seed) const {
    std::string out = "# " + provenance(cfg, seed) + "\n";
    auto append_row = [&out](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    append_row(columns_);
    for (const auto& row : rows_) append_row(row);
    return out;
}

void csv_file::write(const std::string& path, const config_echo& cfg,
                     std::uint64_t seed) const {
    write_text_file(path, text(cfg, seed));
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), errc::io_error, "cannot open " + path + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    require(out.good(), errc::io_error, "write to " + path + " failed");
}

std::string cell(double v) { return format_double(v); }
std::string cell(int v) { return std::to_string(v); }
std::string cell(long v) { return std::to_string(v); }
std::string cell(long long v) { return std::to_string(v); }
std::string cell(std::uint64_t v) { return std::to_string(v); }
std::string cell(bool v) { return v ? "1" : "0"; }

} // namespace svp
