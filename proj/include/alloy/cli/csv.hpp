#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include <unistd.h>

#include "alloy/errors.hpp"

namespace alloy::cli {

// Shortest round-trip representation; nan/inf spelled out.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw Error("number formatting failed");
    return std::string(buf, end);
}

inline std::string fmt(long long v) { return std::to_string(v); }
inline std::string fmt(unsigned long long v) { return std::to_string(v); }
inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(std::size_t v) { return std::to_string(v); }
inline std::string fmt(bool v) { return v ? "true" : "false"; }
inline std::string fmt(const std::string& v) { return v; }
inline std::string fmt(const char* v) { return v; }

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return out;
}

// RFC 4180: quote fields holding a comma, quote or line break; double embedded quotes.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    template <class... T>
    void add(const T&... values) {
        std::vector<std::string> row{fmt(values)...};
        if (row.size() != columns_.size()) throw Error("csv row width does not match header");
        rows_.push_back(std::move(row));
    }

    void add_row(std::vector<std::string> row) {
        if (row.size() != columns_.size()) throw Error("csv row width does not match header");
        rows_.push_back(std::move(row));
    }

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

    // Prefixes every row with the same leading columns.
    CsvTable with_prefix(const std::vector<std::pair<std::string, std::string>>& prefix) const {
        std::vector<std::string> cols;
        for (const auto& [k, v] : prefix) cols.push_back(k);
        cols.insert(cols.end(), columns_.begin(), columns_.end());
        CsvTable out(cols);
        for (const auto& r : rows_) {
            std::vector<std::string> row;
            for (const auto& [k, v] : prefix) row.push_back(v);
            row.insert(row.end(), r.begin(), r.end());
            out.rows_.push_back(std::move(row));
        }
        return out;
    }

    std::string str() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_field(r[i]);
            out += "\r\n";
        };
        line(columns_);
        for (const auto& r : rows_) line(r);
        return out;
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes to a sibling temp file and renames it over `path`, so readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot rename onto " + path.string());
    }
}

} // namespace alloy::cli
