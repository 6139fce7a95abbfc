#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ubr/errors.hpp"

namespace ubr {

/// Flat key-value config with [section] headers, '#'/';' comments, and
/// line-numbered diagnostics. Keys address as "section.key". Typed getters
/// mark keys consumed so a finished load can reject typos wholesale.
class KeyValueConfig {
public:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };

    static KeyValueConfig parse_text(std::string_view text, std::string origin = "<string>") {
        KeyValueConfig cfg;
        cfg.origin_ = std::move(origin);
        std::string section;
        int line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t eol = std::min(text.find('\n', pos), text.size());
            std::string_view line = text.substr(pos, eol - pos);
            pos = eol + 1;
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            line = trim(line);
            if (line.empty() || line.front() == '#' || line.front() == ';') continue;

            if (line.front() == '[') {
                if (line.back() != ']' || line.size() < 3)
                    cfg.fail(line_no, "malformed section header '" + std::string(line) + "'");
                section = std::string(trim(line.substr(1, line.size() - 2)));
                if (section.empty()) cfg.fail(line_no, "empty section name");
                continue;
            }

            const std::size_t eq = line.find('=');
            if (eq == std::string_view::npos)
                cfg.fail(line_no, "expected 'key = value', got '" + std::string(line) + "'");
            const std::string key_part = std::string(trim(line.substr(0, eq)));
            if (key_part.empty()) cfg.fail(line_no, "empty key");
            if (section.empty())
                cfg.fail(line_no, "key '" + key_part + "' appears before any [section]");
            const std::string key = section + "." + key_part;
            const std::string value = std::string(trim(line.substr(eq + 1)));
            if (auto it = cfg.entries_.find(key); it != cfg.entries_.end())
                cfg.fail(line_no, "duplicate key '" + key + "' (first set on line " +
                                      std::to_string(it->second.line) + ")");
            cfg.entries_[key] = Entry{value, line_no, false};
        }
        return cfg;
    }

    static KeyValueConfig parse_file(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open config '" + path.string() + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        if (in.bad()) throw IoError("failed reading config '" + path.string() + "'");
        return parse_text(ss.str(), path.string());
    }

    bool has(std::string_view key) const { return entries_.count(std::string(key)) > 0; }

    bool has_section(std::string_view section) const {
        const std::string prefix = std::string(section) + ".";
        auto it = entries_.lower_bound(prefix);
        return it != entries_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
    }

    std::optional<std::string> get_string(std::string_view key) const {
        auto it = entries_.find(std::string(key));
        if (it == entries_.end()) return std::nullopt;
        it->second.consumed = true;
        return it->second.value;
    }

    std::string require_string(std::string_view key) const {
        auto v = get_string(key);
        if (!v)
            throw ParseError(origin_ + ": missing required key '" + std::string(key) + "'");
        return *v;
    }

    std::optional<double> get_double(std::string_view key) const {
        auto v = get_string(key);
        if (!v) return std::nullopt;
        double out = 0.0;
        const char* first = v->data();
        const char* last = v->data() + v->size();
        const auto res = std::from_chars(first, last, out);
        if (res.ec != std::errc() || res.ptr != last)
            fail_key(key, "expected a number, got '" + *v + "'");
        return out;
    }

    std::optional<std::int64_t> get_int(std::string_view key) const {
        auto v = get_string(key);
        if (!v) return std::nullopt;
        std::int64_t out = 0;
        const auto res = std::from_chars(v->data(), v->data() + v->size(), out);
        if (res.ec != std::errc() || res.ptr != v->data() + v->size())
            fail_key(key, "expected an integer, got '" + *v + "'");
        return out;
    }

    std::optional<std::uint64_t> get_u64(std::string_view key) const {
        auto v = get_string(key);
        if (!v) return std::nullopt;
        std::uint64_t out = 0;
        const auto res = std::from_chars(v->data(), v->data() + v->size(), out);
        if (res.ec != std::errc() || res.ptr != v->data() + v->size())
            fail_key(key, "expected an unsigned integer, got '" + *v + "'");
        return out;
    }

    std::optional<bool> get_bool(std::string_view key) const {
        auto v = get_string(key);
        if (!v) return std::nullopt;
        std::string s = *v;
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
        if (s == "false" || s == "0" || s == "no" || s == "off") return false;
        fail_key(key, "expected a boolean, got '" + *v + "'");
        return false; // unreachable
    }

    /// Whitespace-separated list.
    std::optional<std::vector<std::string>> get_tokens(std::string_view key) const {
        auto v = get_string(key);
        if (!v) return std::nullopt;
        std::vector<std::string> out;
        std::istringstream ss(*v);
        std::string tok;
        while (ss >> tok) out.push_back(tok);
        return out;
    }

    /// Throw if any key was never consumed by a getter; catches typos like a
    /// misspelled section or option.
    void reject_unconsumed() const {
        for (const auto& [key, entry] : entries_) {
            if (!entry.consumed)
                throw ParseError(origin_ + " line " + std::to_string(entry.line) +
                                 ": unknown key '" + key + "'");
        }
    }

    int line_of(std::string_view key) const {
        auto it = entries_.find(std::string(key));
        return it == entries_.end() ? 0 : it->second.line;
    }

    const std::string& origin() const noexcept { return origin_; }

private:
    static std::string_view trim(std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            s.remove_suffix(1);
        return s;
    }

    [[noreturn]] void fail(int line, const std::string& what) const {
        throw ParseError(origin_ + " line " + std::to_string(line) + ": " + what);
    }

    [[noreturn]] void fail_key(std::string_view key, const std::string& what) const {
        const int line = line_of(key);
        throw ParseError(origin_ + " line " + std::to_string(line) + ": key '" +
                         std::string(key) + "': " + what);
    }

    std::string origin_;
    std::map<std::string, Entry, std::less<>> entries_;
};

} // namespace ubr
