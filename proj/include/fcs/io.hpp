#pragma once

// Locale-independent numeric output: every floating-point value is printed
// with 12 significant digits via std::to_chars.

#include <charconv>
#include <cstdint>
#include <string>

namespace fcs {

inline std::string fmt_g12(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

inline std::string fmt_int(std::int64_t v) { return std::to_string(v); }

// Minimal flat JSON record builder with stable key order.
class JsonRecord {
public:
    JsonRecord& field(const std::string& key, double v) { return raw(key, fmt_g12(v)); }
    JsonRecord& field(const std::string& key, std::int64_t v) { return raw(key, fmt_int(v)); }
    JsonRecord& field(const std::string& key, bool v) { return raw(key, v ? "true" : "false"); }
    JsonRecord& field(const std::string& key, const std::string& v) {
        return raw(key, "\"" + v + "\"");
    }

    std::string str() const { return "{" + body_ + "}"; }

private:
    JsonRecord& raw(const std::string& key, const std::string& value) {
        if (!body_.empty()) body_ += ",";
        body_ += "\"" + key + "\":" + value;
        return *this;
    }
    std::string body_;
};

} // namespace fcs
