#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace umbilic::lab {

/// %.17g, or "null" for non-finite values.
inline std::string format_number(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Streaming pretty-printer with a fixed key order chosen by the caller.
/// Doubles are written at 17 significant digits so reports round-trip.
class JsonWriter {
public:
    JsonWriter& begin_object() { return open('{'); }
    JsonWriter& end_object() { return close('}'); }
    JsonWriter& begin_array() { return open('['); }
    JsonWriter& end_array() { return close(']'); }

    JsonWriter& key(std::string_view k) {
        separate();
        quote(k);
        out_ += ": ";
        pending_key_ = true;
        return *this;
    }

    JsonWriter& value(double v) { return raw(format_number(v)); }
    JsonWriter& value(int v) { return raw(std::to_string(v)); }
    JsonWriter& value(long v) { return raw(std::to_string(v)); }
    JsonWriter& value(long long v) { return raw(std::to_string(v)); }
    JsonWriter& value(unsigned v) { return raw(std::to_string(v)); }
    JsonWriter& value(unsigned long v) { return raw(std::to_string(v)); }
    JsonWriter& value(unsigned long long v) { return raw(std::to_string(v)); }
    JsonWriter& value(bool v) { return raw(v ? "true" : "false"); }
    JsonWriter& value(std::string_view v) {
        separate();
        quote(v);
        return *this;
    }
    JsonWriter& value(const char* v) { return value(std::string_view(v)); }
    JsonWriter& value(const std::string& v) { return value(std::string_view(v)); }
    JsonWriter& null() { return raw("null"); }

    template <class T>
    JsonWriter& field(std::string_view k, const T& v) {
        key(k);
        return value(v);
    }

    template <class Range>
    JsonWriter& numbers(const Range& r) {
        begin_array();
        inline_ = true;
        for (const auto& v : r) value(static_cast<double>(v));
        inline_ = false;
        return end_array_inline();
    }

    const std::string& str() const { return out_; }

private:
    struct Level {
        char close;
        std::size_t count = 0;
        bool inline_items = false;
    };

    JsonWriter& open(char c) {
        separate();
        out_ += c;
        stack_.push_back({c == '{' ? '}' : ']', 0, false});
        return *this;
    }

    JsonWriter& close(char c) {
        const Level level = stack_.back();
        stack_.pop_back();
        if (level.count > 0) newline();
        out_ += c;
        if (stack_.empty()) out_ += '\n';
        return *this;
    }

    JsonWriter& end_array_inline() {
        stack_.pop_back();
        out_ += ']';
        if (stack_.empty()) out_ += '\n';
        return *this;
    }

    JsonWriter& raw(std::string_view text) {
        separate();
        out_ += text;
        return *this;
    }

    // Comma and indentation before a new item; nothing after a key.
    void separate() {
        if (pending_key_) {
            pending_key_ = false;
            return;
        }
        if (stack_.empty()) return;
        Level& level = stack_.back();
        if (level.count++ > 0) out_ += inline_ ? ", " : ",";
        if (!inline_) newline();
    }

    void newline() {
        out_ += '\n';
        out_.append(2 * stack_.size(), ' ');
    }

    void quote(std::string_view s) {
        out_ += '"';
        for (char ch : s) {
            const auto c = static_cast<unsigned char>(ch);
            switch (ch) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                case '\r': out_ += "\\r"; break;
                default:
                    if (c < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", c);
                        out_ += buf;
                    } else {
                        out_ += ch;
                    }
            }
        }
        out_ += '"';
    }

    std::string out_;
    std::vector<Level> stack_;
    bool pending_key_ = false;
    bool inline_ = false;
};

}  // namespace umbilic::lab
