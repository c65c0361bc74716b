#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace specflow {

/// Flat key=value configuration. '#' starts a comment; blank lines are
/// ignored; later assignments override earlier ones.
class Config {
public:
    static Config parse(std::istream& in);
    static Config load(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    /// Typed lookups; the one-argument forms throw ValidationError when the
    /// key is missing, all forms throw on malformed values.
    std::string str(const std::string& key) const;
    std::string str(const std::string& key, const std::string& fallback) const;
    double num(const std::string& key) const;
    double num(const std::string& key, double fallback) const;
    long integer(const std::string& key) const;
    long integer(const std::string& key, long fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    /// Comma-separated numbers.
    std::vector<double> nums(const std::string& key) const;

private:
    std::map<std::string, std::string> values_;
};

/// printf %.17g.
std::string format_double(double x);

} // namespace specflow
