#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>

#include "ktd/unscented.hpp"

namespace ktd {

/// A config entry: number, bare word or bracketed matrix.
using ConfigValue = std::variant<double, std::string, Matrix>;

/// Flat key = value settings. Lines are "key = value"; "#" starts a comment;
/// matrices are written as row lists, e.g. [[1, 0], [0, 1]] or [1, 2, 3].
class Config {
public:
    static Config parse(std::string_view text);
    static Config load(const std::string& path);

    /// Serialized form, keys sorted; parse(to_text()) reproduces the entries.
    std::string to_text() const;

    void set(const std::string& key, ConfigValue value);
    /// Parses "key=value" and stores it.
    void assign(std::string_view assignment);
    /// Entries of `other` replace entries of this config.
    void merge(const Config& other);

    bool contains(const std::string& key) const { return entries_.count(key) != 0; }
    const ConfigValue& at(const std::string& key) const;
    const std::map<std::string, ConfigValue>& entries() const { return entries_; }

    double number(const std::string& key) const;
    /// A number that must be a non-negative integer.
    long long count(const std::string& key) const;
    std::string text(const std::string& key) const;
    Matrix matrix(const std::string& key) const;
    /// Length-n vector: a scalar is broadcast, a 1 x n or n x 1 matrix is taken as is.
    Vector vector(const std::string& key, Index n) const;
    /// n x n covariance: a scalar s gives s I, a vector gives a diagonal.
    Matrix covariance(const std::string& key, Index n) const;

    bool operator==(const Config& other) const;

private:
    std::map<std::string, ConfigValue> entries_;
};

ConfigValue parse_value(std::string_view text);
std::string format_value(const ConfigValue& value);

}  // namespace ktd
