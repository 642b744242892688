#include "ktd/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "ktd/error.hpp"

namespace ktd {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && end == s.data() + s.size();
}

std::string format_double(double x) {
    char buf[40];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

std::vector<double> parse_row(std::string_view s) {
    std::vector<double> row;
    s = trim(s);
    if (s.empty()) return row;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        const std::string_view item =
            s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        double x = 0.0;
        if (!parse_double(item, x)) throw ConfigError("bad matrix entry '" + std::string(trim(item)) + "'");
        row.push_back(x);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return row;
}

Matrix parse_matrix(std::string_view s) {
    s = trim(s);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
        throw ConfigError("matrix must be enclosed in brackets: " + std::string(s));
    }
    const std::string_view inner = trim(s.substr(1, s.size() - 2));
    std::vector<std::vector<double>> rows;
    if (!inner.empty() && inner.front() == '[') {
        std::size_t pos = 0;
        while (pos < inner.size()) {
            if (inner[pos] != '[') throw ConfigError("malformed matrix: " + std::string(s));
            const std::size_t close = inner.find(']', pos);
            if (close == std::string_view::npos) throw ConfigError("unterminated matrix row: " + std::string(s));
            rows.push_back(parse_row(inner.substr(pos + 1, close - pos - 1)));
            pos = close + 1;
            while (pos < inner.size() && (inner[pos] == ',' || std::isspace(static_cast<unsigned char>(inner[pos])))) ++pos;
        }
    } else {
        rows.push_back(parse_row(inner));
    }
    if (rows.empty() || rows.front().empty()) throw ConfigError("empty matrix: " + std::string(s));
    const std::size_t cols = rows.front().size();
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw ConfigError("ragged matrix: " + std::string(s));
        for (std::size_t j = 0; j < cols; ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
    return m;
}

}  // namespace

ConfigValue parse_value(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw ConfigError("empty value");
    if (text.front() == '[') return parse_matrix(text);
    double x = 0.0;
    if (parse_double(text, x)) return x;
    return std::string(text);
}

std::string format_value(const ConfigValue& value) {
    if (const auto* x = std::get_if<double>(&value)) return format_double(*x);
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    const Matrix& m = std::get<Matrix>(value);
    std::string out = "[";
    for (Index i = 0; i < m.rows(); ++i) {
        if (i > 0) out += ", ";
        out += "[";
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out += ", ";
            out += format_double(m(i, j));
        }
        out += "]";
    }
    return out + "]";
}

Config Config::parse(std::string_view text) {
    Config config;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        ++line_no;
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty()) {
            const std::size_t before = config.entries_.size();
            try {
                config.assign(line);
                if (config.entries_.size() == before) throw ConfigError("duplicate key");
            } catch (const ConfigError& e) {
                throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    return config;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string Config::to_text() const {
    std::string out;
    for (const auto& [key, value] : entries_) out += key + " = " + format_value(value) + "\n";
    return out;
}

void Config::set(const std::string& key, ConfigValue value) {
    if (key.empty()) throw ConfigError("empty key");
    for (const char c : key) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) {
            throw ConfigError("invalid key '" + key + "'");
        }
    }
    entries_[key] = std::move(value);
}

void Config::assign(std::string_view assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key = value, got '" + std::string(assignment) + "'");
    set(std::string(trim(assignment.substr(0, eq))), parse_value(assignment.substr(eq + 1)));
}

void Config::merge(const Config& other) {
    for (const auto& [key, value] : other.entries_) entries_[key] = value;
}

const ConfigValue& Config::at(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
}

double Config::number(const std::string& key) const {
    const ConfigValue& v = at(key);
    if (const auto* x = std::get_if<double>(&v)) return *x;
    if (const auto* m = std::get_if<Matrix>(&v); m != nullptr && m->size() == 1) return (*m)(0, 0);
    throw ConfigError("key '" + key + "' must be a number");
}

long long Config::count(const std::string& key) const {
    const double x = number(key);
    if (!(x >= 0.0) || std::floor(x) != x || x > 9.0e15) {
        throw ConfigError("key '" + key + "' must be a non-negative integer");
    }
    return static_cast<long long>(x);
}

std::string Config::text(const std::string& key) const {
    const ConfigValue& v = at(key);
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    return format_value(v);
}

Matrix Config::matrix(const std::string& key) const {
    const ConfigValue& v = at(key);
    if (const auto* m = std::get_if<Matrix>(&v)) return *m;
    if (const auto* x = std::get_if<double>(&v)) return Matrix::Constant(1, 1, *x);
    throw ConfigError("key '" + key + "' must be a matrix");
}

Vector Config::vector(const std::string& key, Index n) const {
    const Matrix m = matrix(key);
    if (m.size() == 1) return Vector::Constant(n, m(0, 0));
    if ((m.rows() == 1 || m.cols() == 1) && m.size() == n) return m.reshaped();
    throw ConfigError("key '" + key + "' must be a scalar or a vector of length " + std::to_string(n));
}

Matrix Config::covariance(const std::string& key, Index n) const {
    const Matrix m = matrix(key);
    if (m.size() == 1) return m(0, 0) * Matrix::Identity(n, n);
    if (m.rows() == n && m.cols() == n) return m;
    if ((m.rows() == 1 || m.cols() == 1) && m.size() == n) return Vector(m.reshaped()).asDiagonal();
    throw ConfigError("key '" + key + "' must be a scalar, a length-" + std::to_string(n) +
                      " diagonal or a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
}

bool Config::operator==(const Config& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (auto a = entries_.begin(), b = other.entries_.begin(); a != entries_.end(); ++a, ++b) {
        if (a->first != b->first || a->second.index() != b->second.index()) return false;
        if (const auto* m = std::get_if<Matrix>(&a->second)) {
            const Matrix& n = std::get<Matrix>(b->second);
            if (m->rows() != n.rows() || m->cols() != n.cols() || *m != n) return false;
        } else if (format_value(a->second) != format_value(b->second)) {
            return false;
        }
    }
    return true;
}

}  // namespace ktd
