// io.hpp - CSV tables, grid text files, content digests, atomic file emission
#pragma once

#include <Eigen/Dense>
#include <openssl/evp.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <unistd.h>
#include <vector>

namespace oamsim::io {

// Shortest round-trip is not enough for byte stability across libraries; fixed 17 significant digits is.
inline std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (r.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return {buf, r.ptr};
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    CsvTable& row(const std::vector<double>& values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(format_double(v));
        return row_strings(std::move(cells));
    }
    CsvTable& row_strings(std::vector<std::string> cells) {
        if (cells.size() != header_.size()) throw std::invalid_argument("CsvTable: row width does not match header");
        rows_.push_back(std::move(cells));
        return *this;
    }
    [[nodiscard]] std::size_t size() const { return rows_.size(); }

    [[nodiscard]] std::string str() const {
        std::string out;
        auto line = [&out](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += csv_field(cells[i]);
            }
            out += '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return out;
    }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// "rows cols l_min j_min" then one row per line, values separated by single spaces.
inline std::string grid_text(const Eigen::MatrixXd& g, int l_min, int j_min) {
    std::string out = std::to_string(g.rows()) + ' ' + std::to_string(g.cols()) + ' ' + std::to_string(l_min) + ' ' +
                      std::to_string(j_min) + '\n';
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
        for (Eigen::Index c = 0; c < g.cols(); ++c) {
            if (c) out += ' ';
            out += format_double(g(r, c));
        }
        out += '\n';
    }
    return out;
}

struct Grid {
    Eigen::MatrixXd values;
    int l_min = 0;
    int j_min = 0;
};

inline Grid parse_grid(const std::string& text) {
    std::istringstream in(text);
    Eigen::Index rows = 0, cols = 0;
    Grid g;
    if (!(in >> rows >> cols >> g.l_min >> g.j_min) || rows < 0 || cols < 0)
        throw std::invalid_argument("parse_grid: bad header");
    g.values.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            if (!(in >> g.values(r, c))) throw std::invalid_argument("parse_grid: truncated body");
    return g;
}

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + p.string());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// Write to a sibling temp file, then rename over the target.
inline void write_atomic(const std::filesystem::path& target, const std::string& content) {
    auto tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, target);
}

// Named file contents held in memory until the whole run succeeded.
class OutputSet {
  public:
    void add(const std::string& name, std::string content) {
        if (name.find('/') != std::string::npos) throw std::invalid_argument("OutputSet: flat file names only");
        files_[name] = std::move(content);
    }
    [[nodiscard]] const std::map<std::string, std::string>& files() const { return files_; }

    // All temp files are written before any rename so a failed write leaves no output behind.
    void commit(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        const std::string suffix = ".tmp." + std::to_string(::getpid());
        std::vector<std::filesystem::path> written;
        try {
            for (const auto& [name, content] : files_) {
                const auto tmp = dir / (name + suffix);
                std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
                written.push_back(tmp);
                f.write(content.data(), static_cast<std::streamsize>(content.size()));
                f.flush();
                if (!f) throw std::runtime_error("write failed for " + tmp.string());
            }
        } catch (...) {
            std::error_code ec;
            for (const auto& p : written) std::filesystem::remove(p, ec);
            throw;
        }
        for (const auto& [name, content] : files_) std::filesystem::rename(dir / (name + suffix), dir / name);
    }

  private:
    std::map<std::string, std::string> files_;
};

}  // namespace oamsim::io
