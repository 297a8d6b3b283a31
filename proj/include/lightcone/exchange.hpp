#pragma once

// Matrix exchange format: {"rows": n, "cols": m, "entries": [[re, im], ...]},
// entries row-major. Readers reject NaN/Inf and entry-count mismatches.
// Writes are atomic (temp file + rename).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "lightcone/linalg.hpp"

namespace lightcone {

inline nlohmann::json matrix_to_json(const CMat& x) {
    nlohmann::json entries = nlohmann::json::array();
    for (long i = 0; i < x.rows(); ++i)
        for (long j = 0; j < x.cols(); ++j) {
            const Complex v = x(i, j);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw NumericalError("matrix_to_json: non-finite entry");
            entries.push_back({v.real(), v.imag()});
        }
    return nlohmann::json{{"rows", x.rows()}, {"cols", x.cols()}, {"entries", entries}};
}

inline CMat matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
        !j.contains("entries"))
        throw ValidationError("matrix document: missing rows/cols/entries");
    const long rows = j.at("rows").get<long>();
    const long cols = j.at("cols").get<long>();
    if (rows < 1 || cols < 1)
        throw ValidationError("matrix document: non-positive dimensions");
    const auto& entries = j.at("entries");
    if (!entries.is_array() ||
        static_cast<long>(entries.size()) != rows * cols)
        throw ValidationError("matrix document: entry count != rows*cols");
    CMat x(rows, cols);
    long idx = 0;
    for (const auto& e : entries) {
        if (!e.is_array() || e.size() != 2)
            throw ValidationError("matrix document: entry is not [re, im]");
        const double re = e[0].get<double>();
        const double im = e[1].get<double>();
        if (!std::isfinite(re) || !std::isfinite(im))
            throw ValidationError("matrix document: NaN/Inf entry rejected");
        x(idx / cols, idx % cols) = Complex(re, im);
        ++idx;
    }
    return x;
}

inline void atomic_write_text(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot open for writing: " + tmp);
        out << text;
        if (!out) throw ValidationError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline void save_matrix(const std::string& path, const CMat& x) {
    atomic_write_text(path, matrix_to_json(x).dump(2) + "\n");
}

inline CMat load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open matrix file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("malformed matrix document: ") + e.what());
    }
    return matrix_from_json(j);
}

}  // namespace lightcone
