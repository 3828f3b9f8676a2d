// SPDX-License-Identifier: Apache-2.0
#include "fene/csvio.hpp"

#include <cstdio>

#include "fene/errors.hpp"

namespace fene {

CsvWriter::CsvWriter(const std::string& path) : path_(path), out_(path) {
    if (!out_) throw IoError("cannot open for writing: " + path);
}

std::string CsvWriter::format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) throw IoError("write failed: " + path_);
}

void CsvWriter::row(const std::vector<double>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << format(cells[i]);
    }
    out_ << '\n';
    if (!out_) throw IoError("write failed: " + path_);
}

} // namespace fene
