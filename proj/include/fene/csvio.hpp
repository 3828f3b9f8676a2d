// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace fene {

// Minimal CSV emitter. Doubles print with %.17g so a rerun with identical
// state reproduces files byte for byte.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    void row(const std::vector<std::string>& cells);
    void row(const std::vector<double>& cells);
    const std::string& path() const { return path_; }

    static std::string format(double v);

  private:
    std::string path_;
    std::ofstream out_;
};

} // namespace fene
