#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "oda/tasks.hpp"

namespace oda {

// Reads comma-separated decimal rows, with an optional final label column and
// an optional single header line (detected by a non-numeric first field).
// Labels are taken verbatim as strings.
LabeledDataset ingest_csv(const std::filesystem::path& path, bool has_labels);

// Shortest representation that round-trips through a double.
std::string format_double(double v);

// Deterministic CSV emitter: fixed header, fixed column count, no locale or
// stream-state dependence.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void write_row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    std::size_t columns_;
};

}  // namespace oda
