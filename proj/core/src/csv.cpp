#include "oda/io/csv.hpp"

#include <charconv>
#include <system_error>

namespace oda {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    // Trim surrounding whitespace and a trailing carriage return.
    for (auto& f : fields) {
        while (!f.empty() && (f.back() == '\r' || f.back() == ' ' || f.back() == '\t')) f.pop_back();
        std::size_t i = 0;
        while (i < f.size() && (f[i] == ' ' || f[i] == '\t')) ++i;
        f.erase(0, i);
    }
    return fields;
}

bool parse_number(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !s.empty();
}

}  // namespace

LabeledDataset ingest_csv(const std::filesystem::path& path, bool has_labels) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());

    LabeledDataset data;
    std::string line;
    std::size_t line_no = 0;
    bool first_content_row = true;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_fields(line);
        const std::size_t n_features = has_labels ? fields.size() - 1 : fields.size();
        if (has_labels && fields.size() < 2)
            throw ParseError("line " + std::to_string(line_no) + ": labeled rows need >= 2 columns");

        if (first_content_row) {
            double probe;
            if (!parse_number(fields[0], probe)) continue;  // header line
        }

        if (data.dimension == 0) {
            data.dimension = n_features;
        } else if (n_features != data.dimension) {
            throw RaggedRows("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(data.dimension) + " feature columns, got " +
                             std::to_string(n_features));
        }
        first_content_row = false;

        Observation obs;
        obs.x.resize(n_features);
        for (std::size_t i = 0; i < n_features; ++i) {
            if (!parse_number(fields[i], obs.x[i]))
                throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" +
                                 fields[i] + "' as a number");
        }
        if (has_labels) {
            obs.label = fields.back();
            data.classes.insert(*obs.label);
        }
        data.rows.push_back(std::move(obs));
    }

    if (data.rows.empty()) throw EmptyFile("no data rows in " + path.string());
    return data;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw NumericalError("double formatting failed");
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
    if (!out_) throw ParseError("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ << ',';
        out_ << header[i];
    }
    out_ << '\n';
}

void CsvWriter::write_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
        throw ConfigError("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(columns_));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

}  // namespace oda
