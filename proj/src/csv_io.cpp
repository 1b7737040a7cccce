#include "ctxscope/csv_io.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "ctxscope/error.hpp"

namespace ctxscope {

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
};

std::string trimmed(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return std::string(s);
}

std::vector<std::string> split_line(std::string_view line, std::size_t line_no) {
    if (line.find('"') != std::string_view::npos) {
        fail(ErrorKind::Input, "line " + std::to_string(line_no) + ": quoted fields are not supported");
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        fields.push_back(trimmed(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

CsvTable read_table(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string content = trimmed(line);
        if (content.empty() || content.front() == '#') {
            continue;
        }
        auto fields = split_line(content, line_no);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            fail(ErrorKind::Input, "line " + std::to_string(line_no) + ": expected " +
                                       std::to_string(table.header.size()) + " fields, got " +
                                       std::to_string(fields.size()));
        }
        for (const auto& f : fields) {
            if (f.empty()) {
                fail(ErrorKind::Input, "line " + std::to_string(line_no) + ": empty field (missing values are not supported)");
            }
        }
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    if (!have_header) {
        fail(ErrorKind::Input, "CSV input is empty (no header line)");
    }
    return table;
}

bool is_number(const std::string& s) {
    try {
        (void)parse_rational(s);
        return s.find('/') == std::string::npos;
    } catch (const Error&) {
        return false;
    }
}

std::vector<std::string> infer_domain(const CsvTable& table, std::size_t column) {
    std::set<std::string> distinct;
    for (const auto& row : table.rows) {
        distinct.insert(row[column]);
    }
    std::vector<std::string> values(distinct.begin(), distinct.end());
    if (std::all_of(values.begin(), values.end(), is_number)) {
        std::stable_sort(values.begin(), values.end(), [](const std::string& a, const std::string& b) {
            return parse_rational(a) < parse_rational(b);
        });
    }
    return values;
}

FeatureSpace infer_space(const CsvTable& table, std::size_t feature_columns) {
    if (table.rows.empty()) {
        fail(ErrorKind::Input, "CSV has a header but no rows");
    }
    std::vector<std::string> names(table.header.begin(),
                                   table.header.begin() + static_cast<std::ptrdiff_t>(feature_columns));
    std::vector<std::vector<std::string>> domains;
    for (std::size_t c = 0; c < feature_columns; ++c) {
        domains.push_back(infer_domain(table, c));
    }
    return FeatureSpace::build(std::move(names), std::move(domains), infer_domain(table, feature_columns),
                               table.header[feature_columns]);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    }
    return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
    }
    return in;
}

void write_header(std::ostream& out, const FeatureSpace& space) {
    for (const auto& name : space.feature_names()) {
        out << name << ',';
    }
    out << space.class_name();
}

}  // namespace

ExactDistribution read_distribution_csv(std::istream& in) {
    const CsvTable table = read_table(in);
    if (table.header.size() < 3 || table.header.back() != "p") {
        fail(ErrorKind::Input, "distribution CSV header must be feat1,...,featm,class,p");
    }
    const std::size_t m = table.header.size() - 2;
    const FeatureSpace space = infer_space(table, m);
    std::vector<ProbabilityRow> rows;
    rows.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& fields = table.rows[r];
        ProbabilityRow row;
        row.values.resize(m);
        for (std::size_t c = 0; c < m; ++c) {
            row.values[c] = space.value_index(c, fields[c]);
        }
        row.y = space.class_index(fields[m]);
        try {
            row.p = parse_rational(fields[m + 1]);
        } catch (const Error& e) {
            fail(ErrorKind::Input, "line " + std::to_string(table.line_numbers[r]) + ": " + e.what());
        }
        rows.push_back(std::move(row));
    }
    return exact_from_rows(space, rows);
}

ExactDistribution load_distribution_csv(const std::filesystem::path& path) {
    auto in = open_for_read(path);
    return read_distribution_csv(in);
}

void write_distribution_csv(std::ostream& out, const ExactDistribution& dist) {
    const FeatureSpace& space = dist.space();
    write_header(out, space);
    out << ",p\n";
    for (const Cell& c : dist.cells()) {
        for (std::size_t i = 0; i < space.feature_count(); ++i) {
            out << space.domain(i)[space.unpack(c.key, i)] << ',';
        }
        out << space.class_domain()[c.y] << ',' << to_literal(Rational(c.weight, dist.total())) << '\n';
    }
}

void save_distribution_csv(const std::filesystem::path& path, const ExactDistribution& dist) {
    std::ostringstream buffer;
    write_distribution_csv(buffer, dist);
    write_file(path, buffer.str());
}

Dataset read_dataset_csv(std::istream& in) {
    const CsvTable table = read_table(in);
    if (table.header.size() < 2) {
        fail(ErrorKind::Input, "dataset CSV header must be feat1,...,featm,class");
    }
    Dataset data(infer_space(table, table.header.size() - 1));
    for (const auto& fields : table.rows) {
        data.add_named(std::span(fields).first(fields.size() - 1), fields.back());
    }
    return data;
}

Dataset read_dataset_csv(std::istream& in, const FeatureSpace& space) {
    const CsvTable table = read_table(in);
    std::vector<std::string> expected = space.feature_names();
    expected.push_back(space.class_name());
    if (table.header != expected) {
        fail(ErrorKind::Input, "dataset CSV header does not match the declared feature space");
    }
    Dataset data(space);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& fields = table.rows[r];
        try {
            data.add_named(std::span(fields).first(fields.size() - 1), fields.back());
        } catch (const Error& e) {
            fail(ErrorKind::Input, "line " + std::to_string(table.line_numbers[r]) + ": " + e.what());
        }
    }
    return data;
}

Dataset load_dataset_csv(const std::filesystem::path& path) {
    auto in = open_for_read(path);
    return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    const FeatureSpace& space = data.space();
    write_header(out, space);
    out << '\n';
    for (std::size_t r = 0; r < data.size(); ++r) {
        const auto values = data.values(r);
        for (std::size_t i = 0; i < values.size(); ++i) {
            out << space.domain(i)[values[i]] << ',';
        }
        out << space.class_domain()[data.class_of(r)] << '\n';
    }
}

void save_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
    std::ostringstream buffer;
    write_dataset_csv(buffer, data);
    write_file(path, buffer.str());
}

std::string read_file(const std::filesystem::path& path) {
    auto in = open_for_read(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    auto out = open_for_write(path);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
        fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
    }
}

std::string content_digest(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &length, EVP_sha256(), nullptr) != 1) {
        fail(ErrorKind::Invariant, "SHA-256 digest failed");
    }
    std::ostringstream hex;
    hex << "sha256:";
    for (unsigned int k = 0; k < length; ++k) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
    }
    return hex.str();
}

std::string distribution_digest(const ExactDistribution& dist) {
    std::ostringstream buffer;
    write_distribution_csv(buffer, dist);
    return content_digest(buffer.str());
}

std::string dataset_digest(const Dataset& data) {
    std::ostringstream buffer;
    write_dataset_csv(buffer, data);
    return content_digest(buffer.str());
}

}  // namespace ctxscope
