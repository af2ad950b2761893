#include "weldcrack/dataset.hpp"

#include <fstream>

#include "weldcrack/numfmt.hpp"
#include <sstream>

namespace weldcrack {

std::string format_number(double v) {
    return format_sig(v, 9);
}

void write_csv(std::ostream& os, const Dataset& data) {
    os << kCsvHeader << "\n";
    for (const auto& s : data) {
        const auto a = s.params.as_array();
        for (double v : a) os << format_number(v) << ",";
        os << static_cast<int>(s.label) << "," << to_string(s.source) << ","
           << format_number(s.weight) << "\n";
    }
}

void write_csv_file(const std::string& path, const Dataset& data) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open '" + path + "' for writing");
    write_csv(f, data);
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double(const std::string& s, int line_no, const char* what) {
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw UsageError("line " + std::to_string(line_no) + ": bad " + what + " value '" + s + "'");
    }
}

}  // namespace

Dataset read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw UsageError("empty file: missing CSV header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        throw UsageError("schema error: expected header '" + std::string(kCsvHeader) + "', got '" +
                         line + "'");

    Dataset data;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_row(line);
        if (fields.size() != 12)
            throw UsageError("line " + std::to_string(line_no) + ": expected 12 fields, got " +
                             std::to_string(fields.size()));
        LabeledSample s;
        std::array<double, WeldParameters::kDim> a{};
        for (int i = 0; i < WeldParameters::kDim; ++i)
            a[i] = parse_double(fields[i], line_no, kParameterNames[i]);
        s.params = WeldParameters::from_array(a);
        if (fields[9] == "0") s.label = Label::not_cracked;
        else if (fields[9] == "1") s.label = Label::cracked;
        else
            throw UsageError("line " + std::to_string(line_no) + ": label must be 0 or 1, got '" +
                             fields[9] + "'");
        try {
            s.source = source_from_string(fields[10]);
        } catch (const UsageError&) {
            throw UsageError("line " + std::to_string(line_no) + ": unknown source '" + fields[10] +
                             "'");
        }
        s.weight = parse_double(fields[11], line_no, "weight");
        if (!(s.weight > 0.0))
            throw UsageError("line " + std::to_string(line_no) + ": weight must be positive");
        data.push_back(std::move(s));
    }
    return data;
}

Dataset read_csv_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open '" + path + "' for reading");
    return read_csv(f);
}

}  // namespace weldcrack
