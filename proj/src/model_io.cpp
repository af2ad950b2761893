#include "weldcrack/model_io.hpp"

#include <fstream>

#include "weldcrack/numfmt.hpp"
#include <map>
#include <sstream>

namespace weldcrack {

void write_params_file(const std::string& path, const ModelParameters& theta,
                       const ParameterBounds& bounds) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open '" + path + "' for writing");
    f << "# weldcrack model parameters v1\n";
    const auto v = theta.as_array();
    for (int i = 0; i < ModelParameters::kDim; ++i) {
        const char* name = kModelParameterNames[i];
        f << name << " = " << format_full(v[i]) << "\n";
        f << name << "_lo = " << format_full(bounds.lo[i]) << "\n";
        f << name << "_hi = " << format_full(bounds.hi[i]) << "\n";
    }
}

ParamsFile read_params_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open '" + path + "' for reading");
    std::map<std::string, double> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string trimmed = line;
        const auto first = trimmed.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (trimmed[first] == '#') continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw UsageError("params file line " + std::to_string(line_no) + ": expected 'key = value'");
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = strip(trimmed.substr(0, eq));
        const std::string val = strip(trimmed.substr(eq + 1));
        try {
            size_t used = 0;
            const double x = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument("trailing");
            if (!kv.emplace(key, x).second)
                throw UsageError("params file line " + std::to_string(line_no) + ": duplicate key '" +
                                 key + "'");
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception&) {
            throw UsageError("params file line " + std::to_string(line_no) + ": bad value '" + val +
                             "'");
        }
    }

    ParamsFile out;
    std::array<double, ModelParameters::kDim> v{};
    for (int i = 0; i < ModelParameters::kDim; ++i) {
        const std::string name = kModelParameterNames[i];
        for (const std::string key : {name, name + "_lo", name + "_hi"}) {
            if (!kv.count(key)) throw UsageError("params file: missing key '" + key + "'");
        }
        v[i] = kv[name];
        out.bounds.lo[i] = kv[name + "_lo"];
        out.bounds.hi[i] = kv[name + "_hi"];
        kv.erase(name);
        kv.erase(name + "_lo");
        kv.erase(name + "_hi");
        if (!(out.bounds.lo[i] <= v[i] && v[i] <= out.bounds.hi[i]))
            throw UsageError("params file: " + name + " outside its own bounds");
    }
    if (!kv.empty()) throw UsageError("params file: unknown key '" + kv.begin()->first + "'");
    out.theta = ModelParameters::from_array(v);
    if (out.theta.delta <= 500.0) throw UsageError("params file: delta must exceed 500 degC");
    return out;
}

void write_expression_file(const std::string& path, const Expression& expr) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open '" + path + "' for writing");
    f << "# weldcrack expression v1 (prefix form over T1..T6)\n";
    f << expr.to_prefix() << "\n";
}

Expression read_expression_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open '" + path + "' for reading");
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        return Expression::from_prefix(line);
    }
    throw UsageError("expression file '" + path + "' holds no expression");
}

}  // namespace weldcrack
