#pragma once

#include <string>

#include "weldcrack/expression.hpp"
#include "weldcrack/types.hpp"

namespace weldcrack {

/// Key-value model parameter file: one `name = value` line per constant plus
/// `name_lo` / `name_hi` bound lines, `#` comments, strict unknown-key checks.
void write_params_file(const std::string& path, const ModelParameters& theta,
                       const ParameterBounds& bounds = {});

struct ParamsFile {
    ModelParameters theta{};
    ParameterBounds bounds{};
};

ParamsFile read_params_file(const std::string& path);

/// Expression file: `#` comments plus one prefix-form expression line.
void write_expression_file(const std::string& path, const Expression& expr);
Expression read_expression_file(const std::string& path);

}  // namespace weldcrack
