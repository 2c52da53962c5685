#pragma once

#include <string>

#include "macjscc/discrete.hpp"
#include "macjscc/mixture.hpp"

namespace macjscc {

// JSON document formats:
//   pmf       {"vars": [{"name": ..., "size": ...}, ...], "probs": [...]}
//             with probs row-major in variable order;
//   kernel    {"inputs": [vars...], "output": {"name", "size"},
//              "rows": [[...], ...]} one stochastic row per input state;
//   codebook  {"version": "mcb-1", "source": <pmf>, "users": [u1, u2]}
//             where each user is a per-symbol array of {"w", "mean", "var"}.
// Malformed documents raise input_error; loaded codebooks are validated.

std::string pmf_to_json(const Pmf& pmf);
Pmf pmf_from_json(const std::string& text);

std::string kernel_to_json(const Kernel& kernel);
Kernel kernel_from_json(const std::string& text);

std::string codebook_to_json(const MixtureCodebook& cb);
MixtureCodebook codebook_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace macjscc
