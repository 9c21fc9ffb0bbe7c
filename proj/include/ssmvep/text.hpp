#pragma once

#include <string>

namespace ssmvep {

// Floats in delimited-text exports are printed with 9 significant digits.
std::string g9(double x);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ssmvep
