#include "ssmvep/text.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ssmvep/errors.hpp"

namespace ssmvep {

std::string g9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_text_file: cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("read_text_file: read failed for " + path);
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_text_file: cannot open " + path);
  out << content;
  out.flush();
  if (!out) throw IoError("write_text_file: write failed for " + path);
}

}  // namespace ssmvep
