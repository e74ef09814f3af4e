#include "channelstab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "channelstab/errors.hpp"

namespace cstab {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json complex_json(cd z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json complex_json(const CVec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(complex_json(v(i)));
  return a;
}

cd complex_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::Config, "complex value must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

CVec cvec_from_json(const nlohmann::json& j) {
  CVec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(Eigen::Index(i)) = complex_from_json(j[i]);
  return v;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Config, "cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw Error(ErrorKind::Config, "cannot write " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Config, "cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Config, path.string() + ": " + e.what());
  }
}

}  // namespace cstab
