#pragma once

#include <filesystem>
#include <string>

#include "channelstab/types.hpp"
#include "json.hpp"

namespace cstab {

// Shortest round-trip decimal form ("%.17g").
std::string fmt(double v);

nlohmann::json complex_json(cd z);
nlohmann::json complex_json(const CVec& v);
cd complex_from_json(const nlohmann::json& j);
CVec cvec_from_json(const nlohmann::json& j);

void ensure_dir(const std::filesystem::path& dir);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace cstab
