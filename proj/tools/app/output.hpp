#pragma once

#include <cocyclelab/symbolic.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace cocyclelab::app {

std::string version_string();

// Doubles as JSON numbers; non-finite values become the strings "inf",
// "-inf" and "nan".
nlohmann::json number(double v);

nlohmann::json point_json(const SymbolicPoint& x);

// Writes to a temporary file in the same directory, then renames over the
// target. Throws IoError.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// Indented JSON with a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace cocyclelab::app
