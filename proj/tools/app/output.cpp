#include "output.hpp"

#include <cocyclelab/errors.hpp>

#include <cmath>
#include <fstream>

#include <unistd.h>

#ifndef COCYCLELAB_VERSION
#define COCYCLELAB_VERSION "0.0.0"
#endif

namespace cocyclelab::app {

std::string version_string() { return std::string("cocyclelab ") + COCYCLELAB_VERSION; }

nlohmann::json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::json point_json(const SymbolicPoint& x) {
  return {{"left_cycle", format_word(x.left_cycle())},
          {"core", format_word(x.core())},
          {"core_start", x.core_start()},
          {"right_cycle", format_word(x.right_cycle())}};
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create '" + path.parent_path().string() + "': " + ec.message());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::kIoError, "short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorCode::kIoError, "cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace cocyclelab::app
