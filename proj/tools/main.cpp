#include "app/commands.hpp"
#include "app/config.hpp"
#include "app/output.hpp"

#include <cocyclelab/errors.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace app = cocyclelab::app;

namespace {

// Leftover "--key value" / "--key=value" arguments become config overrides.
std::optional<app::Overrides> collect_overrides(const std::vector<std::string>& rest) {
  app::Overrides out;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const std::string& arg = rest[i];
    if (arg.rfind("--", 0) != 0 || arg.size() < 3) {
      std::cerr << "unexpected argument '" << arg << "'\n";
      return std::nullopt;
    }
    const std::string body = arg.substr(2);
    if (const auto eq = body.find('='); eq != std::string::npos) {
      out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    if (i + 1 >= rest.size()) {
      std::cerr << "override '" << arg << "' needs a value\n";
      return std::nullopt;
    }
    out.emplace_back(body, rest[++i]);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Experiments with linear cocycles over subshifts of finite type"};
  cli.set_version_flag("--version", app::version_string());
  std::string command;
  std::string config_path;
  std::optional<std::string> out_dir;
  cli.add_option("command", command, "Command to run")
      ->required()
      ->check(CLI::IsMember(app::command_names()));
  cli.add_option("--config", config_path, "JSON experiment configuration")->required();
  cli.add_option("--out", out_dir, "Output directory (overrides output.dir)");
  cli.allow_extras();
  cli.footer("Further --key value pairs override config entries: plain keys address the\n"
             "params section, dotted keys (output.csv) any section.\n"
             "Exit codes: 0 success or Certified, 2 negative verdict, 3 inconclusive or\n"
             "budget exhausted, 1 error.");
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : app::kExitError;
  }
  const auto overrides = collect_overrides(cli.remaining());
  if (!overrides) return app::kExitError;

  try {
    const app::ExperimentConfig cfg = app::parse_config(config_path, command, *overrides, out_dir);
    const int code = app::run(cfg);
    if (code == app::kExitError) {
      std::cerr << "cocyclelab: " << command << " failed; see "
                << (std::filesystem::path(cfg.out_dir) / (command + ".json")).string() << "\n";
    }
    return code;
  } catch (const std::exception& e) {
    const auto doc = app::error_document(command, nullptr, e);
    std::cerr << app::dump(doc);
    if (out_dir) {
      try {
        app::write_atomic(std::filesystem::path(*out_dir) / (command + ".json"), app::dump(doc));
      } catch (const std::exception& io) {
        std::cerr << "cocyclelab: " << io.what() << "\n";
      }
    }
    return app::kExitError;
  }
}
