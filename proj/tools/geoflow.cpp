#include <CLI11.hpp>

#include "geoflow_cli.hpp"

int main(int argc, char** argv) {
  using namespace geoflow;
  CLI::App app{"geoflow: G2 structures, curvature symbols and geometric flows"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path, output;
  std::uint64_t seed = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON run configuration {command, params, output, seed}");
  auto* out_opt = app.add_option("--output", output, "output path prefix (writes <prefix>.csv / <prefix>.json)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  app.add_flag("--quiet", quiet, "suppress progress output");

  std::map<std::string, std::string> params_text;
  for (const auto& c : cli::commands()) {
    auto* sub = app.add_subcommand(c.name, c.summary);
    sub->add_option("--params", params_text[c.name], "inline JSON params object");
  }

  CLI11_PARSE(app, argc, argv);

  cli::RunOptions opt;
  std::string command;
  try {
    if (!config_path.empty()) {
      const auto cfg = cli::load_config(read_json_file(config_path));
      command = cfg.command;
      opt = cfg.options;
    }
    if (const auto subs = app.get_subcommands(); !subs.empty()) {
      const std::string name = subs.front()->get_name();
      if (!command.empty() && command != name)
        throw ValidationError("config command '" + command + "' conflicts with subcommand '" + name + "'");
      command = name;
      const auto& text = params_text[name];
      if (!text.empty()) {
        try {
          opt.params = Json::parse(text);
        } catch (const Json::parse_error& e) {
          throw ValidationError(std::string("--params is not valid JSON: ") + e.what());
        }
      }
    }
    if (command.empty()) throw ValidationError("no command given (use a subcommand or --config)");
  } catch (const ValidationError& e) {
    std::cout << Json{{"error", "ValidationError"}, {"message", e.what()}}.dump(2) << '\n';
    return cli::kValidation;
  }
  if (out_opt->count()) opt.output = output;
  if (seed_opt->count()) opt.seed = seed;
  opt.quiet = quiet;
  return cli::run(command, opt);
}
