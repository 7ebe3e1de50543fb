// Command-line driver: scarlet synthesize|attribute|sample|train|eval|e2e
//   --config PATH [--set section.key=value]...

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "scarlet/pipeline.hpp"

namespace {

int report_error(const std::string& command, scarlet::ErrorCode code, const std::string& message,
                 const std::string& context) {
  nlohmann::json err = {{"command", command},
                        {"error", std::string(scarlet::to_string(code))},
                        {"message", message}};
  if (!context.empty()) err["context"] = context;
  std::cerr << err.dump() << std::endl;
  return scarlet::exit_code_for(code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Utility-driven retriever training pipeline"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::vector<std::string> overrides;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"synthesize", "Build shared contexts and synthesize filtered training data"},
      {"attribute", "Attribute passage utility by perturbing the scorer's context"},
      {"sample", "Cluster utility scores into positive/negative training pairs"},
      {"train", "Train the hashed encoder on emitted pairs"},
      {"eval", "Run the GTI benchmark and held-out retrieval evaluation"},
      {"e2e", "Run every stage in order"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Configuration file")->required();
    sub->add_option("--set", overrides, "Override, e.g. --set attribution.n=128");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 4;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    auto config = scarlet::Config::load(config_path);
    for (const auto& o : overrides) config.set(o);
    auto run = scarlet::RunConfig::from(config);
    auto summary = scarlet::run_command(command, run);
    std::cout << summary.dump(2) << std::endl;
    return 0;
  } catch (const scarlet::Error& e) {
    return report_error(command, e.code(), e.message(), e.context());
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"command", command}, {"error", "Internal"}, {"message", e.what()}}
                     .dump()
              << std::endl;
    return 1;
  }
}
