#include "localis/experiment.hpp"
#include "localis/verify.hpp"
#include "localis/version.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"operator localization laboratory"};
  app.set_version_flag("--version", std::string(localis::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("config", config_path, "JSON experiment config")->required();

  std::string suite;
  CLI::App* verify = app.add_subcommand("verify", "run a property suite");
  verify->add_option("suite", suite, "group|representation|localization|synthesis|all")
      ->required();

  std::string field_dir;
  bool csv = false;
  CLI::App* exp = app.add_subcommand("export", "convert a saved field directory");
  exp->add_option("field-dir", field_dir, "saved symbol/operator field directory")->required();
  exp->add_flag("--csv", csv, "emit one CSV per block plus an index");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return localis::run_experiment(localis::parse_config(config_path));
    if (verify->parsed()) {
      const std::vector<localis::PropertyResult> results = localis::run_suite(suite);
      std::cout << localis::verify_report_json(results) << "\n";
      for (const localis::PropertyResult& r : results)
        if (!r.passed) return 2;
      return 0;
    }
    if (exp->parsed()) {
      if (!csv) {
        std::cerr << "export: no output format selected (pass --csv)\n";
        return 1;
      }
      localis::export_field_csv(field_dir);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "localis: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
