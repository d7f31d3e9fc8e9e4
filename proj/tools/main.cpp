#include <exception>
#include <iostream>

#include "common.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Inertial Levenberg-Marquardt experiment harness"};
  app.require_subcommand(1);

  cli::register_pde(app);
  cli::register_nn(app);
  cli::register_verify(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const cli::SuiteFailure& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
