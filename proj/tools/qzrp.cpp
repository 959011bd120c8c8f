#include <iostream>

#include "qzrp/cli.hpp"

int main(int argc, char** argv) {
  const auto result = qzrp::cli::run(std::vector<std::string>(argv + 1, argv + argc));
  std::cout << result.out;
  if (!result.err.empty()) std::cerr << "qzrp: " << result.err << '\n';
  return result.exit_code;
}
