#include <iostream>
#include <string>
#include <vector>

#include "sspert/cli.hpp"

int main(int argc, char** argv) {
    return sspert::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
