#include <iostream>
#include <string>
#include <vector>

#include "genmetrics/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return genmetrics::cli::run(args, std::cout, std::cerr);
}
