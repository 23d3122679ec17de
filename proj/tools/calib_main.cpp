#include <iostream>
#include <string>
#include <vector>

#include "calib/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return calib::cli::dispatch(args, std::cout, std::cerr);
}
