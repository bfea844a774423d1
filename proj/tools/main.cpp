#include <iostream>

#include "qheat/cli.hpp"

int main(int argc, char** argv) {
    return qheat::cli_dispatch(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
