#include <iostream>
#include <string>
#include <vector>

#include "seleval/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return seleval::seleval_main(std::move(args), std::cout, std::cerr);
}
