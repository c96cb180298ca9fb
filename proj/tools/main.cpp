#include <string>
#include <vector>

#include "cogdist/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return cogdist::run_cli(args);
}
