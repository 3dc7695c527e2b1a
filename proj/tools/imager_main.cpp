#include <string>
#include <vector>

#include "uqi/io.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return uqi::run_cli(args);
}
