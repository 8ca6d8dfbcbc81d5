#include <string>
#include <vector>

#include "cli/commands.hpp"

int main(int argc, char** argv) { return kdetrack::cli::run(std::vector<std::string>(argv, argv + argc)); }
