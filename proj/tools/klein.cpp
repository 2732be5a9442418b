#include <iostream>

#include "klein/cli_io.hpp"

int main(int argc, char** argv)
{
    return klein::cli::run(argc, argv, std::cout, std::cerr);
}
