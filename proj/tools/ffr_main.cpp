#include "ffr/cli/app.hpp"

#include <iostream>

int
main(int argc, char** argv)
{
    return ffr::cli::run(argc, argv, std::cout, std::cerr);
}
