#include <iostream>

#include "app.hpp"

int main(int argc, char** argv) {
    return thermoline::cli::main_impl(argc, argv, std::cout, std::cerr);
}
