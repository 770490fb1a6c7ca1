#include <iostream>

#include "growthlab/acceptance.hpp"

int main() {
    const int failures = growthlab::run_acceptance_and_print(std::cout);
    return failures == 0 ? 0 : 1;
}
