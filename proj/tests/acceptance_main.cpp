#include <iostream>

#include "smib/acceptance.h"
#include "smib/config.h"

int main() {
    const bool ok = smib::run_acceptance(smib::default_config(), std::cout);
    return ok ? 0 : 4;
}
