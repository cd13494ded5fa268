// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
//   acceptance [--quick] [--threads N] [--only 3,5]

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include "adapted_ot/acceptance.hpp"

int main(int argc, char** argv) {
    aot::AcceptanceOptions opt;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--quick") {
            opt.quick = true;
        } else if (a == "--threads" && i + 1 < argc) {
            opt.threads = std::atoi(argv[++i]);
        } else if (a == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string item;
            while (std::getline(ss, item, ',')) opt.only.push_back(std::stoi(item));
        } else {
            std::cerr << "usage: acceptance [--quick] [--threads N] [--only i,j]\n";
            return 2;
        }
    }
    const auto results = aot::run_acceptance(opt, [](const aot::CriterionResult& r) {
        std::cout << aot::format_result(r) << std::endl;
    });
    int failed = 0;
    for (const auto& r : results) failed += r.pass ? 0 : 1;
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
