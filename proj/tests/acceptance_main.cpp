// Acceptance gate: runs every criterion in full mode and prints one
// pass/fail line per criterion. Exit 0 when all pass, 2 otherwise.
#include <latept/acceptance.hpp>

#include <cstdlib>
#include <cstring>
#include <iomanip>
#include <iostream>

int main(int argc, char** argv) {
    bool quick = false;
    int threads = 1;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) quick = true;
        if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc)
            threads = std::atoi(argv[++i]);
    }

    bool all = true;
    for (const latept::CriterionResult& r : latept::run_acceptance(quick, threads)) {
        all = all && r.pass;
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << r.id << "  "
                  << r.name << "  (" << std::fixed << std::setprecision(2) << r.seconds
                  << "s)  " << r.detail << "\n"
                  << std::flush;
    }
    std::cout << (all ? "acceptance: all criteria passed" : "acceptance: FAILURES above")
              << "\n";
    return all ? 0 : 2;
}
